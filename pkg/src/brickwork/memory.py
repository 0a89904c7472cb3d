"""Does a subsystem's reduced state remember a modified gate?

Two settings:

* a bipartite warmup: a Haar state on ``q x Q``, reduced to the ``Q`` factor,
  compared with the same state after a fixed unitary ``V``;
* a brickwork chain with alternating site dimensions (even sites ``q``, odd
  sites ``Q``) in which one brick ``U`` is replaced by ``V U``.

Both circuits of a trial share every sampled gate, so identical inputs give
bitwise-identical reduced states and fidelity exactly 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Optional

import numpy as np

from .circuit import (
    DEFAULT_MEM_CAP,
    CircuitGeometry,
    IntervalSpec,
    StateVector,
    apply_circuit,
    lightcone_free_sites,
    sample_circuit,
    swap_gate,
)
from .density import purified_fidelity, reduce, state_fidelity
from .ensemble import EnsembleEstimate, run_trials
from .errors import DimensionMismatch, InvalidArgument
from .experiments import ensemble_average
from .randmat import STRUCTURE_TOL, is_unitary, sample_haar_unitary
from .rng import RngLike, RngStream, root_stream

PLACEMENTS = ("inside", "outside", "adjacent")


def traceless_unitary(d: int, rng: RngLike) -> np.ndarray:
    """``U diag(exp(2 pi i k/d)) U^dag`` with Haar ``U``; its trace vanishes for ``d >= 2``."""
    U = sample_haar_unitary(d, rng)
    return (U * np.exp(2j * np.pi * np.arange(d) / d)) @ U.conj().T


def _check_unitary(V: np.ndarray, d: int) -> np.ndarray:
    V = np.asarray(V, dtype=complex)
    if V.shape != (d, d):
        raise DimensionMismatch(f"V has shape {V.shape}, expected ({d}, {d})")
    if not is_unitary(V, STRUCTURE_TOL):
        raise InvalidArgument("V is not unitary")
    return V


def _is_identity(V: np.ndarray) -> bool:
    return np.array_equal(V, np.eye(V.shape[0]))


# -- bipartite warmup --------------------------------------------------------

def _reduce_to_big(psi: np.ndarray, q: int, Q: int) -> np.ndarray:
    m = psi.reshape(q, Q)
    return m.T @ m.conj()


def _purification(psi: np.ndarray, q: int, Q: int) -> np.ndarray:
    return psi.reshape(q, Q).T


def _warmup_trial(i: int, *, q: int, Q: int, V: np.ndarray, root: RngStream) -> float:
    U = sample_haar_unitary(q * Q, root.substream(i))
    psi = U[:, 0]
    rho = _reduce_to_big(psi, q, Q)
    sigma = _reduce_to_big(V @ psi, q, Q)
    if np.array_equal(rho, sigma):
        return 1.0
    return purified_fidelity(_purification(psi, q, Q), _purification(V @ psi, q, Q))


def warmup_fidelity_mc(q: int, Q: int, V: np.ndarray, trials: int, rng: RngLike, workers: int = 1) -> EnsembleEstimate:
    """Average fidelity of ``tr_q psi`` and ``tr_q (V psi)`` over Haar ``psi`` on ``q x Q``.

    ``V`` acts on the product space with the ``q`` factor as the slower index.
    """
    V = _check_unitary(V, q * Q)
    root = root_stream(rng)
    fn = partial(_warmup_trial, q=q, Q=Q, V=V, root=root)
    return EnsembleEstimate.from_samples(run_trials(fn, trials, workers=workers), seed=root.seed)


def partial_trace_big(V: np.ndarray, q: int, Q: int) -> np.ndarray:
    """``tr_Q V`` as a ``q x q`` matrix."""
    return np.einsum("aibi->ab", np.asarray(V).reshape(q, Q, q, Q))


def warmup_prediction(q: int, Q: int, V: np.ndarray) -> float:
    """Replica prediction: ``||tr_Q V||_1 / (qQ)`` when ``q < Q``, else 1."""
    V = _check_unitary(V, q * Q)
    if q >= Q:
        return 1.0
    s = np.linalg.svd(partial_trace_big(V, q, Q), compute_uv=False)
    return float(s.sum() / (q * Q))


# -- brickwork perturbation ---------------------------------------------------

@dataclass(frozen=True)
class WedgeRule:
    """Classifies bricks of a depth-``T`` circuit relative to an interval.

    A brick at layer ``t`` is inside when both its sites lie in the interval
    shrunk by ``T - t`` sites at each end, outside when neither does, and
    adjacent otherwise.
    """

    geometry: CircuitGeometry
    interval: IntervalSpec
    T: int

    def _in_shrunk(self, site: int, shrink: int) -> bool:
        L, s, l = self.geometry.L, self.interval.start, self.interval.length
        rel = (site - s) % L if self.geometry.boundary == "ring" else site - s
        return shrink <= rel < l - shrink

    def classify(self, layer: int, bond: int) -> str:
        if not 1 <= layer <= self.T:
            raise InvalidArgument(f"layer {layer} outside 1..{self.T}")
        k = self.T - layer
        hits = [self._in_shrunk(x, k) for x in (bond, self.geometry.partner(bond))]
        if all(hits):
            return "inside"
        return "adjacent" if any(hits) else "outside"

    def bricks(self, placement: str) -> list[tuple[int, int]]:
        """All ``(layer, bond)`` pairs with the given placement."""
        return [
            (t, b)
            for t in range(1, self.T + 1)
            for b in self.geometry.bonds(t)
            if self.classify(t, b) == placement
        ]


@dataclass(frozen=True)
class Perturbation:
    layer: int
    bond: int
    V: np.ndarray

    def validate(self, geometry: CircuitGeometry, T: int) -> None:
        if not 1 <= self.layer <= T:
            raise InvalidArgument(f"perturbation layer {self.layer} is outside 1..{T}")
        if self.bond not in geometry.bonds(self.layer):
            raise InvalidArgument(f"no brick on bond {self.bond} in layer {self.layer}")
        d = geometry.site_dims[self.bond] * geometry.site_dims[geometry.partner(self.bond)]
        _check_unitary(self.V, d)

    def hook(self, t: int, b: int, gate: np.ndarray) -> np.ndarray:
        return self.V @ gate if (t, b) == (self.layer, self.bond) else gate

    def placement(self, geometry: CircuitGeometry, interval: IntervalSpec, T: int) -> str:
        return WedgeRule(geometry, interval, T).classify(self.layer, self.bond)


def phase_boundary(q: float, Q: float, l: float) -> float:
    """Depth ``T*`` where ``q^{2T}`` overtakes ``(qQ)^{l/2}``."""
    if q < 2 or Q < 2:
        raise InvalidArgument("q and Q must be at least 2")
    return l * (math.log(q) + math.log(Q)) / (4 * math.log(q))


def _memory_trial(i: int, *, geometry, sites, T, pert: Perturbation, root: RngStream, mem_cap) -> float:
    circuit = sample_circuit(geometry, T, root.substream(i))
    base = StateVector.product(geometry, mem_cap)
    plain = apply_circuit(base.copy(), circuit)
    if _is_identity(pert.V):
        return 1.0
    kicked = apply_circuit(base, circuit, pert.hook)
    if np.array_equal(reduce(plain, sites).matrix, reduce(kicked, sites).matrix):
        return 1.0
    return state_fidelity(plain, kicked, sites)


@dataclass(frozen=True)
class MemoryResult:
    estimate: EnsembleEstimate
    placement: str
    phase: str
    phase_boundary: float
    samples: np.ndarray

    def as_dict(self) -> dict:
        return {
            **self.estimate.as_dict(),
            "placement": self.placement,
            "phase": self.phase,
            "phase_boundary": self.phase_boundary,
        }


def memory_experiment(
    q: int,
    Q: int,
    L: int,
    interval: IntervalSpec,
    T: int,
    perturbation: Perturbation,
    trials: int,
    rng: RngLike,
    *,
    workers: int = 1,
    mem_cap: Optional[int] = DEFAULT_MEM_CAP,
    geometry: Optional[CircuitGeometry] = None,
) -> MemoryResult:
    """Mean fidelity between the interval's states with and without ``V`` applied after one brick."""
    geo = geometry or CircuitGeometry.alternating(q, Q, L)
    interval.validate(geo, T)
    perturbation.validate(geo, T)
    geo.check_memory(mem_cap)
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    root = root_stream(rng)
    fn = partial(
        _memory_trial,
        geometry=geo,
        sites=interval.sites(geo),
        T=T,
        pert=perturbation,
        root=root,
        mem_cap=mem_cap,
    )
    F = np.asarray(run_trials(fn, trials, workers=workers), dtype=float)
    tstar = phase_boundary(q, Q, interval.length)
    return MemoryResult(
        EnsembleEstimate.from_samples(F, seed=root.seed),
        perturbation.placement(geo, interval, T),
        "early" if T < tstar else "late",
        tstar,
        F,
    )


def mirror_perturbation(geometry: CircuitGeometry, interval: IntervalSpec, pert: Perturbation):
    """Reflect the chain about the interval's centre.

    Returns ``(mirrored_geometry, mirrored_perturbation)``.  Site ``x`` maps to
    ``2s + l - 1 - x``, which swaps the two sites of every brick, so ``V``
    becomes ``SWAP V SWAP`` and the site dimensions are reflected too.
    """
    L, s, l = geometry.L, interval.start, interval.length
    image = lambda x: (2 * s + l - 1 - x) % L
    dims = tuple(geometry.site_dims[image(x)] for x in range(L))
    geo = CircuitGeometry(dims, geometry.boundary)
    b = (2 * s + l - 2 - pert.bond) % L
    da, db = geometry.site_dims[pert.bond], geometry.site_dims[geometry.partner(pert.bond)]
    sw = swap_gate(da, db)
    V = sw @ pert.V @ sw.T
    return geo, Perturbation(pert.layer, b, V)


def renyi_phase_check(
    q: int,
    Q: int,
    l: int,
    T: int,
    trials: int,
    rng: RngLike,
    *,
    L: Optional[int] = None,
    slack: float = 2.0,
    workers: int = 1,
    mem_cap: Optional[int] = DEFAULT_MEM_CAP,
) -> dict:
    """Monte Carlo ``E[tr rho^2]`` against ``max((qQ)^{-l/2}, q^{-2T})``, within a factor ``slack``."""
    L = L or lightcone_free_sites(l, T)
    geo = CircuitGeometry.alternating(q, Q, L)
    interval = IntervalSpec.aligned(l, T, L)
    est = ensemble_average("purity", geo, interval, T, trials, rng, workers=workers, mem_cap=mem_cap)
    early, late = -2 * T * math.log(q), -l / 2 * math.log(q * Q)
    predicted = max(early, late)
    measured = math.log(est.mean)
    return {
        "q": q,
        "Q": Q,
        "l": l,
        "T": T,
        "L": L,
        "purity": est.as_dict(),
        "log_purity": measured,
        "log_early_branch": early,
        "log_late_branch": late,
        "dominant": "early" if early >= late else "late",
        "within_slack": abs(measured - predicted) <= math.log(slack),
    }
