"""Reduced density operators and the information quantities built on them.

Entropies are in nats.  Eigenvalues in ``[-1e-10, 0)`` are treated as
roundoff and clipped to zero; anything more negative raises
:class:`NotPositiveError`.
"""
from __future__ import annotations

import math
from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from .circuit import IntervalSpec, StateVector
from .errors import DimensionMismatch, InvalidArgument, NotPositiveError

CLIP_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8


def clip_spectrum(w: np.ndarray, tol: float = CLIP_TOL) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.size and w.min() < -tol:
        raise NotPositiveError(f"eigenvalue {w.min():.3e} is below -{tol:g}")
    return np.clip(w, 0.0, None)


class DensityOperator:
    """A Hermitian, PSD, trace-one matrix, optionally carrying its site dimensions.

    ``site_dims`` (when known) lets :func:`partial_trace` and
    :func:`mutual_information` address subsystems of the operator.
    """

    def __init__(self, matrix: np.ndarray, site_dims: Optional[Sequence[int]] = None):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgument(f"density operator must be square, got shape {m.shape}")
        if site_dims is not None:
            site_dims = tuple(int(d) for d in site_dims)
            if int(np.prod(site_dims, dtype=np.int64)) != m.shape[0]:
                raise DimensionMismatch(f"site dims {site_dims} do not multiply to {m.shape[0]}")
        self.matrix = m
        self.site_dims = site_dims

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues, clipped at zero."""
        return clip_spectrum(np.linalg.eigvalsh(self.matrix))

    def validate(self) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvalidArgument("density operator is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise InvalidArgument(f"trace is {np.trace(m).real}, expected 1")
        self.eigenvalues

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        return cls(np.eye(n) / n)

    @classmethod
    def pure(cls, psi: np.ndarray) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()))


Operator = Union[DensityOperator, np.ndarray]


def _matrix(rho: Operator) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _spectrum(rho: Operator) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.eigenvalues
    return clip_spectrum(np.linalg.eigvalsh(_matrix(rho)))


def _sites_of(state: StateVector, region) -> list[int]:
    if isinstance(region, IntervalSpec):
        return region.sites(state.geometry)
    sites = [int(s) for s in region]
    if len(set(sites)) != len(sites):
        raise InvalidArgument(f"repeated site in {sites}")
    if any(not 0 <= s < state.geometry.L for s in sites):
        raise InvalidArgument(f"site outside chain in {sites}")
    return sites


def _split(state: StateVector, sites: Sequence[int]) -> np.ndarray:
    """Amplitudes as a ``d_kept x d_rest`` matrix (kept sites in the given order)."""
    L = state.geometry.L
    kept = list(sites)
    rest = [k for k in range(L) if k not in set(kept)]
    t = np.transpose(state.tensor, kept + rest)
    d_kept = int(np.prod([state.geometry.site_dims[k] for k in kept], dtype=np.int64))
    return t.reshape(d_kept, -1)


def reduce(state: StateVector, region) -> DensityOperator:
    """Partial trace of ``|psi><psi|`` over the complement of ``region``."""
    sites = _sites_of(state, region)
    m = _split(state, sites)
    rho = m @ m.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(rho, [state.geometry.site_dims[k] for k in sites])


def reduced_spectrum(state: StateVector, region) -> np.ndarray:
    """Nonzero-part spectrum of the reduced state, from the smaller Gram matrix."""
    sites = _sites_of(state, region)
    if not sites:
        return np.ones(1)
    m = _split(state, sites)
    g = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.T @ m.conj()
    return clip_spectrum(np.linalg.eigvalsh(g))


def spectrum_purity(w: np.ndarray) -> float:
    return float(np.sum(np.asarray(w) ** 2))


def spectrum_entropy(w: np.ndarray) -> float:
    w = np.asarray(w)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def purity(rho: Operator) -> float:
    """``Tr rho^2``."""
    m = _matrix(rho)
    return float(np.sum(np.abs(m) ** 2))


def renyi2(rho: Operator) -> float:
    return -math.log(purity(rho))


def von_neumann(rho: Operator) -> float:
    return spectrum_entropy(_spectrum(rho))


def in_base(value: float, base: float) -> float:
    """Convert an entropy in nats to logarithm base ``base`` (e.g. ``q`` or 2)."""
    return value / math.log(base)


_ENTROPIES = {"vn": spectrum_entropy, "renyi2": lambda w: -math.log(spectrum_purity(w))}


def partial_trace(rho: DensityOperator, keep: Sequence[int]) -> DensityOperator:
    """Trace out every site of ``rho`` not listed in ``keep`` (positions within ``rho.site_dims``)."""
    if rho.site_dims is None:
        raise InvalidArgument("partial trace needs site dimensions")
    dims = rho.site_dims
    n = len(dims)
    keep = list(keep)
    drop = [k for k in range(n) if k not in keep]
    t = rho.matrix.reshape(dims + dims)
    perm = keep + drop
    t = np.transpose(t, perm + [n + k for k in perm])
    dk = int(np.prod([dims[k] for k in keep], dtype=np.int64))
    dd = int(np.prod([dims[k] for k in drop], dtype=np.int64))
    t = t.reshape(dk, dd, dk, dd)
    return DensityOperator(np.einsum("ajbj->ab", t), [dims[k] for k in keep])


def mutual_information(source, A: Sequence[int], B: Sequence[int], kind: str = "vn") -> float:
    """``S(A) + S(B) - S(AB)`` for a pure state or a density operator with site dims.

    ``kind`` selects von Neumann (``"vn"``) or Renyi-2 (``"renyi2"``) entropies.
    An empty region has zero entropy.
    """
    A, B = [int(a) for a in A], [int(b) for b in B]
    if set(A) & set(B):
        raise InvalidArgument(f"regions overlap: {sorted(set(A) & set(B))}")
    try:
        entropy = _ENTROPIES[kind]
    except KeyError:
        raise InvalidArgument(f"unknown entropy kind {kind!r}") from None
    if isinstance(source, StateVector):
        spec = lambda R: reduced_spectrum(source, R) if R else np.ones(1)
    else:
        spec = lambda R: partial_trace(source, R).eigenvalues if R else np.ones(1)
    if not A or not B:
        return 0.0
    return entropy(spec(A)) + entropy(spec(B)) - entropy(spec(A + B))


def trace_distance(rho: Operator, sigma: Operator) -> float:
    """``(1/2) ||rho - sigma||_1`` from the eigenvalues of the difference."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))


def psd_sqrt(rho: Operator) -> np.ndarray:
    m = _matrix(rho)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w = clip_spectrum(w)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: Operator, sigma: Operator) -> float:
    """``Tr sqrt( sqrt(rho) sigma sqrt(rho) )``."""
    a, b = _matrix(rho), _matrix(sigma)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    clip_spectrum(np.linalg.eigvalsh((b + b.conj().T) / 2))
    r = psd_sqrt(a)
    m = r @ b @ r
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    # sqrt(rho) sigma sqrt(rho) is PSD; its tiny negative roundoff is discarded here
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def purified_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Fidelity of ``a a^dag`` and ``b b^dag`` as ``||a^dag b||_1``.

    Avoids square roots of near-zero eigenvalues, so the result stays within
    roundoff of ``[0, 1]`` even for rank-deficient states.
    """
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"row dimensions differ: {a.shape} vs {b.shape}")
    return float(np.sum(np.linalg.svd(a.conj().T @ b, compute_uv=False)))


def state_fidelity(a: StateVector, b: StateVector, region) -> float:
    """Fidelity of the reduced states of two pure states on the same ``region``."""
    if a.geometry != b.geometry:
        raise DimensionMismatch("states live on different chains")
    sites = _sites_of(a, region)
    return purified_fidelity(_split(a, sites), _split(b, sites))


def distance_to_maximally_mixed(rho: Operator) -> float:
    w = _spectrum(rho)
    return 0.5 * float(np.sum(np.abs(w - 1.0 / w.size)))
