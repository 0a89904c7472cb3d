"""Dense statevector simulation of brickwork random circuits on qudit chains.

Brick convention: layer ``t`` (1-based) with ``t`` odd acts on bonds
``(0,1), (2,3), ...``; ``t`` even acts on ``(1,2), (3,4), ...`` and, on a
ring, on the wrap-around bond ``(L-1, 0)``.  A bond is named by its left
site ``b``, i.e. it couples ``b`` and ``(b+1) mod L``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, InvalidArgument, ResourceLimitError
from .randmat import sample_haar_unitary
from .rng import RngLike, as_generator

DEFAULT_MEM_CAP = 2 * 1024**3
_BYTES_PER_AMPLITUDE = 16
# Working copies alive during a gate application plus the reduced-matrix step.
_WORKING_COPIES = 3


@dataclass(frozen=True)
class CircuitGeometry:
    site_dims: tuple
    boundary: str = "ring"

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        object.__setattr__(self, "site_dims", dims)
        if not dims:
            raise InvalidArgument("chain must have at least one site")
        if any(d < 1 for d in dims):
            raise InvalidArgument(f"site dimensions must be positive: {dims}")
        if self.boundary not in ("ring", "open"):
            raise InvalidArgument(f"boundary must be 'ring' or 'open', got {self.boundary!r}")
        if self.boundary == "ring" and (len(dims) % 2 or len(dims) < 2):
            raise InvalidArgument(f"a brickwork ring needs an even number of sites, got L={len(dims)}")

    @classmethod
    def uniform(cls, q: int, L: int, boundary: str = "ring") -> "CircuitGeometry":
        return cls((q,) * L, boundary)

    @classmethod
    def alternating(cls, q: int, Q: int, L: int, boundary: str = "ring") -> "CircuitGeometry":
        """Even sites have dimension ``q``, odd sites ``Q``."""
        return cls(tuple(q if k % 2 == 0 else Q for k in range(L)), boundary)

    @property
    def L(self) -> int:
        return len(self.site_dims)

    @property
    def hilbert_dim(self) -> int:
        return int(np.prod(self.site_dims, dtype=object))

    def memory_bytes(self) -> int:
        return _WORKING_COPIES * _BYTES_PER_AMPLITUDE * self.hilbert_dim

    def check_memory(self, mem_cap: Optional[int] = DEFAULT_MEM_CAP) -> None:
        if mem_cap is not None and self.memory_bytes() > mem_cap:
            raise ResourceLimitError(
                f"state of dimension {self.hilbert_dim} needs ~{self.memory_bytes()} bytes, cap is {mem_cap}"
            )

    def partner(self, b: int) -> int:
        return (b + 1) % self.L

    def bonds(self, layer: int) -> list[int]:
        """Left sites of the bonds carrying gates in ``layer`` (1-based)."""
        if layer < 1:
            raise InvalidArgument(f"layers are numbered from 1, got {layer}")
        first = 0 if layer % 2 == 1 else 1
        last = self.L if self.boundary == "ring" else self.L - 1
        return list(range(first, last, 2))


@dataclass(frozen=True)
class IntervalSpec:
    """A contiguous interval of ``length`` sites starting at ``start`` (wrapping on a ring)."""

    start: int
    length: int

    def sites(self, geometry: CircuitGeometry) -> list[int]:
        if self.length < 0 or self.length > geometry.L:
            raise InvalidArgument(f"interval length {self.length} does not fit in L={geometry.L}")
        if geometry.boundary == "open":
            if self.start < 0 or self.start + self.length > geometry.L:
                raise InvalidArgument("interval leaves the open chain")
            return list(range(self.start, self.start + self.length))
        return [(self.start + k) % geometry.L for k in range(self.length)]

    def validate(self, geometry: CircuitGeometry, T: int) -> None:
        """Require an even length and, for ``T >= 1``, both ends straddled by layer-``T`` gates."""
        self.sites(geometry)
        if self.length % 2:
            raise InvalidArgument(f"interval length must be even, got {self.length}")
        if T < 1 or self.length in (0, geometry.L):
            return
        layer_bonds = set(geometry.bonds(T))
        left = (self.start - 1) % geometry.L if geometry.boundary == "ring" else self.start - 1
        right = self.start + self.length - 1
        if geometry.boundary == "ring":
            right %= geometry.L
        if left not in layer_bonds or right not in layer_bonds:
            raise InvalidArgument(
                f"interval [{self.start}, {self.start + self.length}) is not straddled by layer-{T} gates; "
                f"start must have parity {1 if T % 2 else 0}"
            )

    @classmethod
    def aligned(cls, length: int, T: int, L: int) -> "IntervalSpec":
        """Roughly centred interval whose ends are straddled by layer-``T`` gates."""
        start = (L - length) // 2
        if T >= 1 and start % 2 != T % 2:
            start = start - 1 if start > 1 else start + 1
        return cls(start, length)


def lightcone_free_sites(length: int, T: int) -> int:
    """Smallest even ring size for which the depth-``T`` lightcone of the interval does not wrap."""
    L = length + 2 * T + 2
    return L + (L % 2)


class StateVector:
    """Amplitudes of a chain of qudits stored as a tensor of shape ``site_dims``."""

    def __init__(self, geometry: CircuitGeometry, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        if amplitudes.size != geometry.hilbert_dim:
            raise DimensionMismatch(f"expected {geometry.hilbert_dim} amplitudes, got {amplitudes.size}")
        self.geometry = geometry
        self.tensor = amplitudes.reshape(geometry.site_dims)

    @classmethod
    def product(cls, geometry: CircuitGeometry, mem_cap: Optional[int] = DEFAULT_MEM_CAP) -> "StateVector":
        geometry.check_memory(mem_cap)
        amps = np.zeros(geometry.site_dims, dtype=complex)
        amps[(0,) * geometry.L] = 1.0
        return cls(geometry, amps)

    @property
    def amplitudes(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensor))

    def copy(self) -> "StateVector":
        return StateVector(self.geometry, self.tensor.copy())


def apply_two_site_gate(state: StateVector, bond: int, gate: np.ndarray) -> StateVector:
    """Apply ``gate`` to sites ``(bond, bond+1 mod L)`` in place and return ``state``.

    The gate's row index runs over ``d_bond * d_partner`` with the left site
    as the slower index.
    """
    geo = state.geometry
    if not 0 <= bond < geo.L:
        raise InvalidArgument(f"bond {bond} outside chain of length {geo.L}")
    j = geo.partner(bond)
    if geo.boundary == "open" and j == 0:
        raise InvalidArgument(f"bond {bond} does not exist on an open chain")
    if geo.L == 1 or j == bond:
        raise InvalidArgument("a two-site gate needs two distinct sites")
    di, dj = geo.site_dims[bond], geo.site_dims[j]
    gate = np.asarray(gate)
    if gate.shape != (di * dj, di * dj):
        raise DimensionMismatch(f"gate shape {gate.shape} does not match bond dimension {di * dj}")
    dims = geo.site_dims
    if j == bond + 1:
        left = int(np.prod(dims[:bond], dtype=np.int64))
        right = int(np.prod(dims[j + 1:], dtype=np.int64))
        out = np.matmul(gate, state.tensor.reshape(left, di * dj, right))
        state.tensor = out.reshape(dims)
    else:
        # wrap-around bond (L-1, 0): gate index order is (site L-1, site 0)
        middle = int(np.prod(dims[1:-1], dtype=np.int64))
        t = state.tensor.reshape(dj, middle, di).transpose(2, 0, 1).reshape(di * dj, middle)
        t = (gate @ t).reshape(di, dj, middle).transpose(1, 2, 0)
        state.tensor = np.ascontiguousarray(t).reshape(dims)
    return state


Circuit = list  # list of layers; each layer is a list of (bond, gate)


def sample_circuit(geometry: CircuitGeometry, T: int, rng: RngLike) -> Circuit:
    """Draw the ``T`` layers of independent Haar gates, in a fixed order."""
    if T < 0:
        raise InvalidArgument(f"depth must be nonnegative, got {T}")
    gen = as_generator(rng)
    layers = []
    for t in range(1, T + 1):
        layer = []
        for b in geometry.bonds(t):
            d = geometry.site_dims[b] * geometry.site_dims[geometry.partner(b)]
            layer.append((b, sample_haar_unitary(d, gen)))
        layers.append(layer)
    return layers


GateHook = Callable[[int, int, np.ndarray], np.ndarray]


def apply_circuit(state: StateVector, circuit: Circuit, hook: Optional[GateHook] = None) -> StateVector:
    """Apply sampled layers to ``state``; ``hook(layer, bond, gate)`` may replace a gate."""
    for t, layer in enumerate(circuit, start=1):
        for b, gate in layer:
            if hook is not None:
                gate = hook(t, b, gate)
            apply_two_site_gate(state, b, gate)
    return state


def run_brickwork(
    geometry: CircuitGeometry,
    T: int,
    rng: RngLike,
    hook: Optional[GateHook] = None,
    mem_cap: Optional[int] = DEFAULT_MEM_CAP,
) -> StateVector:
    """Evolve ``|0...0>`` through ``T`` brickwork layers of Haar gates drawn from ``rng``."""
    geometry.check_memory(mem_cap)
    state = StateVector.product(geometry, mem_cap=None)
    return apply_circuit(state, sample_circuit(geometry, T, rng), hook)


def bell_pair(q: int = 2) -> StateVector:
    geo = CircuitGeometry.uniform(q, 2)
    amps = np.eye(q, dtype=complex).reshape(-1) / np.sqrt(q)
    return StateVector(geo, amps)


def swap_gate(d: int, d2: int | None = None) -> np.ndarray:
    """Permutation taking ``|a>|b>`` (dims ``d``, ``d2``) to ``|b>|a>``."""
    d2 = d if d2 is None else d2
    s = np.zeros((d * d2, d * d2))
    for a in range(d):
        for b in range(d2):
            s[b * d + a, a * d2 + b] = 1.0
    return s
