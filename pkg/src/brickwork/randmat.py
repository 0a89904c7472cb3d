"""Seeded random matrices and the Haar / Gaussian moment identities.

Haar unitaries come from the Ginibre + QR construction with the phases of the
triangular factor's diagonal absorbed into Q; without that correction the
output is orthonormal but not Haar distributed.

Gaussian conventions follow the projector-overlap lemma: real variables
``x_i ~ N(0, 1/2)``, so ``x_1^2 + x_2^2`` is a unit-mean exponential and
``(1/m) sum_{i<=2m} x_i^2`` has mean one.  This is half the variance of the
usual standard normal.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .ensemble import EnsembleEstimate
from .errors import InvalidArgument
from .rng import RngLike, RngStream, as_generator, block_streams, root_stream

STRUCTURE_TOL = 1e-10


def ginibre(shape, rng: RngLike) -> np.ndarray:
    """Complex Gaussian matrix with ``E|z|^2 = 1``."""
    gen = as_generator(rng)
    return (gen.standard_normal(shape) + 1j * gen.standard_normal(shape)) / math.sqrt(2.0)


def _phase_fixed_qr(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def sample_haar_unitary(d: int, rng: RngLike) -> np.ndarray:
    """Draw ``U`` from the Haar measure on U(d)."""
    if d < 1:
        raise InvalidArgument(f"dimension must be positive, got {d}")
    return _phase_fixed_qr(ginibre((d, d), rng))


def sample_haar_batch(n: int, d: int, rng: RngLike) -> np.ndarray:
    """``n`` independent Haar unitaries stacked along axis 0."""
    if d < 1:
        raise InvalidArgument(f"dimension must be positive, got {d}")
    return _phase_fixed_qr(ginibre((n, d, d), rng))


def sample_isometry(d: int, r: int, rng: RngLike) -> np.ndarray:
    """First ``r`` columns of a Haar unitary, as a ``d x r`` isometry."""
    if not 1 <= r <= d:
        raise InvalidArgument(f"rank must satisfy 1 <= r <= d, got r={r}, d={d}")
    return _phase_fixed_qr(ginibre((d, r), rng))


def sample_projector(d: int, r: int, rng: RngLike) -> np.ndarray:
    """Rank-``r`` projector ``U diag(1^r, 0^{d-r}) U^dagger`` with ``U`` Haar."""
    if d < 1:
        raise InvalidArgument(f"dimension must be positive, got {d}")
    if not 1 <= r <= d:
        raise InvalidArgument(f"rank must satisfy 1 <= r <= d, got r={r}, d={d}")
    v = sample_isometry(d, r, rng)
    p = v @ v.conj().T
    return (p + p.conj().T) / 2


def is_unitary(u: np.ndarray, tol: float = STRUCTURE_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) < tol


def is_projector(p: np.ndarray, rank: int | None = None, tol: float = STRUCTURE_TOL) -> bool:
    p = np.asarray(p)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return False
    ok = np.max(np.abs(p @ p - p)) < tol and np.max(np.abs(p - p.conj().T)) < tol
    if rank is not None:
        ok = ok and abs(np.trace(p).real - rank) < 1e-8
    return bool(ok)


def chi2_moment_exact(m: int, k: int) -> Fraction:
    """``E[((1/m) sum_{i<=2m} x_i^2)^k] = prod_{j<k} (1 + j/m)`` exactly."""
    if m < 1:
        raise InvalidArgument(f"m must be positive, got {m}")
    if k < 0:
        raise InvalidArgument(f"k must be nonnegative, got {k}")
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(m + j, m)
    return out


def chi2_moment_mc(m: int, k: int, samples: int, rng: RngLike, block: int = 100_000) -> EnsembleEstimate:
    """Monte Carlo estimate of the same moment with ``x_i ~ N(0, 1/2)``."""
    if m < 1 or samples < 1:
        raise InvalidArgument("m and samples must be positive")
    root = root_stream(rng)
    est = None
    for stream, n in block_streams(root, samples, block):
        gen = stream.generator()
        x = gen.normal(0.0, math.sqrt(0.5), size=(n, 2 * m))
        vals = (np.sum(x * x, axis=1) / m) ** k
        part = EnsembleEstimate.from_samples(vals, seed=root.seed)
        est = part if est is None else est.merge(part)
    return est


def _overlap_samples(d: int, p: int, q: int, n: int, gen: np.random.Generator) -> np.ndarray:
    # P, Q diagonal: Tr(U P U^dag Q) = sum_{i<q, j<p} |U_ij|^2
    u = _phase_fixed_qr(ginibre((n, d, d), gen))
    block = u[:, :q, :p]
    return (d / (p * q)) * np.sum(np.abs(block) ** 2, axis=(1, 2))


def overlap_samples(d: int, p: int, q: int, trials: int, rng: RngLike, block: int = 2000) -> np.ndarray:
    """Samples of ``(d/pq) Tr(U P U^dagger Q)`` for Haar ``U``, in trial order."""
    if not (1 <= p <= d and 1 <= q <= d):
        raise InvalidArgument(f"ranks must lie in [1, d], got p={p}, q={q}, d={d}")
    root = root_stream(rng)
    chunks = [_overlap_samples(d, p, q, n, s.generator()) for s, n in block_streams(root, trials, block)]
    return np.concatenate(chunks) if chunks else np.empty(0)


def projector_overlap_moment_mc(d: int, p: int, q: int, k: int, trials: int, rng: RngLike) -> EnsembleEstimate:
    """Monte Carlo estimate of ``E[((d/pq) Tr(U P U^dagger Q))^k]`` over Haar ``U``."""
    if k < 1:
        raise InvalidArgument(f"k must be >= 1, got {k}")
    if trials < 1:
        raise InvalidArgument("trials must be positive")
    seed = rng.seed if isinstance(rng, RngStream) else None
    z = overlap_samples(d, p, q, trials, rng)
    return EnsembleEstimate.from_samples(z**k, seed=seed)


def tail_bound(z: float, p: int, q: int) -> float:
    """``exp(-pq f(z))`` with ``f(z) = z - ln(1+z)``.

    For ``z > 0`` this bounds ``Pr[Z >= 1+z]``; for ``-1 < z < 0`` it bounds
    ``Pr[Z <= 1+z]``, where ``Z = (d/pq) Tr(U P U^dagger Q)``.
    """
    if z <= -1:
        raise InvalidArgument(f"z must exceed -1, got {z}")
    if p < 1 or q < 1:
        raise InvalidArgument("ranks must be positive")
    f = z - math.log1p(z)
    return math.exp(-p * q * f)


def tail_frequency(d: int, p: int, q: int, z: float, trials: int, rng: RngLike) -> tuple[float, float]:
    """Empirical tail frequency and its binomial standard error."""
    samples = overlap_samples(d, p, q, trials, rng)
    hits = samples >= 1 + z if z > 0 else samples <= 1 + z
    freq = float(np.mean(hits))
    return freq, math.sqrt(max(freq * (1 - freq), 0.0) / trials)
