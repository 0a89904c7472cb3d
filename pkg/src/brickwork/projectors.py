"""Fidelity statistics of normalized random projectors and greedy packings.

Two rank-``r`` states ``pi_i / r`` in dimension ``d`` have fidelity
``(1/r) sum_i sqrt(lambda_i)`` where ``lambda_i`` are the nonzero eigenvalues
of ``pi_1 pi_2 pi_1``.  With isometries ``A, B`` (``pi = A A^dag``) these are
the squared singular values of the ``r x r`` matrix ``A^dag B``, so nothing
of size ``d x d`` is ever diagonalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .ensemble import EnsembleEstimate
from .errors import InvalidArgument, QuadratureError
from .randmat import sample_haar_unitary, sample_isometry
from .rng import RngLike, as_generator, root_stream


def _check_w(w: float) -> None:
    if not 0 < w <= 0.5:
        raise InvalidArgument(f"w = r/d must lie in (0, 1/2], got {w}")


def fidelity_mean_analytic(w: float) -> float:
    """Large-``d`` mean fidelity of two random rank-``wd`` states."""
    _check_w(w)
    return 2 / math.pi * (math.sqrt((1 - w) / w) - (1 - 2 * w) / w * math.asin(math.sqrt(w)))


def fidelity_mean_small_w(w: float) -> float:
    return 8 / (3 * math.pi) * math.sqrt(w)


def fidelity_variance_analytic(w: float, r: int) -> float:
    _check_w(w)
    if r < 1:
        raise InvalidArgument(f"rank must be positive, got {r}")
    return 2 * w * (1 - w) / (math.pi**2 * r * r)


def eigen_edge(w: float) -> float:
    """Upper edge ``a = 4w(1-w)`` of the eigenvalue density of ``pi_1 pi_2 pi_1``."""
    return 4 * w * (1 - w)


def eigen_density(lam, w: float):
    """Limiting density of the nonzero eigenvalues of ``pi_1 pi_2 pi_1`` on ``(0, a)``."""
    _check_w(w)
    a = eigen_edge(w)
    lam = np.asarray(lam, dtype=float)
    inside = (lam > 0) & (lam < a)
    safe = np.where(inside, lam, a / 2)
    val = np.sqrt(a - safe) / (np.sqrt(safe) * (1 - safe)) / (2 * math.pi * w)
    return np.where(inside, val, 0.0)


def eigen_density_moment(w: float, n: float, epsabs: float = 1e-13, epsrel: float = 1e-12) -> float:
    """``int lambda^n rho(lambda) d lambda`` via ``lambda = a sin^2(theta)``.

    The substitution turns both endpoint singularities into a smooth
    integrand ``(a s^2)^n (2a cos^2 theta) / (2 pi w (1 - a s^2))``.
    """
    if not 0 < w < 0.5:
        raise InvalidArgument(f"w must lie in (0, 1/2), got {w}")
    if n < 0:
        raise InvalidArgument(f"moment order must be nonnegative, got {n}")
    a = eigen_edge(w)

    def f(theta):
        s2 = math.sin(theta) ** 2
        return (a * s2) ** n * 2 * a * math.cos(theta) ** 2 / (1 - a * s2)

    val, err, info = integrate.quad(f, 0.0, math.pi / 2, epsabs=epsabs, epsrel=epsrel, limit=200, full_output=1)[:3]
    if err > 1e-9 * max(1.0, abs(val)) or info.get("ier", 0) not in (0, None):
        raise QuadratureError(f"quadrature did not converge: value {val}, error estimate {err}")
    return val / (2 * math.pi * w)


def log_prob_fidelity(F: float, w: float, r: int) -> float:
    """Quadratic (Gaussian) part of ``log Pr(F)``; higher orders in ``F - E(F)`` are not included."""
    _check_w(w)
    return -(r**2) * math.pi**2 / (4 * w * (1 - w)) * (F - fidelity_mean_analytic(w)) ** 2


def implied_variance(w: float, r: int) -> float:
    """Variance of the Gaussian whose log-density is :func:`log_prob_fidelity`."""
    _check_w(w)
    return 1 / (2 * r * r * math.pi**2 / (4 * w * (1 - w)))


@dataclass(frozen=True)
class FidelitySample:
    d: int
    r: int
    fidelity: float
    eigenvalues: np.ndarray = field(repr=False)

    def norm_conversion_gap(self) -> float:
        """``rank * Tr(s1 s2) - ||sqrt(s1) sqrt(s2)||_1^2``; nonnegative up to roundoff."""
        return float(np.sum(self.eigenvalues)) / self.r - self.fidelity**2


def isometry_fidelity(A: np.ndarray, B: np.ndarray) -> tuple[float, np.ndarray]:
    """Fidelity of ``A A^dag / r`` and ``B B^dag / r`` plus the eigenvalues of ``pi_A pi_B pi_A``."""
    if A.shape != B.shape:
        raise InvalidArgument(f"isometries differ in shape: {A.shape} vs {B.shape}")
    s = np.linalg.svd(A.conj().T @ B, compute_uv=False)
    s = np.clip(s, 0.0, 1.0)
    return float(s.sum() / A.shape[1]), s**2


def _check_dr(d: int, r: int) -> None:
    if not 1 <= r <= d:
        raise InvalidArgument(f"need 1 <= r <= d, got r={r}, d={d}")


def sample_fidelity(d: int, r: int, rng: RngLike) -> FidelitySample:
    _check_dr(d, r)
    gen = as_generator(rng)
    A, B = sample_isometry(d, r, gen), sample_isometry(d, r, gen)
    F, lam = isometry_fidelity(A, B)
    return FidelitySample(d, r, F, lam)


def fidelity_samples(d: int, r: int, pairs: int, rng: RngLike) -> list[FidelitySample]:
    """``pairs`` independent samples; pair ``i`` draws from substream ``i``."""
    if pairs < 1:
        raise InvalidArgument("pairs must be positive")
    root = root_stream(rng)
    return [sample_fidelity(d, r, root.substream(i)) for i in range(pairs)]


def fidelity_stats(samples: list[FidelitySample]) -> dict:
    F = np.array([s.fidelity for s in samples])
    lam = np.concatenate([s.eigenvalues for s in samples])
    per_pair_mean = np.array([s.eigenvalues.mean() for s in samples])
    return {
        "mean": EnsembleEstimate.from_samples(F),
        "variance": float(F.var(ddof=1)) if F.size > 1 else 0.0,
        "eigenvalue_mean": EnsembleEstimate.from_samples(per_pair_mean),
        "eigenvalue_max": float(lam.max()),
        "eigenvalue_min": float(lam.min()),
        "max_norm_conversion_violation": float(max(-s.norm_conversion_gap() for s in samples)),
    }


@dataclass
class PackingResult:
    d: int
    r: int
    eps: float
    count: int
    draws: int
    seed: int
    max_pair_fidelity: float
    isometries: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "r": self.r,
            "eps": self.eps,
            "count": self.count,
            "draws": self.draws,
            "seed": self.seed,
            "max_pair_fidelity": self.max_pair_fidelity,
        }


def _fidelities_to(V: np.ndarray, stack: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(np.swapaxes(stack.conj(), -1, -2) @ V, compute_uv=False)
    return np.clip(s, 0.0, 1.0).sum(axis=-1) / V.shape[1]


def greedy_packing(d: int, r: int, eps: float, max_draws: int, rng: RngLike) -> PackingResult:
    """Rejection packing: keep a fresh random state iff its fidelity to all kept states is below ``eps``.

    Draw ``i`` uses substream ``i``.  Every accepted pair is re-verified at the end.
    """
    _check_dr(d, r)
    if not 0 < eps < 1:
        raise InvalidArgument(f"epsilon must lie in (0, 1), got {eps}")
    if max_draws < 1:
        raise InvalidArgument("max_draws must be positive")
    root = root_stream(rng)
    kept = np.empty((max_draws, d, r), dtype=complex)
    n = 0
    for i in range(max_draws):
        V = sample_isometry(d, r, root.substream(i))
        if n == 0 or np.all(_fidelities_to(V, kept[:n]) < eps):
            kept[n] = V
            n += 1
    kept = kept[:n]
    worst = 0.0
    for j in range(1, n):
        f = _fidelities_to(kept[j], kept[:j])
        if np.any(f >= eps):
            raise AssertionError(f"accepted state {j} violates the packing tolerance")
        worst = max(worst, float(f.max()))
    return PackingResult(d, r, eps, n, max_draws, root.seed, worst, list(kept))


def displacement_distance_check(d: int, r: int, trials: int, rng: RngLike, slack: float = 1e-8) -> dict:
    """Check ``||U P U^dag - P||_1 >= 2 Tr(U P U^dag (1 - P))`` for Haar ``U`` and a rank-``r`` projector ``P``."""
    _check_dr(d, r)
    root = root_stream(rng)
    P = np.diag(np.r_[np.ones(r), np.zeros(d - r)]).astype(complex)
    margins = np.empty(trials)
    for i in range(trials):
        U = sample_haar_unitary(d, root.substream(i))
        margins[i] = displacement_margin(U, P)
    return {
        "d": d,
        "r": r,
        "trials": trials,
        "violations": int(np.sum(margins < -slack)),
        "min_margin": float(margins.min()) if trials else 0.0,
        "holds": bool(np.all(margins >= -slack)),
    }


def displacement_margin(U: np.ndarray, P: np.ndarray) -> float:
    """``||U P U^dag - P||_1 - 2 Tr(U P U^dag (1 - P))``."""
    M = U @ P @ U.conj().T
    diff = M - P
    lhs = float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))
    rhs = 2 * float(np.trace(M @ (np.eye(P.shape[0]) - P)).real)
    return lhs - rhs
