"""Closed-form evaluators: mutual-information trapezoid, complexity and
probability bounds, holographic piecewise formulas, packing counts and
extremal norm-conversion examples.

Counting bounds are returned as natural logarithms.  Evaluators whose
preconditions fail do not extrapolate: they return a :class:`BoundReport`
with ``valid=False`` and the failing condition named.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument


@dataclass
class BoundReport:
    name: str
    inputs: dict
    value: float | None
    conditions: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.conditions.values())

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "value": self.value,
            "valid": self.valid,
            "conditions": self.conditions,
            "flags": self.flags,
            "notes": self.notes,
        }


def _report(name: str, inputs: dict, value, conditions: dict, notes=()) -> BoundReport:
    ok = all(conditions.values())
    return BoundReport(name, inputs, value if ok else None, conditions, list(notes))


def _check_eps(eps: float) -> None:
    if not 0 < eps < 0.5:
        raise InvalidArgument(f"epsilon must lie in (0, 1/2), got {eps}")


# -- mutual information and circuit complexity -----------------------------

def mi_profile(x: float, T: float, l: float) -> float:
    """Trapezoid mutual information ``I(x; T, l)`` between ``[0,x)`` and ``[x,l)``, in units of ``log q``."""
    if not 0 <= x <= l:
        raise InvalidArgument(f"cut x={x} outside [0, {l}]")
    if T < 0:
        raise InvalidArgument(f"T must be nonnegative, got {T}")
    w = 2 * T
    return min(w, x) + min(w, l - x) - min(w, l)


def trapezoid_profile(T: float, l: int, step: int = 2) -> list[tuple[int, float]]:
    return [(x, mi_profile(x, T, l)) for x in range(0, l + 1, step)]


def trapezoid_area(T: float, l: float) -> float:
    """``2T(l - 2T)``, clipped at zero once ``T >= l/2``."""
    if T < 0:
        raise InvalidArgument(f"T must be nonnegative, got {T}")
    return max(0.0, 2 * T * (l - 2 * T))


def profile_sum(T: float, l: int, step: int = 2) -> float:
    """Step-weighted sum of the profile over cuts ``0, step, ..., l``."""
    return step * sum(v for _, v in trapezoid_profile(T, l, step))


def complexity_lower_bound(T: float, l: float, eps: float) -> float:
    """Gate-count lower bound ``max(0, ((l - 2T) T - 5 eps l^2) / 4)``."""
    _check_eps(eps)
    if not 0 <= T <= l / 2:
        raise InvalidArgument(f"T must lie in [0, l/2], got T={T}, l={l}")
    return max(0.0, ((l - 2 * T) * T - 5 * eps * l * l) / 4)


def mi_continuity(eps: float, d_min: float) -> float:
    """Continuity slack of mutual information, ``10 eps log(d_min / eps)`` in nats."""
    _check_eps(eps)
    return 10 * eps * math.log(d_min / eps)


def mi_gate_bound(m: float, q: float, eps: float, l: float) -> float:
    """Mutual information reachable with ``m`` gates across a cut: ``4 m log q + 5 eps l log(q/eps)`` (nats)."""
    _check_eps(eps)
    if m < 0 or l < 0:
        raise InvalidArgument("m and l must be nonnegative")
    return 4 * m * math.log(q) + 5 * eps * l * math.log(q / eps)


def thermalization_time(q: float, l: float, eps: float) -> float:
    """Depth after which an interval of ``l`` sites is ``eps``-close to maximally mixed."""
    if q < 2:
        raise InvalidArgument(f"q must be at least 2, got {q}")
    if not 0 < eps <= 1:
        raise InvalidArgument(f"epsilon must lie in (0, 1], got {eps}")
    lq = math.log(q)
    return l / 2 * (1 + 3 * math.log(2) / lq) + 3 * math.log(1 / eps) / lq


def prob_overlap_bound(k: int, eps_design: float, delta: float, l: int, L: int, q: float) -> BoundReport:
    """Upper bound on ``Pr[F(rho, sigma) >= 1 - delta]`` for a depth-``T`` reduced state on ``l`` of ``L`` sites.

    ``(1+eps) / ((1-delta)^{2k} q^{k(2l-L)}) * min(exp(k^2 q^{-(L-l)}), k!)``.
    """
    if not 0 < delta < 1:
        raise InvalidArgument(f"delta must lie in (0, 1), got {delta}")
    if k < 0 or l > L or l < 0:
        raise InvalidArgument(f"need k >= 0 and 0 <= l <= L, got k={k}, l={l}, L={L}")
    lq = math.log(q)
    log_min = min(k * k * math.exp(-(L - l) * lq), math.lgamma(k + 1))
    log_val = math.log1p(eps_design) - 2 * k * math.log1p(-delta) - k * (2 * l - L) * lq + log_min
    value = math.exp(log_val) if log_val < 700 else math.inf
    rep = _report(
        "prob_overlap",
        {"k": k, "eps_design": eps_design, "delta": delta, "l": l, "L": L, "q": q},
        value,
        {"design_eps_below_1": eps_design < 1},
    )
    rep.flags = {"meaningful": 2 * l > L, "log_value": log_val}
    if 2 * l <= L:
        rep.notes.append("vacuous unless l > L/2")
    return rep


# -- holographic formulas ---------------------------------------------------

def _piecewise(T: float, half: float, early: float, late: float) -> tuple[float, float, float]:
    """Value, left limit, right limit at a breakpoint; the late branch wins at ``T == half``."""
    return (early if T < half else late), early, late


def holographic_complexity(
    l: float, L: float, T: float, s: float, beta: float, which: str = "small", one_sided: bool = False
):
    """Thermal-subtracted holographic complexity of the smaller (``l``) or larger (``L - l``) region.

    With ``one_sided=True`` returns ``(value, early_branch, late_branch)``.
    """
    if s <= 0 or beta <= 0:
        raise InvalidArgument("s and beta must be positive")
    if not 0 <= l <= L:
        raise InvalidArgument(f"need 0 <= l <= L, got l={l}, L={L}")
    c = s / beta
    if which == "small":
        out = _piecewise(T, l / 2, c * l * T, 0.0)
    elif which == "large":
        out = _piecewise(T, l / 2, c * (L - l) * T, c * L * T)
    else:
        raise InvalidArgument(f"which must be 'small' or 'large', got {which!r}")
    return out if one_sided else out[0]


def holographic_entropy(l: float, T: float, s: float) -> float:
    """Entropy growing as ``2 s T`` until saturating at ``s l`` at ``T = l/2``."""
    if s <= 0:
        raise InvalidArgument("s must be positive")
    return s * min(2 * T, l)


# -- packing counts ---------------------------------------------------------

def packing_design_bound(k: int, alpha: float, beta: float, eps_design: float = 0.0, d: int | None = None) -> BoundReport:
    """``log N`` for ``N > (2 - beta/alpha)^k / 15`` states pairwise ``beta``-separated in 1-norm."""
    conditions = {
        "beta_le_2alpha": beta <= 2 * alpha,
        "design_eps_below_1": eps_design < 1,
    }
    if d is not None:
        conditions["k_below_d"] = k < d
    value = None
    if all(conditions.values()):
        base = 2 - beta / alpha
        value = -math.log(15) + (k * math.log(base) if base > 0 else -math.inf)
    rep = BoundReport(
        "packing_design",
        {"k": k, "alpha": alpha, "beta": beta, "eps_design": eps_design, "d": d},
        value,
        conditions,
    )
    rep.flags["vacuous"] = value is not None and value <= 0
    if rep.flags["vacuous"]:
        rep.notes.append("guarantees at most one state")
    return rep


def packing_full_bound(d: int, alpha: float, beta: float) -> BoundReport:
    """``log N0 >= (1 - beta/alpha)^2 d^2 / 16``."""
    conds = {"beta_lt_alpha": beta < alpha}
    value = (1 - beta / alpha) ** 2 / 16 * d * d
    return _report("packing_full", {"d": d, "alpha": alpha, "beta": beta}, value, conds)


def packing_rank_bound(r: int, d: int, eps: float) -> BoundReport:
    """``log N >= (eps - r/d)^2 r d / 2`` rank-``r`` states, pairwise almost orthogonal."""
    conds = {"r_lt_eps_d": r < eps * d}
    value = 0.5 * (eps - r / d) ** 2 * r * d
    return _report("packing_rank", {"r": r, "d": d, "eps": eps}, value, conds)


def packing_fidelity_count(r: int, d: int, eps: float) -> BoundReport:
    """``log N = (pi^2/4) eps^2 r d`` rank-``r`` states with pairwise fidelity below ``eps``.

    Valid for ``sqrt(r/d) << eps < 1``; the strong inequality is flagged as ``sqrt(r/d) < eps``.
    """
    conds = {"eps_below_1": 0 < eps < 1, "sqrt_r_over_d_below_eps": math.sqrt(r / d) < eps}
    value = math.pi**2 / 4 * eps * eps * r * d
    rep = _report("packing_fidelity", {"r": r, "d": d, "eps": eps}, value, conds)
    rep.flags["well_separated"] = math.sqrt(r / d) < eps / 3
    return rep


# -- extremal examples for norm conversions ---------------------------------

@dataclass(frozen=True)
class ExtremalRatio:
    computed: float
    closed_form: float
    degenerate: bool = False


def norm_extremal_onetwo(r: int, d: int, eps: float, a=None) -> ExtremalRatio:
    """Diagonal pair saturating ``||a-b||_1^2 <= 4 r ||a-b||_2^2`` up to ``(1 - r/d)``.

    ``a`` is a rank-``r`` spectrum (default uniform); ``b`` shifts ``eps`` of
    weight from each of its ``r`` levels into the remaining ``d - r``.
    """
    if not 1 <= r <= d:
        raise InvalidArgument(f"need 1 <= r <= d, got r={r}, d={d}")
    a_top = np.full(r, 1.0 / r) if a is None else np.sort(np.asarray(a, dtype=float))[::-1]
    if a_top.shape != (r,) or abs(a_top.sum() - 1) > 1e-12 or a_top[-1] <= 0:
        raise InvalidArgument("a must be a positive probability vector of length r")
    if r == d:
        return ExtremalRatio(0.0, 0.0, degenerate=True)
    fill = r * eps / (d - r)
    if not 0 < eps < a_top[-1] or a_top[-1] - eps < fill:
        raise InvalidArgument(f"epsilon {eps} too large for this spectrum and dimension")
    av = np.zeros(d)
    av[:r] = a_top
    bv = np.full(d, fill)
    bv[:r] = a_top - eps
    diff = np.diag(av) - np.diag(bv)
    s = np.linalg.svd(diff, compute_uv=False)
    computed = float(s.sum() ** 2 / np.sum(s**2))
    return ExtremalRatio(computed, 4 * r * (1 - r / d))


def fidelity_extremal(d: int, eps: float) -> ExtremalRatio:
    """Diagonal pair in dimension ``d + 2`` with ``||sqrt(rho) sqrt(sigma)||_1^2 / Tr(rho sigma) = d``."""
    if d < 1:
        raise InvalidArgument(f"d must be positive, got {d}")
    if not 0 < eps < 1:
        raise InvalidArgument(f"epsilon must lie in (0, 1), got {eps}")
    rho = np.zeros(d + 2)
    sigma = np.zeros(d + 2)
    rho[0], rho[1:-1] = 1 - eps, eps / d
    sigma[-1], sigma[1:-1] = 1 - eps, eps / d
    R, S = np.diag(rho), np.diag(sigma)
    sv = np.linalg.svd(np.sqrt(R) @ np.sqrt(S), compute_uv=False)
    computed = float(sv.sum() ** 2 / np.trace(R @ S))
    return ExtremalRatio(computed, float(d))


def linear_growth_gate_bound(T: float, L: int, poly_coeff: float, poly_exponent: float) -> BoundReport:
    """``G >= T / (c L^p)``; the polynomial ``c L^p`` is never defaulted and must be supplied."""
    if poly_coeff <= 0:
        raise InvalidArgument("poly_coeff must be positive")
    value = T / (poly_coeff * L**poly_exponent)
    rep = _report(
        "linear_growth_gate",
        {"T": T, "L": L, "poly_coeff": poly_coeff, "poly_exponent": poly_exponent},
        value,
        {"T_nonnegative": T >= 0},
    )
    rep.notes.append("valid only for T below an exponential-in-L horizon with an unspecified constant")
    return rep
