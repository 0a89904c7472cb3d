"""Exact ensemble-averaged purity of an interval on the infinite brickwork chain.

The averaged purity is a sum over domain-wall configurations.  Two walkers
start at ``(l/2, 0)`` and ``(0, l/2)`` on a square lattice and step up or
right once per time unit; each unit of wall length costs a factor
``eta = q / (q^2 + 1)``.  Walls that merge after ``tau`` steps have length
``2 tau``; walls still open after ``T`` steps have length ``2T``.

All counts are exact Python integers; purities are :class:`fractions.Fraction`
for integer ``q`` and floats otherwise.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import InvalidArgument

Number = Union[Fraction, float]


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if n < 0 or k < 0 or k > n:
        return 0
    return math.comb(n, k)


def _check_length(l: int) -> None:
    if l < 0 or l % 2:
        raise InvalidArgument(f"interval length must be even and nonnegative, got {l}")


def eta(q) -> Number:
    """Weight per unit of domain-wall length."""
    if isinstance(q, int) or (isinstance(q, Fraction)):
        return Fraction(q) / (Fraction(q) ** 2 + 1)
    return q / (q * q + 1.0)


def _scalar(q, exact: bool):
    if exact:
        if isinstance(q, float) and not q.is_integer():
            raise InvalidArgument(f"exact mode needs integer q, got {q}")
        return int(q)
    return float(q)


def n_merge(x: int, y: int, l: int) -> int:
    """Number of walker pairs that meet for the first time at ``(x, y)``.

    Reflection-trick count; ``N(0, 0; 0) = 1`` by convention.
    """
    _check_length(l)
    if l == 0:
        return 1 if x == 0 and y == 0 else 0
    h = l // 2
    if x < h or y < h:
        return 0
    tau = x + y - h
    return binom(tau - 1, y - 1) * binom(tau - 1, x - 1) - binom(tau - 1, y) * binom(tau - 1, x)


@lru_cache(maxsize=None)
def n_z(z: int, l: int) -> int:
    """Number of merging walker pairs whose meeting point lies on ``x + y = z``."""
    _check_length(l)
    if l == 0:
        return 1 if z == 0 else 0
    h = l // 2
    return sum(n_merge(x, z - x, l) for x in range(h, z - h + 1))


# Separation of the walkers is tracked as half the l1 distance,
# delta = x_A - x_B; a step changes it by +1 (1 way), 0 (2 ways) or -1 (1 way).
_STEPS = ((1, 1), (0, 2), (-1, 1))


@lru_cache(maxsize=None)
def _open_walls(T: int, l: int) -> tuple:
    """Counts of unmerged walker pairs after ``T`` steps, indexed by ``delta``.

    Pairs that coincide strictly before step ``T`` are removed (they belong to
    the merged sum); coincidence exactly at step ``T`` is kept at ``delta = 0``.
    """
    if T < 0:
        raise InvalidArgument(f"T must be nonnegative, got {T}")
    _check_length(l)
    counts = {l // 2: 1}
    for step in range(1, T + 1):
        if step > 1 or l == 0:
            counts.pop(0, None)
        nxt: dict[int, int] = {}
        for delta, c in counts.items():
            for dd, w in _STEPS:
                nxt[delta + dd] = nxt.get(delta + dd, 0) + c * w
        counts = nxt
    return tuple(sorted(counts.items()))


def j_paths_sep(r: int, T: int, l: int) -> int:
    """Open configurations at time ``T`` whose endpoints are ``r`` apart in l1 distance."""
    if r % 2:
        raise InvalidArgument(f"separation must be even, got {r}")
    if r < 0:
        return 0
    return dict(_open_walls(T, l)).get(r // 2, 0)


def j_paths(T: int, l: int) -> int:
    """Number of distinct depth-``T`` truncations of merging walker pairs."""
    return sum(c for _, c in _open_walls(T, l))


def _pow(base: Number, n: int) -> Number:
    return base**n


def purity(q, l: int, T: int, exact: bool = True) -> Number:
    """Ensemble-averaged purity ``P(T; l)`` of an interval of ``l`` sites after ``T`` layers.

    ``P = J(T;l) eta^{2T} + sum_{z < T + l/2} N(z;l) eta^{2z - l}``.
    """
    _check_length(l)
    if l < 2:
        raise InvalidArgument(f"interval length must be at least 2, got {l}")
    if T < 0:
        raise InvalidArgument(f"T must be nonnegative, got {T}")
    qq = _scalar(q, exact)
    if qq < 1:
        raise InvalidArgument(f"q must be at least 1, got {q}")
    e = eta(qq)
    total = j_paths(T, l) * _pow(e, 2 * T)
    for z in range(l, T + l // 2):
        total += n_z(z, l) * _pow(e, 2 * z - l)
    return total


def purity_exact(q: int, l: int, T: int) -> Fraction:
    return purity(q, l, T, exact=True)


def default_z_max(l: int, T: int) -> int:
    return l + 2 * T + 120


def merged_sum(q, l: int, z_max: int, exact: bool = True) -> Number:
    """``sum_{x+y <= z_max} N(x,y;l) eta^{2x+2y-l}``; tends to ``q^{-l}`` as ``z_max`` grows."""
    _check_length(l)
    qq = _scalar(q, exact)
    e = eta(qq)
    total = Fraction(0) if exact else 0.0
    for z in range(l // 2, z_max + 1):
        c = n_z(z, l)
        if c:
            total += c * _pow(e, 2 * z - l)
    return total


def truncation_error_bound(q, l: int, z_max: int) -> float:
    """Upper bound on the neglected tail ``sum_{z > z_max} N(z;l) eta^{2z-l}``.

    Uses ``N(z;l) <= 4^{z - l/2}``, a geometric series with ratio ``(2 eta)^2 < 1``.
    """
    two_eta = 2.0 * float(eta(q))
    if two_eta >= 1.0:
        return math.inf
    n = 2 * (z_max + 1) - l
    return two_eta**n / (1.0 - two_eta**2)


def q_function(l: int, e: Number, z_max: int) -> Number:
    """Truncated ``Q(l) = sum_{a+b <= z_max} N(a + l/2, b + l/2; l) eta^{2a+2b}``."""
    _check_length(l)
    total = Fraction(0) if isinstance(e, Fraction) else 0.0
    for k in range(z_max + 1):
        c = n_z(k + l, l) if l else (1 if k == 0 else 0)
        if c:
            total += c * e ** (2 * k)
    return total


def q_identity_residuals(q, l: int, z_max: int, exact: bool = False) -> dict:
    """Residuals of ``Q(0) = 1``, ``Q(l) Q(2) = Q(l+2)`` and ``Q(2) = (1 + q^-2)^2`` (truncated)."""
    qq = _scalar(q, exact)
    e = eta(qq)
    q0, q2 = q_function(0, e, z_max), q_function(2, e, z_max)
    ql, ql2 = q_function(l, e, z_max), q_function(l + 2, e, z_max)
    target = (1 + Fraction(1, qq * qq)) ** 2 if exact else (1 + qq**-2) ** 2
    return {
        "q0": q0 - 1,
        "multiplicative": ql * q2 - ql2,
        "q2": q2 - target,
    }


def consistency_residual(q, l: int, T: int, z_max: int | None = None) -> float:
    """Difference between the merged tail beyond ``T`` and its open-wall resummation.

    Checks ``sum_{z >= T + l/2} N(z;l) eta^{2z-l} = eta^{2T} sum_r J(r;T;l) q^{-r}``
    with the left side truncated at ``z_max``.
    """
    qq = float(q)
    e = float(eta(qq))
    z_max = default_z_max(l, T) if z_max is None else z_max
    lhs = sum(n_z(z, l) * e ** (2 * z - l) for z in range(T + l // 2, z_max + 1))
    rhs = e ** (2 * T) * sum(c * qq ** (-2 * delta) for delta, c in _open_walls(T, l))
    return lhs - rhs


def purity_excess_bounds(q, l: int, T: int, exact: bool = True) -> tuple:
    """Lower and upper bounds on ``P(T;l) - q^{-l}``.

    ``lower = (1 - q^-2)/(T+1) C(2T,T) eta^{2T}``, ``upper = (2q/(q^2+1))^{2T}``.
    """
    _check_length(l)
    if T < 0:
        raise InvalidArgument(f"T must be nonnegative, got {T}")
    qq = _scalar(q, exact)
    e = eta(qq)
    one = Fraction(1) if exact else 1.0
    lower = (one - one / (qq * qq)) / (T + 1) * binom(2 * T, T) * e ** (2 * T)
    upper = (2 * e) ** (2 * T)
    return lower, upper
