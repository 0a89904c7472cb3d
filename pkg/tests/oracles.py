"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache

import numpy as np

_MOVES = ((1, 0), (0, 1))


@lru_cache(maxsize=None)
def walker_enumeration(l: int, T: int) -> tuple[dict, dict]:
    """Enumerate every pair of synchronized up/right walks for ``T`` steps.

    Walker A starts at ``(l/2, 0)``, walker B at ``(0, l/2)``.  Returns
    ``(first_meetings, open_by_separation)``: first coincidence points reached
    within ``T`` steps, and the l1 separations after ``T`` steps of pairs that
    did not coincide before step ``T`` (a coincidence exactly at step ``T``
    counts as separation 0).
    """
    h = l // 2
    meetings: Counter = Counter()
    open_: Counter = Counter()

    def walk(a, b, step):
        if a == b:
            meetings[a] += 1
            if step == T:
                open_[0] += 1
            return
        if step == T:
            open_[abs(a[0] - b[0]) + abs(a[1] - b[1])] += 1
            return
        for da in _MOVES:
            for db in _MOVES:
                walk((a[0] + da[0], a[1] + da[1]), (b[0] + db[0], b[1] + db[1]), step + 1)

    walk((h, 0), (0, h), 0)
    return dict(meetings), dict(open_)


def ballot_n_z(z: int, l: int) -> int:
    """First-meeting count on the diagonal ``x + y = z`` from the ballot formula."""
    h = l // 2
    if l == 0:
        return int(z == 0)
    tau = z - h
    if tau < h:
        return 0
    return Fraction(h, tau) * math.comb(2 * tau, tau - h)


def purity_from_enumeration(q: int, l: int, T: int) -> Fraction:
    meetings, open_ = walker_enumeration(l, T)
    eta = Fraction(q, q * q + 1)
    h = l // 2
    total = sum(open_.values()) * eta ** (2 * T)
    for (x, y), c in meetings.items():
        if x + y - h < T:
            total += c * eta ** (2 * (x + y) - l)
    return total


def dense_two_site_operator(site_dims, bond, gate) -> np.ndarray:
    """Full-space matrix of ``gate`` on ``(bond, bond+1 mod L)`` built from index arithmetic."""
    dims = list(site_dims)
    L = len(dims)
    j = (bond + 1) % L
    D = int(np.prod(dims))
    M = np.zeros((D, D), dtype=complex)
    for col in range(D):
        idx = np.unravel_index(col, dims)
        a, b = idx[bond], idx[j]
        for a2 in range(dims[bond]):
            for b2 in range(dims[j]):
                out = list(idx)
                out[bond], out[j] = a2, b2
                M[np.ravel_multi_index(out, dims), col] += gate[a2 * dims[j] + b2, a * dims[j] + b]
    return M


def reduced_density_dense(psi: np.ndarray, site_dims, keep) -> np.ndarray:
    """Partial trace by explicit summation over the traced indices."""
    dims = list(site_dims)
    t = psi.reshape(dims)
    keep = list(keep)
    rest = [k for k in range(len(dims)) if k not in keep]
    letters = "abcdefghijklmnopqrstuvwxyz"
    ket = [letters[k] for k in range(len(dims))]
    bra = [letters[k].upper() if k in keep else letters[k] for k in range(len(dims))]
    out = "".join(letters[k] for k in keep) + "".join(letters[k].upper() for k in keep)
    rho = np.einsum(f"{''.join(ket)},{''.join(bra)}->{out}", t, t.conj())
    dk = int(np.prod([dims[k] for k in keep]))
    return rho.reshape(dk, dk)
