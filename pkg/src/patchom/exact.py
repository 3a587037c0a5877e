"""Exact rational linear algebra and a small simplex solver.

Everything here works over :class:`fractions.Fraction`; sizes are desk scale
(tens of variables), so a dense tableau with Bland's rule is adequate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def as_fraction(x) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def _row_echelon(rows):
    m = [[as_fraction(v) for v in r] for r in rows]
    if not m:
        return m, 0, 1
    ncols = len(m[0])
    rank = 0
    sign = 1
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
            sign = -sign
        p = m[rank][c]
        for r in range(rank + 1, len(m)):
            f = m[r][c]
            if f:
                f /= p
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return m, rank, sign


def rank(rows: Sequence[Sequence]) -> int:
    return _row_echelon(rows)[1]


def det(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    m, r, sign = _row_echelon(rows)
    if r < n:
        return Fraction(0)
    out = Fraction(sign)
    for k in range(n):
        out *= m[k][k]
    return out


class LPResult:
    __slots__ = ("status", "value", "x")

    def __init__(self, status: str, value=None, x=None):
        self.status = status  # "optimal" | "infeasible" | "unbounded"
        self.value = value
        self.x = x

    def __repr__(self):
        return f"LPResult({self.status!r}, value={self.value})"


def _pivot(T, basis, r, c):
    p = T[r][c]
    T[r] = [v / p for v in T[r]]
    row = T[r]
    for k in range(len(T)):
        if k != r and T[k][c] != 0:
            f = T[k][c]
            T[k] = [a - f * b for a, b in zip(T[k], row)]
    basis[r] = c


def _simplex(T, basis, ncols):
    """Maximize the objective stored in the last row (as reduced costs -c).

    The last row holds ``-c`` so that a negative entry marks an improving
    column. Bland's rule: smallest improving column, smallest basis index on
    ratio ties.
    """
    obj = len(T) - 1
    while True:
        col = next((c for c in range(ncols) if T[obj][c] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for r in range(obj):
            a = T[r][col]
            if a > 0:
                ratio = T[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return "unbounded"
        _pivot(T, basis, best[1], col)


def linprog_max(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=()) -> LPResult:
    """Exactly maximize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables are non-negative unless listed in ``free``.
    """
    c = [as_fraction(v) for v in c]
    nv = len(c)
    free = sorted(set(free))
    # split free variables x = x+ - x-
    cols = list(range(nv)) + [~k for k in free]

    def expand(row):
        row = [as_fraction(v) for v in row]
        if len(row) != nv:
            raise ValueError("constraint width does not match objective")
        return row + [-row[k] for k in free]

    rows, rhs, slack_sign = [], [], []
    for a, b in zip(A_ub, b_ub):
        rows.append(expand(a))
        rhs.append(as_fraction(b))
        slack_sign.append(1)
    for a, b in zip(A_eq, b_eq):
        rows.append(expand(a))
        rhs.append(as_fraction(b))
        slack_sign.append(0)
    if len(A_ub) != len(b_ub) or len(A_eq) != len(b_eq):
        raise ValueError("constraint and bound counts differ")
    cost = c + [-c[k] for k in free]
    nx = len(cost)
    m = len(rows)
    nslack = sum(1 for s in slack_sign if s)
    ncols = nx + nslack + m  # structural, slack, artificial
    T = []
    s_idx = nx
    for k in range(m):
        row = rows[k] + [Fraction(0)] * (nslack + m)
        if slack_sign[k]:
            row[s_idx] = Fraction(1)
            s_idx += 1
        b = rhs[k]
        if b < 0:
            row = [-v for v in row]
            b = -b
        row[nx + nslack + k] = Fraction(1)
        T.append(row + [b])
    basis = [nx + nslack + k for k in range(m)]
    # phase 1: maximize -(sum of artificials)
    obj = [Fraction(0)] * (ncols + 1)
    for k in range(m):
        obj = [o - v for o, v in zip(obj, T[k])]
    for k in range(m):
        obj[nx + nslack + k] = Fraction(0)
    T.append(obj)
    _simplex(T, basis, ncols)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= nx + nslack:
            col = next((c2 for c2 in range(nx + nslack) if T[r][c2] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
    keep = [r for r in range(m) if basis[r] < nx + nslack]
    T = [T[r][: nx + nslack] + [T[r][-1]] for r in keep]
    basis = [basis[r] for r in keep]
    n2 = nx + nslack
    obj = [-v for v in cost] + [Fraction(0)] * nslack + [Fraction(0)]
    for r, b in enumerate(basis):
        if obj[b] != 0:
            f = obj[b]
            obj = [o - f * v for o, v in zip(obj, T[r])]
    T.append(obj)
    status = _simplex(T, basis, n2)
    if status == "unbounded":
        return LPResult("unbounded")
    xs = [Fraction(0)] * n2
    for r, b in enumerate(basis):
        xs[b] = T[r][-1]
    x = xs[:nv]
    for pos, k in enumerate(free):
        x[k] -= xs[nv + pos]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult("optimal", value, x)


def feasible(A_ub=(), b_ub=(), A_eq=(), b_eq=(), free=(), nvars=None) -> LPResult:
    """Feasibility as an LP with a zero objective."""
    if nvars is None:
        probe = list(A_ub) + list(A_eq)
        if not probe:
            raise ValueError("nvars required without constraints")
        nvars = len(probe[0])
    return linprog_max([0] * nvars, A_ub, b_ub, A_eq, b_eq, free)
