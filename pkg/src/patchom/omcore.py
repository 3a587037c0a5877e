"""Covectors of an oriented matroid and an independent realizable oracle.

Covectors are obtained from a chirotope through its cocircuits and closed
under composition. The oracle side enumerates the sign vectors of the row
space of an exact rational matrix by a recursive sign search with exact LP
feasibility, so the two constructions share no code beyond sign helpers.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from . import exact
from .matchfield import Chirotope
from .posetlab import BudgetExceeded, Check
from .signcore import compose, matrix, negate, sa_matrix, sign_of, vector_str


def cocircuits(chi: Chirotope) -> frozenset:
    """``±c`` with ``c_e = chi(lambda, e)`` for each (d-1)-subset ``lambda``."""
    if not any(chi.values.values()):
        raise ValueError("identically zero chirotope")
    out = set()
    for lam in itertools.combinations(range(chi.m), chi.rank - 1):
        c = tuple(0 if e in lam else chi(lam + (e,)) for e in range(chi.m))
        if any(c):
            out.add(c)
            out.add(negate(c))
    return frozenset(out)


def covectors(chi: Chirotope, budget: int = 10**6, include_zero: bool = True) -> frozenset:
    """Composition closure of the cocircuits together with the zero vector."""
    cc = sorted(cocircuits(chi))
    seen = set(cc)
    work = list(cc)
    while work:
        x = work.pop()
        for c in cc:
            y = compose(x, c)
            if y not in seen:
                seen.add(y)
                work.append(y)
                if len(seen) > budget:
                    raise BudgetExceeded(f"more than {budget} covectors")
    if include_zero:
        seen.add((0,) * chi.m)
    return frozenset(seen)


def _codes(V: np.ndarray) -> np.ndarray:
    return (V + 1) @ (3 ** np.arange(V.shape[1], dtype=np.int64))


def covector_axiom_check(V: Iterable[Sequence[int]], chunk: int = 256) -> Check:
    """Exhaustive check of the four covector axioms.

    A failing axiom is reported by number with a witness: the offending
    vector, the pair ``(X, Y)``, or the triple ``(X, Y, e)`` for elimination.
    """
    vecs = sorted(set(tuple(v) for v in V))
    if not vecs:
        return Check(False, witness=None, detail="axiom 1: empty set", data={"axiom": 1})
    m = len(vecs[0])
    if m > 12:
        raise BudgetExceeded(f"ground set of size {m} exceeds the scan limit 12")
    Vm = np.array(vecs, dtype=np.int64).reshape(len(vecs), m)
    codes = _codes(Vm)
    if not np.any(np.all(Vm == 0, axis=1)):
        return Check(False, detail="axiom 1: zero vector missing", data={"axiom": 1})
    neg_in = np.isin(_codes(-Vm), codes)
    if not neg_in.all():
        k = int(np.argmin(neg_in))
        return Check(False, witness=vecs[k], detail="axiom 2: negation missing", data={"axiom": 2})
    zero_at = (Vm == 0).astype(np.int64)
    N = len(vecs)
    for a in range(N):
        x = Vm[a]
        xy = np.where(x != 0, x, Vm)
        comp_in = np.isin(_codes(xy), codes)
        if not comp_in.all():
            b = int(np.argmin(comp_in))
            return Check(False, witness=(vecs[a], vecs[b]), detail="axiom 3: composition missing",
                         data={"axiom": 3})
        sep = (x * Vm) == -1
        rows = np.nonzero(sep.any(axis=1))[0]
        for lo in range(0, len(rows), chunk):
            ys = rows[lo:lo + chunk]
            target, free = xy[ys], sep[ys]
            match = np.all((Vm[None, :, :] == target[:, None, :]) | free[:, None, :], axis=2)
            ok = (match.astype(np.int64) @ zero_at) > 0
            bad = free & ~ok
            if bad.any():
                r, e = map(int, np.argwhere(bad)[0])
                return Check(False, witness=(vecs[a], vecs[int(ys[r])], e),
                             detail="axiom 4: no eliminating covector", data={"axiom": 4})
    return Check(True, data={"covectors": N})


def psi(S: Sequence[int], F, A) -> tuple:
    """Per column of ``S A_F``: its sign if all nonzero entries agree, else 0."""
    A = matrix(A)
    n = len(A[0])
    cols = [[] for _ in range(n)]
    for i, j in F:
        cols[j].append(i)
    for j, rows in enumerate(cols):
        if not rows:
            raise ValueError(f"column {j + 1} is isolated in the forest")
    M = sa_matrix(S, F, A)
    out = []
    for j in range(n):
        signs = {M[i][j] for i in range(len(A))} - {0}
        out.append(signs.pop() if len(signs) == 1 else 0)
    return tuple(out)


def chirotope_from_matrix(M) -> Chirotope:
    """Signs of the maximal minors of an exact rational matrix."""
    M = [[exact.as_fraction(v) for v in row] for row in M]
    d, m = len(M), len(M[0])
    if exact.rank(M) < d:
        raise ValueError(f"matrix has rank below {d}")
    vals = {}
    for sig in itertools.combinations(range(m), d):
        vals[sig] = sign_of(exact.det([[row[e] for e in sig] for row in M]))
    return Chirotope(d, m, vals)


def _sign_cone_feasible(cols, signs) -> bool:
    """Is there ``y`` with ``sign(y . cols[e]) = signs[e]`` for the assigned prefix?"""
    d = len(cols[0])
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for c, s in zip(cols, signs):
        if s > 0:
            A_ub.append([-v for v in c])
            b_ub.append(-1)
        elif s < 0:
            A_ub.append(list(c))
            b_ub.append(-1)
        else:
            A_eq.append(list(c))
            b_eq.append(0)
    if not A_ub and not A_eq:
        return True
    res = exact.feasible(A_ub, b_ub, A_eq, b_eq, free=range(d), nvars=d)
    return res.status != "infeasible"


def realizable_oracle(M) -> tuple:
    """Chirotope and covector set of the row space of ``M``."""
    Mq = [[exact.as_fraction(v) for v in row] for row in M]
    d, m = len(Mq), len(Mq[0])
    if exact.rank(Mq) < d:
        raise ValueError(f"matrix has rank below {d}")
    cols = [tuple(Mq[i][e] for i in range(d)) for e in range(m)]
    out = set()

    def rec(prefix):
        if len(prefix) == m:
            out.add(tuple(prefix))
            return
        for s in (0, 1, -1):
            cand = prefix + [s]
            if _sign_cone_feasible(cols[: len(cand)], cand):
                rec(cand)

    rec([])
    return chirotope_from_matrix(Mq), frozenset(out)


def export_lines(V: Iterable[Sequence[int]]) -> list:
    return sorted(vector_str(v) for v in V)
