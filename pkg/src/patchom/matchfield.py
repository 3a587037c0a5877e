"""Matching fields read off a triangulation, and the chirotope they induce.

For every tree of a triangulation of ``Δ_{d-1} x Δ_{n-1}`` we enumerate its
R-saturating matchings; the matched column sets run over all d-subsets of
``E`` exactly once. The sign of a matching times the product of the matrix
entries along it gives a chirotope.

The pointed ground set has ``d + n`` positions: ``0..d-1`` are the extra
elements ``~1..~d`` and ``d..d+n-1`` are the columns of ``E``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .cayley import InvalidTriangulation, Triangulation
from .posetlab import BudgetExceeded, Check
from .signcore import matrix, sign_str


def tree_matchings(tree, d: int) -> list:
    """All R-saturating matchings inside ``tree`` as tuples ``m`` with ``m[i]`` the column of row ``i``."""
    nbrs = [sorted(j for (i, j) in tree if i == r) for r in range(d)]
    out = []
    used = set()
    cur = []

    def rec(i):
        if i == d:
            out.append(tuple(cur))
            return
        for j in nbrs[i]:
            if j not in used:
                used.add(j)
                cur.append(j)
                rec(i + 1)
                cur.pop()
                used.discard(j)

    rec(0)
    return out


@dataclass(frozen=True)
class MatchingField:
    """One perfect matching per d-subset; ``matchings[sigma][i]`` is row ``i``'s partner."""

    d: int
    m: int
    matchings: dict
    labels: tuple = ()

    def __len__(self):
        return len(self.matchings)

    def edges(self, sigma) -> frozenset:
        return frozenset(enumerate(self.matchings[tuple(sorted(sigma))]))


def _extract(trees, d: int, m: int, labels) -> MatchingField:
    field = {}
    for t, tree in enumerate(trees):
        for match in tree_matchings(tree, d):
            sigma = tuple(sorted(match))
            if sigma in field and field[sigma] != match:
                raise InvalidTriangulation(
                    f"subset {sigma} has two matchings (trees overlap, second in tree {t})"
                )
            field[sigma] = match
    expected = comb(m, d)
    if len(field) != expected:
        missing = next(s for s in itertools.combinations(range(m), d) if s not in field)
        raise InvalidTriangulation(f"no matching for subset {missing}; {len(field)} of {expected} found")
    return MatchingField(d, m, dict(sorted(field.items())), tuple(labels))


def extract_matching_field(T: Triangulation) -> MatchingField:
    if T.n < T.d:
        raise ValueError(f"a matching field needs n >= d (got d={T.d}, n={T.n})")
    return _extract(T.trees, T.d, T.n, [str(j + 1) for j in range(T.n)])


def pointed_labels(d: int, n: int) -> tuple:
    return tuple(f"~{i + 1}" for i in range(d)) + tuple(str(j + 1) for j in range(n))


def augment_tree(tree, d: int) -> frozenset:
    """Shift columns by ``d`` and join each row ``i`` to its pointed copy ``i``."""
    return frozenset({(i, d + j) for (i, j) in tree} | {(i, i) for i in range(d)})


def augmented_matrix(A) -> tuple:
    """``(I | A)``."""
    A = matrix(A)
    d = len(A)
    return tuple(tuple(int(i == k) for k in range(d)) + tuple(A[i]) for i in range(d))


def pointed_augment(T: Triangulation, A) -> tuple:
    """The pointed matching field of ``T`` together with ``(I | A)``."""
    A = matrix(A)
    if len(A) != T.d or any(len(r) != T.n for r in A):
        raise ValueError(f"sign matrix must be {T.d}x{T.n}")
    trees = [augment_tree(t, T.d) for t in T.trees]
    return _extract(trees, T.d, T.d + T.n, pointed_labels(T.d, T.n)), augmented_matrix(A)


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the arrangement ``seq`` by inversion counting (0 on repeats)."""
    if len(set(seq)) != len(seq):
        return 0
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv % 2 else 1


class Chirotope:
    """An alternating sign map on d-subsets of ``range(m)``.

    ``values`` holds the sign of each sorted d-tuple; calling the object on
    any d-tuple applies the alternating rule.
    """

    def __init__(self, rank: int, m: int, values: dict, labels: Iterable[str] | None = None):
        self.rank = rank
        self.m = m
        self.values = {tuple(k): int(v) for k, v in values.items()}
        for k in self.values:
            if len(k) != rank or list(k) != sorted(set(k)) or not all(0 <= e < m for e in k):
                raise ValueError(f"bad key {k} for a rank {rank} chirotope on {m} elements")
        self.labels = tuple(labels) if labels is not None else tuple(str(e + 1) for e in range(m))
        if not any(self.values.values()):
            raise ValueError("a chirotope is not identically zero")

    def __call__(self, *idx) -> int:
        if len(idx) == 1 and isinstance(idx[0], (tuple, list)):
            idx = tuple(idx[0])
        s = perm_sign(idx)
        if not s:
            return 0
        return s * self.values.get(tuple(sorted(idx)), 0)

    def __eq__(self, other):
        return (
            isinstance(other, Chirotope)
            and (self.rank, self.m) == (other.rank, other.m)
            and {k: v for k, v in self.values.items() if v} == {k: v for k, v in other.values.items() if v}
        )

    def negated(self) -> "Chirotope":
        return Chirotope(self.rank, self.m, {k: -v for k, v in self.values.items()}, self.labels)

    def restrict(self, elements: Iterable[int]) -> "Chirotope":
        """Restriction to ``elements``, renumbered in increasing order."""
        elements = sorted(elements)
        pos = {e: k for k, e in enumerate(elements)}
        vals = {tuple(pos[e] for e in sig): self.values.get(sig, 0)
                for sig in itertools.combinations(elements, self.rank)}
        return Chirotope(self.rank, len(elements), vals, [self.labels[e] for e in elements])

    def is_uniform(self) -> bool:
        return all(self.values.get(s, 0) for s in itertools.combinations(range(self.m), self.rank))

    def export_lines(self) -> list:
        out = []
        for sig in itertools.combinations(range(self.m), self.rank):
            lab = ",".join(self.labels[e] for e in sig)
            out.append(f"({lab}):{sign_str(self.values.get(sig, 0))}")
        return out

    def __repr__(self):
        return f"Chirotope(rank={self.rank}, m={self.m})"


def chirotope(field: MatchingField, A) -> Chirotope:
    """``sigma -> sign(M_sigma) * prod A_e`` over the matching's edges."""
    A = matrix(A)
    vals = {}
    for sigma, match in field.matchings.items():
        s = perm_sign(match)
        for i, j in enumerate(match):
            s *= A[i][j]
        vals[sigma] = s
    return Chirotope(field.d, field.m, vals, field.labels or None)


def _gp_terms(chi: Chirotope, x, y):
    for k in range(len(y)):
        sgn = -1 if k % 2 else 1
        yield sgn * chi(tuple(x) + (y[k],)) * chi(y[:k] + y[k + 1:])


def _gp_ok(terms) -> bool:
    seen = set(terms)
    return (1 in seen and -1 in seen) or seen <= {0}


def gp_check(chi: Chirotope, mode: str = "dedup", budget: int = 10**7) -> Check:
    """Grassmann-Plücker relations over all ``(x_1..x_{d-1}, y_1..y_{d+1})``.

    ``dedup`` scans sorted tuples with distinct entries only; every other
    tuple gives a relation that is a signed copy of one of these or holds
    trivially. ``full`` scans every tuple and is kept as a cross-check.
    """
    d, m = chi.rank, chi.m
    if mode == "full":
        cost = m ** (2 * d)
        xs = itertools.product(range(m), repeat=d - 1)
        ys_of = lambda: itertools.product(range(m), repeat=d + 1)  # noqa: E731
    elif mode == "dedup":
        cost = comb(m, d - 1) * comb(m, d + 1) * (d + 1)
        xs = itertools.combinations(range(m), d - 1)
        ys_of = lambda: itertools.combinations(range(m), d + 1)  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if cost > budget:
        raise BudgetExceeded(f"GP scan needs about {cost} evaluations, budget {budget}")
    count = 0
    for x in xs:
        for y in ys_of():
            count += 1
            if not _gp_ok(_gp_terms(chi, x, y)):
                return Check(False, witness=(tuple(x), tuple(y)),
                             detail=f"relation for x={x}, y={y} has terms of one nonzero sign",
                             data={"relations": count})
    return Check(True, data={"relations": count, "mode": mode})
