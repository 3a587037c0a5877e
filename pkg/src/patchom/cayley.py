"""Triangulations of a product of two simplices as spanning trees of K_{R,E}.

Rows ``R`` and columns ``E`` are 0-based internally; an edge ``(i, j)`` is the
vertex ``(e_i, e_j)`` of the product. Forests are frozensets of edges.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from . import exact
from .posetlab import Check


class InvalidTriangulation(ValueError):
    pass


class DegenerateHeights(ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


def parse_edges(text: str) -> frozenset:
    """``"11 12 23"`` (1-based row then column digit) to a 0-based forest."""
    out = []
    for tok in text.replace(",", " ").split():
        if len(tok) != 2:
            raise ValueError(f"edge token {tok!r} is not two digits")
        out.append((int(tok[0]) - 1, int(tok[1]) - 1))
    return frozenset(out)


def edges_str(F: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{i + 1}{j + 1}" for i, j in sorted(F))


def columns(F: Iterable[tuple[int, int]], n: int) -> tuple:
    cols = [set() for _ in range(n)]
    for i, j in F:
        cols[j].add(i)
    return tuple(frozenset(c) for c in cols)


def supp_rows(F: Iterable[tuple[int, int]]) -> frozenset:
    return frozenset(i for i, _ in F)


def is_forest(F: Iterable[tuple[int, int]]) -> bool:
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in F:
        a, b = find(("r", i)), find(("e", j))
        if a == b:
            return False
        parent[a] = b
    return True


def is_spanning_tree(F, d: int, n: int) -> bool:
    F = frozenset(F)
    if len(F) != d + n - 1:
        return False
    if any(not (0 <= i < d and 0 <= j < n) for i, j in F):
        return False
    if supp_rows(F) != frozenset(range(d)) or {j for _, j in F} != set(range(n)):
        return False
    return is_forest(F)


def n_simplices(d: int, n: int) -> int:
    """Trees in any triangulation: the normalized volume ``C(n+d-2, d-1)``."""
    return math.comb(n + d - 2, d - 1)


def spanning_trees(d: int, n: int) -> list:
    """All spanning trees of K_{d,n}, sorted lexicographically by edge list."""
    all_edges = [(i, j) for i in range(d) for j in range(n)]
    out = []
    for combo in itertools.combinations(all_edges, d + n - 1):
        if is_spanning_tree(combo, d, n):
            out.append(frozenset(combo))
    return out


def _sort_key(F):
    return tuple(sorted(F))


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Trees keep their input order (reports refer to it); equality ignores order."""

    d: int
    n: int
    trees: tuple

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(frozenset(t) for t in self.trees))

    def __eq__(self, other):
        return (isinstance(other, Triangulation) and (self.d, self.n) == (other.d, other.n)
                and set(self.trees) == set(other.trees) and len(self.trees) == len(other.trees))

    def __hash__(self):
        return hash((self.d, self.n, frozenset(self.trees)))

    def __len__(self):
        return len(self.trees)

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n,
                "trees": [[[i + 1, j + 1] for i, j in sorted(t)] for t in self.trees]}

    @classmethod
    def from_json(cls, data: dict) -> "Triangulation":
        d, n = int(data["d"]), int(data["n"])
        trees = []
        for t in data["trees"]:
            trees.append(frozenset((int(i) - 1, int(j) - 1) for i, j in t))
        return cls(d, n, tuple(trees))


def _point(i: int, j: int, d: int, n: int) -> list:
    # affine coordinates of (e_i, e_j): drop the last coordinate of each factor
    v = [0] * (d + n - 2)
    if i < d - 1:
        v[i] = 1
    if j < n - 1:
        v[d - 1 + j] = 1
    return v


def simplex_volume(tree, d: int, n: int) -> Fraction:
    """Normalized volume of the simplex spanned by the tree's vertices."""
    pts = [_point(i, j, d, n) for i, j in sorted(tree)]
    if len(pts) != d + n - 1:
        return Fraction(0)
    base = pts[0]
    rows = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    return abs(exact.det(rows)) if rows else Fraction(1)


def intersect_properly(t1, t2, d: int, n: int) -> bool:
    """conv(t1) and conv(t2) meet exactly in conv(t1 & t2).

    Maximizes the weight a common point puts on vertices of ``t1`` outside
    ``t2``; because ``t1`` is affinely independent that weight is zero for
    every common point iff the intersection is the shared face.
    """
    v1, v2 = sorted(t1), sorted(t2)
    only1 = set(t1) - set(t2)
    A_eq, b_eq = [], []
    for i in range(d):
        A_eq.append([1 if e[0] == i else 0 for e in v1] + [-1 if e[0] == i else 0 for e in v2])
        b_eq.append(0)
    for j in range(n):
        A_eq.append([1 if e[1] == j else 0 for e in v1] + [-1 if e[1] == j else 0 for e in v2])
        b_eq.append(0)
    A_eq.append([1] * len(v1) + [0] * len(v2))
    b_eq.append(1)
    c = [1 if e in only1 else 0 for e in v1] + [0] * len(v2)
    res = exact.linprog_max(c, A_eq=A_eq, b_eq=b_eq)
    if res.status == "infeasible":
        return True
    return res.value == 0


def validate_triangulation(T: Triangulation, level: str = "exact") -> Check:
    """Check that the trees form a triangulation.

    ``fast`` checks tree shape and count; ``exact`` also checks volumes and
    pairwise face-to-face intersection with exact rational LPs.
    """
    if level not in ("fast", "exact"):
        raise ValueError(f"unknown validation level {level!r}")
    d, n = T.d, T.n
    data = {"level": level, "trees": len(T.trees)}
    for k, t in enumerate(T.trees):
        if not is_spanning_tree(t, d, n):
            return Check(False, {"tree": k}, f"tree {k + 1} is not a spanning tree of K_{{{d},{n}}}", data)
    if len(set(T.trees)) != len(T.trees):
        return Check(False, {"tree": None}, "duplicate trees", data)
    expected = n_simplices(d, n)
    data["expected"] = expected
    if level == "fast":
        if len(T.trees) != expected:
            return Check(False, {"count": len(T.trees)},
                         f"{len(T.trees)} trees, a triangulation has {expected}", data)
        return Check(True, None, "", data)
    total = Fraction(0)
    for k, t in enumerate(T.trees):
        vol = simplex_volume(t, d, n)
        if vol == 0:
            return Check(False, {"tree": k}, f"tree {k + 1} spans a degenerate simplex", data)
        total += vol
    data["volume"] = int(total) if total.denominator == 1 else str(total)
    if total != expected:
        return Check(False, {"volume": str(total)}, f"volume {total} differs from {expected}", data)
    if len(T.trees) != expected:
        return Check(False, {"count": len(T.trees)}, f"{len(T.trees)} trees, a triangulation has {expected}", data)
    for a, b in itertools.combinations(range(len(T.trees)), 2):
        if not intersect_properly(T.trees[a], T.trees[b], d, n):
            return Check(False, {"pair": (a, b)},
                         f"trees {a + 1} and {b + 1} do not meet in a common face", data)
    return Check(True, None, "", data)


@dataclass(frozen=True)
class MixedSubdivision:
    """Cells of the fine mixed subdivision, one forest per cell."""

    d: int
    n: int
    cells: frozenset
    trees: tuple = field(default=())

    def __len__(self):
        return len(self.cells)

    def vertices(self) -> list:
        return sorted((F for F in self.cells if len(F) == self.n), key=_sort_key)

    def dim(self, F) -> int:
        return len(F) - self.n


def faces_of_tree(tree, n: int):
    """Subforests keeping every column nonempty."""
    cols = columns(tree, n)
    choices = []
    for j, rows in enumerate(cols):
        rows = sorted(rows)
        opts = []
        for r in range(1, len(rows) + 1):
            for sub in itertools.combinations(rows, r):
                opts.append(tuple((i, j) for i in sub))
        choices.append(opts)
    for pick in itertools.product(*choices):
        yield frozenset(e for part in pick for e in part)


def cells_of_subdivision(T: Triangulation) -> MixedSubdivision:
    cells = set()
    for t in T.trees:
        cells.update(faces_of_tree(t, T.n))
    return MixedSubdivision(T.d, T.n, frozenset(cells), T.trees)


def lattice_points(d: int, n: int) -> list:
    """Points of ``n * simplex_{d-1}``, lexicographically decreasing."""
    out = []

    def rec(prefix, left, k):
        if k == 1:
            out.append(tuple(prefix + [left]))
            return
        for v in range(left, -1, -1):
            rec(prefix + [v], left - v, k - 1)

    rec([], n, d)
    return out


def _as_heights(H) -> tuple:
    H = tuple(tuple(exact.as_fraction(v) for v in row) for row in H)
    if not H or not H[0] or any(len(r) != len(H[0]) for r in H):
        raise ValueError("height matrix must be a nonempty rectangle")
    return H


def mixed_height(H, p: Sequence[int]) -> Fraction:
    """Max weight of a column-to-row assignment that uses row ``l`` exactly ``p[l]`` times."""
    H = _as_heights(H)
    d, n = len(H), len(H[0])
    p = tuple(p)
    if len(p) != d or any((not isinstance(v, int)) or v < 0 for v in p) or sum(p) != n:
        raise ValueError(f"{p} is not a lattice point of {n}*simplex_{d - 1}")

    @lru_cache(maxsize=None)
    def best(j, left):
        if j == n:
            return Fraction(0)
        out = None
        for l in range(d):
            if left[l]:
                rest = left[:l] + (left[l] - 1,) + left[l + 1:]
                val = H[l][j] + best(j + 1, rest)
                if out is None or val > out:
                    out = val
        return out

    return best(0, p)


def mixed_heights(H, n: int | None = None) -> dict:
    """Height of every lattice point of ``n * simplex_{d-1}``; ``n`` must match H."""
    H = _as_heights(H)
    if n is not None and n != len(H[0]):
        raise ValueError(f"dilation {n} differs from the {len(H[0])} columns of H")
    return {p: mixed_height(H, p) for p in lattice_points(len(H), len(H[0]))}


def _potentials(tree, H, d, n):
    w = [None] * d
    u = [None] * n
    w[0] = Fraction(0)
    adj_r = [[] for _ in range(d)]
    adj_c = [[] for _ in range(n)]
    for i, j in tree:
        adj_r[i].append(j)
        adj_c[j].append(i)
    stack = [("r", 0)]
    while stack:
        kind, x = stack.pop()
        if kind == "r":
            for j in adj_r[x]:
                if u[j] is None:
                    u[j] = H[x][j] - w[x]
                    stack.append(("c", j))
        else:
            for i in adj_c[x]:
                if w[i] is None:
                    w[i] = H[i][x] - u[x]
                    stack.append(("r", i))
    return w, u


def _cycle_partner(tree, e):
    """Another tree obtained by adding ``e`` and dropping a different cycle edge."""
    adj: dict = {}
    for i, j in tree:
        adj.setdefault(("r", i), []).append(("c", j))
        adj.setdefault(("c", j), []).append(("r", i))
    start, goal = ("r", e[0]), ("c", e[1])
    prev = {start: None}
    queue = [start]
    while queue:
        x = queue.pop(0)
        for y in adj.get(x, []):
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = []
    x = goal
    while prev[x] is not None:
        a, b = prev[x], x
        r = a[1] if a[0] == "r" else b[1]
        c = a[1] if a[0] == "c" else b[1]
        path.append((r, c))
        x = prev[x]
    return frozenset(tree) - {path[0]} | {e}


def lower_envelope_slack(tree, H) -> dict:
    """Slack ``H_ij - (w_i + u_j)`` of every non-tree edge for the affine function through the tree."""
    H = _as_heights(H)
    d, n = len(H), len(H[0])
    w, u = _potentials(tree, H, d, n)
    return {(i, j): H[i][j] - w[i] - u[j] for i in range(d) for j in range(n) if (i, j) not in tree}


def regular_triangulation(H, maximize: bool = False, validate: bool = True) -> Triangulation:
    """Regular triangulation induced by lifting ``(e_i, e_j)`` to height ``H_ij``.

    Lower envelope by default; ``maximize=True`` takes the upper envelope,
    which is the max-tropical convention.
    """
    H = _as_heights(H)
    if maximize:
        H = tuple(tuple(-v for v in row) for row in H)
    d, n = len(H), len(H[0])
    chosen = []
    for tree in spanning_trees(d, n):
        slack = lower_envelope_slack(tree, H)
        low = min(slack.values()) if slack else Fraction(1)
        if low > 0:
            chosen.append(tree)
        elif low == 0 and all(v >= 0 for v in slack.values()):
            tie = next(e for e, v in sorted(slack.items()) if v == 0)
            other = _cycle_partner(tree, tie)
            raise DegenerateHeights(
                f"heights are not generic: trees [{edges_str(tree)}] and [{edges_str(other)}] tie",
                (tree, other),
            )
    T = Triangulation(d, n, tuple(chosen))
    if validate:
        res = validate_triangulation(T, "exact")
        if not res:
            raise InvalidTriangulation(f"lower envelope is not a triangulation: {res.detail}")
    return T
