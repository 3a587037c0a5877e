"""Finite posets, homogeneous quotients, gradings, lattice tests and order complexes.

A :class:`Poset` is stored by its cover relation. Strict down-sets and
up-sets are kept as Python-int bitsets (bit ``k`` is element ``k``), which
makes closure, homogeneity and quotient computations cheap at the sizes we
care about (a few thousand elements).
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

import numpy as np

DEFAULT_FACE_BUDGET = 2_000_000


class PosetError(ValueError):
    pass


class NotHomogeneous(PosetError):
    def __init__(self, witness):
        super().__init__(f"equivalence is not homogeneous: {witness}")
        self.witness = witness


class NotGraded(PosetError):
    def __init__(self, witness):
        super().__init__(f"poset is not graded: {witness}")
        self.witness = witness


class BudgetExceeded(RuntimeError):
    """Too many faces for an exact computation; fall back to Euler characteristic."""


class _Bound:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (_bound, (self.name,))


def _bound(name):
    return BOTTOM if name == "0^" else TOP


BOTTOM = _Bound("0^")
TOP = _Bound("1^")


@dataclass
class Check:
    """Outcome of a verification: truthy on success, with a witness otherwise."""

    ok: bool
    witness: Any = None
    detail: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Poset:
    """Immutable finite poset on hashable labels.

    ``covers`` are ``(lower, upper)`` label pairs and must form a Hasse
    diagram: acyclic and free of transitive edges (checked).
    """

    def __init__(self, elements: Iterable[Hashable], covers: Iterable[tuple], check: bool = True):
        self.elements = tuple(elements)
        self.index = {x: k for k, x in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise PosetError("duplicate elements")
        n = len(self.elements)
        lower = [[] for _ in range(n)]
        upper = [[] for _ in range(n)]
        seen = set()
        for a, b in covers:
            ia, ib = self.index[a], self.index[b]
            if ia == ib:
                raise PosetError(f"loop at {a!r}")
            if (ia, ib) in seen:
                continue
            seen.add((ia, ib))
            upper[ia].append(ib)
            lower[ib].append(ia)
        self._lower = tuple(tuple(sorted(v)) for v in lower)
        self._upper = tuple(tuple(sorted(v)) for v in upper)
        self._topo = self._toposort()
        self._down = self._closure(self._lower, self._topo)
        self._up = self._closure(self._upper, self._topo[::-1])
        self._lock = threading.Lock()
        self._matrix = None
        if check:
            for ia in range(n):
                for ib in self._upper[ia]:
                    others = 0
                    for ic in self._upper[ia]:
                        if ic != ib:
                            others |= self._up[ic]
                    if others >> ib & 1:
                        raise PosetError(
                            f"({self.elements[ia]!r}, {self.elements[ib]!r}) is not a cover"
                        )

    def _toposort(self):
        n = len(self.elements)
        indeg = [len(self._lower[k]) for k in range(n)]
        ready = [k for k in range(n) if indeg[k] == 0]
        order = []
        while ready:
            k = ready.pop()
            order.append(k)
            for u in self._upper[k]:
                indeg[u] -= 1
                if indeg[u] == 0:
                    ready.append(u)
        if len(order) != n:
            stuck = next(k for k in range(n) if indeg[k] > 0)
            raise PosetError(f"cover relation has a cycle through {self.elements[stuck]!r}")
        return order

    @staticmethod
    def _closure(adj, order):
        # strict closure: bit set for every element reachable through adj
        out = [0] * len(adj)
        for k in order:
            m = 0
            for v in adj[k]:
                m |= out[v] | (1 << v)
            out[k] = m
        return out

    @classmethod
    def from_edges(cls, elements: Iterable[Hashable], edges: Iterable[tuple]) -> "Poset":
        """Poset generated by arbitrary ``a < b`` edges (transitively closed, Hasse-reduced)."""
        elements = tuple(elements)
        index = {x: k for k, x in enumerate(elements)}
        n = len(elements)
        succ = [set() for _ in range(n)]
        for a, b in edges:
            ia, ib = index[a], index[b]
            if ia == ib:
                raise PosetError(f"relation is not antisymmetric at {a!r}")
            succ[ia].add(ib)
        pred = [[] for _ in range(n)]
        for a in range(n):
            for b in succ[a]:
                pred[b].append(a)
        tmp = Poset.__new__(Poset)
        tmp.elements = elements
        tmp._lower = tuple(tuple(p) for p in pred)
        tmp._upper = tuple(tuple(sorted(s)) for s in succ)
        order = tmp._toposort()
        up = cls._closure(tmp._upper, order[::-1])
        covers = []
        for a in range(n):
            others = 0
            for c in succ[a]:
                others |= up[c]
            for b in succ[a]:
                if not others >> b & 1:
                    covers.append((elements[a], elements[b]))
        return cls(elements, covers, check=False)

    @classmethod
    def from_relation(cls, elements: Iterable[Hashable], leq) -> "Poset":
        """Poset from a comparison function ``leq(x, y)`` (quadratic; small inputs)."""
        elements = tuple(elements)
        edges = [(a, b) for a in elements for b in elements if a != b and leq(a, b)]
        for a, b in edges:
            if leq(b, a):
                raise PosetError(f"relation is not antisymmetric: {a!r}, {b!r}")
        return cls.from_edges(elements, edges)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in self.index

    def __repr__(self):
        return f"Poset({len(self)} elements, {self.n_covers} covers)"

    @property
    def n_covers(self) -> int:
        return sum(len(u) for u in self._upper)

    def covers(self) -> list:
        el = self.elements
        return [(el[a], el[b]) for a in range(len(el)) for b in self._upper[a]]

    def lower_covers(self, x) -> list:
        return [self.elements[k] for k in self._lower[self.index[x]]]

    def upper_covers(self, x) -> list:
        return [self.elements[k] for k in self._upper[self.index[x]]]

    def leq(self, x, y) -> bool:
        a, b = self.index[x], self.index[y]
        return a == b or bool(self._up[a] >> b & 1)

    def lt(self, x, y) -> bool:
        a, b = self.index[x], self.index[y]
        return a != b and bool(self._up[a] >> b & 1)

    def down_mask(self, k: int, strict: bool = True) -> int:
        return self._down[k] if strict else self._down[k] | (1 << k)

    def up_mask(self, k: int, strict: bool = True) -> int:
        return self._up[k] if strict else self._up[k] | (1 << k)

    def minimal(self) -> list:
        return [self.elements[k] for k in range(len(self)) if not self._lower[k]]

    def maximal(self) -> list:
        return [self.elements[k] for k in range(len(self)) if not self._upper[k]]

    def relation_matrix(self) -> np.ndarray:
        """Boolean ``M[a, b] = (a <= b)`` over element indices; built once."""
        with self._lock:
            if self._matrix is None:
                n = len(self)
                nbytes = (n + 7) // 8
                m = np.zeros((n, n), dtype=bool)
                for a in range(n):
                    mask = self._up[a] | (1 << a)
                    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
                    m[a] = np.unpackbits(raw, bitorder="little")[:n].astype(bool)
                m.setflags(write=False)
                self._matrix = m
            return self._matrix

    def is_isomorphic_copy(self, other: "Poset", mapping: dict) -> bool:
        """True iff ``mapping`` (label -> label) carries covers onto covers bijectively."""
        if len(self) != len(other) or set(mapping.values()) != set(other.elements):
            return False
        mine = {(mapping[a], mapping[b]) for a, b in self.covers()}
        return mine == set(other.covers())

    def augmented(self) -> "Poset":
        """Adjoin a bottom and a top element (``posetlab.BOTTOM``, ``posetlab.TOP``)."""
        covers = self.covers()
        covers += [(BOTTOM, x) for x in self.minimal()]
        covers += [(x, TOP) for x in self.maximal()]
        if not self.elements:
            covers.append((BOTTOM, TOP))
        return Poset((BOTTOM,) + self.elements + (TOP,), covers, check=False)

    def to_json(self) -> str:
        return json.dumps(
            {"elements": [repr(x) for x in self.elements],
             "covers": [[a, b] for a in range(len(self)) for b in self._upper[a]]},
            sort_keys=True,
        )

    def to_dot(self, label=repr) -> str:
        lines = ["digraph hasse {", "  rankdir=BT;"]
        for k, x in enumerate(self.elements):
            text = str(label(x)).replace('"', '\\"')
            lines.append(f'  n{k} [label="{text}"];')
        for a in range(len(self)):
            for b in self._upper[a]:
                lines.append(f"  n{a} -> n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _class_masks(P: Poset, classes: dict):
    missing = [x for x in P.elements if x not in classes]
    if missing:
        raise PosetError(f"classes do not cover the poset, e.g. {missing[0]!r}")
    masks: dict = defaultdict(int)
    order = []
    for k, x in enumerate(P.elements):
        c = classes[x]
        if c not in masks:
            order.append(c)
        masks[c] |= 1 << k
    return order, masks


def is_homogeneous(P: Poset, classes: dict) -> Check:
    """Every ``u ~ tau <= sigma`` lifts to some ``u <= v ~ sigma``.

    On failure the witness is ``(tau, sigma, u)``.
    """
    order, masks = _class_masks(P, classes)
    cid = {c: k for k, c in enumerate(order)}
    elem_class = [cid[classes[x]] for x in P.elements]
    members = [list(_bits(masks[c])) for c in order]
    for c, mem in enumerate(members):
        if len(mem) == 1:
            continue
        above = []
        for u in mem:
            reach = P.up_mask(u, strict=False)
            above.append({elem_class[v] for v in _bits(reach)})
        union = set().union(*above)
        for k, u in enumerate(mem):
            lacking = union - above[k]
            if lacking:
                target = min(lacking)
                tau = next(mem[t] for t in range(len(mem)) if target in above[t])
                sigma = next(v for v in _bits(P.up_mask(tau, strict=False)) if elem_class[v] == target)
                el = P.elements
                return Check(False, (el[tau], el[sigma], el[u]),
                             f"{el[u]!r} ~ {el[tau]!r} <= {el[sigma]!r} but nothing in its class lies above")
    return Check(True)


def quotient(P: Poset, classes: dict, check: bool = True) -> Poset:
    """Homogeneous quotient; elements are the class labels in first-seen order."""
    if check:
        res = is_homogeneous(P, classes)
        if not res:
            raise NotHomogeneous(res.witness)
    order, _ = _class_masks(P, classes)
    edges = set()
    for a, b in P.covers():
        ca, cb = classes[a], classes[b]
        if ca != cb:
            edges.add((ca, cb))
    try:
        return Poset.from_edges(order, edges)
    except PosetError as exc:
        raise PosetError(f"quotient order is not antisymmetric: {exc}") from exc


def is_elementary(P: Poset, classes: dict) -> Check:
    """Classes are singletons or triples ``{a, b, c}`` with ``a`` and ``b`` covering ``c``."""
    groups = defaultdict(list)
    for x in P.elements:
        groups[classes[x]].append(x)
    for c, mem in groups.items():
        if len(mem) == 1:
            continue
        if len(mem) != 3:
            return Check(False, (c, tuple(mem)), f"class of size {len(mem)}")
        ok = False
        for g in mem:
            rest = [x for x in mem if x != g]
            if all(g in P.lower_covers(x) for x in rest):
                ok = True
                break
        if not ok:
            return Check(False, (c, tuple(mem)), "no element is covered by the other two")
    return Check(True)


def grade(P: Poset) -> dict:
    """Rank function with minimal elements at 1 and every cover raising rank by 1.

    Raises :class:`NotGraded` with a witness cover when no such function exists.
    """
    rank = {}
    for k in P._topo:
        low = P._lower[k]
        if not low:
            rank[k] = 1
            continue
        vals = {rank[c] for c in low}
        if len(vals) > 1:
            a = min(low, key=lambda c: rank[c])
            raise NotGraded((P.elements[a], P.elements[k]))
        rank[k] = vals.pop() + 1
    return {P.elements[k]: r for k, r in rank.items()}


def meet(P: Poset, x, y):
    """Greatest common lower bound, or ``None`` when there is none."""
    common = P.down_mask(P.index[x], strict=False) & P.down_mask(P.index[y], strict=False)
    if not common:
        return None
    size = bin(common).count("1")
    for z in _bits(common):
        if bin(P.down_mask(z, strict=False)).count("1") == size:
            return P.elements[z]
    return None


def is_lattice(P: Poset, method: str = "table") -> Check:
    """Bounded poset in which every pair has a meet (joins then follow).

    ``table`` fills a meet table along a linear extension: for incomparable
    ``x, y`` every common lower bound lies below some lower cover ``x'`` of
    ``x``, so ``meet(x, y)`` is the greatest of the ``meet(x', y)``. ``scan``
    compares common down-sets directly and is kept as a cross-check.
    """
    n = len(P)
    if n == 0:
        return Check(False, None, "empty poset")
    if len(P.minimal()) != 1 or len(P.maximal()) != 1:
        return Check(False, None, "not bounded")
    if method == "scan":
        return _lattice_scan(P)
    if method != "table":
        raise ValueError(f"unknown method {method!r}")
    M = P.relation_matrix()
    table = np.full((n, n), -1, dtype=np.int32)
    for x in P._topo:
        row = table[x]
        up, down = M[x], M[:, x]
        row[up] = x
        row[down] = np.nonzero(down)[0]
        inc = np.nonzero(~(up | down))[0]
        if inc.size == 0:
            continue
        cand = table[list(P._lower[x])][:, inc]
        best = np.full(inc.size, -1, dtype=np.int32)
        for c in range(cand.shape[0]):
            ok = M[cand, cand[c][None, :]].all(axis=0) & (best < 0)
            best[ok] = cand[c][ok]
        if (best < 0).any():
            y = int(inc[np.argmax(best < 0)])
            return Check(False, (P.elements[x], P.elements[y]), "pair without a meet")
        row[inc] = best
    return Check(True)


def _lattice_scan(P: Poset) -> Check:
    n = len(P)
    M = P.relation_matrix()
    D = np.ascontiguousarray(M.T)  # D[b] = down-set of b
    dsize = D.sum(axis=1)
    for x in range(n):
        comparable = M[x] | D[x]
        ys = np.nonzero(~comparable[x + 1:])[0] + x + 1
        if ys.size == 0:
            continue
        for start in range(0, ys.size, 512):
            chunk = ys[start:start + 512]
            C = D[chunk] & D[x]
            s = C.sum(axis=1)
            ok = (C & (dsize[None, :] == s[:, None])).any(axis=1)
            if not ok.all():
                y = int(chunk[np.argmin(ok)])
                return Check(False, (P.elements[x], P.elements[y]), "pair without a meet")
    return Check(True)


@dataclass
class SimplicialComplex:
    """Faces grouped by dimension; each face is a sorted tuple of vertex ids."""

    vertices: tuple
    faces: list

    @property
    def dim(self) -> int:
        return len(self.faces) - 1

    def f_vector(self) -> list:
        return [len(f) for f in self.faces]

    def n_faces(self) -> int:
        return sum(self.f_vector())


def order_complex(P: Poset, budget: int = DEFAULT_FACE_BUDGET) -> SimplicialComplex:
    """Chains of ``P`` as simplices, vertices numbered along a linear extension."""
    pos = {k: t for t, k in enumerate(P._topo)}
    ups = [sorted(_bits(P.up_mask(k)), key=pos.__getitem__) for k in range(len(P))]
    faces = defaultdict(list)
    count = 0

    def extend(chain, last):
        nonlocal count
        faces[len(chain) - 1].append(tuple(pos[c] for c in chain))
        count += 1
        if count > budget:
            raise BudgetExceeded(f"order complex has more than {budget} faces")
        for v in ups[last]:
            chain.append(v)
            extend(chain, v)
            chain.pop()

    for k in P._topo:
        extend([k], k)
    dims = max(faces) + 1 if faces else 0
    return SimplicialComplex(tuple(P.elements[k] for k in P._topo),
                             [sorted(faces[d]) for d in range(dims)])


def euler_char(K: SimplicialComplex) -> int:
    return sum((-1) ** d * len(f) for d, f in enumerate(K.faces))


def _sparse_rank(rows) -> int:
    """Rank over Q by fraction-free elimination on integer sparse rows."""
    from math import gcd

    pivots: dict = {}
    for row in rows:
        r = dict(row)
        while r:
            c = min(r)
            p = pivots.get(c)
            if p is None:
                pivots[c] = r
                break
            a, b = p[c], r[c]
            new = {k: a * v for k, v in r.items()}
            for k, v in p.items():
                val = new.get(k, 0) - b * v
                if val:
                    new[k] = val
                else:
                    new.pop(k, None)
            g = 0
            for v in new.values():
                g = gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                new = {k: v // g for k, v in new.items()}
            r = new
    return len(pivots)


def boundary_rank(K: SimplicialComplex, dim: int) -> int:
    if dim <= 0 or dim > K.dim:
        return 0
    index = {f: k for k, f in enumerate(K.faces[dim - 1])}
    rows = []
    for face in K.faces[dim]:
        rows.append({index[face[:t] + face[t + 1:]]: (-1) ** t for t in range(len(face))})
    return _sparse_rank(rows)


def homology_ranks(K: SimplicialComplex, budget: int = DEFAULT_FACE_BUDGET) -> list:
    """Rational Betti numbers ``b_0, ..., b_dim``."""
    if K.n_faces() > budget:
        raise BudgetExceeded(f"{K.n_faces()} faces exceed the homology budget {budget}; use euler_char")
    ranks = [boundary_rank(K, k) for k in range(K.dim + 2)]
    return [len(K.faces[k]) - ranks[k] - ranks[k + 1] for k in range(K.dim + 1)]
