"""The signed cell poset of a fine mixed subdivision and its quotient.

Elements are pairs ``(S, F)`` with ``S`` an orthant sign vector over the rows
and ``F`` a cell (a column-covering subforest of some tree) whose row support
lies inside ``supp(S)``. The order is ``S <= T`` together with ``F ⊇ G``, so
minimal elements are the maximal cells in full orthants and rank grows as
cells shrink. Gluing elements whose matrices ``S A_F`` show the same signs
per column gives a poset that should be the nonzero covector poset of the
pointed chirotope; :func:`verify_representation` checks this.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict, namedtuple
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import posetlab
from .cayley import Triangulation, cells_of_subdivision, columns, supp_rows
from .matchfield import chirotope, gp_check, pointed_augment
from .omcore import covectors, psi
from .posetlab import Check, Poset
from .signcore import (BOTH, Partition, PartitionError, classify, flatten, matrix,
                       negate, sa_matrix, vector_str, weight)

SignedCell = namedtuple("SignedCell", ["S", "F"])


class FactorizationError(RuntimeError):
    def __init__(self, step: int, check: Check):
        super().__init__(f"step {step}: {check.detail}")
        self.step = step
        self.check = check


def check_elim_axioms(C: Iterable, d: int, n: int) -> Check:
    """Axioms E1 to E3 for a set of forests; E3 by exhaustive search.

    Witnesses: ``("E1", F, j)``, ``("E2", F, edge)`` or ``("E3", F, G, j)``.
    """
    C = sorted({frozenset(F) for F in C}, key=lambda F: sorted(F))
    members = set(C)
    cols = {F: columns(F, n) for F in C}
    for F in C:
        for j, rows in enumerate(cols[F]):
            if not rows:
                return Check(False, ("E1", F, j), f"column {j + 1} uncovered")
    # E2: removing one edge from a column of size >= 2 stays inside C
    for F in C:
        for i, j in sorted(F):
            if len(cols[F][j]) >= 2 and F - {(i, j)} not in members:
                return Check(False, ("E2", F, (i, j)), "not closed under taking faces")
    by_col = [defaultdict(list) for _ in range(n)]
    for H in C:
        for j in range(n):
            by_col[j][cols[H][j]].append(H)
    for F, G in itertools.product(C, repeat=2):
        cf, cg = cols[F], cols[G]
        for j in range(n):
            want = cf[j] | cg[j]
            found = False
            for H in by_col[j].get(want, ()):
                ch = cols[H]
                if all(ch[k] in (cf[k], cg[k], cf[k] | cg[k]) for k in range(n) if k != j):
                    found = True
                    break
            if not found:
                return Check(False, ("E3", F, G, j), f"no eliminating forest in column {j + 1}")
    return Check(True, data={"forests": len(C)})


def rho(S, F, n: int) -> int:
    return n + sum(1 for s in S if s) - len(F)


def orthants(support: frozenset, d: int):
    """All ``S`` with ``supp(S) ⊇ support`` and ``S != 0``."""
    choices = [(-1, 1) if i in support else (-1, 0, 1) for i in range(d)]
    for S in itertools.product(*choices):
        if any(S):
            yield S


def build_patch_poset(cells: Iterable, d: int, n: int) -> Poset:
    """``P(S)`` on :class:`SignedCell` elements, covers computed directly."""
    cells = {frozenset(F) for F in cells}
    elems = []
    for F in cells:
        for S in orthants(supp_rows(F), d):
            elems.append(SignedCell(S, F))
    elems.sort(key=lambda x: (rho(x.S, x.F, n), x.S, sorted(x.F)))
    present = set(elems)
    covers = []
    for x in elems:
        S, F = x
        for i in range(d):
            if S[i] == 0:
                for s in (-1, 1):
                    T = S[:i] + (s,) + S[i + 1:]
                    covers.append((x, SignedCell(T, F)))
        cols = columns(F, n)
        for e in F:
            if len(cols[e[1]]) >= 2:
                y = SignedCell(S, F - {e})
                if y in present:
                    covers.append((x, y))
    return Poset(elems, covers, check=False)


def _refines_columns(part: Partition, d: int, n: int) -> bool:
    return part.refines(Partition.columns(d, n))


def cell_key(x: SignedCell, A, part: Partition) -> tuple:
    return (x.S, classify(flatten(sa_matrix(x.S, x.F, A)), part))


def build_equivalence(P: Poset, A, part: Partition | None = None, check: bool = True) -> dict:
    """Element -> class key ``(S, classify(S A_F, part))``; defaults to the column partition."""
    A = matrix(A)
    d, n = len(A), len(A[0])
    if part is None:
        part = Partition.columns(d, n)
    if part.size != d * n:
        raise PartitionError(f"partition of {part.size} positions for a {d}x{n} matrix")
    if not _refines_columns(part, d, n):
        raise PartitionError("partition does not refine the column partition")
    classes = {x: cell_key(x, A, part) for x in P.elements}
    if check:
        res = posetlab.is_homogeneous(P, classes)
        if not res:
            raise posetlab.NotHomogeneous(res.witness)
    return classes


def merge_schedule(d: int, n: int, seed: int | None = None) -> list:
    """Pairs of blocks to merge, one per step, as a list of partitions.

    The default joins row ``i`` to rows ``0..i-1`` of the same column,
    columns ascending. With a seed, two blocks of a random unfinished column
    are joined at random at each step.
    """
    blocks = [[[j * d + i] for i in range(d)] for j in range(n)]
    parts = [Partition.singletons(d * n)]
    rng = random.Random(seed) if seed is not None else None
    for _ in range(n * (d - 1)):
        if rng is None:
            j = next(c for c in range(n) if len(blocks[c]) > 1)
            a, b = 0, 1
        else:
            j = rng.choice([c for c in range(n) if len(blocks[c]) > 1])
            a, b = sorted(rng.sample(range(len(blocks[j])), 2))
        merged = sorted(blocks[j][a] + blocks[j][b])
        blocks[j] = [blk for k, blk in enumerate(blocks[j]) if k not in (a, b)]
        blocks[j].insert(a, merged)
        parts.append(Partition([blk for col in blocks for blk in col], d * n))
    return parts


@dataclass
class QuotientStep:
    partition: Partition
    size: int
    class_sizes: dict
    elementary: Check
    lattice: Check
    homogeneous: Check

    @property
    def ok(self) -> bool:
        return bool(self.elementary and self.lattice and self.homogeneous)


@dataclass
class QuotientChain:
    """``P = P_0 -> P_1 -> ... -> P_k``; ``posets[t]`` has keys under ``partitions[t]``."""

    posets: list
    partitions: list
    steps: list = field(default_factory=list)
    initial_lattice: Check | None = None
    matches_direct: bool | None = None

    @property
    def final(self) -> Poset:
        return self.posets[-1]

    def __len__(self):
        return len(self.steps)

    @property
    def ok(self) -> bool:
        return bool(self.initial_lattice) and all(s.ok for s in self.steps) and bool(self.matches_direct)

    def summary(self) -> dict:
        return {
            "length": len(self.steps),
            "initial_lattice": bool(self.initial_lattice),
            "matches_direct_quotient": bool(self.matches_direct),
            "steps": [
                {"step": t + 1, "elements": s.size,
                 "class_sizes": {str(k): v for k, v in sorted(s.class_sizes.items())},
                 "homogeneous": bool(s.homogeneous), "elementary": bool(s.elementary),
                 "lattice": bool(s.lattice)}
                for t, s in enumerate(self.steps)
            ],
        }


def factorize_quotient(P: Poset, A, seed: int | None = None, raise_on_fail: bool = True,
                       check_lattice: bool = True) -> QuotientChain:
    """Coarsen the partition one merge at a time and certify every step."""
    A = matrix(A)
    d, n = len(A), len(A[0])
    parts = merge_schedule(d, n, seed)
    keys = [{x: cell_key(x, A, p) for x in P.elements} for p in parts]
    # P_0 is P itself, relabelled by its (injective) singleton keys
    P0 = Poset([keys[0][x] for x in P.elements], [(keys[0][a], keys[0][b]) for a, b in P.covers()],
               check=False)
    init = posetlab.is_lattice(P0.augmented()) if check_lattice else Check(True, detail="skipped")
    chain = QuotientChain([P0], parts, initial_lattice=init)
    if raise_on_fail and not init:
        raise FactorizationError(0, init)
    for t in range(1, len(parts)):
        prev = chain.posets[-1]
        step_cls = {}
        for x in P.elements:
            step_cls[keys[t - 1][x]] = keys[t][x]
        hom = posetlab.is_homogeneous(prev, step_cls)
        if not hom:
            step = QuotientStep(parts[t], len(prev), {}, Check(False, detail="not homogeneous"),
                                Check(False, detail="not computed"), hom)
            chain.steps.append(step)
            if raise_on_fail:
                raise FactorizationError(t, hom)
            return chain
        elem = posetlab.is_elementary(prev, step_cls)
        Q = posetlab.quotient(prev, step_cls, check=False)
        lat = posetlab.is_lattice(Q.augmented()) if check_lattice else Check(True, detail="skipped")
        sizes = defaultdict(int)
        counts = defaultdict(int)
        for c in step_cls.values():
            counts[c] += 1
        for v in counts.values():
            sizes[v] += 1
        step = QuotientStep(parts[t], len(Q), dict(sizes), elem, lat, hom)
        chain.steps.append(step)
        chain.posets.append(Q)
        if raise_on_fail and not step.ok:
            raise FactorizationError(t, elem if not elem else lat)
    direct_cls = build_equivalence(P, A, parts[-1], check=False)
    direct = posetlab.quotient(P, direct_cls, check=False)
    chain.matches_direct = (set(direct.elements) == set(chain.final.elements)
                            and set(direct.covers()) == set(chain.final.covers()))
    return chain


def phi_label(x: SignedCell, A) -> tuple:
    return tuple(x.S) + psi(x.S, x.F, A)


def phi(P: Poset, classes: dict, A) -> dict:
    """Class key -> ``(S, psi(S, F))``, checked to agree on every representative."""
    A = matrix(A)
    out = {}
    for x in P.elements:
        lab = phi_label(x, A)
        c = classes[x]
        if out.setdefault(c, lab) != lab:
            raise RuntimeError(f"labels disagree on class {c}: {out[c]} vs {lab}")
    return out


def in_delta_row(x: SignedCell, i: int) -> bool:
    return x.S[i] == 0


def in_delta_col(x: SignedCell, j: int, A) -> bool:
    """Two edges of column ``j`` carry opposite nonzero values of ``S_i A_ij``."""
    vals = [x.S[i] * A[i][jj] for (i, jj) in x.F if jj == j]
    return any(a == -b != 0 for a, b in itertools.combinations(vals, 2))


def quotient_ranks(Q: Poset, n: int) -> Check:
    """Grade of the quotient against ``n + |S| - |S A_F / ~|`` up to one shift."""
    g = posetlab.grade(Q)
    formula = {c: n + sum(1 for s in c[0] if s) - weight(c[1]) for c in Q.elements}
    shifts = {g[c] - formula[c] for c in Q.elements}
    if len(shifts) != 1:
        bad = next(c for c in Q.elements if g[c] - formula[c] != g[Q.elements[0]] - formula[Q.elements[0]])
        return Check(False, bad, "rank formula off by a non-constant shift")
    return Check(True, data={"shift": shifts.pop(), "rho_range": [min(formula.values()), max(formula.values())],
                             "dim_range": [min(g.values()) - 1, max(g.values()) - 1]})


def _conformal_matrix(L: np.ndarray) -> np.ndarray:
    """``C[a, b] = L[a] <= L[b]`` in the conformal order."""
    out = np.zeros((len(L), len(L)), dtype=bool)
    for a in range(len(L)):
        out[a] = np.all((L[a] == 0) | (L[a] == L), axis=1)
    return out


def bergman_vertex_map(cells: Iterable, A, d: int, n: int) -> dict:
    """Vertices of the reflected subdivision in full orthants -> ``(S, S_{F(j)} A_{F(j), j})``."""
    A = matrix(A)
    out = {}
    for F in sorted({frozenset(F) for F in cells if len(F) == n}, key=sorted):
        for S in itertools.product((-1, 1), repeat=d):
            rowof = dict((j, i) for (i, j) in F)
            out[SignedCell(S, F)] = tuple(S) + tuple(S[rowof[j]] * A[rowof[j]][j] for j in range(n))
    return out


def verify_representation(T: Triangulation, A, budget: int = posetlab.DEFAULT_FACE_BUDGET,
                          factorize: bool = True, seed: int | None = None) -> dict:
    """End-to-end checks (a) to (e) plus supporting certificates, as a JSON-ready dict."""
    A = matrix(A)
    d, n = T.d, T.n
    report = {}
    sub = cells_of_subdivision(T)
    P = build_patch_poset(sub.cells, d, n)
    classes = build_equivalence(P, A)
    Q = posetlab.quotient(P, classes, check=False)
    labels = phi(P, classes, A)
    field_, At = pointed_augment(T, A)
    chi_t = chirotope(field_, At)
    V = covectors(chi_t)
    nonzero = {v for v in V if any(v)}
    img = [labels[c] for c in Q.elements]
    report["poset"] = {"elements": len(P), "classes": len(Q), "covectors_nonzero": len(nonzero)}

    dup = len(set(img)) != len(img)
    wit = None
    if dup:
        seen = {}
        for c in Q.elements:
            if labels[c] in seen:
                wit = [repr(seen[labels[c]]), repr(c)]
                break
            seen[labels[c]] = c
    report["a"] = {"name": "phi injective", "ok": not dup, "witness": wit}

    surj = set(img) == nonzero
    extra = sorted(set(img) - nonzero)[:1] + sorted(nonzero - set(img))[:1]
    report["b"] = {"name": "phi onto nonzero covectors", "ok": surj,
                   "witness": [vector_str(v) for v in extra] or None}

    L = np.array(img, dtype=np.int64).reshape(len(img), d + n)
    M = Q.relation_matrix()
    C = _conformal_matrix(L)
    same = bool(np.array_equal(M, C))
    wit = None
    if not same:
        a, b = map(int, np.argwhere(M != C)[0])
        wit = [vector_str(img[a]), vector_str(img[b])]
    report["c"] = {"name": "phi order isomorphism", "ok": same, "witness": wit}

    wit = None
    for x in P.elements:
        lab = labels[classes[x]]
        for k in range(d + n):
            member = in_delta_row(x, k) if k < d else in_delta_col(x, k - d, A)
            if member != (lab[k] == 0):
                wit = [vector_str(x.S), sorted([i + 1, j + 1] for i, j in x.F), k + 1]
                break
        if wit:
            break
    report["d"] = {"name": "subcomplex membership matches zero coordinates", "ok": wit is None,
                   "witness": wit}

    K = posetlab.order_complex(Q, budget)
    chi_e = posetlab.euler_char(K)
    expected = 1 + (-1) ** (d - 1)
    sphere = {"name": "sphere checks", "euler": chi_e, "euler_expected": expected,
              "euler_ok": chi_e == expected}
    try:
        betti = posetlab.homology_ranks(K, budget)
        want = [1] + [0] * (d - 2) + [1] if d > 1 else [2]
        sphere["betti"] = betti
        sphere["betti_expected"] = want
        sphere["betti_ok"] = betti == want
    except posetlab.BudgetExceeded as exc:
        sphere["betti"] = None
        sphere["betti_ok"] = None
        sphere["betti_skipped"] = str(exc)
    sphere["ok"] = sphere["euler_ok"] and sphere["betti_ok"] is not False
    report["e"] = sphere

    gp = gp_check(chi_t)
    report["chirotope"] = {"gp": bool(gp), "uniform": chi_t.is_uniform()}
    elim = check_elim_axioms(sub.cells, d, n)
    report["elimination"] = {"ok": bool(elim), "witness": repr(elim.witness) if not elim else None}
    rk = quotient_ranks(Q, n)
    report["ranks"] = {"ok": bool(rk), **rk.data}

    sym_ok = all(classes[SignedCell(negate(x.S), x.F)] == (negate(x.S), negate_general(classes[x][1]))
                 for x in P.elements)
    sym_ok = sym_ok and all(labels[(negate(c[0]), negate_general(c[1]))] == negate(labels[c])
                            for c in Q.elements)
    report["symmetry"] = {"ok": sym_ok}

    vmap = bergman_vertex_map(sub.cells, A, d, n)
    topes = {v for v in V if all(v)}
    bad = [k for k, v in vmap.items() if v not in topes]
    report["bergman"] = {"vertices": len(vmap), "ok": not bad}

    if factorize:
        chain = factorize_quotient(P, A, seed=seed, raise_on_fail=False)
        report["factorization"] = {"ok": chain.ok, **chain.summary()}
    report["ok"] = all(report[k]["ok"] for k in ("a", "b", "c", "d", "e"))
    return report


def negate_general(g: Sequence[int]) -> tuple:
    """Negate a block summary; ``±`` and 0 are fixed."""
    return tuple(v if v in (0, BOTH) else -v for v in g)


def check_grading(P: Poset, n: int) -> Check:
    """``grade(P)`` against ``n + |S| - |F|`` shifted to start at 1."""
    try:
        g = posetlab.grade(P)
    except posetlab.NotGraded as exc:
        return Check(False, exc.witness, "not graded")
    r = {x: rho(x.S, x.F, n) for x in P.elements}
    shift = min(r.values()) - 1
    for x in P.elements:
        if g[x] != r[x] - shift:
            return Check(False, x, f"rank {g[x]} but formula gives {r[x] - shift}")
    return Check(True, data={"rho_range": [min(r.values()), max(r.values())]})
