"""Rank 3 drawings of patchworked pseudoline arrangements.

The subdivision of ``nΔ_2`` is copied into every orthant ``S`` of the
octahedron ``|x_1| + |x_2| + |x_3| = n``. A vertex of the subdivision is a
forest with one edge per column; in orthant ``S`` it carries the sign vector
``Z_j = S_{F(j)} A_{F(j), j}``. The zero locus of column ``j`` joins, inside
every 2-cell, the midpoints of the edges whose endpoints disagree in ``Z_j``.

Only the half ``x_2 >= 0`` is drawn (the other half is its antipode). A
point ``p`` of orthant ``S`` sits at ``(S_3 p_3, S_1 p_1)``, so row 1 is the
top corner, row 2 the centre and row 3 the right corner of the positive
quartile.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from fractions import Fraction

from .cayley import Triangulation, cells_of_subdivision, columns, supp_rows
from .signcore import matrix, vector_str

COLORS = ("#d62728", "#2ca02c", "#1f77b4", "#9467bd", "#ff7f0e", "#8c564b")
VISIBLE = [(s1, 1, s3) for s1 in (1, -1) for s3 in (1, -1)]


class UnsupportedRank(ValueError):
    pass


def _require_rank3(T: Triangulation):
    if T.d != 3:
        raise UnsupportedRank(f"rendering needs d = 3, got d = {T.d}")


def lattice_point(vertex_forest, d: int) -> tuple:
    p = [0] * d
    for i, _ in vertex_forest:
        p[i] += 1
    return tuple(p)


def cell_vertices(F, n: int) -> list:
    """Vertex forests of the mixed cell ``F``: one row chosen per column."""
    cols = columns(F, n)
    return [frozenset(zip(rows, range(n))) for rows in itertools.product(*(sorted(c) for c in cols))]


def vertex_forests(T: Triangulation) -> dict:
    """Lattice point -> vertex forest, asserting one forest per point."""
    out = {}
    for tree in T.trees:
        for v in cell_vertices(tree, T.n):
            p = lattice_point(v, T.d)
            if out.setdefault(p, v) != v:
                raise AssertionError(f"lattice point {p} carries two vertex forests")
    return out


def annotation(S, vertex_forest, A) -> tuple:
    A = matrix(A)
    row = dict((j, i) for i, j in vertex_forest)
    return tuple(S[row[j]] * A[row[j]][j] for j in range(len(row)))


def cell_edges(tree, n: int) -> list:
    """Edge forests of a cell: the faces with exactly one column of size two."""
    out = []
    cols = columns(tree, n)
    for G in itertools.product(*[
        [frozenset((i, j) for i in sub) for k in (1, 2) for sub in itertools.combinations(sorted(c), k)]
        for j, c in enumerate(cols)
    ]):
        F = frozenset().union(*G)
        if len(F) == n + 1:
            out.append(F)
    return out


def _endpoints(edge, n: int):
    a, b = cell_vertices(edge, n)
    return a, b


def _node(S, edge):
    sup = supp_rows(edge)
    return (tuple(s if i in sup else 0 for i, s in enumerate(S)), edge)


def zero_locus_graph(T: Triangulation, A, j: int) -> dict:
    """Adjacency of the column-``j`` locus over all 8 orthants.

    Nodes are edge midpoints, identified across orthants when the edge lies
    on a coordinate plane; each 2-cell contributes one segment or nothing.
    """
    _require_rank3(T)
    A = matrix(A)
    n = T.n
    adj = defaultdict(set)
    for S in itertools.product((1, -1), repeat=3):
        for tree in T.trees:
            hits = []
            for e in cell_edges(tree, n):
                a, b = _endpoints(e, n)
                if annotation(S, a, A)[j] != annotation(S, b, A)[j]:
                    hits.append(_node(S, e))
            if len(hits) not in (0, 2):
                raise AssertionError(f"cell {sorted(tree)} in orthant {S} has {len(hits)} crossing edges")
            if hits:
                u, v = hits
                adj[u].add(v)
                adj[v].add(u)
    return dict(adj)


def locus_degrees(T: Triangulation, A) -> list:
    """Per column: the set of node degrees occurring in its locus graph."""
    return [sorted({len(v) for v in zero_locus_graph(T, A, j).values()}) for j in range(T.n)]


def _place(S, p) -> tuple:
    return (S[2] * p[2], S[0] * p[0])


def _midpoint(S, edge, n):
    a, b = _endpoints(edge, n)
    pa, pb = lattice_point(a, 3), lattice_point(b, 3)
    xa, ya = _place(S, pa)
    xb, yb = _place(S, pb)
    return (Fraction(xa + xb, 2), Fraction(ya + yb, 2))


def _order_polygon(pts):
    cx = sum(x for x, _ in pts) / len(pts)
    cy = sum(y for _, y in pts) / len(pts)
    return sorted(pts, key=lambda q: math.atan2(q[1] - cy, q[0] - cx))


def render_svg(T: Triangulation, A, labels: bool = True) -> str:
    """SVG of the visible half with cells, vertex annotations, loci and axes."""
    _require_rank3(T)
    A = matrix(A)
    n = T.n
    vertex_forests(T)  # asserts forest-independence of vertex labels
    scale = Fraction(440, n)

    def sx(x):
        return float(500 + x * scale)

    def sy(y):
        return float(500 - y * scale)

    out = ['<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000" width="1000" height="1000">',
           '<rect x="0" y="0" width="1000" height="1000" fill="white"/>']
    out.append('<g id="cells" fill="#f4f4f4" stroke="#555" stroke-width="1.5">')
    for S in VISIBLE:
        for tree in T.trees:
            pts = {_place(S, lattice_point(v, 3)) for v in cell_vertices(tree, n)}
            poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in _order_polygon(list(pts)))
            out.append(f'<polygon points="{poly}"/>')
    out.append("</g>")
    out.append('<g id="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{sx(-n)}" y1="500" x2="{sx(n)}" y2="500"/>')
    out.append(f'<line x1="500" y1="{sy(-n)}" x2="500" y2="{sy(n)}"/>')
    out.append("</g>")
    for j in range(n):
        color = COLORS[j % len(COLORS)]
        out.append(f'<g id="locus-{j + 1}" stroke="{color}" stroke-width="3" fill="none">')
        for S in VISIBLE:
            for tree in T.trees:
                mids = []
                for e in cell_edges(tree, n):
                    a, b = _endpoints(e, n)
                    if annotation(S, a, A)[j] != annotation(S, b, A)[j]:
                        mids.append(_midpoint(S, e, n))
                if len(mids) == 2:
                    (x1, y1), (x2, y2) = mids
                    out.append(f'<line x1="{sx(x1):.2f}" y1="{sy(y1):.2f}" x2="{sx(x2):.2f}" y2="{sy(y2):.2f}"/>')
        out.append("</g>")
    out.append('<g id="vertices" font-family="monospace" font-size="11">')
    for S in VISIBLE:
        for p, v in sorted(vertex_forests(T).items()):
            z = vector_str(annotation(S, v, A))
            x, y = _place(S, p)
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="black">'
                       f'<title>S={vector_str(S)} p={p} Z={z}</title></circle>')
            if labels:
                out.append(f'<text x="{sx(x) + 4:.2f}" y="{sy(y) - 4:.2f}">{z}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def vertex_annotations(T: Triangulation, A, S) -> dict:
    """Lattice point -> sign vector in orthant ``S``."""
    return {p: annotation(S, v, A) for p, v in vertex_forests(T).items()}
