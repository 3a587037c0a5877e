"""Command-line front end.

Exit codes: 0 pass, 1 usage or I/O error, 2 verification failure, 3 budget
exceeded. Reports go to stdout as sorted JSON so identical inputs give
byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import posetlab
from .cayley import (DegenerateHeights, InvalidTriangulation, Triangulation, cells_of_subdivision,
                     mixed_heights, regular_triangulation, validate_triangulation)
from .formats import InputError, dumps, read_input, read_signs
from .matchfield import chirotope, extract_matching_field, gp_check, pointed_augment
from .omcore import covector_axiom_check, covectors, export_lines
from .patchwork import (FactorizationError, bergman_vertex_map, build_patch_poset, check_elim_axioms,
                        check_grading, factorize_quotient, verify_representation)
from .pipeline import run_pipeline
from .render import UnsupportedRank, locus_degrees, render_svg
from .signcore import vector_str

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_BUDGET = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Usage(Exception):
    pass


def _triangulation(args) -> Triangulation:
    kind, obj = read_input(args.input)
    if kind == "heights":
        return regular_triangulation(obj, maximize=not args.min, validate=False)
    return obj


def _signs(args, T: Triangulation):
    A = read_signs(args.signs)
    if (len(A), len(A[0])) != (T.d, T.n):
        raise _Usage(f"sign matrix is {len(A)}x{len(A[0])} but the triangulation is {T.d}x{T.n}")
    return A


def _emit(obj, out=None):
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    T = _triangulation(args)
    res = validate_triangulation(T, args.level)
    _emit({"ok": res.ok, "detail": res.detail, "witness": res.witness, **res.data})
    return EXIT_OK if res else EXIT_FAIL


def cmd_subdivide(args) -> int:
    kind, H = read_input(args.input)
    if kind != "heights":
        raise _Usage("subdivide needs a height matrix file")
    T = regular_triangulation(H, maximize=not args.min)
    out = T.to_json()
    if args.show_heights:
        out["mixed_heights"] = {"".join(map(str, p)): str(h) for p, h in mixed_heights(H).items()}
    _emit(out, args.output)
    return EXIT_OK


def cmd_chirotope(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    if args.pointed:
        field_, At = pointed_augment(T, A)
        chi = chirotope(field_, At)
    else:
        chi = chirotope(extract_matching_field(T), A)
    gp = gp_check(chi, budget=args.budget)
    _emit({"values": chi.export_lines(), "gp": gp.ok, "witness": gp.witness, "uniform": chi.is_uniform()})
    return EXIT_OK if gp else EXIT_FAIL


def cmd_covectors(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    if args.pointed:
        field_, At = pointed_augment(T, A)
        chi = chirotope(field_, At)
    else:
        chi = chirotope(extract_matching_field(T), A)
    V = covectors(chi, budget=args.budget)
    ax = covector_axiom_check(V)
    _emit({"covectors": export_lines(V), "count": len(V), "axioms": ax.ok, "detail": ax.detail,
           "witness": ax.witness})
    return EXIT_OK if ax else EXIT_FAIL


def cmd_patchwork(args) -> int:
    T = _triangulation(args)
    sub = cells_of_subdivision(T)
    el = check_elim_axioms(sub.cells, T.d, T.n)
    P = build_patch_poset(sub.cells, T.d, T.n)
    gr = check_grading(P, T.n)
    lat = posetlab.is_lattice(P.augmented())
    ok = el.ok and gr.ok and lat.ok
    _emit({"cells": len(sub.cells), "elements": len(P), "covers": P.n_covers,
           "elimination": el.ok, "graded": gr.ok, "lattice": lat.ok, **gr.data})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_factorize(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    P = build_patch_poset(cells_of_subdivision(T).cells, T.d, T.n)
    seed = args.seed if args.merge_order == "random" else None
    chain = factorize_quotient(P, A, seed=seed, raise_on_fail=False)
    _emit({"ok": chain.ok, **chain.summary()})
    return EXIT_OK if chain.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    seed = args.seed if args.merge_order == "random" else None
    rep = verify_representation(T, A, budget=args.budget, seed=seed)
    _emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_render(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    svg = render_svg(T, A, labels=not args.no_labels)
    Path(args.output).write_text(svg)
    degrees = locus_degrees(T, A)
    ok = all(ds in ([], [2]) for ds in degrees)
    _emit({"output": str(args.output), "locus_degrees": degrees, "closed_curves": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bergman(args) -> int:
    T = _triangulation(args)
    A = _signs(args, T)
    sub = cells_of_subdivision(T)
    vmap = bergman_vertex_map(sub.cells, A, T.d, T.n)
    field_, At = pointed_augment(T, A)
    topes = {v for v in covectors(chirotope(field_, At), budget=args.budget) if all(v)}
    rows = sorted(
        ({"S": vector_str(k.S), "vertex": [[i + 1, j + 1] for i, j in sorted(k.F)],
          "image": vector_str(v), "tope": v in topes} for k, v in vmap.items()),
        key=lambda r: (r["S"], r["vertex"]),
    )
    ok = all(r["tope"] for r in rows)
    _emit({"vertices": rows, "all_topes": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_pipeline(args) -> int:
    A = read_signs(args.signs)
    kind, obj = read_input(args.input)
    kw = {"H": obj} if kind == "heights" else {"T": obj}
    seed = args.seed if args.merge_order == "random" else None
    rep = run_pipeline(A, maximize=not args.min, level=args.level, seed=seed, budget=args.budget, **kw)
    _emit(rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="patchom", description="Oriented matroids from patchworked triangulations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, signs=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("input", help="triangulation or height matrix JSON")
        if signs:
            sp.add_argument("signs", help="sign matrix JSON")
        sp.add_argument("--min", action="store_true", help="read heights with the min convention (default max)")
        sp.add_argument("--budget", type=int, default=posetlab.DEFAULT_FACE_BUDGET)
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check a triangulation", signs=False)
    sp.add_argument("--level", choices=("fast", "exact"), default="exact")
    sp = add("subdivide", cmd_subdivide, "regular triangulation from heights", signs=False)
    sp.add_argument("-o", "--output")
    sp.add_argument("--show-heights", action="store_true")
    for name, func in (("chirotope", cmd_chirotope), ("covectors", cmd_covectors)):
        sp = add(name, func, f"{name} of the (pointed) matching field")
        sp.add_argument("--pointed", action=argparse.BooleanOptionalAction, default=True)
    add("patchwork", cmd_patchwork, "signed cell poset summary", signs=False)
    for name, func, h in (("factorize", cmd_factorize, "elementary quotient chain"),
                          ("verify", cmd_verify, "representation checks"),
                          ("pipeline", cmd_pipeline, "every stage in order")):
        sp = add(name, func, h)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--merge-order", choices=("fixed", "random"), default="fixed")
        if name == "pipeline":
            sp.add_argument("--level", choices=("fast", "exact"), default="exact")
    sp = add("render", cmd_render, "SVG of a rank 3 arrangement")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--no-labels", action="store_true")
    add("bergman", cmd_bergman, "vertex map to topes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, _Usage, UnsupportedRank, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except posetlab.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DegenerateHeights, InvalidTriangulation, FactorizationError, posetlab.PosetError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
