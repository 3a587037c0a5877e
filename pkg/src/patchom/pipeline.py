"""The full chain from heights or a triangulation to the representation checks.

Each stage appends one entry to the report; the first failing stage stops
the run and later stages are not attempted.
"""

from __future__ import annotations

from . import posetlab
from .cayley import (DegenerateHeights, Triangulation, cells_of_subdivision, regular_triangulation,
                     validate_triangulation)
from .matchfield import chirotope, extract_matching_field, gp_check, pointed_augment
from .omcore import covector_axiom_check, covectors
from .patchwork import (build_equivalence, build_patch_poset, check_elim_axioms, check_grading,
                        factorize_quotient, phi, verify_representation)
from .signcore import matrix, vector_str


class _Stop(Exception):
    pass


def run_pipeline(A, H=None, T: Triangulation | None = None, maximize: bool = True,
                 level: str = "exact", seed: int | None = None,
                 budget: int = posetlab.DEFAULT_FACE_BUDGET) -> dict:
    if (H is None) == (T is None):
        raise ValueError("give exactly one of heights or a triangulation")
    A = matrix(A)
    stages = []
    report = {"stages": stages, "failed_stage": None}

    def stage(name, ok, **info):
        stages.append({"stage": name, "ok": bool(ok), **info})
        if not ok:
            report["failed_stage"] = name
            raise _Stop

    try:
        if H is not None:
            try:
                T = regular_triangulation(H, maximize=maximize, validate=False)
            except DegenerateHeights as exc:
                stage("triangulation", False, error=str(exc))
            stage("triangulation", True, trees=len(T.trees))
        if (len(A), len(A[0])) != (T.d, T.n):
            stage("input", False, error=f"sign matrix is {len(A)}x{len(A[0])}, triangulation is {T.d}x{T.n}")
        v = validate_triangulation(T, level)
        stage("validate", v.ok, level=level, detail=v.detail, trees=len(T.trees))
        sub = cells_of_subdivision(T)
        el = check_elim_axioms(sub.cells, T.d, T.n)
        stage("elimination", el.ok, cells=len(sub.cells), witness=repr(el.witness) if not el else None)
        info = {}
        if T.n >= T.d:
            chi = chirotope(extract_matching_field(T), A)
            info["gp"] = bool(gp_check(chi))
        field_, At = pointed_augment(T, A)
        chi_t = chirotope(field_, At)
        info["gp_pointed"] = bool(gp_check(chi_t))
        info["pointed_uniform"] = chi_t.is_uniform()
        stage("chirotope", all(v for k, v in info.items() if k.startswith("gp")), **info)
        V = covectors(chi_t)
        ax = covector_axiom_check(V)
        stage("covectors", ax.ok, count=len(V), detail=ax.detail)
        P = build_patch_poset(sub.cells, T.d, T.n)
        gr = check_grading(P, T.n)
        stage("patch_poset", gr.ok, elements=len(P), **gr.data)
        chain = factorize_quotient(P, A, seed=seed, raise_on_fail=False)
        stage("factorize", chain.ok, **chain.summary())
        classes = build_equivalence(P, A, check=False)
        labels = phi(P, classes, A)
        stage("phi", True, labels=sorted(vector_str(x) for x in set(labels.values())))
        rep = verify_representation(T, A, budget=budget, factorize=False)
        stage("verify", rep["ok"], **{k: rep[k] for k in ("a", "b", "c", "d", "e")})
    except _Stop:
        pass
    report["ok"] = report["failed_stage"] is None
    return report
