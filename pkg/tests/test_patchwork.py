import itertools
import random

import pytest

from conftest import STAIRCASE, random_instance
from patchom import posetlab
from patchom.cayley import Triangulation, cells_of_subdivision, parse_edges, supp_rows
from patchom.omcore import covectors
from patchom.matchfield import chirotope, pointed_augment
from patchom.patchwork import (SignedCell, bergman_vertex_map, build_equivalence, build_patch_poset,
                               check_elim_axioms, check_grading, factorize_quotient, merge_schedule,
                               phi, quotient_ranks, verify_representation)
from patchom.signcore import Partition, PartitionError, intersect, matrix, vector

EX = [("-++", "11 12 13 21 31"), ("-++", "12 13 21 31 32"), ("-++", "13 21 23 31 32"),
      ("+++", "13 21 23 31 32")]


def cells(T):
    return cells_of_subdivision(T).cells


def ex_elements():
    return [SignedCell(vector(s), parse_edges(f)) for s, f in EX]


@pytest.fixture(scope="module")
def example_poset(example):
    T, A = example
    return build_patch_poset(cells(T), 3, 3)


def test_elimination_on_subdivisions(example):
    assert check_elim_axioms(cells(STAIRCASE), 2, 3)
    assert check_elim_axioms(cells(example[0]), 3, 3)
    for seed in range(4):
        _, T, _ = random_instance(3, 4, seed)
        assert check_elim_axioms(cells(T), 3, 4)


def test_elimination_witness_in_staircase():
    C = cells(STAIRCASE)
    F, G, j = parse_edges("11 12 13 23"), parse_edges("11 21 22 23"), 1
    cols = lambda X: [frozenset(i for i, k in X if k == c) for c in range(3)]  # noqa: E731
    good = [H for H in C if cols(H)[j] == cols(F)[j] | cols(G)[j]
            and all(cols(H)[k] in (cols(F)[k], cols(G)[k], cols(F)[k] | cols(G)[k]) for k in (0, 2))]
    assert parse_edges("11 12 22 23") in good


def test_elimination_fails_without_middle_tree():
    T = Triangulation(2, 3, (STAIRCASE.trees[0], STAIRCASE.trees[2]))
    res = check_elim_axioms(cells(T), 2, 3)
    assert not res and res.witness[0] == "E3" and res.witness[3] == 1


def test_elimination_E1_E2():
    assert check_elim_axioms([parse_edges("11 12")], 2, 3).witness[0] == "E1"
    assert check_elim_axioms([parse_edges("11 21 12 13")], 2, 3).witness[0] == "E2"


def test_rank_one_poset():
    P = build_patch_poset([parse_edges("11")], 1, 1)
    assert len(P) == 2 and P.n_covers == 0
    K = posetlab.order_complex(P)
    assert posetlab.homology_ranks(K) == [2]


def test_element_count_direct(example):
    T, _ = example
    C = cells(T)
    direct = sum(1 for F in C for S in itertools.product((-1, 0, 1), repeat=3)
                 if all(S[i] for i in supp_rows(F)))
    formula = sum(2 ** len(supp_rows(F)) * 3 ** (3 - len(supp_rows(F))) for F in C)
    P = build_patch_poset(C, 3, 3)
    assert len(P) == direct == formula


def test_order_matches_definition():
    P = build_patch_poset(cells(STAIRCASE), 2, 3)
    for x, y in itertools.product(P.elements, repeat=2):
        want = all(a == 0 or a == b for a, b in zip(x.S, y.S)) and x.F >= y.F
        assert P.leq(x, y) == want


def test_grading(example_poset):
    P = build_patch_poset(cells(STAIRCASE), 2, 3)
    res = check_grading(P, 3)
    assert res and res.data["rho_range"] == [1, 2]
    res = check_grading(example_poset, 3)
    assert res and res.data["rho_range"] == [1, 3]


def test_meets_are_intersections(example_poset):
    P = example_poset
    L = P.augmented()
    checked = 0
    for x, y in itertools.combinations(P.elements, 2):
        S, F = intersect(x.S, y.S), x.F | y.F
        z = SignedCell(S, F)
        m = posetlab.meet(L, x, y)
        if z in P.index and P.leq(z, x) and P.leq(z, y):
            assert m == z
            checked += 1
        else:
            assert m is posetlab.BOTTOM
    assert checked > 100
    assert posetlab.is_lattice(L)


def test_worked_equivalence(example_poset, example):
    _, A = example
    cls = build_equivalence(example_poset, A)
    x1, x2, x3, x4 = ex_elements()
    assert cls[x1] == cls[x2]
    assert cls[x2] != cls[x3]
    assert cls[x4] not in {cls[x1], cls[x2], cls[x3]}


def test_singleton_partition_identity(example_poset, example):
    _, A = example
    cls = build_equivalence(example_poset, A, Partition.singletons(9))
    assert len(set(cls.values())) == len(example_poset)


def test_rank_one_columns_identity():
    T = Triangulation(1, 3, (frozenset((0, j) for j in range(3)),))
    P = build_patch_poset(cells(T), 1, 3)
    cls = build_equivalence(P, [[1, -1, 1]])
    assert len(set(cls.values())) == len(P)


def test_non_refining_partition():
    P = build_patch_poset(cells(STAIRCASE), 2, 3)
    with pytest.raises(PartitionError):
        build_equivalence(P, [[1, 1, 1], [1, 1, 1]], Partition([[0, 2], [1], [3], [4], [5]]))


def test_phi_worked_labels(example_poset, example):
    _, A = example
    cls = build_equivalence(example_poset, A)
    lab = phi(example_poset, cls, A)
    got = [lab[cls[x]] for x in ex_elements()]
    assert got[0] == got[1] == vector("-++0-+")
    assert got[2] == vector("-++0-0")
    assert got[3] == vector("+++0--")


def test_phi_symmetry(example_poset, example):
    _, A = example
    cls = build_equivalence(example_poset, A)
    lab = phi(example_poset, cls, A)
    for x in example_poset.elements:
        y = SignedCell(tuple(-s for s in x.S), x.F)
        assert lab[cls[y]] == tuple(-v for v in lab[cls[x]])


def test_phi_rank_one():
    P = build_patch_poset([parse_edges("11")], 1, 1)
    cls = build_equivalence(P, [[1]])
    assert sorted(phi(P, cls, [[1]]).values()) == [(-1, -1), (1, 1)]


def test_quotient_rank_formula(example_poset, example):
    _, A = example
    cls = build_equivalence(example_poset, A)
    Q = posetlab.quotient(example_poset, cls)
    res = quotient_ranks(Q, 3)
    assert res and res.data["rho_range"] == [1, 3] and res.data["dim_range"] == [0, 2]
    c = cls[ex_elements()[0]]
    from patchom.signcore import weight
    assert 3 + 3 - weight(c[1]) == 2


def test_factorization_example(example_poset, example):
    _, A = example
    chain = factorize_quotient(example_poset, A)
    assert len(chain) == 6 and chain.ok
    for step in chain.steps:
        assert set(step.class_sizes) <= {1, 3}


def test_factorization_rank_one():
    T = Triangulation(1, 3, (frozenset((0, j) for j in range(3)),))
    P = build_patch_poset(cells(T), 1, 3)
    chain = factorize_quotient(P, [[1, 1, -1]])
    assert len(chain) == 0 and chain.ok


def test_factorization_staircase_random_signs():
    P = build_patch_poset(cells(STAIRCASE), 2, 3)
    rng = random.Random(12)
    for _ in range(6):
        A = [[rng.choice((-1, 1)) for _ in range(3)] for _ in range(2)]
        chain = factorize_quotient(P, A)
        assert chain.ok and len(chain) == 3


def test_random_merge_orders():
    _, T, A = random_instance(3, 3, 5)
    P = build_patch_poset(cells(T), 3, 3)
    for seed in range(3):
        assert factorize_quotient(P, A, seed=seed).ok


def test_merge_schedule_shape():
    parts = merge_schedule(3, 2)
    assert len(parts) == 5 and parts[-1] == Partition.columns(3, 2)
    assert all(p.refines(Partition.columns(3, 2)) for p in parts)
    for a, b in zip(parts, parts[1:]):
        assert a.refines(b) and len(a.blocks) == len(b.blocks) + 1


def test_verify_example(example):
    T, A = example
    rep = verify_representation(T, A)
    for k in "abcd":
        assert rep[k]["ok"], rep[k]
    assert rep["e"]["euler"] == 2 and rep["e"]["betti"] == [1, 0, 1]
    assert rep["ok"] and rep["symmetry"]["ok"] and rep["bergman"]["ok"]


def test_verify_staircase():
    rep = verify_representation(STAIRCASE, [[1, -1, 1], [-1, 1, 1]])
    assert rep["ok"]
    assert rep["e"]["euler"] == 0 and rep["e"]["betti"] == [1, 1]


def test_verify_detects_wrong_signs(example):
    """Labels computed with a different sign matrix must not match the covectors."""
    T, A = example
    P = build_patch_poset(cells(T), 3, 3)
    cls = build_equivalence(P, A)
    B = [row[:] for row in A]
    B[0][0] = -B[0][0]
    lab = phi(P, cls, A)
    field_, Bt = pointed_augment(T, B)
    V = covectors(chirotope(field_, Bt))
    assert set(lab.values()) != {v for v in V if any(v)}


def test_bergman_vertex(example):
    T, A = example
    vmap = bergman_vertex_map(cells(T), A, 3, 3)
    x = SignedCell((1, 1, 1), parse_edges("11 12 13"))
    assert vmap[x] == vector("+++-+-")
