import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import STAIRCASE, random_instance
from patchom.cayley import Triangulation, regular_triangulation
from patchom.matchfield import (Chirotope, augmented_matrix, chirotope, extract_matching_field,
                                gp_check, perm_sign, pointed_augment, tree_matchings)
from patchom.omcore import chirotope_from_matrix
from patchom.posetlab import BudgetExceeded


def test_staircase_field():
    mf = extract_matching_field(STAIRCASE)
    assert mf.edges((0, 1)) == {(0, 0), (1, 1)}
    assert mf.edges((0, 2)) == {(0, 0), (1, 2)}
    assert mf.edges((1, 2)) == {(0, 1), (1, 2)}


def test_brute_force_tree_matchings():
    for tree in STAIRCASE.trees:
        want = [m for m in itertools.permutations(range(3), 2) if all((i, m[i]) in tree for i in range(2))]
        assert sorted(tree_matchings(tree, 2)) == sorted(want)


def test_rank_one_field():
    T = Triangulation(1, 4, (frozenset((0, j) for j in range(4)),))
    mf = extract_matching_field(T)
    assert mf.matchings == {(j,): (j,) for j in range(4)}
    chi = chirotope(mf, [[1, -1, -1, 1]])
    assert [chi(j) for j in range(4)] == [1, -1, -1, 1]


def test_example_field_has_one_subset(example):
    T, A = example
    assert len(extract_matching_field(T)) == 1


def test_field_is_max_weight_matching():
    for seed in range(6):
        H, _, _ = random_instance(3, 5, seed)
        T = regular_triangulation(H, maximize=True)
        mf = extract_matching_field(T)
        for sigma, m in mf.matchings.items():
            best = max(itertools.permutations(sigma), key=lambda p: sum(H[i][p[i]] for i in range(3)))
            assert m == best


def test_augmented_matrix():
    assert augmented_matrix([[1, -1], [-1, 1]]) == ((1, 0, 1, -1), (0, 1, -1, 1))


def test_pointed_identity(example):
    T, A = example
    field_, At = pointed_augment(T, A)
    assert field_.matchings[(0, 1, 2)] == (0, 1, 2)
    assert chirotope(field_, At)((0, 1, 2)) == 1
    assert len(field_) == 20


def test_pointed_matchings_avoid_zero_entries(example):
    """Pointed matchings only pair row i with ~i, so every value is nonzero."""
    T, A = example
    field_, At = pointed_augment(T, A)
    for sigma, m in field_.matchings.items():
        assert all(j >= 3 or j == i for i, j in enumerate(m))
    assert chirotope(field_, At).is_uniform()


def test_staircase_all_plus():
    chi = chirotope(extract_matching_field(STAIRCASE), [[1, 1, 1], [1, 1, 1]])
    assert chi.values == {(0, 1): 1, (0, 2): 1, (1, 2): 1}
    assert gp_check(chi)


def test_alternating_call():
    chi = chirotope(extract_matching_field(STAIRCASE), [[1, 1, 1], [1, 1, 1]])
    assert chi(1, 0) == -1 and chi(0, 0) == 0


def test_perm_sign():
    assert perm_sign((0, 1, 2)) == 1
    assert perm_sign((1, 0, 2)) == -1
    assert perm_sign((2, 0, 1)) == 1
    assert perm_sign((1, 1)) == 0


def _random_alternating(rng, d, m):
    vals = {s: rng.choice((-1, 0, 1)) for s in itertools.combinations(range(m), d)}
    if not any(vals.values()):
        vals[tuple(range(d))] = 1
    return Chirotope(d, m, vals)


def test_handcrafted_non_chirotope_fails():
    # search rank 2 sign maps on 4 elements for one violating a relation
    target = None
    for signs in itertools.product((-1, 1), repeat=6):
        chi = Chirotope(2, 4, dict(zip(itertools.combinations(range(4), 2), signs)))
        res = gp_check(chi)
        if not res:
            target = (chi, res)
            break
    assert target is not None
    chi, res = target
    x, y = res.witness
    terms = [(-1) ** k * chi(x + (y[k],)) * chi(y[:k] + y[k + 1:]) for k in range(3)]
    assert set(terms) in ({1}, {-1}, {0, 1}, {0, -1})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([(2, 4), (2, 5), (3, 5)]))
def test_dedup_agrees_with_full(seed, shape):
    chi = _random_alternating(random.Random(seed), *shape)
    assert bool(gp_check(chi, "dedup")) == bool(gp_check(chi, "full"))


def test_realizable_chirotopes_pass():
    rng = random.Random(7)
    for _ in range(10):
        M = [[rng.randint(-4, 4) for _ in range(5)] for _ in range(3)]
        try:
            chi = chirotope_from_matrix(M)
        except ValueError:
            continue
        assert gp_check(chi) and gp_check(chi, "full")


def test_gp_budget():
    chi = chirotope(extract_matching_field(STAIRCASE), [[1, 1, 1], [1, 1, 1]])
    with pytest.raises(BudgetExceeded):
        gp_check(chi, "full", budget=10)


def test_restriction_to_columns():
    for seed in range(5):
        _, T, A = random_instance(3, 4, seed)
        field_, At = pointed_augment(T, A)
        chi_t = chirotope(field_, At)
        chi = chirotope(extract_matching_field(T), A)
        assert chi_t.restrict(range(3, 7)) == chi


def test_row_swap_negates():
    for seed in range(4):
        for d in (2, 3):
            _, T, A = random_instance(d, 4, seed)
            swap = {0: 1, 1: 0}
            T2 = Triangulation(d, 4, tuple(frozenset((swap.get(i, i), j) for i, j in t) for t in T.trees))
            A2 = [A[1], A[0]] + A[2:]
            chi = chirotope(extract_matching_field(T), A)
            chi2 = chirotope(extract_matching_field(T2), A2)
            assert chi2 == chi.negated()


def test_column_reorientation():
    _, T, A = random_instance(3, 5, 2)
    chi = chirotope(extract_matching_field(T), A)
    for j in range(5):
        A2 = [[-v if k == j else v for k, v in enumerate(row)] for row in A]
        chi2 = chirotope(extract_matching_field(T), A2)
        for sigma, v in chi.values.items():
            assert chi2.values[sigma] == (-v if j in sigma else v)


def test_export_lines():
    chi = chirotope(extract_matching_field(STAIRCASE), [[1, -1, 1], [1, 1, 1]])
    assert chi.export_lines() == ["(1,2):+", "(1,3):+", "(2,3):-"]


def test_zero_chirotope_rejected():
    with pytest.raises(ValueError):
        Chirotope(2, 3, {(0, 1): 0})
