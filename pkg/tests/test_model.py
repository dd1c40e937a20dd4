import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarse_nash.model import (
    BargainingProblem,
    InputError,
    Permutation,
    all_permutations,
    as_point,
    comprehensive_contains,
    hausdorff_approx,
    is_symmetric_problem,
    permute,
    permute_problem,
    scale_problem,
    strictly_dominated_within,
    union_problem,
)

from strategies import points
import oracles

P = BargainingProblem.of


def test_as_point_validation():
    assert as_point([1, 2]) == (1.0, 2.0)
    for bad in ([1], [0, 1], [-1, 2], [float("nan"), 1], [float("inf"), 1]):
        with pytest.raises(InputError):
            as_point(bad)
    with pytest.raises(InputError):
        as_point([1, 2, 3], 2)


def test_problem_rejects_bad_generators():
    with pytest.raises(InputError):
        BargainingProblem(2, ())
    with pytest.raises(InputError):
        BargainingProblem(2, ((1.0, 2.0, 3.0),))
    with pytest.raises(InputError):
        BargainingProblem.of([(1, 0)])


def test_comprehensive_contains_examples():
    assert comprehensive_contains(P([(2, 2)]), (1, 2))
    assert not comprehensive_contains(P([(2, 2)]), (3, 1))
    assert not comprehensive_contains(P([(1, 3), (3, 1)]), (2, 2))


def test_strict_domination_examples():
    assert strictly_dominated_within([(1, 2), (2, 1), (1.5, 1.5)], (1, 1))
    assert not strictly_dominated_within([(1, 2), (2, 1)], (1, 2))
    assert not strictly_dominated_within([(2, 2), (2, 3)], (2, 2))
    with pytest.raises(InputError):
        strictly_dominated_within([], (1, 1))


def test_permute_examples():
    swap = Permutation.from_one_based([2, 1])
    assert permute((1, 2), swap) == (2, 1)
    assert permute((1, 2, 3), Permutation.identity(3)) == (1, 2, 3)
    assert permute((1, 2, 3), Permutation.from_one_based([2, 3, 1])) == (2, 3, 1)
    assert len(all_permutations(4)) == 24
    with pytest.raises(InputError):
        all_permutations(9)


def test_symmetry_examples():
    assert is_symmetric_problem(P([(1, 2), (2, 1)]))
    assert not is_symmetric_problem(P([(1, 2)]))
    assert is_symmetric_problem(P([(2, 2)]))


def test_scale_examples():
    assert scale_problem((1, 1), P([(1, 2)])).pool == ((1.0, 2.0),)
    assert scale_problem((2, 0.5), P([(1, 2)])).pool == ((2.0, 1.0),)
    assert set(scale_problem((3, 3), P([(1, 1), (2, 0.5)])).pool) == {(3.0, 3.0), (6.0, 1.5)}


def test_union_examples():
    assert set(union_problem(P([(1, 2)]), P([(2, 1)])).generators) == {(1.0, 2.0), (2.0, 1.0)}
    p = P([(1, 2), (2, 1)])
    assert union_problem(p, p).pool == p.pool
    assert union_problem(P([(1, 2)]), P([(1, 1)])).generators == ((1.0, 2.0),)


def test_hausdorff_examples():
    a = P([(1, 2), (2, 1)])
    assert hausdorff_approx(a, a, 0.05) == 0.0
    assert 0.99 <= hausdorff_approx(P([(1, 1)]), P([(2, 2)]), 0.01) <= 1.01
    assert 0.49 <= hausdorff_approx(P([(1, 2)]), P([(1, 2), (1, 2.5)]), 0.01) <= 0.51


@given(points())
def test_pool_matches_bruteforce(gens):
    assert list(P(gens).pool) == oracles.pool(gens)


@given(points(), st.data())
def test_pruning_keeps_hull(gens, data):
    prob = P(gens)
    n = prob.n
    x = data.draw(st.tuples(*[st.floats(0.05, 12.0)] * n))
    assert comprehensive_contains(prob, x) == oracles.in_hull(gens, x)
    assert comprehensive_contains(prob, x) == oracles.in_hull(prob.pool, x)


@given(points(), st.data())
def test_scaling_bijective(gens, data):
    prob = P(gens)
    a = data.draw(st.tuples(*[st.floats(0.1, 10.0)] * prob.n))
    inv = tuple(1.0 / v for v in a)
    back = scale_problem(a, scale_problem(inv, prob))
    np.testing.assert_allclose(np.array(back.pool), np.array(prob.pool), rtol=1e-12)


@given(points(n=3, max_size=4))
def test_symmetric_closure(gens):
    sym = P([tuple(g[i] for i in perm) for g in gens for perm in itertools.permutations(range(3))])
    assert is_symmetric_problem(sym)
    for p in all_permutations(3):
        assert set(permute_problem(sym, p).pool) == set(sym.pool)


@given(points(n=2), points(n=2), st.lists(st.tuples(st.floats(0.05, 12), st.floats(0.05, 12)), max_size=30))
def test_union_soundness(g1, g2, xs):
    a, b = P(g1), P(g2)
    u = union_problem(a, b)
    for x in xs:
        assert comprehensive_contains(u, x) == (comprehensive_contains(a, x) or comprehensive_contains(b, x))
