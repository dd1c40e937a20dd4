import numpy as np
import pytest

from coarse_nash import generate, separation
from coarse_nash import improving as imp
from coarse_nash.model import BargainingProblem
from coarse_nash.solver import coarse_nash, nash

P = BargainingProblem.of
CONE = imp.ConeIntersection(((0.3, 0.7), (0.7, 0.3)))


def test_analytic_weights():
    assert separation.separating_weight(CONE) == (0.5, 0.5)
    assert separation.separating_weight(imp.NashThreshold(0.2)) == (0.5, 0.5)
    assert separation.separating_weight(imp.Orthant(), n=3) == pytest.approx((1 / 3,) * 3)
    assert separation.separating_weight(imp.HalfSpace((0.7, 0.3))) == (0.7, 0.3)


def test_cone_weight_sums_defining_inequalities(rng):
    Z = imp.sample_members(CONE, 5000, rng)
    assert (Z.sum(axis=1) > 0).all()


def test_halfspace_inclusion_examples():
    assert separation.verify_halfspace_inclusion(imp.Orthant(), (0.5, 0.5), 10_000)
    assert separation.verify_halfspace_inclusion(imp.NashThreshold(0.1), (0.5, 0.5), 10_000)
    rep = separation.verify_halfspace_inclusion(imp.HalfSpace((0.7, 0.3)), (0.5, 0.5), 10_000)
    assert not rep and rep.violations > 0
    z = np.array([1.0, -1.5])
    assert imp.contains(imp.HalfSpace((0.7, 0.3)), z) and z.sum() < 0


def test_custom_half_space_recovers_weight():
    A = imp.CustomPredicate(lambda z: float(np.dot([0.6, 0.4], z)) > 1e-9, 2)
    w = separation.separating_weight(A, 5000, seed=1)
    assert w == pytest.approx((0.6, 0.4), abs=1e-3)


def test_union_has_no_separating_weight():
    A = imp.union_of_half_spaces([(0.3, 0.7), (0.7, 0.3)])
    with pytest.raises(separation.NoSeparatingWeightError) as e:
        separation.separating_weight(A, 5000, seed=0)
    cert = e.value.certificate
    assert len(cert) >= 2 and all(A.member(z) for z in cert)
    assert e.value.origin_interior is True


def test_truncated_set_separates_but_is_not_closed():
    A = imp.truncated_half_space((0.5, 0.5))
    w = separation.separating_weight(A, 5000, seed=0)
    assert separation.verify_halfspace_inclusion(A, w, 5000)
    rep = separation.check_rational_closure(A, seed=0)
    assert not rep
    m1, m2, *rest = rep.witness
    z1, z2 = np.array(rest[:2]), np.array(rest[2:])
    assert A.member(z1) and A.member(z2) and not A.member(m1 * z1 + m2 * z2)


def test_hull_fallback():
    ring = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]], dtype=float)
    assert separation.origin_interior_to_hull(ring)
    assert not separation.origin_interior_to_hull(ring + 2)
    assert separation.origin_interior_to_hull(np.array([[1.0, 1.0], [2.0, 2.0]])) is None


def test_refinement_examples():
    three = P([(1, 2), (2, 1), (1.5, 1.5)])
    rep = separation.verify_refinement(imp.NashThreshold(0.2), (0.5, 0.5), [three])
    assert rep.passed and rep.strict == 1
    rep = separation.verify_refinement(imp.HalfSpace((0.7, 0.3)), (0.7, 0.3), [three])
    assert rep.passed and rep.strict == 0
    rep = separation.verify_refinement(imp.Orthant(), (0.5, 0.5), [three])
    assert rep.passed


def test_sum_bound():
    assert separation.symmetric_sum_bound(imp.Orthant()).status == "PASS"
    assert separation.symmetric_sum_bound(imp.NashThreshold(0.1)).status == "PASS"
    assert separation.symmetric_sum_bound(imp.HalfSpace((0.7, 0.3))).status == "SKIPPED"


@pytest.mark.parametrize("A", [imp.Orthant(), imp.HalfSpace((0.7, 0.3)), CONE, imp.NashThreshold(0.05)],
                         ids=imp.describe)
def test_inclusion_chain_and_closure(A):
    w = separation.separating_weight(A)
    assert separation.check_inclusion_chain(A, w, 10_000)
    assert separation.check_rational_closure(A)


def test_nash_inside_symmetric_coarse(rng):
    cfg = generate.GeneratorConfig(ns=(2, 3))
    for _ in range(50):
        prob = generate.random_problem(rng, cfg, symmetric=True)
        for A in (imp.Orthant(), imp.NashThreshold(0.05), imp.HalfSpace(imp.uniform_weights(prob.n))):
            assert nash(prob).chosen_set <= coarse_nash(A, prob).chosen_set
