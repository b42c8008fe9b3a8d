from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_isocone, unit
from ncorder.algebra import BlockAlgebra
from ncorder.classify import (
    ClassifyConfig,
    _cap_from_basis,
    classify,
    recover_inner,
    recover_poset,
    smallest_enclosing_cap,
    verify_classification,
)
from ncorder.errors import AmbiguityError, InconsistencyError, ResourceError
from ncorder.isocone.bloch import BlochRegion, angle_between
from ncorder.isocone.cones import ClassifiedIsocone, InnerCone, Membership, lexicographic_sum_isocone
from ncorder.poset import Poset, lexicographic_sum

Z = np.array([0.0, 0.0, 1.0])
CAP = BlochRegion.cap(Z, np.pi / 4)
FAST = ClassifyConfig(trials=50, grid=642)


def _brute_cap(pts):
    best = None
    for r in (1, 2, 3):
        for B in combinations(range(len(pts)), r):
            v = _cap_from_basis(pts[list(B)])
            if v is not None and np.min(pts @ v) >= 1 - 1e-9:
                n = np.linalg.norm(v)
                best = n if best is None else min(best, n)
    return None if best is None else float(np.arccos(1 / best))


def points_cones(k, dims=None):
    return [InnerCone.full(1)] * k


class TestRecoverPoset:
    def test_chain(self):
        I = lexicographic_sum_isocone(Poset.chain(3), points_cones(3))
        assert recover_poset(I, I.algebra, FAST) == Poset.chain(3)

    def test_four_point_example(self):
        P = lexicographic_sum(Poset.chain(2), [Poset.antichain(2), Poset.antichain(2)])
        I = lexicographic_sum_isocone(P, points_cones(4))
        assert recover_poset(I, I.algebra, FAST) == P

    def test_antichain(self):
        I = ClassifiedIsocone.trivial(BlockAlgebra((1, 2, 3)))
        assert recover_poset(I, I.algebra, FAST) == Poset.antichain(3)

    def test_unseparated_blocks_are_ambiguous(self):
        class Tied:
            def decide(self, a, tol=1e-9):
                same = np.isclose(a.blocks[0][0, 0], a.blocks[1][0, 0])
                return Membership.INSIDE if same else Membership.OUTSIDE

        with pytest.raises(AmbiguityError) as e:
            recover_poset(Tied(), BlockAlgebra((1, 1)), FAST)
        assert e.value.witnesses == [(1, 2)]

    def test_contradicting_sampler_is_ambiguous(self):
        I = lexicographic_sum_isocone(Poset.chain(2), points_cones(2))
        free = ClassifiedIsocone.trivial(I.algebra)
        with pytest.raises(AmbiguityError) as e:
            recover_poset(I, I.algebra, FAST, sampler=lambda rng: free.algebra.random_element(rng))
        assert e.value.witnesses

    def test_too_many_blocks(self):
        I = ClassifiedIsocone.trivial(BlockAlgebra((1,) * 21))
        with pytest.raises(ResourceError):
            recover_poset(I, I.algebra, FAST)

    @settings(max_examples=25)
    @given(st.integers(0, 2**32 - 1))
    def test_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        I = random_isocone(rng, k_max=5)
        assert recover_poset(I, I.algebra, ClassifyConfig(trials=500)) == I.poset


class TestRecoverInner:
    def test_full_block(self):
        I = ClassifiedIsocone.trivial(BlockAlgebra((3,)))
        cone, fit = recover_inner(I, I.algebra, 0, FAST)
        assert cone.is_full and fit is None

    def test_cap_recovered(self):
        I = ClassifiedIsocone(BlockAlgebra((2,)), Poset.antichain(1), (InnerCone.m2(CAP),))
        cone, fit = recover_inner(I, I.algebra, 0, ClassifyConfig())
        assert all(angle_between(d, Z) <= np.pi / 4 + 1e-9 for d in fit.accepted)
        assert abs(fit.angle - np.pi / 4) <= fit.resolution
        assert angle_between(fit.center, Z) <= fit.resolution
        assert cone.region.kind == "cap"

    def test_lune_fits_a_hemisphere(self):
        K = BlochRegion.polygon([[0, 0, 1], [0, 1, 0]])
        I = ClassifiedIsocone(BlockAlgebra((2,)), Poset.antichain(1), (InnerCone.m2(K),))
        cone, fit = recover_inner(I, I.algebra, 0, ClassifyConfig())
        assert abs(fit.angle - np.pi / 2) <= fit.resolution
        assert angle_between(fit.center, [0, 1, 1]) <= fit.resolution

    def test_antipodal_acceptance_is_full(self):
        class PolarCaps:
            def decide(self, a, tol=1e-9):
                b = a.blocks[0]
                return Membership.INSIDE if abs(b[0, 0] - b[1, 1]).real >= 1.0 else Membership.OUTSIDE

        cone, fit = recover_inner(PolarCaps(), BlockAlgebra((2,)), 0, FAST, Poset.antichain(1))
        assert cone.is_full and fit.center is None and 0 < fit.fraction < 1

    def test_full_sphere_accepted(self):
        I = ClassifiedIsocone.trivial(BlockAlgebra((2,)))
        cone, fit = recover_inner(I, I.algebra, 0, FAST)
        assert cone.is_full and fit.fraction == 1.0

    def test_block_between_others_uses_padding(self):
        P = Poset.chain(3)
        I = lexicographic_sum_isocone(P, [InnerCone.full(1), InnerCone.m2(CAP), InnerCone.full(1)])
        cone, fit = recover_inner(I, I.algebra, 1, ClassifyConfig())
        assert abs(fit.angle - np.pi / 4) <= fit.resolution

    def test_scalar_only_oracle_is_inconsistent(self):
        class ScalarsOnly:
            def decide(self, a, tol=1e-9):
                b = a.blocks[0]
                ok = abs(b[0, 1]) < 1e-12 and abs(b[0, 0] - b[1, 1]) < 1e-12
                return Membership.INSIDE if ok else Membership.OUTSIDE

        with pytest.raises(InconsistencyError):
            recover_inner(ScalarsOnly(), BlockAlgebra((2,)), 0, FAST, Poset.antichain(1))


class TestEnclosingCap:
    def test_matches_brute_force(self, rng):
        for _ in range(30):
            K = BlochRegion.cap(rng.normal(size=3), float(rng.uniform(0.1, 1.4)))
            pts = np.array([K.sample(rng, 1.0) for _ in range(int(rng.integers(1, 15)))])
            c, a = smallest_enclosing_cap(pts, rng)
            assert np.isclose(a, _brute_cap(pts), atol=1e-6)
            assert np.all(pts @ c >= np.cos(a) - 1e-9)

    def test_two_points(self):
        c, a = smallest_enclosing_cap(np.array([[1.0, 0, 0], [0, 1.0, 0]]))
        assert np.isclose(a, np.pi / 4) and np.allclose(c, unit([1, 1, 0]))

    def test_points_not_in_open_hemisphere(self):
        assert smallest_enclosing_cap(np.array([[0, 0, 1.0], [0, 0, -1.0]])) is None
        assert smallest_enclosing_cap(np.eye(3).tolist() + (-np.eye(3)).tolist()) is None
        assert smallest_enclosing_cap(np.zeros((0, 3))) is None


class TestVerify:
    def test_truth_agrees(self, rng):
        for _ in range(5):
            I = random_isocone(rng)
            rep = verify_classification(I, I, FAST)
            assert rep.ok and rep.agreement == 1.0 and rep.compared > 0

    def test_extra_relation_is_caught(self):
        truth = ClassifiedIsocone.trivial(BlockAlgebra((1, 2)))
        cand = ClassifiedIsocone(truth.algebra, Poset.chain(2), truth.inner)
        rep = verify_classification(truth, cand, FAST)
        assert not rep.ok
        src, a, o, c = rep.witnesses[0]
        lo_top = a.block_bounds()[1][0]
        hi_bottom = a.block_bounds()[0][1]
        assert hi_bottom > lo_top and o.accepted and c is Membership.OUTSIDE

    def test_shrunken_cap_is_caught(self):
        A = BlockAlgebra((2,))
        truth = ClassifiedIsocone(A, Poset.antichain(1), (InnerCone.m2(CAP),))
        cand = ClassifiedIsocone(A, Poset.antichain(1), (InnerCone.m2(BlochRegion.cap(Z, np.pi / 6)),))
        rep = verify_classification(truth, cand, ClassifyConfig(trials=50, grid=642, max_witnesses=10**4))
        assert not rep.ok
        probes = [w for w in rep.witnesses if w[0].startswith("direction-probe")]
        assert probes
        for _, a, _, _ in probes:
            v = np.array([a.blocks[0][0, 1].real, -a.blocks[0][0, 1].imag, (a.blocks[0][0, 0] - a.blocks[0][1, 1]).real / 2])
            assert np.pi / 6 < angle_between(v, Z) <= np.pi / 4 + 1e-9

    def test_report_dict(self):
        I = ClassifiedIsocone.trivial(BlockAlgebra((1, 1)))
        cand = ClassifiedIsocone(I.algebra, Poset.chain(2), I.inner)
        d = verify_classification(I, cand, FAST).to_dict()
        assert d["disagreements"] > 0 and d["witnesses"][0]["oracle"] in ("inside", "boundary")


def test_classify_recovers_cone(rng):
    for _ in range(5):
        I = random_isocone(rng, polygons=False)
        res = classify(I, I.algebra, ClassifyConfig(trials=100))
        assert res.poset == I.poset
        for x, cone in enumerate(I.inner):
            if cone.is_full:
                assert res.inner[x].is_full
            else:
                fit = res.fits[x]
                assert abs(fit.angle - cone.region.angle) <= 2 * fit.resolution
