import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_isocone, random_region, unit
from ncorder.algebra import BlockAlgebra, BlockElement
from ncorder.errors import InputError
from ncorder.herm import random_hermitian, random_unitary
from ncorder.isocone.bloch import BlochRegion, fibonacci_sphere, from_bloch, projector
from ncorder.isocone.cones import ClassifiedIsocone, InnerCone
from ncorder.order_maps import (
    Comparison,
    DensityMatrix,
    PureState,
    SpectralFrame,
    _min_over_projections,
    inner_order,
    inner_order_stability,
    m2_dual_cone_test,
    pure_state_compare,
    state_compare,
)
from ncorder.poset import Poset, up_sets

Z = np.array([0.0, 0.0, 1.0])
CAP = BlochRegion.cap(Z, np.pi / 4)
H2 = BlockAlgebra((2,))


def single(region, n=2):
    cone = InnerCone.m2(region) if region is not None else InnerCone.full(n)
    return ClassifiedIsocone(BlockAlgebra((n,)), Poset.antichain(1), (cone,))


def random_density(rng, A, rank=None):
    blocks = []
    for n in A.dims:
        G = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
        blocks.append(G @ G.conj().T * rng.uniform(0, 1))
    tr = sum(np.trace(b).real for b in blocks)
    return DensityMatrix(BlockElement(A, [b / tr for b in blocks]))


class TestInnerOrder:
    def test_cap_interior_gives_chain(self):
        P = inner_order(single(CAP), np.diag([1.0, 0.0]) + 0.0)
        assert P == Poset.chain(2) and P.labels == (1, 2)

    def test_full_cone_gives_antichain(self, rng):
        for n in (2, 3, 4):
            a = random_hermitian(rng, n)
            assert inner_order(single(None, n), a) == Poset.antichain(n)

    def test_hemisphere_boundary_gives_antichain(self):
        I = single(BlochRegion.polygon([Z]))
        assert inner_order(I, from_bloch(0, [1, 0, 0])) == Poset.antichain(2)

    def test_outside_element_rejected(self):
        with pytest.raises(InputError):
            inner_order(single(CAP), np.diag([0.0, 1.0]))

    def test_derogatory_rejected(self):
        with pytest.raises(InputError):
            SpectralFrame.of(np.eye(2))

    def test_block_algebra_frame(self):
        I = ClassifiedIsocone(BlockAlgebra((1, 2)), Poset.chain(2), (InnerCone.full(1), InnerCone.m2(CAP)))
        a = I.algebra.element([[[-1.0]], np.diag([2.0, 1.0])])
        P = inner_order(I, a)
        assert P == Poset.chain(3)

    @given(st.integers(0, 2**32 - 1))
    def test_never_inverts_the_natural_order(self, seed):
        rng = np.random.default_rng(seed)
        I = random_isocone(rng, k_max=3)
        a = I.sample(rng)
        try:
            P = inner_order(I, a)
        except InputError:
            return
        assert all(i < j for i, j in P.strict_pairs())

    @given(st.integers(0, 2**32 - 1))
    def test_unitary_equivariance(self, seed):
        rng = np.random.default_rng(seed)
        K = random_region(rng)
        I = single(K)
        a = I.sample(rng).blocks[0]
        U = random_unitary(rng, 2)
        J = ClassifiedIsocone(H2, Poset.antichain(1), (InnerCone.m2(K.conjugated(U)),))
        assert inner_order(I, a) == inner_order(J, U @ a @ U.conj().T)

    def test_antichain_iff_full_on_single_block(self, rng):
        for _ in range(20):
            K = random_region(rng)
            a = single(K).sample(rng).blocks[0]
            assert inner_order(single(K), a) == Poset.chain(2)
            assert inner_order(single(None), a) == Poset.antichain(2)


class TestStability:
    def test_cap_small_radius_is_stable(self):
        I = single(CAP)
        a = I.algebra.element([np.diag([1.0, 0.0])])
        rep = inner_order_stability(I, a, radius=0.1 * I.margin(a), trials=50)
        assert rep.stable and rep.agree == 50

    def test_hemisphere_boundary_only_coarsens(self):
        I = single(BlochRegion.polygon([Z]))
        rep = inner_order_stability(I, from_bloch(0, [1, 0, 0]), radius=0.3, trials=60, seed=2)
        assert rep.base_is_coarsening and rep.finer > 0
        assert rep.base == Poset.antichain(2)

    def test_full_cone_always_stable(self, rng):
        rep = inner_order_stability(single(None, 3), random_hermitian(rng, 3), radius=0.5, trials=20)
        assert rep.stable and rep.agree == 20


class TestDualCone:
    def test_examples(self):
        assert m2_dual_cone_test(CAP, [0, 0, 0])
        assert m2_dual_cone_test(CAP, Z)
        assert not m2_dual_cone_test(CAP, [1, 0, 0])

    def test_cap_matches_angle_rule(self, rng):
        for _ in range(500):
            K = BlochRegion.cap(rng.normal(size=3), float(rng.uniform(0.1, 1.5)))
            d = rng.normal(size=3)
            theta = np.arccos(np.clip(unit(d) @ K.center, -1, 1))
            if abs(theta + K.angle - np.pi / 2) > 1e-6:
                assert m2_dual_cone_test(K, d) == (theta + K.angle <= np.pi / 2)


class TestPureStates:
    def test_phase_convention(self):
        s = PureState(0, np.array([1j, 1.0]))
        assert np.isclose(s.vector[0], 1 / np.sqrt(2))
        with pytest.raises(InputError):
            PureState(0, np.zeros(2))

    def test_bloch_vector(self):
        assert np.allclose(PureState(0, [1, 0]).bloch(), Z)
        assert np.allclose(PureState(0, [1, 1]).bloch(), [1, 0, 0])

    def test_cross_block_follows_poset(self):
        I = ClassifiedIsocone(BlockAlgebra((1, 1, 2)), Poset.from_relations(3, [(0, 1)]),
                              (InnerCone.full(1), InnerCone.full(1), InnerCone.m2(CAP)))
        a, b, c = PureState(0, [1]), PureState(1, [1]), PureState(2, [1, 0])
        assert pure_state_compare(I, a, b) is Comparison.LESS
        assert pure_state_compare(I, b, a) is Comparison.GREATER
        assert pure_state_compare(I, a, c) is Comparison.INCOMPARABLE

    def test_full_block_distinct_states_incomparable(self):
        I = single(None, 3)
        assert pure_state_compare(I, PureState(0, [1, 0, 0]), PureState(0, [0, 1, 0])) is Comparison.INCOMPARABLE
        assert pure_state_compare(I, PureState(0, [1, 0, 0]), PureState(0, [1j, 0, 0])) is Comparison.EQUIVALENT

    def test_cap_poles(self):
        I = single(CAP)
        lo, hi = PureState(0, [0, 1]), PureState(0, [1, 0])
        assert np.allclose(lo.bloch(), -Z)
        assert pure_state_compare(I, lo, hi) is Comparison.LESS

    def test_wrong_block_rejected(self):
        with pytest.raises(InputError):
            pure_state_compare(single(CAP), PureState(1, [1, 0]), PureState(0, [1, 0]))


def _oracle_min(I, omega, rng, grid):
    """Upper bound for min tr(ω p) over cone projections by direct search."""
    P = I.poset
    best_partial = []
    for cone, b in zip(I.inner, omega.blocks):
        n = b.shape[0]
        vals = [np.inf]
        if n > 1 and cone.is_full:
            for _ in range(300):
                r = int(rng.integers(1, n))
                V = random_unitary(rng, n)[:, :r]
                vals.append(np.trace(V.conj().T @ b @ V).real)
            w, U = np.linalg.eigh(b)
            vals += [np.trace(U[:, :r].conj().T @ b @ U[:, :r]).real for r in range(1, n)]
        elif n == 2:
            ins = grid[np.array([cone.region.margin(d) >= 0 for d in grid])]
            vals += [np.trace(projector(d) @ b).real for d in ins]
        best_partial.append(min(vals))
    best = 0.0
    for S in up_sets(P):
        total = 0.0
        for x in S:
            tr = np.trace(omega.blocks[x]).real
            minimal = not any(P.lt(z, x) for z in S)
            total += min(tr, best_partial[x]) if minimal else tr
        best = min(best, total)
    return best


class TestStateOrder:
    def test_reflexive(self, rng):
        I = random_isocone(rng)
        rho = random_density(rng, I.algebra)
        assert state_compare(I, rho, rho) is Comparison.EQUIVALENT

    def test_chain_of_points(self):
        A = BlockAlgebra((1, 1))
        I = ClassifiedIsocone(A, Poset.chain(2), (InnerCone.full(1),) * 2)
        r1, r2 = DensityMatrix(A.from_scalars([1, 0])), DensityMatrix(A.from_scalars([0, 1]))
        assert state_compare(I, r1, r2) is Comparison.LESS
        J = ClassifiedIsocone.trivial(A)
        assert state_compare(J, r1, r2) is Comparison.INCOMPARABLE

    def test_density_validation(self):
        A = BlockAlgebra((1, 1))
        with pytest.raises(InputError):
            DensityMatrix(A.from_scalars([1, 1]))
        with pytest.raises(InputError):
            DensityMatrix(A.from_scalars([2, -1]))

    def test_minimum_matches_direct_search(self, rng):
        grid = fibonacci_sphere(4000)
        for _ in range(15):
            I = random_isocone(rng, k_max=3)
            omega = random_density(rng, I.algebra).rho - random_density(rng, I.algebra).rho
            exact = _min_over_projections(I, omega)
            approx = _oracle_min(I, omega, rng, grid)
            assert exact <= approx + 1e-9
            assert approx - exact < 0.05

    def test_sound_against_cone_samples(self, rng):
        for _ in range(20):
            I = random_isocone(rng, k_max=3)
            r1, r2 = random_density(rng, I.algebra), random_density(rng, I.algebra)
            if state_compare(I, r1, r2) in (Comparison.LESS, Comparison.EQUIVALENT):
                omega = r2.rho - r1.rho
                for _ in range(200):
                    a = I.sample(rng)
                    assert sum(np.trace(w @ b).real for w, b in zip(omega.blocks, a.blocks)) >= -1e-9

    @given(st.integers(0, 2**32 - 1))
    def test_agrees_with_pure_state_compare(self, seed):
        rng = np.random.default_rng(seed)
        I = random_isocone(rng, k_max=3)
        A = I.algebra
        states = []
        for _ in range(2):
            x = int(rng.integers(A.k))
            v = rng.normal(size=A.dims[x]) + 1j * rng.normal(size=A.dims[x])
            states.append(PureState(x, v))
        pure = pure_state_compare(I, *states)
        mixed = state_compare(I, states[0].density(A), states[1].density(A))
        assert pure is mixed

    def test_antisymmetric(self, rng):
        for _ in range(30):
            I = random_isocone(rng, k_max=3)
            r1, r2 = random_density(rng, I.algebra), random_density(rng, I.algebra)
            c = state_compare(I, r1, r2)
            if c is Comparison.EQUIVALENT:
                assert r1.rho.allclose(r2.rho, 1e-6)
            assert state_compare(I, r2, r1) is c.flipped()
