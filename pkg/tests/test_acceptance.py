"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``python -m pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from conftest import lattice_pair, random_isocone, random_projection, random_region
from ncorder.algebra import BlockAlgebra
from ncorder.classify import ClassifyConfig, classify, verify_classification
from ncorder.herm import commutator_norm, join, meet, proj_join, proj_meet, random_hermitian
from ncorder.isocone.axioms import AxiomConfig, check_axioms
from ncorder.isocone.bloch import BlochRegion, angle_between, from_bloch
from ncorder.isocone.cones import ClassifiedIsocone, InnerCone
from ncorder.isocone.saturation import SaturationConfig, saturate
from ncorder.order_maps import Comparison, PureState, inner_order, inner_order_stability, pure_state_compare
from ncorder.poset import Poset, all_posets
from ncorder.two_subspace import convex_combo_spectrum, generated_lattice16, halmos_decompose

TOL = 1e-9


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def _single(region):
    cone = InnerCone.m2(region) if region is not None else InnerCone.full(2)
    return ClassifiedIsocone(BlockAlgebra((2,)), Poset.antichain(1), (cone,))


def test_criterion_1_axiom_suite(report):
    rng = np.random.default_rng(1)
    cfg = AxiomConfig(trials=200, seed=0, tol=TOL)
    failed = []
    t0 = time.perf_counter()
    for i in range(50):
        I = random_isocone(rng, k_max=4)
        rep = check_axioms(I, I.sample, cfg)
        if not rep.passed:
            failed.append((i, rep.failures))
    dt = time.perf_counter() - t0
    report(1, not failed and dt <= 60, f"50 cones x 200 trials, {len(failed)} failing, {dt:.1f} s")


def test_criterion_2_m2_strong_closure(report):
    rng = np.random.default_rng(2)
    bad = pairs = 0
    for _ in range(20):
        I = _single(random_region(rng, polygons=True))
        done = 0
        while done < 200:
            a, b = I.sample(rng).blocks[0], I.sample(rng).blocks[0]
            if commutator_norm(a, b) < 1e-6:
                continue
            done += 1
            for c in (join(a, b), meet(a, b)):
                bad += not I.decide(I.algebra.element([c]), TOL).accepted
        pairs += done
    report(2, bad == 0, f"{pairs} non-commuting pairs, {bad} join/meet outside")


def test_criterion_3_halmos_reconstruction(report):
    rng = np.random.default_rng(3)
    worst, bad_spec, bad_dim = 0.0, 0, 0
    for _ in range(100):
        n = int(rng.integers(2, 9))
        pL = random_projection(rng, n, int(rng.integers(1, n)))
        pN = random_projection(rng, n, int(rng.integers(1, n)))
        D = halmos_decompose(pL, pN)
        rL, rN = D.reconstruct()
        worst = max(worst, np.linalg.norm(rL - pL), np.linalg.norm(rN - pN))
        if D.d0:
            h = np.linalg.eigvalsh(D.H)
            bad_spec += not (h.min() > 0 and h.max() < 1)
        bad_dim += D.L0.shape[1] != D.L0p.shape[1]
    ok = worst <= 1e-9 and bad_spec == 0 and bad_dim == 0
    report(3, ok, f"100 pairs, worst Frobenius error {worst:.2e}, spectrum violations {bad_spec}, "
                  f"dimension mismatches {bad_dim}")


def _chain_violations(cs, t):
    lo, hi = min(t, 1 - t), max(t, 1 - t)
    expect = {"0": 0.0, "t": t, "1-t": 1 - t, "1/2": 0.5, "1": 1.0}
    bad = 0
    for g in cs.groups:
        v = np.asarray(g.values)
        if g.label == "S-":
            bad += not (np.all(v > TOL) and np.all(v < lo - TOL))
        elif g.label == "S+":
            bad += not (np.all(v > hi + TOL) and np.all(v < 1 - TOL))
        else:
            bad += not np.allclose(v, expect[g.label], atol=TOL)
    return bad


def test_criterion_4_combo_spectrum_chains(report):
    rng = np.random.default_rng(4)
    bad = asym = done = 0
    while done < 100:
        n = int(rng.integers(3, 9))
        pL = random_projection(rng, n, int(rng.integers(1, n)))
        pN = random_projection(rng, n, int(rng.integers(1, n)))
        if commutator_norm(pL, pN) < 1e-6:
            continue
        done += 1
        for t in (0.2, 0.5, 0.8):
            cs = convex_combo_spectrum(pL, pN, t)
            bad += _chain_violations(cs, t)
            if t == 0.5 and cs.group("S+") is not None:
                sp = np.sort(cs.group("S+").values)
                sm = np.sort(1 - np.asarray(cs.group("S-").values))
                asym += not np.allclose(sp, sm, atol=TOL)
    report(4, bad == 0 and asym == 0, f"100 pairs x 3 weights, {bad} chain violations, {asym} asymmetric at t=1/2")


def test_criterion_5_lattice16(report):
    rng = np.random.default_rng(5)
    bad = 0
    for _ in range(50):
        lat = generated_lattice16(*lattice_pair(rng))
        ok = len(lat) == 16 and lat.distinct and all(lat.identities.values())
        for S in lat.subsets():
            for T in lat.subsets():
                ok &= lat.find(proj_meet(lat[S], lat[T])) == tuple(sorted(set(S) & set(T)))
                ok &= lat.find(proj_join(lat[S], lat[T])) == tuple(sorted(set(S) | set(T)))
        bad += not ok
    report(5, bad == 0, f"50 pairs, {bad} failing distinctness, closure or identities")


def test_criterion_6_inner_order(report):
    rng = np.random.default_rng(6)
    wrong = unstable = 0
    for _ in range(20):
        K = BlochRegion.cap(rng.normal(size=3), float(rng.uniform(0.2, 1.4)))
        I, F = _single(K), _single(None)
        d = K.sample(rng)
        assert K.margin(d) > 0 and K.margin(-d) < 0
        a = I.algebra.element([from_bloch(float(rng.normal()), float(rng.uniform(0.5, 2)) * d)])
        wrong += inner_order(I, a) != Poset.chain(2)
        wrong += inner_order(F, a) != Poset.antichain(2)
        rep = inner_order_stability(I, a, radius=0.1 * I.margin(a), trials=50, seed=int(rng.integers(2**31)))
        unstable += not (rep.stable and rep.agree == 50)
    report(6, wrong == 0 and unstable == 0, f"20 cap cones, {wrong} wrong orders, {unstable} unstable")


def test_criterion_7_triviality_witness(report):
    rng = np.random.default_rng(7)
    p, q = random_projection(rng, 3, 1), random_projection(rng, 3, 1)
    t0 = time.perf_counter()
    rep = saturate([p, q, p + q + 0.1 * random_hermitian(rng, 3)], SaturationConfig(max_rounds=50, seed=1))
    dt = time.perf_counter() - t0
    K = BlochRegion.cap([0, 0, 1], np.pi / 4)
    gens = [from_bloch(rng.normal(), rng.uniform(0.5, 2) * K.sample(rng)) for _ in range(4)]
    cap = saturate(gens, SaturationConfig(max_rounds=50, seed=1))
    ok = rep.trivial and rep.span_dim == 9 and len(rep.rounds) <= 50 and dt <= 120 and not cap.trivial
    report(7, ok, f"Herm(3) span {rep.span_dim} witnessed={rep.trivial} in {len(rep.rounds)} rounds, "
                  f"{dt:.1f} s; cap span {cap.span_dim} witnessed={cap.trivial}")


def _perturb(I, rng):
    P = I.poset
    loose = [(x, y) for x in range(P.size) for y in range(P.size) if x != y and not P.comparable(x, y)]
    if loose:
        x, y = loose[int(rng.integers(len(loose)))]
        Q = Poset.from_relations(P.size, P.strict_pairs() + [(x, y)])
        return ClassifiedIsocone(I.algebra, Q, I.inner)
    inner = list(I.inner)
    for x, c in enumerate(inner):
        if not c.is_full and c.region.kind == "cap":
            inner[x] = InnerCone.m2(BlochRegion.cap(c.region.center, 0.5 * c.region.angle))
            return ClassifiedIsocone(I.algebra, P, tuple(inner))
    if P.strict_pairs():
        # a total order with full blocks: forget the order entirely
        return ClassifiedIsocone(I.algebra, Poset.antichain(P.size), I.inner)
    return None


def test_criterion_8_classification_round_trip(report):
    rng = np.random.default_rng(8)
    cfg = ClassifyConfig(trials=500)
    vcfg = ClassifyConfig(trials=60, grid=642)
    wrong_poset = bad_fit = disagree = missed = perturbed = 0
    for _ in range(100):
        I = random_isocone(rng, k_max=5, polygons=False)
        res = classify(I, I.algebra, cfg)
        wrong_poset += res.poset != I.poset
        for x, cone in enumerate(I.inner):
            if not cone.is_full:
                f = res.fits[x]
                bad_fit += not (abs(f.angle - cone.region.angle) <= 2 * f.resolution
                                and angle_between(f.center, cone.region.center) <= 2 * f.resolution)
        disagree += not verify_classification(I, I, vcfg).ok
        cand = _perturb(I, rng)
        if cand is not None and cand.to_dict() != I.to_dict():
            perturbed += 1
            missed += not verify_classification(I, cand, vcfg).witnesses
    ok = wrong_poset == bad_fit == disagree == missed == 0
    report(8, ok, f"100 cones: {wrong_poset} wrong posets, {bad_fit} caps off by > 2x resolution, "
                  f"{disagree} ground-truth disagreements, {missed}/{perturbed} perturbations without witness")


def _cap_dual_closed_form(K, d):
    # d lies in the dual cone of the cap iff its angle to the axis is at most pi/2 - alpha
    n = np.linalg.norm(d)
    if n <= TOL:
        return True, False
    theta = np.arccos(np.clip(d @ K.center / n, -1, 1))
    return theta + K.angle <= np.pi / 2, abs(theta + K.angle - np.pi / 2) < 1e-7


def test_criterion_9_state_order(report):
    rng = np.random.default_rng(9)
    K = BlochRegion.cap([0, 0, 1], np.pi / 4)
    A = BlockAlgebra((1, 1, 2))
    inner = (InnerCone.full(1), InnerCone.full(1), InnerCone.m2(K))
    cross_bad = cross = 0
    for P in all_posets(3):
        I = ClassifiedIsocone(A, P, inner)
        for _ in range(10):
            x, y = rng.choice(3, size=2, replace=False)
            s = [PureState(int(z), rng.normal(size=A.dims[z]) + 1j * rng.normal(size=A.dims[z])) for z in (x, y)]
            expect = Comparison.from_flags(P.lt(x, y), P.lt(y, x))
            cross += 1
            cross_bad += pure_state_compare(I, *s) is not expect
    I = ClassifiedIsocone(A, Poset.antichain(3), inner)
    same_bad = skipped = 0
    counts = {}
    for _ in range(1000):
        phi, psi = (PureState(2, rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(2))
        d = psi.bloch() - phi.bloch()
        le, near1 = _cap_dual_closed_form(K, d)
        ge, near2 = _cap_dual_closed_form(K, -d)
        if near1 or near2:
            skipped += 1
            continue
        got = pure_state_compare(I, phi, psi, TOL)
        counts[got.value] = counts.get(got.value, 0) + 1
        same_bad += got is not Comparison.from_flags(le, ge)
    ok = cross_bad == 0 and same_bad == 0
    report(9, ok, f"{cross} cross-block pairs over 19 posets, {cross_bad} mismatches; "
                  f"1000 same-block pairs ({skipped} within 1e-7 of the dual boundary skipped), "
                  f"{same_bad} mismatches, verdicts {counts}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
