import math

import numpy as np
import pytest

from kinterp import (
    ConcavePL,
    CoupleDescriptor,
    DyadicGrid,
    StepFunction,
    WeightedSeq,
    conv_to_element,
    delta_sigma_norms,
    k_curve,
    k_curve_l1_linf,
    k_curve_linfty_couple,
    k_curve_numeric,
    k_curve_weighted_l1,
    k_exact_weighted_l1,
    k_numeric,
    sequence_as_step,
)
from oracles import brute_force_k

TGRID = DyadicGrid(-8, 8, 2)
T33 = DyadicGrid(-16, 16, 1)  # 33 dyadic points


def random_step(rng, pieces=4, signed=True):
    widths = rng.uniform(0.1, 2.0, pieces)
    vals = rng.normal(size=pieces) if signed else rng.uniform(0.1, 2.0, pieces)
    return StepFunction.from_pieces(np.concatenate([[0], np.cumsum(widths)]), vals)


class TestWeightedL1Engine:
    def test_two_ramp_example(self):
        # K(t) = min(1,t) + min(1,2t), checked against the split oracle
        couple = CoupleDescriptor.weighted_l1([1, 1], [1, 2])
        curve = k_curve_weighted_l1([1, 1], [1, 1], [1, 2])
        ts = np.array([0.1, 0.25, 0.5, 1.0, 2.0, 7.0])
        expected = np.minimum(1, ts) + np.minimum(1, 2 * ts)
        assert np.allclose(curve.at(ts), expected)
        oracle = brute_force_k([1, 1], couple, ts, points=21)
        assert np.allclose(curve.at(ts), oracle, rtol=1e-12)

    def test_zero_element(self):
        curve = k_curve_weighted_l1([0.0, 0.0], [1, 1], [1, 2])
        assert curve.at(5.0) == 0.0

    def test_single_coordinate(self):
        assert k_exact_weighted_l1([1.0], [1.0], [1.0], 0.3) == pytest.approx(0.3)
        assert k_exact_weighted_l1([1.0], [1.0], [1.0], 3.0) == pytest.approx(1.0)

    def test_infinite_weights_contribute_one_leg(self):
        # w1 = inf forces the coordinate through leg 0: constant contribution
        v = k_exact_weighted_l1([2.0], [3.0], [np.inf], 0.01)
        assert v == pytest.approx(6.0)
        curve = k_curve_weighted_l1([2.0], [3.0], [np.inf])
        assert curve.curve.value_at_zero_plus == pytest.approx(6.0)
        # w0 = inf forces leg 1: pure slope
        curve2 = k_curve_weighted_l1([2.0], [np.inf], [3.0])
        assert curve2.at(2.0) == pytest.approx(12.0)
        assert curve2.curve.terminal_slope == pytest.approx(6.0)

    def test_both_weights_infinite_rejected(self):
        with pytest.raises(ValueError, match="both weights infinite"):
            k_exact_weighted_l1([1.0], [np.inf], [np.inf], 1.0)

    def test_against_brute_force_random(self):
        rng = np.random.default_rng(3)
        ts = TGRID.points()
        for _ in range(10):
            n = int(rng.integers(1, 5))
            w0 = rng.uniform(0.2, 4, n)
            w1 = rng.uniform(0.2, 4, n)
            x = rng.normal(size=n)
            couple = CoupleDescriptor.weighted_l1(w0, w1)
            curve = k_curve(x, couple)
            oracle = brute_force_k(x, couple, ts, points=21)
            assert np.allclose(curve.at(ts), oracle, rtol=1e-9)


class TestL1LinfEngine:
    def test_indicator(self):
        f = StepFunction.indicator(0, 2)
        curve = k_curve_l1_linf(f)
        ts = np.array([0.5, 1.0, 2.0, 5.0])
        assert np.allclose(curve.at(ts), np.minimum(ts, 2.0))

    def test_two_level_piecewise_integral(self):
        # f* = 3 on (0,1], 1 on (1,2]
        f = StepFunction.from_pieces([0, 1, 2], [1, 3])
        curve = k_curve_l1_linf(f)
        assert curve.at(0.5) == pytest.approx(1.5)
        assert curve.at(1.0) == pytest.approx(3.0)
        assert curve.at(1.5) == pytest.approx(3.5)
        assert curve.at(2.0) == pytest.approx(4.0)
        assert curve.at(9.0) == pytest.approx(4.0)

    def test_large_t_limit_is_l1_norm(self):
        rng = np.random.default_rng(4)
        f = random_step(rng, 5)
        curve = k_curve_l1_linf(f)
        l1 = float((np.abs(f.values) * f.widths).sum())
        assert curve.at(1e9) == pytest.approx(l1)

    def test_against_brute_force(self):
        # piece values with pairwise ratios in twentieths: the 21-point
        # fraction grid then contains the optimal level cut exactly
        rng = np.random.default_rng(5)
        couple = CoupleDescriptor.function_lp(1.0, math.inf)
        ts = T33.points()
        family = np.array([1.0, 2.0, 4.0, 5.0, 10.0, 20.0])
        for _ in range(6):
            widths = rng.uniform(0.1, 2.0, 4)
            vals = rng.choice(family, size=4) * rng.choice([-1, 1], size=4)
            f = StepFunction.from_pieces(
                np.concatenate([[0], np.cumsum(widths)]), vals * rng.uniform(0.5, 2)
            )
            curve = k_curve(f, couple)
            oracle = brute_force_k(f, couple, ts, points=21)
            assert np.all(curve.at(ts) <= oracle * (1 + 1e-9))
            assert np.allclose(curve.at(ts), oracle, rtol=1e-6)

    def test_below_brute_force_general(self):
        # on arbitrary values the fraction grid cannot express the optimal
        # cut, so brute only upper-bounds the exact engine
        rng = np.random.default_rng(15)
        couple = CoupleDescriptor.function_lp(1.0, math.inf)
        ts = T33.points()
        for _ in range(4):
            f = random_step(rng, 4)
            curve = k_curve(f, couple)
            oracle = brute_force_k(f, couple, ts, points=21)
            assert np.all(curve.at(ts) <= oracle * (1 + 1e-9))


class TestLinftyCoupleEngine:
    def test_concave_fixed_point(self):
        ts = np.linspace(0, 1, 65)[1:]
        f = StepFunction.from_pieces(
            np.concatenate([[0.0], ts * 4.0]), np.minimum(ts * 4.0, 1.0)
        )
        curve = k_curve_linfty_couple(f)
        probe = np.array([0.5, 1.0, 2.0, 8.0])
        assert np.max(np.abs(curve.at(probe) - np.minimum(probe, 1.0))) < 0.07

    def test_indicator_hull(self):
        curve = k_curve_linfty_couple(StepFunction.indicator(1, 2))
        probe = np.array([0.3, 1.0, 4.0])
        assert np.allclose(curve.at(probe), np.minimum(probe, 1.0))

    def test_modulus_invariance(self):
        rng = np.random.default_rng(6)
        f = random_step(rng, 6)
        g = StepFunction(f.breaks, -np.abs(f.values))
        a = k_curve_linfty_couple(f)
        b = k_curve_linfty_couple(g)
        ts = TGRID.points()
        assert np.allclose(np.abs(a.at(ts)), np.abs(b.at(ts)))


class TestNumericEngine:
    def test_spike_in_half_inf_couple(self):
        couple = CoupleDescriptor.sequence_lp(0.5, math.inf)
        for t in (0.2, 1.0, 3.0):
            v, w = k_numeric([1.0, 0.0], couple, t)
            assert v == pytest.approx(min(1.0, t), rel=1e-9)
            assert w.reconstructs(WeightedSeq.of([1.0, 0.0]))

    def test_zero_element(self):
        couple = CoupleDescriptor.sequence_lp(0.5, 1.0)
        v, w = k_numeric([0.0, 0.0], couple, 1.0)
        assert v == 0.0
        assert np.all(w.x0.values == 0) and np.all(w.x1.values == 0)

    def test_matches_discrete_calderon_formula(self):
        # (l^1, l^oo): K equals the integrated rearrangement of the
        # counting-measure step picture
        rng = np.random.default_rng(7)
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        ts = T33.points()
        for _ in range(5):
            x = rng.normal(size=4)
            exact = k_curve_l1_linf(sequence_as_step(x))
            numeric = k_curve_numeric(x, couple, grid=T33)
            mask = exact.at(ts) > 0
            assert np.allclose(
                numeric.at(ts)[mask], exact.at(ts)[mask], rtol=1e-6
            )

    @pytest.mark.parametrize("pq", [(0.5, 1.0), (0.5, math.inf), (1.0, math.inf)])
    def test_never_loses_to_brute_force(self, pq):
        rng = np.random.default_rng(8)
        couple = CoupleDescriptor.sequence_lp(*pq)
        ts = T33.points()
        for n in (2, 3, 4):
            x = rng.normal(size=n)
            oracle = brute_force_k(x, couple, ts, points=21)
            for i in range(0, ts.size, 4):
                v, _ = k_numeric(x, couple, float(ts[i]), accuracy=1e-9)
                assert v <= oracle[i] * (1 + 1e-6) + 1e-12

    @pytest.mark.parametrize("pq", [(0.5, 1.0), (0.5, math.inf), (1.0, math.inf)])
    def test_agrees_with_brute_force_on_aligned_values(self, pq):
        # entries with pairwise ratios in twentieths: both sides resolve the
        # restricted optimum exactly
        rng = np.random.default_rng(8)
        couple = CoupleDescriptor.sequence_lp(*pq)
        family = np.array([1.0, 2.0, 4.0, 5.0, 10.0, 20.0])
        ts = T33.points()
        for n in (2, 3, 4):
            x = rng.choice(family, size=n) * rng.choice([-1, 1], size=n)
            x = x * rng.uniform(0.5, 2.0)
            oracle = brute_force_k(x, couple, ts, points=21)
            for i in range(0, ts.size, 4):
                v, _ = k_numeric(x, couple, float(ts[i]), accuracy=1e-9)
                assert abs(v - oracle[i]) <= 1e-3 * max(oracle[i], 1e-12)

    def test_homogeneity(self):
        rng = np.random.default_rng(9)
        couple = CoupleDescriptor.sequence_lp(0.5, math.inf)
        x = rng.normal(size=5)
        for lam in (0.25, 3.0):
            for t in (0.3, 1.0, 4.0):
                a, _ = k_numeric(lam * x, couple, t, accuracy=1e-10)
                b, _ = k_numeric(x, couple, t, accuracy=1e-10)
                assert a == pytest.approx(abs(lam) * b, rel=1e-9)

    def test_step_function_couple(self):
        rng = np.random.default_rng(10)
        couple = CoupleDescriptor.function_lp(0.5, 2.0)
        f = random_step(rng, 3)
        ts = np.array([0.25, 1.0, 4.0])
        oracle = brute_force_k(f, couple, ts, points=21)
        for t, o in zip(ts, oracle):
            v, w = k_numeric(f, couple, float(t), accuracy=1e-9)
            assert v <= o * (1 + 1e-6)
            assert w.reconstructs(f)


class TestOracleEquivalence:
    # the numeric engine must reproduce every exact engine it overlaps with

    def test_numeric_matches_weighted_l1_engine(self):
        rng = np.random.default_rng(20)
        ts = T33.points()
        for n in (1, 2, 4, 6):
            w0, w1 = rng.uniform(0.2, 4, n), rng.uniform(0.2, 4, n)
            x = rng.normal(size=n)
            couple = CoupleDescriptor.weighted_l1(w0, w1)
            exact = k_curve_weighted_l1(x, w0, w1)
            for t in ts[::2]:
                v, _ = k_numeric(x, couple, float(t), accuracy=1e-9)
                assert v == pytest.approx(exact.at(float(t)), rel=1e-6, abs=1e-12)

    def test_numeric_matches_l1_linf_engine(self):
        rng = np.random.default_rng(21)
        couple = CoupleDescriptor.function_lp(1.0, math.inf)
        ts = T33.points()
        for m in (2, 4, 6):
            f = random_step(rng, m)
            exact = k_curve_l1_linf(f)
            for t in ts[::2]:
                v, _ = k_numeric(f, couple, float(t), accuracy=1e-9)
                assert v == pytest.approx(exact.at(float(t)), rel=1e-6, abs=1e-12)


class TestCurveInvariants:
    def test_swap_symmetry_weighted_l1(self):
        rng = np.random.default_rng(11)
        ts = TGRID.points()
        for _ in range(10):
            n = int(rng.integers(1, 6))
            w0, w1 = rng.uniform(0.2, 4, n), rng.uniform(0.2, 4, n)
            x = rng.normal(size=n)
            a = k_curve_weighted_l1(x, w0, w1)
            b = k_curve_weighted_l1(x, w1, w0)
            assert np.allclose(a.at(ts), ts * b.at(1.0 / ts), rtol=1e-11)

    def test_leg_limits(self):
        # t -> oo recovers the leg-0 norm; small-t slope the leg-1 norm
        couple = CoupleDescriptor.weighted_l1([1.0, 2.0], [3.0, 1.0])
        x = [1.0, -1.0]
        curve = k_curve(x, couple)
        assert curve.at(1e9) == pytest.approx(3.0)  # |1|*1 + |1|*2
        t = 1e-9
        assert curve.at(t) / t == pytest.approx(4.0)  # |1|*3 + |1|*1

    def test_convexification_bridge_band(self):
        # K(t, x^{(p)}; convexified couple) vs K(t^{1/p}, x)^p within 2^{1-p}
        from kinterp import convexify_couple, signed_power

        rng = np.random.default_rng(12)
        p = 0.5
        couple = CoupleDescriptor.sequence_lp(0.5, math.inf)
        conv = convexify_couple(couple, 1.0 / p)  # (l^1, l^oo)
        band = 2.0 ** (1.0 - p)
        for _ in range(5):
            x = rng.normal(size=4)
            g = signed_power(x, p)
            for t in (0.25, 1.0, 4.0):
                kc, _ = k_numeric(g, conv, t, accuracy=1e-9)
                ko, _ = k_numeric(x, couple, t ** (1.0 / p), accuracy=1e-9)
                ratio = kc / ko**p
                assert band ** -1 * (1 - 1e-6) <= ratio <= band * (1 + 1e-6)


class TestConvToElement:
    def test_single_ramp(self):
        phi = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)
        ce = conv_to_element(phi, -4, 4)
        nz = {int(n): m for n, m in zip(ce.ns, ce.masses) if m != 0}
        assert nz == {0: pytest.approx(1.0)}
        assert ce.alpha == 0.0 and ce.beta == 0.0
        lo, hi = ce.equivalence_band(phi, DyadicGrid(-4, 4, 2))
        assert lo == pytest.approx(1.0) and hi == pytest.approx(1.0)

    def test_pure_slope(self):
        phi = ConcavePL(np.array([0.0]), np.array([0.0]), 1.0)
        ce = conv_to_element(phi, -4, 4)
        assert ce.beta == 1.0 and np.all(ce.masses == 0) and ce.alpha == 0.0

    def test_pure_constant(self):
        phi = ConcavePL(np.array([0.0]), np.array([1.0]), 0.0)
        ce = conv_to_element(phi, -4, 4)
        assert ce.alpha == 1.0 and np.all(ce.masses == 0) and ce.beta == 0.0

    def test_band_measured_on_random_curves(self):
        rng = np.random.default_rng(13)
        grid = DyadicGrid(-8, 8, 2)
        for _ in range(10):
            n = int(rng.integers(2, 7))
            w0, w1 = rng.uniform(0.05, 20, n), rng.uniform(0.05, 20, n)
            x = rng.uniform(0.1, 2, n)
            phi = k_curve_weighted_l1(x, w0, w1).curve
            ce = conv_to_element(phi, -8, 8)
            lo, hi = ce.equivalence_band(phi, grid)
            assert 0.4 <= lo <= 1.0 + 1e-9 and hi <= 1.0 + 1e-9


class TestDeltaSigma:
    def test_basis_vector_in_l1_linf(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        x = [1.0, 0.0]
        delta, sigma = delta_sigma_norms(x, couple)
        assert delta == 1.0
        oracle = brute_force_k(x, couple, [1.0], points=41)[0]
        assert sigma == pytest.approx(oracle, rel=1e-9)

    def test_zero(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        assert delta_sigma_norms([0.0, 0.0], couple) == (0.0, 0.0)

    def test_sigma_below_min_leg_below_delta(self):
        rng = np.random.default_rng(14)
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        for _ in range(100):
            x = rng.normal(size=4)
            d, s = delta_sigma_norms(x, couple)
            n0, n1 = couple.leg_norms(x)
            assert s <= min(n0, n1) * (1 + 1e-9)
            assert min(n0, n1) <= d * (1 + 1e-12)
