import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinterp import (
    ConcavePL,
    StepFunction,
    least_concave_majorant,
    upper_concave_envelope,
)
from oracles import chord_majorant_oracle, step_corner_points


class TestConcavePL:
    def test_basic_eval(self):
        c = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)
        assert c.at(0.5) == 0.5 and c.at(1.0) == 1.0 and c.at(10.0) == 1.0

    def test_terminal_slope(self):
        c = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 2.0]), 0.5)
        assert c.at(3.0) == pytest.approx(2.0 + 0.5 * 2.0)

    def test_jump_at_zero(self):
        c = ConcavePL(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 0.0)
        assert c.value_at_zero_plus == 1.0
        assert c.at(0.0) == 1.0  # evaluator returns the right limit
        assert not c.is_conv0

    def test_conv0_flag(self):
        c = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)
        assert c.is_conv0
        d = ConcavePL(np.array([0.0]), np.array([0.0]), 1.0)
        assert not d.is_conv0

    def test_cone_violations_rejected(self):
        with pytest.raises(ValueError):  # decreasing values
            ConcavePL(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 1.0]))
        with pytest.raises(ValueError):  # convex kink
            ConcavePL(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.5, 2.0]))
        with pytest.raises(ValueError):  # terminal slope above last chord
            ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 2.0)

    def test_addition_and_scaling(self):
        a = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)
        b = ConcavePL(np.array([0.0, 2.0]), np.array([0.0, 1.0]), 0.25)
        s = a + b
        for t in (0.3, 1.0, 1.7, 5.0):
            assert s.at(t) == pytest.approx(a.at(t) + b.at(t))
        assert s.terminal_slope == 0.25
        assert a.scaled(2.0).at(0.7) == pytest.approx(1.4)

    def test_validate_reports_clean(self):
        c = ConcavePL(np.array([0.0, 1.0, 3.0]), np.array([0.0, 2.0, 3.0]), 0.1)
        ok, worst = c.validate(1e-9)
        assert ok and worst <= 0.0


class TestLeastConcaveMajorant:
    def test_already_concave_ramp(self):
        # fine staircase under min(1, t) stays within grid resolution
        ts = np.linspace(0, 1, 101)[1:]
        f = StepFunction.from_pieces(np.concatenate([[0.0], ts]), np.minimum(ts, 1.0))
        g = least_concave_majorant(f)
        probe = np.linspace(0.01, 2.0, 57)
        target = np.minimum(probe, 1.0)
        assert np.all(g.at(probe) >= f(probe) - 1e-12)
        assert np.max(np.abs(g.at(probe) - target)) <= 0.011  # one staircase step

    def test_indicator_corner(self):
        g = least_concave_majorant(StepFunction.indicator(1, 2))
        probe = np.array([0.25, 0.5, 1.0, 1.5, 3.0])
        assert np.allclose(g.at(probe), np.minimum(probe, 1.0))

    def test_indicator_at_zero_jumps(self):
        g = least_concave_majorant(StepFunction.indicator(0, 1))
        assert g.value_at_zero_plus == 1.0
        assert g.at(0.5) == 1.0 and g.at(42.0) == 1.0

    def test_against_chord_oracle_random(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            widths = rng.uniform(0.1, 1.5, 8)
            vals = rng.normal(size=8)
            f = StepFunction.from_pieces(
                np.concatenate([[0], np.cumsum(widths)]), vals
            )
            g = least_concave_majorant(f)
            pts = step_corner_points(f)
            probe = np.concatenate(
                [f.breaks, 0.5 * (f.breaks[:-1] + f.breaks[1:]), [f.breaks[-1] * 2]]
            )
            probe = probe[probe > 0]
            for t in probe:
                oracle = chord_majorant_oracle(pts, float(t))
                assert g.at(float(t)) == pytest.approx(oracle, abs=1e-10)
            # domination with nonnegative slack at every corner
            for (tc, yc) in pts:
                assert g.at(tc) >= yc - 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            widths = rng.uniform(0.1, 1.5, 6)
            f = StepFunction.from_pieces(
                np.concatenate([[0], np.cumsum(widths)]), rng.normal(size=6)
            )
            g = least_concave_majorant(f)
            ts = np.unique(np.concatenate([g.knots_t, [g.knots_t[-1] + 1.0]]))
            h = upper_concave_envelope(ts, g.at(ts))
            probe = np.linspace(0.01, float(ts[-1]), 37)
            assert np.allclose(h.at(probe), g.at(probe), atol=1e-12)

    def test_domain_cap_restricts_corners(self):
        f = StepFunction.from_pieces([0, 1, 2, 3], [0, 0, 5])
        full = least_concave_majorant(f)
        capped = least_concave_majorant(f, domain_cap=2.0)
        assert full.at(2.0) == pytest.approx(5.0)
        assert capped.at(2.0) == 0.0

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=4096),  # t = k/256, so knot
                st.floats(min_value=0, max_value=8, allow_nan=False),  # spacing
            ),  # stays representable (subnormal gaps overflow any slope)
            min_size=1,
            max_size=10,
        )
    )
    @settings(max_examples=80, deadline=None)
    def test_envelope_dominates_and_matches_oracle(self, raw_points):
        points = [(k / 256.0, y) for k, y in raw_points]
        ts = np.array([p[0] for p in points])
        ys = np.array([p[1] for p in points])
        env = upper_concave_envelope(ts, ys)
        assert np.all(env.at(ts) >= ys - 1e-9 * max(1.0, ys.max()))
        pts = [(0.0, 0.0)] + points
        for t in np.unique(np.concatenate([ts, ts * 0.5 + 0.1])):
            oracle = chord_majorant_oracle(pts, float(t))
            assert env.at(float(t)) == pytest.approx(oracle, abs=1e-9)

    def test_output_in_cone(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            widths = rng.uniform(0.05, 2.0, 7)
            start = rng.uniform(0, 1)
            f = StepFunction.from_pieces(
                np.concatenate([[start], start + np.cumsum(widths)]),
                rng.normal(size=7),
            )
            g = least_concave_majorant(f)
            ok, worst = g.validate(1e-9)
            assert ok, worst
