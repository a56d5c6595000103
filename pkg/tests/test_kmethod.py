import math

import numpy as np
import pytest

from kinterp import (
    ConcavePL,
    CoupleDescriptor,
    DyadicGrid,
    EHatNorm,
    ParameterLattice,
    SpaceLeg,
    e_hat_upper,
    k_curve,
    k_space_norm,
    lions_peetre_norm,
    orbit_norm,
    parameter_norm,
)

RAMP = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)  # min(1, t)


class TestParameterNorm:
    def test_zero(self):
        E = ParameterLattice.lions_peetre(0.5, 2.0)
        assert parameter_norm(np.zeros(E.grid.size), E) == 0.0

    def test_sup_form(self):
        E = ParameterLattice.lions_peetre(0.5, math.inf)
        # sup t^{-1/2} min(1, t) = 1 at t = 1
        assert parameter_norm(RAMP, E) == pytest.approx(1.0)

    def test_quadrature_against_analytic_integral(self):
        # int (min(1,t) t^{-1/2})^2 dt/t = 2, fine grid for the kink cell
        E = ParameterLattice.lions_peetre(0.5, 2.0, DyadicGrid(-30, 30, 16))
        assert parameter_norm(RAMP, E) ** 2 == pytest.approx(2.0, abs=1e-3)

    def test_monotone_and_homogeneous(self):
        rng = np.random.default_rng(0)
        E = ParameterLattice.lions_peetre(0.3, 1.5, DyadicGrid(-6, 6, 2))
        m = E.grid.size
        for _ in range(200):
            f = rng.random(m)
            g = f + rng.random(m)
            assert parameter_norm(f, E) <= parameter_norm(g, E)
            c = rng.uniform(0, 3)
            assert parameter_norm(c * f, E) == pytest.approx(
                c * parameter_norm(f, E)
            )

    def test_intersection_is_max(self):
        rng = np.random.default_rng(1)
        grid = DyadicGrid(-6, 6, 2)
        E0 = ParameterLattice.lions_peetre(0.3, 1.0, grid)
        E1 = ParameterLattice.lions_peetre(0.7, 2.0, grid)
        E = ParameterLattice.intersection(E0, E1)
        for _ in range(50):
            f = rng.random(grid.size)
            assert parameter_norm(f, E) == pytest.approx(
                max(parameter_norm(f, E0), parameter_norm(f, E1))
            )

    def test_explicit_node_weights(self):
        grid = DyadicGrid(-2, 2, 1)
        w = np.full(grid.size, 2.0)
        E = ParameterLattice("lq_dyadic", 1.0, 0.0, w, grid)
        f = np.ones(grid.size)
        assert parameter_norm(f, E) == pytest.approx(2.0 * grid.size * grid.log_weight)

    def test_validation(self):
        with pytest.raises(ValueError):
            ParameterLattice("lq_dyadic", q=0.0)
        with pytest.raises(ValueError):
            ParameterLattice.lions_peetre(1.5, 1.0)
        with pytest.raises(ValueError):
            parameter_norm(-np.ones(DyadicGrid().size), ParameterLattice())

    def test_divergence_flag(self):
        # a curve far outside the lattice blows past the partial-sum limit
        grid = DyadicGrid(-20, 20, 4)
        E = ParameterLattice("lq_dyadic", 1.0, 3.0, None, grid)  # weight t^-3
        f = np.ones(grid.size)
        assert parameter_norm(f, E) == math.inf

    def test_json_roundtrip(self):
        E = ParameterLattice.intersection(
            ParameterLattice.lions_peetre(0.25, 1.0, DyadicGrid(-4, 4, 2)),
            ParameterLattice("lq_dyadic", math.inf, 0.5, None, DyadicGrid(-4, 4, 2)),
        )
        E2 = ParameterLattice.from_json(E.to_json())
        f = np.linspace(0, 1, E.members[0].grid.size)
        assert parameter_norm(f, E2) == parameter_norm(f, E)


class TestKSpaceNorm:
    def test_zero_element(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        E = ParameterLattice.lions_peetre(0.5, 2.0, DyadicGrid(-8, 8, 2))
        assert k_space_norm([0.0, 0.0], couple, E) == 0.0

    def test_two_paths_one_definition(self):
        rng = np.random.default_rng(2)
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        grid = DyadicGrid(-10, 10, 4)
        for _ in range(10):
            x = rng.normal(size=6)
            theta, r = rng.uniform(0.2, 0.8), rng.uniform(0.5, 3.0)
            E = ParameterLattice.lions_peetre(theta, r, grid)
            a = k_space_norm(x, couple, E)
            b = lions_peetre_norm(x, couple, theta, r, grid)
            assert a == pytest.approx(b, rel=1e-12)

    def test_lions_peetre_homogeneity(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        x = np.array([0.3, -1.2, 0.7])
        grid = DyadicGrid(-8, 8, 2)
        a = lions_peetre_norm(2.0 * x, couple, 0.4, 1.5, grid)
        b = lions_peetre_norm(x, couple, 0.4, 1.5, grid)
        assert a == pytest.approx(2.0 * b, rel=1e-12)

    def test_sup_form_value_one(self):
        # K(t, e1; l^1, l^oo) = min(1, t); any theta gives sup value 1
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        for theta in (0.25, 0.5, 0.75):
            v = lions_peetre_norm([1.0, 0.0], couple, theta, math.inf)
            assert v == pytest.approx(1.0)

    def test_intersection_tightens_the_norm(self):
        # the intersection parameter dominates each member, so the induced
        # K-space norms are ordered on every element
        rng = np.random.default_rng(9)
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        grid = DyadicGrid(-8, 8, 2)
        E0 = ParameterLattice.lions_peetre(0.3, 1.0, grid)
        E1 = ParameterLattice.lions_peetre(0.6, 2.0, grid)
        E = ParameterLattice.intersection(E0, E1)
        for _ in range(25):
            x = rng.normal(size=5)
            v = k_space_norm(x, couple, E)
            assert v >= k_space_norm(x, couple, E0) * (1 - 1e-12)
            assert v >= k_space_norm(x, couple, E1) * (1 - 1e-12)

    def test_reiteration_ratio_stable(self):
        # (l^1, l^oo) with the (theta, r) parameter, 1/r = 1 - theta: the
        # K-space norm tracks l^r within a stable band, across dimensions
        rng = np.random.default_rng(3)
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        theta = 0.5
        r = 1.0 / (1.0 - theta)
        grid = DyadicGrid(-12, 12, 4)
        E = ParameterLattice.lions_peetre(theta, r, grid)
        leg = SpaceLeg("seq", r)
        ratios = []
        from kinterp import quasi_norm

        for _ in range(100):
            n = int(rng.integers(1, 65))
            x = rng.normal(size=n)
            ratios.append(quasi_norm(x, leg) / k_space_norm(x, couple, E))
        ratios = np.array(ratios)
        assert ratios.max() / ratios.min() <= 10.0


class TestOrbitNorm:
    def test_self_orbit_is_one(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        c = k_curve([1.0, 2.0], couple)
        assert orbit_norm(c, c) == pytest.approx(1.0)

    def test_homogeneity(self):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        a = k_curve([2.0, 4.0], couple)
        b = k_curve([1.0, 2.0], couple)
        assert orbit_norm(a, b) == pytest.approx(2.0)

    def test_knotwise_ratio(self):
        y = ConcavePL(np.array([0.0, 1.0]), np.array([0.0, 1.0]), 0.0)  # min(1,t)
        x = ConcavePL(np.array([0.0, 2.0]), np.array([0.0, 2.0]), 0.0)  # min(2,t)
        assert orbit_norm(y, x) == pytest.approx(1.0)  # attained as t -> 0
        assert orbit_norm(x, y) == pytest.approx(2.0)

    def test_zero_denominator(self):
        z = ConcavePL(np.array([0.0]), np.array([0.0]), 0.0)
        with pytest.raises(ValueError):
            orbit_norm(RAMP, z)
        assert orbit_norm(z, RAMP) == 0.0

    def test_infinite_when_slope_unmatched(self):
        lin = ConcavePL(np.array([0.0]), np.array([0.0]), 1.0)  # t
        assert orbit_norm(lin, RAMP) == math.inf
        assert orbit_norm(RAMP, lin) == pytest.approx(1.0)


class TestEHatUpper:
    def cfg(self, p=1.0, q=1.0, grid=None):
        couple = CoupleDescriptor.sequence_lp(1.0, math.inf)
        return EHatNorm(
            couple, SpaceLeg("seq", 1.0), p, q, budget=64, grid=grid or DyadicGrid(-8, 8, 2)
        )

    def test_basis_vector_single_cover(self):
        cfg = self.cfg()
        cover = e_hat_upper(k_curve([1.0, 0.0], cfg.couple, grid=cfg.grid), cfg)
        assert cover.value == pytest.approx(1.0, abs=1e-5)
        assert len(cover.elements) == 1
        assert np.allclose(cover.elements[0].values, [1.0], atol=1e-9)

    def test_zero(self):
        cfg = self.cfg()
        assert e_hat_upper(np.zeros(cfg.grid.size), cfg).value == 0.0

    def test_two_copy_cover(self):
        cfg = self.cfg()
        f = k_curve([1.0, 0.0], cfg.couple, grid=cfg.grid).at(cfg.grid.points())
        cover = e_hat_upper(2.0 * f, cfg)
        assert cover.value <= 2.0 + 1e-5

    def test_cover_dominates_on_grid(self):
        rng = np.random.default_rng(4)
        cfg = self.cfg(p=1.0, q=0.5)
        ts = cfg.grid.points()
        for _ in range(5):
            x = np.abs(rng.normal(size=5))
            f = k_curve(x, cfg.couple, grid=cfg.grid).at(ts)
            cover = e_hat_upper(f, cfg)
            dominated = cover.k_power_sum(cfg) >= f * (1 - 1e-9)
            assert np.all(dominated)

    @pytest.mark.parametrize("q", [1.0, 0.5])
    def test_q_subadditive_on_concave_curves(self, q):
        rng = np.random.default_rng(5)
        cfg = self.cfg(p=q, q=q)
        ts = cfg.grid.points()
        for _ in range(30):
            f = k_curve(np.abs(rng.normal(size=4)), cfg.couple, grid=cfg.grid).at(ts)
            g = k_curve(np.abs(rng.normal(size=4)), cfg.couple, grid=cfg.grid).at(ts)
            vf = e_hat_upper(f, cfg).value
            vg = e_hat_upper(g, cfg).value
            vfg = e_hat_upper(f + g, cfg).value
            assert vfg**q <= vf**q + vg**q + 1e-9 * (vf**q + vg**q)

    def test_requires_unweighted_sequence_couple(self):
        couple = CoupleDescriptor.weighted_l1([1.0], [2.0])
        with pytest.raises(ValueError):
            EHatNorm(couple, SpaceLeg("seq", 1.0), 1.0, 1.0)
