import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetamom import main_terms as mt
from zetamom import prime_tools as pt
from zetamom import proxy_polys as pp
from zetamom.errors import (
    PoleProximity,
    ShiftTooLarge,
    StepTooCoarse,
)


class TestSmoothWeight:
    def test_plateau_and_support(self):
        w = mt.SmoothWeight()
        assert float(w(0.4)) == 0.0
        assert float(w(4.1)) == 0.0
        assert float(w(2.0)) == 1.0
        assert 0.0 < float(w(0.75)) < 1.0

    def test_scale_multiplies(self):
        w = mt.SmoothWeight(scale=2.5)
        assert float(w(2.0)) == 2.5
        assert w.mass == pytest.approx(2.5 * mt.SmoothWeight().mass)

    def test_mass_between_plateau_and_support(self):
        w = mt.SmoothWeight()
        b, c = w.plateau
        a, d = w.support
        assert c - b < w.mass < d - a

    def test_lower_bound_weight_mass(self):
        assert 0.6 < mt.LOWER_BOUND_WEIGHT.mass <= 0.8

    def test_invalid_ordering(self):
        with pytest.raises(ValueError):
            mt.SmoothWeight(support=(1.0, 2.0), plateau=(0.5, 1.5))

    def test_helpers(self):
        w = mt.SmoothWeight()
        assert mt.weight_eval(w, 2.0) == 1.0
        assert mt.weight_mass(w) == w.mass


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=-1.0, max_value=6.0))
def test_weight_range_property(x):
    w = mt.SmoothWeight()
    v = float(w(x))
    assert 0.0 <= v <= 1.0


class TestContourSpec:
    def test_node_count_validation(self):
        with pytest.raises(ValueError):
            mt.ContourSpec(centers=(0.0,), T=1e4, nodes_per_circle=24)
        with pytest.raises(ValueError):
            mt.ContourSpec(centers=(0.0,), T=1e4, nodes_per_circle=8)

    def test_radius_grows_with_index(self):
        spec = mt.ContourSpec(centers=(0.0,), T=1e4)
        assert spec.radius(2) == pytest.approx(2 * spec.radius(1))

    def test_nodes_pick_up_residues(self):
        """sum of w_m / (z_m - p) is the contour integral of 1/(z-p), which
        is 1 for p inside and 0 for p outside."""
        spec = mt.ContourSpec(centers=(0.0,), T=1e4, nodes_per_circle=64)
        poles = [0.1j, -0.05j]
        z, w = spec.nodes(1, poles)
        for p in poles:
            assert abs(np.sum(w / (z - p)) - 1.0) < 1e-10
        outside = 1.0 + 1.0j
        assert abs(np.sum(w / (z - outside))) < 1e-6

    def test_clearance_invariant(self):
        # the enclosing-circle construction keeps every node at least
        # radius(j) away from every pole
        spec = mt.ContourSpec(centers=(0.0,), T=1e4, nodes_per_circle=16)
        poles = np.array([0.0, 0.3j, -0.1 + 0.05j])
        z, _ = spec.nodes(2, poles)
        dist = np.min(np.abs(z[:, None] - poles[None, :]))
        assert dist >= spec.radius(2) * (1 - 1e-12)


class TestTwistSpec:
    def test_trivial_flag(self):
        tw = mt.trivial_twist(1e4)
        assert tw.trivial

    def test_support_cap(self):
        poly = pp.make_poly([1, 1000], [1.0, 0.5])
        with pytest.raises(ValueError):
            mt.TwistSpec(a_poly=poly, b_poly=poly, eta=0.05, T=1e4)

    def test_nontrivial_flag(self):
        poly = pp.make_poly([1, 2], [1.0, 0.5])
        tw = mt.TwistSpec(a_poly=poly, b_poly=poly, eta=0.5, T=1e4)
        assert not tw.trivial


class TestTwistSums:
    def test_f_second_hand_value(self):
        poly = pp.make_poly([1, 2], [1.0, 1.0])
        tw = mt.TwistSpec(a_poly=poly, b_poly=poly, eta=0.5, T=1e4)
        # (1,1): 1, (1,2) and (2,1): 1/2 each, (2,2): gcd 2, lcm 2 -> 1/2
        assert mt.f_second(0.0, 0.0, tw) == pytest.approx(2.5)

    def test_f_second_broadcasts(self):
        poly = pp.make_poly([1, 2], [1.0, 0.5])
        tw = mt.TwistSpec(a_poly=poly, b_poly=poly, eta=0.5, T=1e4)
        z = np.array([0.0, 0.01j, -0.01j])
        out = mt.f_second(z[:, None], z[None, :], tw)
        assert out.shape == (3, 3)
        assert abs(out[1, 2] - mt.f_second(0.01j, -0.01j, tw)) < 1e-14

    def test_f_fourth_trivial_is_one(self, table_small):
        tw = mt.trivial_twist(1e4)
        z = (0.01j, 0.02j, -0.01j, -0.02j)
        assert mt.f_fourth(z, tw, table_small) == pytest.approx(1.0)

    def test_f_fourth_matches_b_coeff_sum(self, table_small):
        poly = pp.make_poly([1, 2], [1.0, 0.5])
        tw = mt.TwistSpec(a_poly=poly, b_poly=poly, eta=0.5, T=1e4)
        z = (0.03j, -0.01j, 0.02j, 0.04j)
        npz = (-z[2], -z[3], -z[0], -z[1])

        def bz(n, zz):
            return pt.b_coeff(zz, n, table_small) if n > 1 else 1.0

        ref = 0.0
        for n, an in ((1, 1.0), (2, 0.5)):
            for m, am in ((1, 1.0), (2, 0.5)):
                g = math.gcd(n, m)
                ref += an * am / (n * m // g) * bz(n // g, z) * bz(m // g, npz)
        assert abs(mt.f_fourth(z, tw, table_small) - ref) < 1e-12


class TestARatio:
    def test_pole_guard(self):
        with pytest.raises(PoleProximity):
            mt.a_ratio((0.1j, 0.0, -0.1j, 0.0))

    def test_vandermonde(self):
        assert mt.vandermonde((0.0, 1.0, 2.0, 3.0)) == pytest.approx(12.0)

    def test_vandermonde_antisymmetry(self):
        z = (0.1, 0.7 + 0.2j, -0.3, 1.1j)
        swapped = (z[1], z[0], z[2], z[3])
        assert mt.vandermonde(swapped) == pytest.approx(-mt.vandermonde(z))


class TestSecondMainTerm:
    def test_matches_oracle_equal_shifts(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        w = mt.SmoothWeight()
        main = mt.second_main_term(0.0, 0.0, tw, w, T, check=False)
        orc = mt.lhs_oracle(T, (0.0, 0.0), tw, w, dt=0.02, check=False)
        assert abs(main / orc.value - 1.0) < 0.02

    def test_matches_oracle_distinct_shifts(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        w = mt.SmoothWeight()
        a1, a2 = 0.4j, -0.25j
        main = mt.second_main_term(a1, a2, tw, w, T, check=False)
        orc = mt.lhs_oracle(T, (a1, a2), tw, w, dt=0.02, check=False)
        assert abs(main / orc.value - 1.0) < 0.02

    def test_node_doubling_stable(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        # check=True internally doubles the node count and raises on drift
        mt.second_main_term(0.2j, 0.1j, tw, mt.SmoothWeight(), T, check=True)

    def test_shift_box(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        with pytest.raises(ShiftTooLarge):
            mt.second_main_term(1.0, 0.0, tw, mt.SmoothWeight(), T)


class TestFourthMainTerm:
    def test_matches_oracle(self):
        T = 5000.0
        tw = mt.trivial_twist(T)
        w = mt.SmoothWeight()
        h = 0.5
        shifts = (1j * h, 1j * h, -1j * h, -1j * h)
        main = mt.fourth_main_term(shifts, tw, w, T, check=False)
        orc = mt.lhs_oracle(T, shifts, tw, w, dt=0.02, check=False)
        ratio = (main / orc.value).real
        assert 0.5 < ratio < 2.0


class TestOracle:
    def test_step_guard(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        with pytest.raises(StepTooCoarse):
            mt.lhs_oracle(T, (0.0, 0.0), tw, mt.SmoothWeight(), dt=0.5)

    def test_imaginary_shifts_only(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        with pytest.raises(ValueError):
            mt.lhs_oracle(T, (0.1, 0.0), tw, mt.SmoothWeight(), dt=0.02)

    def test_height_caps(self):
        tw = mt.trivial_twist(2e6)
        with pytest.raises(ValueError):
            mt.lhs_oracle(2e6, (0.0, 0.0), tw, mt.SmoothWeight(), dt=0.02)

    def test_halving_estimate(self):
        T = 2000.0
        tw = mt.trivial_twist(T)
        res = mt.lhs_oracle(T, (0.0, 0.0), tw, mt.SmoothWeight(), dt=0.02)
        assert res.err_estimate < 0.005 * abs(res.value)


class TestDiagonalMain:
    def test_beta_zero_is_weight_mass(self, desk_schedule):
        w = mt.LOWER_BOUND_WEIGHT
        out = mt.diagonal_euler_main(0.0, 0.0, 0.0, 1e5, desk_schedule, w)
        # gamma = -1 and gamma' = 0 make every block factor reduce to 1 + the
        # cancelling cross terms; the product telescopes to exactly 1
        assert out.value == pytest.approx(w.mass, rel=1e-12)

    def test_bounds_reported(self, desk_schedule):
        out = mt.diagonal_euler_main(0.5, 0.3, -0.3, 1e5, desk_schedule,
                                     mt.LOWER_BOUND_WEIGHT)
        assert out.value > 0
        assert out.truncation_bound > 0
        assert out.exp_correction_bound > 0

    def test_shift_symmetry(self, desk_schedule):
        w = mt.LOWER_BOUND_WEIGHT
        a = mt.diagonal_euler_main(0.7, 0.2, -0.5, 1e5, desk_schedule, w)
        b = mt.diagonal_euler_main(0.7, -0.5, 0.2, 1e5, desk_schedule, w)
        assert a.value == pytest.approx(b.value, rel=1e-12)


class TestOscillatory:
    def test_far_below_bound(self):
        T = 1e4
        val = mt.oscillatory_integral(0.0, 0.0, T, mt.LOWER_BOUND_WEIGHT)
        assert abs(val) < 0.01 * 5 * T / math.log(T)

    def test_step_guard(self):
        with pytest.raises(StepTooCoarse):
            mt.oscillatory_integral(0.0, 0.0, 1e4, mt.LOWER_BOUND_WEIGHT,
                                    step=1.0)
