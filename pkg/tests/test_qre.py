"""Logit QRE solver: responses, fixed points, sweeps, efficiency."""

import numpy as np
import pytest

from alpha_auctions.game import HV, LV, MixedProfile, ab, lb, wb
from alpha_auctions.monotonicity import is_weakly_payoff_monotone
from alpha_auctions.nash import best_response_set
from alpha_auctions.qre import (
    efficiency,
    logit_response,
    solve_qre,
    standardized_bid_means,
    sweep,
)


def frac_point_mass(n, at):
    from fractions import Fraction
    return tuple(Fraction(int(i == at)) for i in range(n))


class TestLogitResponse:
    def test_lambda_zero_is_uniform(self):
        spec = wb(4, 8, 8)
        sigma = np.zeros(9)
        sigma[3] = 1.0
        out = logit_response(spec, LV, sigma, 0.0)
        assert np.allclose(out, np.full(9, 1 / 9), atol=1e-15)

    def test_additive_shift_invariance(self):
        # softmax ignores constant payoff shifts; compare two valuation pairs
        # whose LV rows differ by a constant against a fixed opponent
        spec = wb(4, 8, 8)
        sigma = np.full(9, 1 / 9)
        base = logit_response(spec, LV, sigma, 0.7)
        from alpha_auctions.game import float_payoff_matrix
        u = float_payoff_matrix(spec, LV) @ sigma
        shifted = np.exp(0.7 * (u + 123.0))
        shifted /= shifted.sum()
        assert np.abs(base - shifted).max() < 1e-12

    def test_high_lambda_concentrates_on_best_responses(self):
        spec = wb(4, 8, 8)
        sigma = np.zeros(9)
        sigma[2] = 1.0
        out = logit_response(spec, HV, sigma, 1e3)
        brs = best_response_set(spec, HV, frac_point_mass(9, 2))
        assert out[list(brs)].sum() >= 0.99


class TestSolveQre:
    def test_lambda_zero_uniform_one_iteration(self):
        point = solve_qre(wb(4, 8, 8), 0.0)
        s_l, s_h = point.profile.arrays()
        assert np.array_equal(s_l, np.full(9, 1 / 9))
        assert np.array_equal(s_h, np.full(9, 1 / 9))
        assert point.residual == 0.0
        assert point.iterations == 1

    def test_residual_recomputes_within_tolerance(self):
        from alpha_auctions.game import float_payoff_matrix
        spec = ab(20, 60, 160)
        point = solve_qre(spec, 0.15)
        s_l, s_h = point.profile.arrays()
        u_l = float_payoff_matrix(spec, LV)
        u_h = float_payoff_matrix(spec, HV)
        r_l = np.exp(0.15 * (u_l @ s_h) - (0.15 * (u_l @ s_h)).max())
        r_l /= r_l.sum()
        r_h = np.exp(0.15 * (u_h @ s_l) - (0.15 * (u_h @ s_l)).max())
        r_h /= r_h.sum()
        res = max(np.abs(r_l - s_l).max(), np.abs(r_h - s_h).max())
        assert abs(res - point.residual) < 1e-10
        assert point.residual <= 1e-10

    def test_profiles_strictly_positive(self):
        point = solve_qre(lb(4, 8, 8), 2.0)
        s_l, s_h = point.profile.arrays()
        assert (s_l > 0).all() and (s_h > 0).all()

    def test_fig2_wb_structure_1a(self):
        spec = wb(20, 60, 160)
        prev = None
        for lam in np.round(np.arange(0, 0.101, 0.01), 10):
            point = solve_qre(spec, float(lam), init=prev)
            prev = point.profile
        assert abs(efficiency(spec, prev) - 77.2) <= 1.0

    def test_fig2_ab_structure_2a(self):
        spec = ab(200, 240, 290)
        prev = None
        for lam in np.round(np.arange(0, 0.301, 0.02), 10):
            point = solve_qre(spec, float(lam), init=prev)
            prev = point.profile
        assert abs(efficiency(spec, prev) - 94.2) <= 1.0

    def test_lb_stiff_region_converges(self):
        # the damped map alone oscillates here; the corrector must rescue it
        point = solve_qre(lb(20, 60, 160), 0.3, init=None)
        assert point.residual <= 1e-10

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            solve_qre(wb(4, 8, 8), -0.1)
        with pytest.raises(ValueError):
            solve_qre(wb(4, 8, 8), 0.1, damping=0.0)
        with pytest.raises(ValueError):
            solve_qre(wb(4, 8, 8), 0.1, tol=0.0)


class TestEfficiency:
    def test_uniform_closed_form(self):
        spec = wb(20, 60, 160)
        got = efficiency(spec, MixedProfile.uniform(spec))
        assert abs(got - (50 + 100 / (2 * 161))) < 1e-9

    def test_point_masses(self):
        spec = wb(20, 60, 160)
        assert efficiency(spec, MixedProfile.point_masses(spec, 3, 5)) == 100.0
        assert efficiency(spec, MixedProfile.point_masses(spec, 5, 3)) == 0.0

    def test_tie_weight_gamma(self):
        from fractions import Fraction
        from alpha_auctions.game import AuctionSpec, BidDomain, ValuationPair
        spec = AuctionSpec(Fraction(1), ValuationPair(4, 8), BidDomain(8), gamma=Fraction(1, 2))
        assert efficiency(spec, MixedProfile.point_masses(spec, 3, 3)) == 50.0


class TestSweep:
    def test_grid_must_start_at_zero_ascending(self):
        spec = wb(4, 8, 8)
        with pytest.raises(ValueError):
            sweep(spec, [0.1, 0.2])
        with pytest.raises(ValueError):
            sweep(spec, [0.0, 0.2, 0.1])

    def test_efficiency_starts_at_closed_form_and_increases(self):
        spec = wb(20, 60, 160)
        curve = sweep(spec, np.round(np.arange(0, 0.11, 0.01), 10))
        effs = curve.efficiencies()
        assert abs(effs[0] - (50 + 100 / (2 * 161))) < 1e-9
        assert all(b >= a for a, b in zip(effs, effs[1:]))

    def test_structure_2a_lambda_zero_value(self):
        spec = lb(200, 240, 290)
        curve = sweep(spec, [0.0])
        assert abs(curve.rows[0].efficiency_pct - (50 + 100 / (2 * 291))) < 1e-9
        assert round(curve.rows[0].efficiency_pct, 1) == 50.2

    def test_wb_std_bids_below_lb_at_top_lambda(self):
        grid = np.round(np.arange(0, 0.31, 0.05), 10)
        for v_l, v_h, p_max in [(20, 60, 160), (200, 240, 290)]:
            wb_curve = sweep(wb(v_l, v_h, p_max), grid)
            lb_curve = sweep(lb(v_l, v_h, p_max), grid)
            assert wb_curve.rows[-1].mean_std_bid_lv <= lb_curve.rows[-1].mean_std_bid_lv
            assert wb_curve.rows[-1].mean_std_bid_hv <= lb_curve.rows[-1].mean_std_bid_hv


class TestQreMonotonicity:
    @pytest.mark.parametrize("maker,lam", [(wb, 0.4), (ab, 0.7), (lb, 1.2)])
    def test_converged_points_are_weakly_monotone_at_zero_tolerance(self, maker, lam):
        spec = maker(4, 12, 10)
        point = solve_qre(spec, lam)
        report = is_weakly_payoff_monotone(spec, point.profile, tol_prob=0.0, tol_payoff=0.0)
        assert report.ok, report.violations[:3]

    def test_standardized_bids_scale(self):
        spec = wb(20, 60, 160)
        prof = MixedProfile.point_masses(spec, 10, 30)
        std_l, std_h = standardized_bid_means(spec, prof)
        assert (std_l, std_h) == (0.0, 1.0)
