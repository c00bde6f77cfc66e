"""Weak payoff monotonicity, theorem windows, Nash-set distance, probe."""

from fractions import Fraction

import numpy as np
import pytest

from alpha_auctions.game import HV, LV, MixedProfile, ab, lb, wb
from alpha_auctions.monotonicity import (
    LB_AUCTION,
    WB_AUCTION,
    SequencePreconditionError,
    bias_window,
    check_sequence,
    exclusion_probe,
    is_weakly_payoff_monotone,
    nash_distance,
    nash_set_distance,
    profile_distance,
    t_value,
)
from alpha_auctions.nash import is_nash
from alpha_auctions.qre import solve_qre


class TestWeakMonotonicity:
    def test_uniform_profile_vacuously_ok(self):
        spec = wb(20, 60, 160)
        report = is_weakly_payoff_monotone(spec, MixedProfile.uniform(spec))
        assert report.ok and not report.violations

    def test_point_mass_violation(self):
        # LV puts all mass on 20 against HV at 15: winning at 20 pays 0,
        # while bidding 0 collects the transfer 15
        spec = wb(20, 60, 160)
        prof = MixedProfile.point_masses(spec, 20, 15)
        report = is_weakly_payoff_monotone(spec, prof)
        assert not report.ok
        bad = [(v.role, v.bid_a, v.bid_b) for v in report.violations]
        assert (LV, 20, 0) in bad

    def test_qre_points_pass_at_zero_tolerance(self):
        for maker, lam in [(wb, 0.25), (ab, 0.5), (lb, 0.8)]:
            spec = maker(20, 60, 160)
            point = solve_qre(spec, lam)
            report = is_weakly_payoff_monotone(spec, point.profile, tol_prob=0.0, tol_payoff=0.0)
            assert report.ok

    def test_invariant_under_relabeling_zero_probability_bids(self):
        spec = wb(4, 8, 8)
        base = np.array([0.5, 0.3, 0.2, 0, 0, 0, 0, 0, 0])
        opp = np.full(9, 1 / 9)
        for perm_seed in (0, 1, 2):
            rng = np.random.default_rng(perm_seed)
            sigma = base.copy()
            zeros = np.where(sigma == 0)[0]
            rng.shuffle(zeros)  # zero-probability bids keep zero probability
            prof = MixedProfile.from_arrays(sigma, opp)
            report = is_weakly_payoff_monotone(spec, prof)
            again = is_weakly_payoff_monotone(spec, MixedProfile.from_arrays(sigma, opp))
            assert report.ok == again.ok

    def test_violation_records_serialize(self):
        spec = wb(20, 60, 160)
        prof = MixedProfile.point_masses(spec, 20, 15)
        report = is_weakly_payoff_monotone(spec, prof)
        lines = report.to_records()
        assert lines and all(line.startswith("violation role=") for line in lines)


class TestTValue:
    def test_structure_1b(self):
        assert t_value(WB_AUCTION, wb(20, 220, 320)) == Fraction(193, 3)  # 64 + 1/3

    def test_structure_1a(self):
        assert t_value(WB_AUCTION, wb(20, 60, 160)) == 11

    def test_regime_split_at_half_valuation(self):
        # the first max argument dominates exactly when v_l <= v_h / 2
        for v_l, v_h in [(2, 6), (4, 8), (6, 8), (6, 10), (10, 12)]:
            spec = wb(v_l, v_h, v_h)
            c_l, c_h = v_l // 2, v_h // 2
            es = c_h - c_l
            lead_dominates = Fraction(2 * c_h, 3) - c_l >= Fraction(es, 3)
            assert lead_dominates == (v_l <= v_h / 2) or Fraction(2 * c_h, 3) - c_l == Fraction(es, 3)

    def test_lb_verbatim_and_mirror(self):
        spec = lb(20, 60, 160)
        assert t_value(LB_AUCTION, spec) == Fraction(2 * 150, 3) - 30 + 1
        assert t_value(LB_AUCTION, spec, mirror=True) == Fraction(23, 3)  # ES/3 + 1


class TestBiasWindow:
    def test_wb_structure_1a(self):
        win = bias_window(WB_AUCTION, wb(20, 60, 160))
        assert win.t == 11
        assert win.bid_window_lv == (None, 11)  # v_l = v_h/3 boundary holds
        assert win.bid_window_hv == (9, 21)
        assert win.payoff_cap == (LV, 21)
        assert win.payoff_floor == (HV, 30 + (20 - 11))

    def test_wb_structure_1b_no_lv_window(self):
        win = bias_window(WB_AUCTION, wb(20, 220, 320))
        assert win.bid_window_lv == (None, None)

    def test_lb_structure_3_statement1_condition(self):
        win = bias_window(LB_AUCTION, lb(200, 400, 450))
        assert win.bid_window_hv[0] == 200 - 1  # c_h - 1 floor applies

    def test_segments_within_theorem_bounds(self):
        for v_l, v_h, p_max in [(20, 60, 160), (4, 8, 8), (4, 12, 12), (200, 240, 290)]:
            wb_win = bias_window(WB_AUCTION, wb(v_l, v_h, p_max))
            c_l, c_h = v_l // 2, v_h // 2
            assert all(c_l <= p < c_l + wb_win.t for p in wb_win.admissible_segment)
            lb_win = bias_window(LB_AUCTION, lb(v_l, v_h, p_max), mirror=True)
            assert all(c_h - lb_win.t < p <= c_h for p in lb_win.admissible_segment)

    def test_mirror_symmetry_of_segments(self):
        # reflecting bids through p_max and swapping roles maps the loser-bid
        # game onto a winner-bid game with reflected valuations
        for v_l, v_h, p_max in [(4, 8, 8), (4, 12, 12), (20, 60, 160)]:
            c_l, c_h = v_l // 2, v_h // 2
            reflected = wb(2 * (p_max - c_h), 2 * (p_max - c_l), p_max)
            seg_wb = bias_window(WB_AUCTION, reflected).admissible_segment
            seg_lb = bias_window(LB_AUCTION, lb(v_l, v_h, p_max), mirror=True).admissible_segment
            assert sorted(p_max - p for p in seg_wb) == list(seg_lb)

    def test_interior_auction_rejected(self):
        with pytest.raises(Exception):
            bias_window("AB", ab(4, 8, 8))


class TestNashSetDistance:
    def test_pure_tie_is_distance_zero_wb(self):
        spec = wb(4, 8, 8)
        prof = MixedProfile.point_masses(spec, 2, 2)
        assert nash_set_distance(spec, prof, 2) == 0.0

    def test_mixed_member_is_distance_zero(self):
        # sigma_l uniform on {0..2} with sigma_h at 2 keeps 2 optimal for HV
        spec = wb(4, 8, 8)
        s_l = np.array([1 / 3, 1 / 3, 1 / 3, 0, 0, 0, 0, 0, 0])
        s_h = np.zeros(9)
        s_h[2] = 1.0
        prof = MixedProfile.from_arrays(s_l, s_h)
        assert nash_set_distance(spec, prof, 2) < 1e-9

    def test_uniform_profile_is_far_from_every_p(self):
        spec = wb(4, 8, 8)
        d, p = nash_distance(spec, MixedProfile.uniform(spec))
        assert d > 0.5
        assert p in (2, 3, 4)

    def test_lb_mirror_structure(self):
        spec = lb(4, 8, 8)
        s_l = np.zeros(9)
        s_l[4] = 1.0
        s_h = np.zeros(9)
        s_h[4:] = 1 / 5
        prof = MixedProfile.from_arrays(s_l, s_h)
        assert nash_set_distance(spec, prof, 4) < 1e-9

    def test_interior_auction_uses_equal_bid_profile(self):
        spec = ab(4, 8, 8)
        assert nash_set_distance(spec, MixedProfile.point_masses(spec, 3, 3), 3) == 0.0
        assert nash_set_distance(spec, MixedProfile.point_masses(spec, 3, 3), 2) == 1.0


class TestCheckSequence:
    def test_constant_strict_ab_equilibrium_passes_from_zero(self):
        spec = ab(4, 8, 8)
        prof = MixedProfile.point_masses(spec, 3, 3)
        cert = is_nash(spec, prof)
        result = check_sequence(spec, [prof] * 4, cert)
        assert result.first_all_pass == 0

    def test_qre_tail_statements_hold(self):
        # sequence along the continuation path, targeting the Nash member
        # nearest the path's deep end: statements hold from some index on
        from alpha_auctions.monotonicity import nash_projection

        spec = wb(4, 12, 12)
        prev = None
        profiles = []
        for lam in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0, 120.0]:
            point = solve_qre(spec, lam, init=prev)
            prev = point.profile
            profiles.append(point.profile)
        _, best_p = nash_distance(spec, profiles[-1])
        _, member = nash_projection(spec, profiles[-1], best_p)
        target = is_nash(spec, member, epsilon=Fraction(1, 10**6))
        assert not isinstance(target, list)
        seq = check_sequence(spec, profiles[3:], target)
        assert seq.first_all_pass is not None

    def test_non_monotone_member_rejected(self):
        spec = wb(20, 60, 160)
        good = MixedProfile.uniform(spec)
        bad = MixedProfile.point_masses(spec, 20, 15)
        cert = is_nash(spec, MixedProfile.point_masses(spec, 10, 10))
        with pytest.raises(SequencePreconditionError) as err:
            check_sequence(spec, [good, bad], cert)
        assert err.value.index == 1

    def test_distance_increase_rejected(self):
        spec = ab(4, 8, 8)
        prof = MixedProfile.point_masses(spec, 3, 3)
        cert = is_nash(spec, prof)
        far = MixedProfile.uniform(spec)
        with pytest.raises(SequencePreconditionError):
            check_sequence(spec, [prof, far], cert)

    def test_approaching_excluded_equilibrium_breaks_monotonicity(self):
        # mixtures drifting toward the top-of-range tie stop being monotone:
        # exactly the mechanism by which the theorem excludes that segment
        spec = wb(4, 12, 12)
        target_prof = MixedProfile.point_masses(spec, 6, 6)
        cert = is_nash(spec, target_prof)
        uniform = MixedProfile.uniform(spec).arrays()
        target = target_prof.arrays()
        seq = []
        for theta in (0.6, 0.8, 0.95):
            s_l = (1 - theta) * uniform[0] + theta * target[0]
            s_h = (1 - theta) * uniform[1] + theta * target[1]
            seq.append(MixedProfile.from_arrays(s_l, s_h))
        with pytest.raises(SequencePreconditionError):
            check_sequence(spec, seq, cert)

    def test_probe_best_for_excluded_target_fails_statements(self):
        # negative control: the best monotone profile near the excluded
        # equilibrium still violates the theorem windows
        spec = wb(4, 12, 12)
        probe = exclusion_probe(spec, 6, budget=800, seed=3)
        cert = is_nash(spec, MixedProfile.point_masses(spec, 6, 6))
        seq = check_sequence(spec, [probe.profile] * 3, cert)
        assert seq.first_all_pass is None

    def test_records_serialize(self):
        spec = ab(4, 8, 8)
        prof = MixedProfile.point_masses(spec, 3, 3)
        cert = is_nash(spec, prof)
        lines = check_sequence(spec, [prof], cert).to_records()
        assert any("verdict=pass" in line or "verdict=n/a" in line for line in lines)


class TestExclusionProbe:
    def test_admissible_target_reached_wb(self):
        res = exclusion_probe(wb(4, 8, 8), 2, budget=3000, seed=1)
        assert res.monotone
        assert res.distance < 0.05

    def test_excluded_target_has_floor(self):
        res = exclusion_probe(wb(4, 12, 12), 6, budget=3000, seed=1)
        assert res.monotone
        assert res.distance > 0.2

    def test_infeasible_mixing_bounds_target_has_floor(self):
        # p=3 sits inside the t-window for v=(4,8) but its mixing bounds are
        # contradictory, so monotone behavior cannot approach it either
        res = exclusion_probe(wb(4, 8, 8), 3, budget=3000, seed=1)
        assert res.distance > 0.2

    def test_ab_strict_equilibria_reached_exactly(self):
        spec = ab(4, 8, 8)
        for p in (2, 3, 4):
            res = exclusion_probe(spec, p, budget=50, seed=0)
            assert res.distance == 0.0

    def test_lb_mirror_targets(self):
        assert exclusion_probe(lb(4, 8, 8), 4, budget=3000, seed=1).distance < 0.05
        assert exclusion_probe(lb(4, 8, 8), 2, budget=3000, seed=1).distance > 0.2

    def test_seed_recorded_and_deterministic(self):
        a = exclusion_probe(wb(4, 8, 8), 2, budget=400, seed=7)
        b = exclusion_probe(wb(4, 8, 8), 2, budget=400, seed=7)
        assert a.seed == b.seed == 7
        assert a.distance == b.distance
        assert profile_distance(a.profile, b.profile) == 0.0
