"""Auction-core: outcome resolution, expected payoffs, derived constants."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alpha_auctions.game import (
    HV,
    LV,
    AuctionSpec,
    BidDomain,
    DomainError,
    MixedProfile,
    TieOutcome,
    ValuationPair,
    ab,
    constants,
    expected_payoff,
    lb,
    payoff_matrix,
    resolve,
    wb,
)


def small_specs():
    out = []
    for alpha in (Fraction(0), Fraction(1, 2), Fraction(1)):
        for gamma in (Fraction(0), Fraction(1, 2), Fraction(1)):
            out.append(AuctionSpec(alpha, ValuationPair(4, 8), BidDomain(8), gamma))
    return out


class TestTypes:
    def test_valuations_must_be_even_positive_ordered(self):
        with pytest.raises(ValueError):
            ValuationPair(3, 8)
        with pytest.raises(ValueError):
            ValuationPair(4, 4)
        with pytest.raises(ValueError):
            ValuationPair(-2, 8)

    def test_bid_cap_must_cover_half_high_valuation(self):
        with pytest.raises(ValueError):
            wb(4, 8, 3)
        wb(4, 8, 4)  # p_max == v_h/2 is the minimum legal cap

    def test_alpha_gamma_bounds(self):
        with pytest.raises(ValueError):
            AuctionSpec(Fraction(3, 2), ValuationPair(4, 8), BidDomain(8))
        with pytest.raises(ValueError):
            AuctionSpec(Fraction(1), ValuationPair(4, 8), BidDomain(8), gamma=Fraction(-1, 2))

    def test_profile_must_sum_to_one(self):
        with pytest.raises(ValueError):
            MixedProfile((0.5, 0.4), (0.5, 0.5))
        with pytest.raises(ValueError):
            MixedProfile((0.5, 0.5), (0.6, -0.1, 0.5))


class TestResolve:
    def test_wb_strict_winner(self):
        out = resolve(wb(20, 60, 160), 10, 15)
        assert out.winner == HV
        assert out.transfer == 15
        assert (out.payoff_l, out.payoff_h) == (15, 45)

    def test_wb_tie_goes_to_hv_when_gamma_one(self):
        out = resolve(wb(20, 60, 160), 15, 15)
        assert out.winner == HV
        assert out.transfer == 15
        assert (out.payoff_l, out.payoff_h) == (15, 45)

    def test_lb_transfer_is_loser_bid(self):
        out = resolve(lb(20, 60, 160), 10, 15)
        assert out.winner == HV
        assert out.transfer == 10
        assert (out.payoff_l, out.payoff_h) == (10, 50)

    def test_ab_inefficient_allocation(self):
        out = resolve(ab(20, 60, 160), 25, 10)
        assert out.winner == LV
        assert out.transfer == Fraction(35, 2)
        assert (out.payoff_l, out.payoff_h) == (Fraction(5, 2), Fraction(35, 2))

    def test_interior_gamma_returns_weighted_pair(self):
        spec = AuctionSpec(Fraction(1), ValuationPair(20, 60), BidDomain(160), gamma=Fraction(1, 2))
        out = resolve(spec, 15, 15)
        assert isinstance(out, TieOutcome)
        assert out.payoff_h == Fraction(1, 2) * 45 + Fraction(1, 2) * 15
        assert out.payoff_l == Fraction(1, 2) * 15 + Fraction(1, 2) * 5

    def test_out_of_domain_bid(self):
        with pytest.raises(DomainError):
            resolve(wb(20, 60, 160), 161, 5)

    @pytest.mark.parametrize("spec", small_specs())
    def test_payoffs_split_winner_valuation(self, spec):
        for b_l in spec.bids.bids():
            for b_h in spec.bids.bids():
                out = resolve(spec, b_l, b_h)
                if isinstance(out, TieOutcome):
                    for _, branch in out.branches:
                        v = spec.valuations.value_of(branch.winner)
                        assert branch.payoff_l + branch.payoff_h == v
                else:
                    assert out.payoff_l + out.payoff_h == spec.valuations.value_of(out.winner)

    @pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1)])
    def test_extreme_alpha_transfer_is_one_of_the_bids(self, alpha):
        spec = AuctionSpec(alpha, ValuationPair(4, 8), BidDomain(8))
        for b_l in spec.bids.bids():
            for b_h in spec.bids.bids():
                if b_l != b_h:
                    assert resolve(spec, b_l, b_h).transfer in (b_l, b_h)

    def test_transfer_monotone_in_alpha(self):
        # strict winner bidding above the loser: transfer rises with alpha
        for num in range(5):
            a1, a2 = Fraction(num, 4), Fraction(num, 4) + Fraction(1, 8)
            if a2 > 1:
                continue
            s1 = AuctionSpec(a1, ValuationPair(4, 8), BidDomain(8))
            s2 = AuctionSpec(a2, ValuationPair(4, 8), BidDomain(8))
            assert resolve(s2, 2, 7).transfer >= resolve(s1, 2, 7).transfer


class TestExpectedPayoff:
    def test_point_mass_cases(self):
        spec = wb(20, 60, 160)
        sigma = tuple(Fraction(int(i == 5)) for i in range(161))
        assert expected_payoff(spec, LV, 7, sigma) == 13  # win, pay own bid
        assert expected_payoff(spec, LV, 3, sigma) == 5   # lose, receive winner bid
        assert expected_payoff(spec, LV, 5, sigma) == 5   # tie goes to HV

    def test_uniform_opponent_matches_enumeration(self):
        spec = lb(4, 8, 8)
        sigma = (Fraction(1, 9),) * 9
        brute = sum(resolve(spec, r, 4).payoff_h for r in range(9)) / 9
        assert expected_payoff(spec, HV, 4, sigma) == brute

    def test_point_mass_agrees_with_resolve_everywhere(self):
        for spec in small_specs():
            for r in spec.bids.bids():
                sigma = tuple(Fraction(int(i == r)) for i in spec.bids.bids())
                for b in spec.bids.bids():
                    res = resolve(spec, b, r)
                    assert expected_payoff(spec, LV, b, sigma) == res.payoff_l

    def test_mismatched_domain(self):
        with pytest.raises(DomainError):
            expected_payoff(wb(4, 8, 8), LV, 2, (Fraction(1),) * 3)


class TestPayoffMatrix:
    def test_hv_diagonal_under_wb(self):
        mat = payoff_matrix(wb(4, 8, 8), HV)
        for b in range(9):
            assert mat[b][b] == 8 - b  # gamma=1 tie: winner pays own bid

    def test_lv_losing_entry_under_lb(self):
        mat = payoff_matrix(lb(4, 8, 8), LV)
        assert mat[2][5] == 2  # LV loses, transfer = loser bid 2

    def test_matrix_vector_product_equals_expected_payoff(self):
        spec = ab(4, 8, 8)
        mat = payoff_matrix(spec, LV)
        rng = np.random.default_rng(3)
        w = rng.random(9)
        sigma = tuple(Fraction(x).limit_denominator(997) for x in w / w.sum())
        total = sum(sigma) - 1
        sigma = tuple(s - total if i == 0 else s for i, s in enumerate(sigma))
        for b in range(9):
            direct = sum(sigma[r] * mat[b][r] for r in range(9))
            assert expected_payoff(spec, LV, b, sigma) == direct


class TestConstants:
    def test_nash_range_structure_1b(self):
        cons = constants(wb(20, 220, 320))
        assert list(cons.nash_range) == list(range(10, 111))

    def test_net_values_structure_1a(self):
        cons = constants(wb(20, 60, 160))
        assert (cons.c_l, cons.c_h) == (10, 30)

    def test_equity_surplus_structure_2a(self):
        cons = constants(ab(200, 240, 290))
        assert cons.equity_surplus == 20
        assert (cons.c_l, cons.c_h) == (100, 120)

    @pytest.mark.parametrize("spec", small_specs())
    def test_maximin_bid_guarantees_net_value(self, spec):
        # bidding c_i nets at least c_i against every opponent bid
        cons = constants(spec)
        for role, c in ((LV, cons.c_l), (HV, cons.c_h)):
            for opp in spec.bids.bids():
                bid_l, bid_h = (c, opp) if role == LV else (opp, c)
                out = resolve(spec, bid_l, bid_h)
                assert out.payoff_of(role) >= c


@settings(max_examples=60, deadline=None)
@given(
    v_half=st.integers(1, 6),
    gap=st.integers(1, 6),
    extra=st.integers(0, 6),
    num=st.integers(0, 4),
    bid_l=st.integers(0, 30),
    bid_h=st.integers(0, 30),
)
def test_resolve_payoff_identity_property(v_half, gap, extra, num, bid_l, bid_h):
    v_l, v_h = 2 * v_half, 2 * (v_half + gap)
    p_max = v_h // 2 + extra
    spec = AuctionSpec(Fraction(num, 4), ValuationPair(v_l, v_h), BidDomain(p_max))
    b_l, b_h = bid_l % (p_max + 1), bid_h % (p_max + 1)
    out = resolve(spec, b_l, b_h)
    assert out.payoff_l + out.payoff_h == spec.valuations.value_of(out.winner)
    lo, hi = min(b_l, b_h), max(b_l, b_h)
    assert lo <= out.transfer <= hi
