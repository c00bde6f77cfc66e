"""Nash analysis: best responses, epsilon-Nash certification, pure-equilibrium
enumeration, strictness, and the mixing-probability bounds that pin down which
equilibria survive approachability by monotone behavior.

All comparisons are exact: payoffs are scaled integers and mixed strategies
are converted to Fractions, so certificates never depend on float noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game import (
    HV,
    LV,
    AuctionSpec,
    DomainError,
    MixedProfile,
    constants,
    scaled_payoff_matrix,
    support,
)

ENUMERATION_CAP = 64

STRICT = "strict"
WEAK = "weak"
NOT_NASH = "not_nash"


class EnumerationCapError(ValueError):
    """Bid domain too large for exhaustive pure-profile enumeration."""


@dataclass(frozen=True)
class Violation:
    role: str
    bid: int
    gap: Fraction  # best-response value minus the supported bid's value


@dataclass(frozen=True)
class NashCertificate:
    profile: MixedProfile
    epsilon: Fraction
    payoff_determinant_bid: Optional[int]
    support_l: tuple
    support_h: tuple


def _exact_expected_values(spec: AuctionSpec, role: str, opponent_sigma: Sequence):
    """Expected payoff of every own bid against the opponent mix, as exact
    Fractions over a common denominator."""
    mat, denom = scaled_payoff_matrix(spec, role)
    weights = [Fraction(w) for w in opponent_sigma]
    common = 1
    for w in weights:
        common = common * w.denominator // math.gcd(common, w.denominator)
    nums = np.array([int(w * common) for w in weights], dtype=object)
    totals = mat.astype(object) @ nums  # exact integer arithmetic
    return totals, denom * common


def best_response_set(spec: AuctionSpec, role: str, opponent_sigma: Sequence) -> tuple:
    """All bids maximizing exact expected payoff against the opponent mix."""
    if len(opponent_sigma) != spec.n_bids:
        raise DomainError(f"opponent distribution has length {len(opponent_sigma)}, expected {spec.n_bids}")
    totals, _ = _exact_expected_values(spec, role, opponent_sigma)
    best = max(totals)
    return tuple(int(b) for b, t in enumerate(totals) if t == best)


def is_nash(spec: AuctionSpec, profile: MixedProfile, epsilon: Fraction = Fraction(0)):
    """Certify a profile as an epsilon-Nash equilibrium or list violations.

    Returns a NashCertificate when every supported bid is within epsilon of
    the role's best-response value, else the list of (role, bid, gap)
    violations.
    """
    epsilon = Fraction(epsilon)
    violations = []
    supports = {}
    values = {}
    for role, sigma in ((LV, profile.sigma_l), (HV, profile.sigma_h)):
        opp = profile.sigma_h if role == LV else profile.sigma_l
        totals, scale = _exact_expected_values(spec, role, opp)
        best = max(totals)
        supports[role] = support(sigma)
        values[role] = (totals, scale, best)
        for b in supports[role]:
            gap = Fraction(int(best - totals[b]), scale)
            if gap > epsilon:
                violations.append(Violation(role, b, gap))
    if violations:
        return violations
    p = _payoff_determinant_bid(spec, supports[LV], supports[HV]) if epsilon == 0 else None
    return NashCertificate(profile, epsilon, p, supports[LV], supports[HV])


def _payoff_determinant_bid(spec: AuctionSpec, supp_l: tuple, supp_h: tuple) -> Optional[int]:
    """For extreme-price auctions, the common support bid p with
    supp_l within {0..p} and supp_h within {p..p_max}."""
    if not spec.is_extreme_price or not supp_l or not supp_h:
        return None
    p = max(supp_l)
    if p == min(supp_h) and p in constants(spec).nash_range:
        return p
    return None


def enumerate_pure_nash(spec: AuctionSpec, cap: int = ENUMERATION_CAP) -> list:
    """All pure bid pairs (bid_l, bid_h) where neither role can strictly gain
    by deviating.  Exhaustive exact check over the full (p_max+1)^2 grid."""
    if spec.p_max > cap:
        raise EnumerationCapError(f"p_max={spec.p_max} exceeds enumeration cap {cap}")
    mat_l, _ = scaled_payoff_matrix(spec, LV)
    mat_h, _ = scaled_payoff_matrix(spec, HV)
    colmax_l = mat_l.max(axis=0)  # best l payoff per fixed opponent bid
    colmax_h = mat_h.max(axis=0)
    out = []
    for b_l in spec.bids.bids():
        for b_h in spec.bids.bids():
            if mat_l[b_l, b_h] == colmax_l[b_h] and mat_h[b_h, b_l] == colmax_h[b_l]:
                out.append((b_l, b_h))
    return out


def strictness(spec: AuctionSpec, bid_l: int, bid_h: int) -> str:
    """Classify a pure profile: strict (each bid the unique best response),
    weak (Nash but not strict), or not_nash."""
    if bid_l not in spec.bids or bid_h not in spec.bids:
        raise DomainError(f"bids ({bid_l}, {bid_h}) outside {{0,...,{spec.p_max}}}")
    mat_l, _ = scaled_payoff_matrix(spec, LV)
    mat_h, _ = scaled_payoff_matrix(spec, HV)
    col_l = mat_l[:, bid_h]
    col_h = mat_h[:, bid_l]
    if col_l[bid_l] < col_l.max() or col_h[bid_h] < col_h.max():
        return NOT_NASH
    unique_l = int((col_l == col_l.max()).sum()) == 1
    unique_h = int((col_h == col_h.max()).sum()) == 1
    return STRICT if (unique_l and unique_h) else WEAK


@dataclass(frozen=True)
class MixingBounds:
    """Bounds on the probability the low-valuation agent puts on the
    payoff-determinant bid p in a winner-bid Nash equilibrium reached by
    monotone limits; infeasible bounds exclude p."""

    tau: int
    lower: Fraction
    upper: Fraction

    @property
    def infeasible(self) -> bool:
        return self.lower > self.upper


def mixing_bounds(spec: AuctionSpec, p: int) -> MixingBounds:
    """Lower/upper bounds on sigma_l(p) for winner-bid equilibria with
    payoff-determinant bid p = c_l + tau, tau >= 1."""
    if spec.alpha != 1:
        raise DomainError("mixing bounds apply to the winner-bid auction (alpha=1)")
    cons = constants(spec)
    if p not in cons.nash_range:
        raise DomainError(f"p={p} outside Nash range {{{cons.c_l},...,{cons.c_h}}}")
    tau = p - cons.c_l
    if tau < 1:
        raise DomainError("bounds require tau = p - c_l >= 1")
    lower = Fraction(1, 2 * cons.equity_surplus - 2 * tau + 1)
    upper = Fraction(1, min(4 * tau, tau + cons.c_l + 1))
    return MixingBounds(tau=tau, lower=lower, upper=upper)
