"""Core representation of the alpha-auction game.

Two agents jointly own an indivisible good and dissolve the partnership by
sealed bid: the higher bidder receives the good and pays the other agent
alpha*(winner bid) + (1-alpha)*(loser bid).  Ties go to the high-valuation
agent with probability gamma.  Everything here is exact rational arithmetic
over integer bids; floating-point matrices are provided separately for the
iterative solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

LV = "lv"
HV = "hv"
ROLES = (LV, HV)

RationalLike = Union[int, Fraction]


class DomainError(ValueError):
    """A bid or distribution fell outside the game's bid domain."""


@dataclass(frozen=True)
class ValuationPair:
    """Net valuations of the contested good, low and high."""

    v_l: int
    v_h: int

    def __post_init__(self):
        if self.v_l <= 0 or self.v_h <= 0:
            raise ValueError("valuations must be positive")
        if self.v_l % 2 or self.v_h % 2:
            raise ValueError("valuations must be even")
        if not self.v_l < self.v_h:
            raise ValueError(f"need v_l < v_h, got ({self.v_l}, {self.v_h})")

    @property
    def c_l(self) -> int:
        return self.v_l // 2

    @property
    def c_h(self) -> int:
        return self.v_h // 2

    @property
    def equity_surplus(self) -> int:
        return self.c_h - self.c_l

    def value_of(self, role: str) -> int:
        return self.v_l if role == LV else self.v_h

    def net_value_of(self, role: str) -> int:
        return self.c_l if role == LV else self.c_h


@dataclass(frozen=True)
class BidDomain:
    """Contiguous integer bids {0, ..., p_max}."""

    p_max: int

    def __post_init__(self):
        if self.p_max < 0:
            raise ValueError("p_max must be non-negative")

    @property
    def size(self) -> int:
        return self.p_max + 1

    def __contains__(self, bid) -> bool:
        return isinstance(bid, (int, np.integer)) and 0 <= bid <= self.p_max

    def bids(self) -> range:
        return range(self.p_max + 1)


@dataclass(frozen=True)
class AuctionSpec:
    """One complete-information auction game: pricing weight, tie rule,
    valuations, and bid domain."""

    alpha: Fraction
    valuations: ValuationPair
    bids: BidDomain
    gamma: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        if not 0 <= self.alpha <= 1:
            raise ValueError("alpha must lie in [0, 1]")
        if not 0 <= self.gamma <= 1:
            raise ValueError("gamma must lie in [0, 1]")
        if 2 * self.bids.p_max < self.valuations.v_h:
            raise ValueError("bid cap must be at least v_h / 2")

    @property
    def p_max(self) -> int:
        return self.bids.p_max

    @property
    def n_bids(self) -> int:
        return self.bids.size

    @property
    def is_extreme_price(self) -> bool:
        return self.alpha in (0, 1)

    @property
    def label(self) -> str:
        if self.alpha == 1:
            return "WB"
        if self.alpha == 0:
            return "LB"
        if self.alpha == Fraction(1, 2):
            return "AB"
        return f"alpha={self.alpha}"


def wb(v_l: int, v_h: int, p_max: int, gamma: RationalLike = 1) -> AuctionSpec:
    """Winner-bid auction (price = winner's bid)."""
    return AuctionSpec(Fraction(1), ValuationPair(v_l, v_h), BidDomain(p_max), Fraction(gamma))


def ab(v_l: int, v_h: int, p_max: int, gamma: RationalLike = 1) -> AuctionSpec:
    """Average-bid auction (price = midpoint of the bids)."""
    return AuctionSpec(Fraction(1, 2), ValuationPair(v_l, v_h), BidDomain(p_max), Fraction(gamma))


def lb(v_l: int, v_h: int, p_max: int, gamma: RationalLike = 1) -> AuctionSpec:
    """Loser-bid auction (price = loser's bid)."""
    return AuctionSpec(Fraction(0), ValuationPair(v_l, v_h), BidDomain(p_max), Fraction(gamma))


def spec_for(auction: str, v_l: int, v_h: int, p_max: int, gamma: RationalLike = 1) -> AuctionSpec:
    """Build a spec from an auction label: 'wb', 'ab', or 'lb'."""
    key = auction.strip().lower()
    try:
        builder = {"wb": wb, "ab": ab, "lb": lb}[key]
    except KeyError:
        raise ValueError(f"unknown auction {auction!r}; expected wb, ab, or lb") from None
    return builder(v_l, v_h, p_max, gamma)


@dataclass(frozen=True)
class Outcome:
    """Resolution of one bid pair: winner takes the good, loser takes the
    transfer.  payoff_l + payoff_h always equals the winner's valuation."""

    winner: str
    transfer: Fraction
    payoff_l: Fraction
    payoff_h: Fraction

    def payoff_of(self, role: str) -> Fraction:
        return self.payoff_l if role == LV else self.payoff_h


@dataclass(frozen=True)
class TieOutcome:
    """Probability-weighted pair of outcomes for an interior tie-breaker.

    The branches carry the deterministic outcomes for each winner; payoff
    accessors return the gamma-weighted expectation."""

    gamma: Fraction
    if_hv_wins: Outcome
    if_lv_wins: Outcome

    @property
    def branches(self):
        return ((self.gamma, self.if_hv_wins), (1 - self.gamma, self.if_lv_wins))

    @property
    def payoff_l(self) -> Fraction:
        return self.gamma * self.if_hv_wins.payoff_l + (1 - self.gamma) * self.if_lv_wins.payoff_l

    @property
    def payoff_h(self) -> Fraction:
        return self.gamma * self.if_hv_wins.payoff_h + (1 - self.gamma) * self.if_lv_wins.payoff_h

    def payoff_of(self, role: str) -> Fraction:
        return self.payoff_l if role == LV else self.payoff_h


def _outcome(spec: AuctionSpec, winner: str, winner_bid: int, loser_bid: int) -> Outcome:
    transfer = spec.alpha * winner_bid + (1 - spec.alpha) * loser_bid
    value = spec.valuations.value_of(winner)
    win_pay = Fraction(value) - transfer
    if winner == HV:
        return Outcome(HV, transfer, transfer, win_pay)
    return Outcome(LV, transfer, win_pay, transfer)


def resolve(spec: AuctionSpec, bid_l: int, bid_h: int):
    """Resolve one bid pair to an Outcome.

    Ties return the gamma branch deterministically when gamma is 0 or 1,
    and a TieOutcome (both branches with weights) otherwise.
    """
    if bid_l not in spec.bids or bid_h not in spec.bids:
        raise DomainError(f"bids ({bid_l}, {bid_h}) outside {{0,...,{spec.p_max}}}")
    if bid_h > bid_l:
        return _outcome(spec, HV, bid_h, bid_l)
    if bid_l > bid_h:
        return _outcome(spec, LV, bid_l, bid_h)
    hv_wins = _outcome(spec, HV, bid_h, bid_l)
    if spec.gamma == 1:
        return hv_wins
    lv_wins = _outcome(spec, LV, bid_l, bid_h)
    if spec.gamma == 0:
        return lv_wins
    return TieOutcome(spec.gamma, hv_wins, lv_wins)


@lru_cache(maxsize=256)
def scaled_payoff_matrix(spec: AuctionSpec, role: str):
    """Exact integer payoff matrix for one role, times a common denominator.

    Entry (b, r) is ``denom`` times the role's payoff when it bids b and the
    opponent bids r, with ties weighted by gamma.  Integer arithmetic keeps
    Nash comparisons exact while staying vectorizable.
    """
    n = spec.n_bids
    denom = np.lcm(spec.alpha.denominator, spec.gamma.denominator)
    a_num, a_den = spec.alpha.numerator, spec.alpha.denominator
    g_num, g_den = spec.gamma.numerator, spec.gamma.denominator
    v = spec.valuations.value_of(role)
    v_opp = spec.valuations.value_of(LV if role == HV else HV)

    b = np.arange(n, dtype=np.int64)
    own, opp = np.meshgrid(b, b, indexing="ij")
    scale_a = denom // a_den
    # own wins: pay alpha*own + (1-alpha)*opp; own loses: receive the same mix
    # of the opponent's (winner) bid and own bid.
    win = denom * v - scale_a * (a_num * own + (a_den - a_num) * opp)
    lose = scale_a * (a_num * opp + (a_den - a_num) * own)
    mat = np.where(own > opp, win, lose)

    # tie at b: transfer is b under any alpha; HV takes the good w.p. gamma
    diag = np.arange(n, dtype=np.int64)
    scale_g = denom // g_den
    if role == HV:
        tie = scale_g * (g_num * (v - diag) + (g_den - g_num) * diag)
    else:
        tie = scale_g * (g_num * diag + (g_den - g_num) * (v - diag))
    mat[diag, diag] = tie
    mat.setflags(write=False)
    return mat, int(denom)


@lru_cache(maxsize=256)
def float_payoff_matrix(spec: AuctionSpec, role: str) -> np.ndarray:
    """Float view of the payoff matrix, for the iterative solvers."""
    mat, denom = scaled_payoff_matrix(spec, role)
    out = mat.astype(float) / denom
    out.setflags(write=False)
    return out


def payoff_matrix(spec: AuctionSpec, role: str) -> list:
    """Payoff matrix as exact Fractions; entry [b][r] = payoff of bidding b
    against opponent bid r."""
    mat, denom = scaled_payoff_matrix(spec, role)
    return [[Fraction(int(x), denom) for x in row] for row in mat]


def expected_payoff(spec: AuctionSpec, role: str, bid: int, opponent_sigma: Sequence) -> Fraction:
    """Exact expected payoff of a bid against a mixed opponent.

    opponent_sigma may hold ints, Fractions, or floats (floats convert
    exactly to binary rationals, keeping comparisons deterministic).
    """
    if bid not in spec.bids:
        raise DomainError(f"bid {bid} outside {{0,...,{spec.p_max}}}")
    if len(opponent_sigma) != spec.n_bids:
        raise DomainError(f"opponent distribution has length {len(opponent_sigma)}, expected {spec.n_bids}")
    mat, denom = scaled_payoff_matrix(spec, role)
    row = mat[bid]
    total = Fraction(0)
    for r, w in enumerate(opponent_sigma):
        if w:
            total += Fraction(w) * int(row[r])
    return total / denom


@dataclass(frozen=True)
class MixedProfile:
    """One probability vector over bids per role."""

    sigma_l: tuple
    sigma_h: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma_l", tuple(self.sigma_l))
        object.__setattr__(self, "sigma_h", tuple(self.sigma_h))
        for name, sigma in (("sigma_l", self.sigma_l), ("sigma_h", self.sigma_h)):
            if any(x < 0 for x in sigma):
                raise ValueError(f"{name} has negative entries")
            if abs(float(sum(sigma)) - 1.0) > 1e-12:
                raise ValueError(f"{name} sums to {float(sum(sigma))!r}, expected 1")

    def sigma(self, role: str) -> tuple:
        return self.sigma_l if role == LV else self.sigma_h

    def arrays(self):
        return (np.asarray(self.sigma_l, dtype=float), np.asarray(self.sigma_h, dtype=float))

    @staticmethod
    def uniform(spec: AuctionSpec) -> "MixedProfile":
        u = (Fraction(1, spec.n_bids),) * spec.n_bids
        return MixedProfile(u, u)

    @staticmethod
    def point_masses(spec: AuctionSpec, bid_l: int, bid_h: int) -> "MixedProfile":
        if bid_l not in spec.bids or bid_h not in spec.bids:
            raise DomainError(f"bids ({bid_l}, {bid_h}) outside {{0,...,{spec.p_max}}}")
        e_l = tuple(Fraction(int(i == bid_l)) for i in spec.bids.bids())
        e_h = tuple(Fraction(int(i == bid_h)) for i in spec.bids.bids())
        return MixedProfile(e_l, e_h)

    @staticmethod
    def from_arrays(sigma_l, sigma_h) -> "MixedProfile":
        return MixedProfile(tuple(float(x) for x in sigma_l), tuple(float(x) for x in sigma_h))


def support(sigma, tol: float = 0.0) -> tuple:
    """Indices with probability strictly above tol."""
    return tuple(i for i, x in enumerate(sigma) if x > tol)


def exact_str(x) -> str:
    """Canonical text form of an exact amount: integer, short decimal when
    the denominator is a power of 2 and 5, else 'a/b'."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        digits = max(twos, fives)
        scaled = x * 10 ** digits
        sign = "-" if scaled.numerator < 0 else ""
        text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
        return f"{sign}{text[:-digits]}.{text[-digits:]}"
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GameConstants:
    """Derived constants of the game: net valuations, Nash range, equity
    surplus, and maximin payoffs."""

    c_l: int
    c_h: int
    nash_range: range
    equity_surplus: int
    maximin_l: int
    maximin_h: int


def constants(spec: AuctionSpec) -> GameConstants:
    vals = spec.valuations
    return GameConstants(
        c_l=vals.c_l,
        c_h=vals.c_h,
        nash_range=range(vals.c_l, vals.c_h + 1),
        equity_surplus=vals.equity_surplus,
        maximin_l=vals.c_l,
        maximin_h=vals.c_h,
    )


def expected_payoffs_profile(spec: AuctionSpec, profile: MixedProfile):
    """Expected payoff of each role under a mixed profile, as floats."""
    s_l, s_h = profile.arrays()
    u_l = float_payoff_matrix(spec, LV) @ s_h
    u_h = float_payoff_matrix(spec, HV) @ s_l
    return float(s_l @ u_l), float(s_h @ u_h)
