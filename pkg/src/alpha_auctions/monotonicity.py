"""Weak payoff monotonicity and the bias predicates for extreme-price auctions.

A profile is weakly payoff monotone when playing one bid strictly more often
than another implies its expected payoff is strictly higher.  Monotone
behavior approaching mutual best responses can only reach a restricted
segment of the Nash range: winning bids near c_l in the winner-bid auction
and near c_h in the loser-bid auction.  This module checks profiles and
profile sequences against those windows and measures sup-norm distance to
the Nash set, which is what the exclusion search and the QRE-tail tests use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .game import (
    HV,
    LV,
    AuctionSpec,
    DomainError,
    MixedProfile,
    constants,
    float_payoff_matrix,
)
from .nash import NashCertificate
from .qre import _softmax

WB_AUCTION = "WB"
LB_AUCTION = "LB"

DEFAULT_TOL_PROB = 1e-9
DEFAULT_TOL_PAYOFF = 0.0


@dataclass(frozen=True)
class MonotonicityViolation:
    role: str
    bid_a: int
    bid_b: int
    prob_a: float
    prob_b: float
    payoff_a: float
    payoff_b: float


@dataclass(frozen=True)
class MonotonicityReport:
    ok: bool
    violations: tuple
    tol_prob: float
    tol_payoff: float

    def to_records(self):
        """One line-delimited record per violation."""
        return [
            f"violation role={v.role} bid_a={v.bid_a} bid_b={v.bid_b} "
            f"prob_a={v.prob_a:.12g} prob_b={v.prob_b:.12g} "
            f"payoff_a={v.payoff_a:.12g} payoff_b={v.payoff_b:.12g}"
            for v in self.violations
        ]


def is_weakly_payoff_monotone(
    spec: AuctionSpec,
    profile: MixedProfile,
    tol_prob: float = DEFAULT_TOL_PROB,
    tol_payoff: float = DEFAULT_TOL_PAYOFF,
) -> MonotonicityReport:
    """Check every ordered bid pair per role: more probability must mean
    strictly more expected payoff against the opponent's marginal."""
    s_l, s_h = profile.arrays()
    violations = []
    for role, sigma, opp in ((LV, s_l, s_h), (HV, s_h, s_l)):
        u = float_payoff_matrix(spec, role) @ opp
        prob_gt = sigma[:, None] > sigma[None, :] + tol_prob
        pay_le = u[:, None] <= u[None, :] + tol_payoff
        bad = np.argwhere(prob_gt & pay_le)
        for a, b in bad:
            violations.append(
                MonotonicityViolation(role, int(a), int(b), float(sigma[a]), float(sigma[b]),
                                      float(u[a]), float(u[b]))
            )
    return MonotonicityReport(ok=not violations, violations=tuple(violations),
                              tol_prob=tol_prob, tol_payoff=tol_payoff)


def t_value(auction: str, spec: AuctionSpec, mirror: bool = False) -> Fraction:
    """Window height t(v) for the bias theorems.

    The loser-bid formula has two variants: the verbatim one and a
    mirror-consistent one obtained by reflecting the winner-bid formula
    through b -> p_max - b; `mirror` selects the latter.
    """
    cons = constants(spec)
    es3 = Fraction(cons.equity_surplus, 3)
    if auction == WB_AUCTION:
        lead = Fraction(2 * cons.c_h, 3) - cons.c_l
    elif auction == LB_AUCTION:
        if mirror:
            lead = Fraction(2 * (spec.p_max - cons.c_l), 3) - (spec.p_max - cons.c_h)
        else:
            lead = Fraction(2 * (spec.p_max - cons.c_l), 3) - cons.c_h
    else:
        raise ValueError(f"t_value applies to {WB_AUCTION!r} or {LB_AUCTION!r}, got {auction!r}")
    return max(lead, es3) + 1


def _strictly_below(x: Fraction) -> int:
    """Largest integer strictly below x."""
    f = math.floor(x)
    return f - 1 if f == x else f


def _strictly_above(x: Fraction) -> int:
    c = math.ceil(x)
    return c + 1 if c == x else c


@dataclass(frozen=True)
class BiasWindow:
    """Expected-bid and payoff windows implied by the bias theorems.

    Bid-window bounds are strict except the loser-bid statement-1 floor,
    which is inclusive.  payoff_cap is a strict upper bound for the named
    role's expected payoff, payoff_floor a strict lower bound.
    """

    auction: str
    t: Fraction
    bid_window_lv: tuple
    bid_window_hv: tuple
    payoff_cap: tuple
    payoff_floor: tuple
    admissible_segment: range


def bias_window(auction: str, spec: AuctionSpec, mirror: bool = False) -> BiasWindow:
    """Windows from the relevant theorem plus the admissible winning-bid
    segment of the Nash range.

    The admissible segment always uses the mirror-consistent endpoint (the
    only one consistent with the reflection symmetry of the two auctions);
    `mirror` only switches the loser-bid t used in the bid/payoff windows.
    """
    if auction not in (WB_AUCTION, LB_AUCTION):
        raise DomainError("bias windows exist for extreme-price auctions only")
    cons = constants(spec)
    es = cons.equity_surplus
    if auction == WB_AUCTION:
        t = t_value(WB_AUCTION, spec)
        lv_cap = cons.c_l + 1 if spec.valuations.v_l * 3 >= spec.valuations.v_h else None
        seg_hi = min(cons.c_h, _strictly_below(cons.c_l + t))
        return BiasWindow(
            auction=WB_AUCTION,
            t=t,
            bid_window_lv=(None, lv_cap),
            bid_window_hv=(cons.c_l - 1, cons.c_l + t),
            payoff_cap=(LV, cons.c_l + t),
            payoff_floor=(HV, cons.c_h + (es - t)),
            admissible_segment=range(cons.c_l, seg_hi + 1),
        )
    t = t_value(LB_AUCTION, spec, mirror=mirror)
    t_seg = t_value(LB_AUCTION, spec, mirror=True)
    hv_floor_applies = 3 * cons.c_h <= 3 * spec.p_max - (spec.p_max - cons.c_l)
    hv_floor = cons.c_h - 1 if hv_floor_applies else None
    seg_lo = max(cons.c_l, _strictly_above(cons.c_h - t_seg))
    return BiasWindow(
        auction=LB_AUCTION,
        t=t,
        bid_window_lv=(cons.c_h - t, cons.c_h + 1),
        bid_window_hv=(hv_floor, None),
        payoff_cap=(HV, cons.c_h + t),
        payoff_floor=(LV, cons.c_l + (es - t)),
        admissible_segment=range(seg_lo, cons.c_h + 1),
    )


def _auction_kind(spec: AuctionSpec):
    if spec.alpha == 1:
        return WB_AUCTION
    if spec.alpha == 0:
        return LB_AUCTION
    return None


def profile_stats(spec: AuctionSpec, profile: MixedProfile):
    """(E(b_l), E(b_h), pi_l, pi_h) under a profile, as floats."""
    s_l, s_h = profile.arrays()
    bids = np.arange(spec.n_bids, dtype=float)
    u_l = float_payoff_matrix(spec, LV) @ s_h
    u_h = float_payoff_matrix(spec, HV) @ s_l
    return float(bids @ s_l), float(bids @ s_h), float(s_l @ u_l), float(s_h @ u_h)


def evaluate_statements(spec: AuctionSpec, profile: MixedProfile,
                        target: Optional[NashCertificate] = None,
                        mirror: bool = False) -> dict:
    """Evaluate the four theorem statements on one profile.

    Returns {1: bool|None, ...}; None marks a statement whose hypothesis
    does not apply (statement 1's valuation condition, statement 4's
    condition on the target equilibrium payoff).  Interior-price auctions
    carry no bias theorem, so every statement is vacuous there.
    """
    kind = _auction_kind(spec)
    if kind is None:
        return {1: None, 2: None, 3: None, 4: None}
    cons = constants(spec)
    t = float(t_value(kind, spec, mirror=mirror))
    e_bl, e_bh, pi_l, pi_h = profile_stats(spec, profile)
    out = {}
    if kind == WB_AUCTION:
        if 3 * spec.valuations.v_l >= spec.valuations.v_h:
            out[1] = e_bl < cons.c_l + 1
        else:
            out[1] = None
        out[2] = cons.c_l - 1 < e_bh < cons.c_l + t
        out[3] = (pi_l < cons.c_l + t) and (pi_h > cons.c_h + (cons.equity_surplus - t))
        if target is not None:
            t_pi_l = profile_stats(spec, target.profile)[2]
            out[4] = (e_bl < e_bh) if t_pi_l > cons.c_l + 1e-9 else None
        else:
            out[4] = None
        return out
    if 3 * cons.c_h <= 3 * spec.p_max - (spec.p_max - cons.c_l):
        out[1] = e_bh >= cons.c_h - 1
    else:
        out[1] = None
    out[2] = cons.c_h - t < e_bl < cons.c_h + 1
    out[3] = (pi_h < cons.c_h + t) and (pi_l > cons.c_l + (cons.equity_surplus - t))
    if target is not None:
        t_pi_h = profile_stats(spec, target.profile)[3]
        out[4] = (e_bh > e_bl) if t_pi_h < cons.c_h - 1e-9 else None
    else:
        out[4] = None
    return out


def profile_distance(a: MixedProfile, b: MixedProfile) -> float:
    """Sup-norm distance between two profiles over both roles."""
    a_l, a_h = a.arrays()
    b_l, b_h = b.arrays()
    return max(np.abs(a_l - b_l).max(), np.abs(a_h - b_h).max())


class SequencePreconditionError(ValueError):
    def __init__(self, index, reason):
        super().__init__(f"profile {index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True)
class SequenceCheck:
    statements: tuple        # per index: dict statement -> bool | None
    first_all_pass: Optional[int]  # the theorem's Lambda, or None

    def to_records(self):
        lines = []
        for i, st in enumerate(self.statements):
            for k in sorted(st):
                verdict = "n/a" if st[k] is None else ("pass" if st[k] else "fail")
                lines.append(f"statement index={i} number={k} verdict={verdict}")
        return lines


def check_sequence(spec: AuctionSpec, profiles: Sequence[MixedProfile],
                   target: NashCertificate, mirror: bool = False,
                   tol_prob: float = DEFAULT_TOL_PROB,
                   tol_payoff: float = DEFAULT_TOL_PAYOFF) -> SequenceCheck:
    """Evaluate the theorem statements along a monotone sequence.

    Preconditions: every profile is weakly payoff monotone and sup-norm
    distance to the target is non-increasing.  Returns per-index statement
    results and the first index after which every applicable statement
    holds through the end of the sequence.
    """
    dist_prev = math.inf
    for i, prof in enumerate(profiles):
        rep = is_weakly_payoff_monotone(spec, prof, tol_prob, tol_payoff)
        if not rep.ok:
            raise SequencePreconditionError(i, "profile is not weakly payoff monotone")
        d = profile_distance(prof, target.profile)
        if d > dist_prev + 1e-12:
            raise SequencePreconditionError(i, f"distance to target increased ({d:.6g} > {dist_prev:.6g})")
        dist_prev = d
    results = tuple(evaluate_statements(spec, prof, target, mirror=mirror) for prof in profiles)
    first = None
    for start in range(len(results)):
        tail_ok = all(
            all(v for v in st.values() if v is not None) if any(v is not None for v in st.values()) else True
            for st in results[start:]
        )
        if tail_ok:
            first = start
            break
    return SequenceCheck(statements=results, first_all_pass=first)


def nash_set_distance(spec: AuctionSpec, profile: MixedProfile, p: int) -> float:
    """Sup-norm distance from a profile to the set of Nash equilibria with
    payoff-determinant bid p.

    For extreme-price auctions the set fixes one role at the point mass on p
    and constrains the other role's support and the determinant bid's
    optimality; the nearest member is found by linear programming.  For
    interior auctions the set member used is the strict equal-bid profile.
    """
    return nash_projection(spec, profile, p)[0]


def nash_projection(spec: AuctionSpec, profile: MixedProfile, p: int):
    """(distance, nearest profile) within the Nash set at determinant bid p."""
    cons = constants(spec)
    if p not in cons.nash_range:
        raise DomainError(f"p={p} outside Nash range {{{cons.c_l},...,{cons.c_h}}}")
    s_l, s_h = profile.arrays()
    n = spec.n_bids
    unit = np.zeros(n)
    unit[p] = 1.0
    if not spec.is_extreme_price:
        d = max(np.abs(s_l - unit).max(), np.abs(s_h - unit).max())
        return float(d), MixedProfile.from_arrays(unit, unit)

    if spec.alpha == 1:
        det_vec, mix_vec = s_h, s_l
        allowed = np.arange(0, p + 1)
        opt_mat = float_payoff_matrix(spec, HV)  # p must stay optimal for HV
    else:
        det_vec, mix_vec = s_l, s_h
        allowed = np.arange(p, n)
        opt_mat = float_payoff_matrix(spec, LV)
    d_det = float(np.abs(det_vec - unit).max())
    outside = np.setdiff1d(np.arange(n), allowed)
    d_outside = float(mix_vec[outside].max()) if outside.size else 0.0

    m = allowed.size
    # variables: x (mix-role probs on the allowed support), t
    cost = np.zeros(m + 1)
    cost[-1] = 1.0
    rows = []
    rhs = []
    eye = np.eye(m)
    rows.append(np.hstack([eye, -np.ones((m, 1))]))          # x - t <= sigma
    rhs.append(mix_vec[allowed])
    rows.append(np.hstack([-eye, -np.ones((m, 1))]))         # -x - t <= -sigma
    rhs.append(-mix_vec[allowed])
    gains = opt_mat[:, allowed] - opt_mat[p, allowed]        # deviation b gains over p
    dev = np.ones(n, dtype=bool)
    dev[p] = False
    rows.append(np.hstack([gains[dev], np.zeros((n - 1, 1))]))  # gains @ x <= 0
    rhs.append(np.zeros(n - 1))
    a_ub = np.vstack(rows)
    b_ub = np.concatenate(rhs)
    a_eq = np.zeros((1, m + 1))
    a_eq[0, :m] = 1.0
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * m + [(0, None)], method="highs")
    if not res.success:
        return math.inf, None
    mix = np.zeros(n)
    mix[allowed] = np.clip(res.x[:m], 0.0, None)
    mix /= mix.sum()
    member = (MixedProfile.from_arrays(mix, unit) if spec.alpha == 1
              else MixedProfile.from_arrays(unit, mix))
    return max(d_det, d_outside, float(res.x[-1])), member


def nash_distance(spec: AuctionSpec, profile: MixedProfile,
                  p_values: Optional[Sequence[int]] = None):
    """Minimum nash_set_distance over payoff-determinant bids.

    Returns (distance, best_p); p_values defaults to the full Nash range.
    """
    cons = constants(spec)
    if p_values is None:
        p_values = list(cons.nash_range)
    best = (math.inf, None)
    for p in p_values:
        d = nash_set_distance(spec, profile, p)
        if d < best[0]:
            best = (d, p)
    return best


@dataclass(frozen=True)
class ProbeResult:
    profile: MixedProfile
    distance: float
    monotone: bool
    seed: int
    evaluations: int

    def to_record(self):
        return (f"probe distance={self.distance:.6g} monotone={self.monotone} "
                f"seed={self.seed} evaluations={self.evaluations}")


def _asymmetric_fixed_point(spec: AuctionSpec, lam_l: float, lam_h: float,
                            iters: int = 4000, damping: float = 0.2):
    u_l = float_payoff_matrix(spec, LV)
    u_h = float_payoff_matrix(spec, HV)
    n = spec.n_bids
    s_l = np.full(n, 1.0 / n)
    s_h = np.full(n, 1.0 / n)
    for _ in range(iters):
        r_l = _softmax(lam_l * (u_l @ s_h))
        r_h = _softmax(lam_h * (u_h @ s_l))
        if max(np.abs(r_l - s_l).max(), np.abs(r_h - s_h).max()) < 1e-13:
            break
        s_l = (1 - damping) * s_l + damping * r_l
        s_h = (1 - damping) * s_h + damping * r_h
    # final Gauss-Seidel pass keeps both sides exact softmax images
    s_h = _softmax(lam_h * (u_h @ s_l))
    s_l = _softmax(lam_l * (u_l @ s_h))
    return MixedProfile.from_arrays(s_l, s_h)


def exclusion_probe(spec: AuctionSpec, target_p: int, delta: float = 0.25,
                    budget: int = 20000, seed: int = 0) -> ProbeResult:
    """Randomized hill-climb over weakly payoff monotone profiles toward the
    Nash set with payoff-determinant bid target_p.

    Best-effort: returns the closest monotone profile found within the
    evaluation budget.  A distance bounded away from zero corroborates the
    theorem's exclusion of target_p; admissible targets should come out
    below 0.05.  The search seeds from logit fixed points with per-role
    precisions (monotone by construction) and then perturbs profiles
    directly, repairing candidate probabilities onto the payoff order.
    """
    if spec.p_max > 64:
        raise DomainError("probe is desk-scale: p_max <= 64")
    cons = constants(spec)
    if target_p not in cons.nash_range:
        raise DomainError(f"target {target_p} outside Nash range")
    if not spec.is_extreme_price and spec.alpha != Fraction(1, 2):
        raise DomainError("probe supports WB, AB, and LB")

    rng = np.random.default_rng(seed)
    evaluations = 0

    def evaluate(profile):
        nonlocal evaluations
        evaluations += 1
        rep = is_weakly_payoff_monotone(spec, profile)
        if not rep.ok:
            return None
        return nash_set_distance(spec, profile, target_p)

    best_profile = MixedProfile.uniform(spec)
    best_profile = MixedProfile.from_arrays(*best_profile.arrays())
    best_dist = evaluate(best_profile)

    # strict equal-bid profile: for interior auctions it is itself monotone
    if not spec.is_extreme_price:
        pure = MixedProfile.point_masses(spec, target_p, target_p)
        pure = MixedProfile.from_arrays(*pure.arrays())
        d = evaluate(pure)
        if d is not None and d < best_dist:
            best_profile, best_dist = pure, d
            if best_dist == 0.0:
                return ProbeResult(best_profile, 0.0, True, seed, evaluations)

    # stage 1: per-role logit precisions steer the fixed point's limit
    while evaluations < budget // 2:
        log_l = rng.uniform(-1.5, 3.5)
        log_h = rng.uniform(-1.5, 3.5)
        prof = _asymmetric_fixed_point(spec, 10.0 ** log_l, 10.0 ** log_h)
        d = evaluate(prof)
        if d is not None and d < best_dist:
            best_profile, best_dist = prof, d
        if best_dist < 0.01:
            break

    # stage 2: local mass moves with payoff-order repair
    u_l_mat = float_payoff_matrix(spec, LV)
    u_h_mat = float_payoff_matrix(spec, HV)
    current = best_profile
    current_dist = best_dist
    n = spec.n_bids
    while evaluations < budget:
        s_l, s_h = current.arrays()
        which = rng.integers(2)
        sigma = (s_l if which == 0 else s_h).copy()
        i, j = rng.integers(n), rng.integers(n)
        amount = rng.uniform(0.0, delta) * sigma[i]
        sigma[i] -= amount
        sigma[j] += amount
        cand_l, cand_h = (sigma, s_h) if which == 0 else (s_l, sigma)
        # repair both roles: sorted probabilities follow the payoff order
        for _ in range(3):
            order_l = np.argsort(-(u_l_mat @ cand_h), kind="stable")
            cand_l = cand_l.copy()
            cand_l[order_l] = -np.sort(-cand_l)
            order_h = np.argsort(-(u_h_mat @ cand_l), kind="stable")
            cand_h = cand_h.copy()
            cand_h[order_h] = -np.sort(-cand_h)
        prof = MixedProfile.from_arrays(cand_l, cand_h)
        d = evaluate(prof)
        if d is not None and d <= current_dist:
            current, current_dist = prof, d
            if d < best_dist:
                best_profile, best_dist = prof, d

    monotone = is_weakly_payoff_monotone(spec, best_profile).ok
    return ProbeResult(best_profile, float(best_dist), monotone, seed, evaluations)
