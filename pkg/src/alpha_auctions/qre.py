"""Logit quantal-response equilibrium over the auction game.

The solver finds the joint fixed point sigma_i = softmax(lambda * U_i(. |
sigma_-i)) by damped iteration, falling back to a Newton corrector with line
search when the damped map stops contracting (which happens for the
loser-bid auction once lambda grows).  Sweeps follow the principal branch by
warm-starting each lambda from the previous solution, beginning at the
uniform profile at lambda = 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game import HV, LV, AuctionSpec, MixedProfile, constants, float_payoff_matrix

DEFAULT_DAMPING = 0.5
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000

# damped phases hand off to Newton after this many stalled iterations
_PHASE_ITERS = 3000
_NEWTON_MAX = 120


class QreConvergenceError(RuntimeError):
    def __init__(self, spec, lam, residual, iterations):
        super().__init__(
            f"QRE solve failed for {spec.label} lambda={lam}: residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.spec = spec
        self.lam = lam
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class QrePoint:
    """A logit equilibrium at one lambda with convergence metadata."""

    lam: float
    profile: MixedProfile
    residual: float
    iterations: int


@dataclass(frozen=True)
class SweepRow:
    lam: float
    efficiency_pct: float
    mean_std_bid_lv: float
    mean_std_bid_hv: float
    std_payoff_lv: float
    std_payoff_hv: float
    iterations: int
    residual: float


@dataclass(frozen=True)
class SweepCurve:
    spec: AuctionSpec
    rows: tuple

    def lambdas(self):
        return [r.lam for r in self.rows]

    def efficiencies(self):
        return [r.efficiency_pct for r in self.rows]


def _softmax(x: np.ndarray) -> np.ndarray:
    z = np.exp(x - x.max())
    return z / z.sum()


def logit_response(spec: AuctionSpec, role: str, opponent_sigma, lam: float) -> np.ndarray:
    """Softmax of lambda-scaled expected payoffs against the opponent mix."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    sigma = np.asarray(opponent_sigma, dtype=float)
    u = float_payoff_matrix(spec, role) @ sigma
    return _softmax(lam * u)


def _joint_residual(u_l_mat, u_h_mat, lam, s_l, s_h):
    r_l = _softmax(lam * (u_l_mat @ s_h))
    r_h = _softmax(lam * (u_h_mat @ s_l))
    res = max(np.abs(r_l - s_l).max(), np.abs(r_h - s_h).max())
    return r_l, r_h, res


def _newton(u_l_mat, u_h_mat, lam, s_l, s_h, tol, max_iter=_NEWTON_MAX):
    """Newton corrector on F(sigma) = sigma - response(sigma), with
    residual-decreasing line search."""
    n = len(s_l)
    eye = np.eye(n)
    its = 0
    r_l, r_h, res = _joint_residual(u_l_mat, u_h_mat, lam, s_l, s_h)
    while res > tol and its < max_iter:
        its += 1
        d_l = lam * (np.diag(r_l) - np.outer(r_l, r_l)) @ u_l_mat
        d_h = lam * (np.diag(r_h) - np.outer(r_h, r_h)) @ u_h_mat
        jac = np.block([[eye, -d_l], [-d_h, eye]])
        rhs = -np.concatenate([s_l - r_l, s_h - r_h])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        improved = False
        t = 1.0
        for _ in range(40):
            c_l = np.clip(s_l + t * step[:n], 0.0, None)
            c_h = np.clip(s_h + t * step[n:], 0.0, None)
            c_l /= c_l.sum()
            c_h /= c_h.sum()
            n_l, n_h, new_res = _joint_residual(u_l_mat, u_h_mat, lam, c_l, c_h)
            if new_res < res:
                s_l, s_h, r_l, r_h, res = c_l, c_h, n_l, n_h, new_res
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return s_l, s_h, res, its


def _polish_bitstable(u_l_mat, u_h_mat, lam, s_l, s_h, tol, last_role, max_iter=200):
    """Replace the converged pair with a Gauss-Seidel-produced one, ideally
    bitwise stationary (joint residual exactly zero).

    The role updated last is the literal softmax of payoffs against the
    returned opponent, so its probability ordering is bitwise consistent
    with a recomputed payoff vector.  That role is chosen as the one whose
    payoffs have structural flats (the low-valuation agent when the price is
    the winner's bid, the high-valuation agent when it is the loser's),
    where one-ulp reevaluation noise would otherwise scramble tied-payoff
    orderings.  Newton output can additionally carry clipping dust with
    arbitrary ordering among ~1e-300 entries, which the pass removes.
    """
    best, best_res = None, np.inf
    c_l, c_h = s_l, s_h
    for _ in range(max_iter):
        if last_role == LV:
            n_h = _softmax(lam * (u_h_mat @ c_l))
            n_l = _softmax(lam * (u_l_mat @ n_h))
        else:
            n_l = _softmax(lam * (u_l_mat @ c_h))
            n_h = _softmax(lam * (u_h_mat @ n_l))
        _, _, res = _joint_residual(u_l_mat, u_h_mat, lam, n_l, n_h)
        if res < best_res:
            best, best_res = (n_l, n_h), res
        if np.array_equal(n_l, c_l) and np.array_equal(n_h, c_h):
            break
        if res > 10 * max(best_res, tol):
            break
        c_l, c_h = n_l, n_h
    if best is not None and best_res <= tol:
        return best
    # half pass: refresh only the flat-payoff side against the kept opponent
    if last_role == LV:
        h_l = _softmax(lam * (u_l_mat @ s_h))
        _, _, res = _joint_residual(u_l_mat, u_h_mat, lam, h_l, s_h)
        if res <= tol:
            return h_l, s_h
    else:
        h_h = _softmax(lam * (u_h_mat @ s_l))
        _, _, res = _joint_residual(u_l_mat, u_h_mat, lam, s_l, h_h)
        if res <= tol:
            return s_l, h_h
    return s_l, s_h


def solve_qre(
    spec: AuctionSpec,
    lam: float,
    init: Optional[MixedProfile] = None,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> QrePoint:
    """Solve the logit fixed point at one lambda.

    Damped iteration runs in phases with progressively smaller damping; each
    stalled phase is retried through the Newton corrector.  Raises
    QreConvergenceError with the last residual if nothing converges.
    """
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    n = spec.n_bids
    if lam == 0:
        uniform = np.full(n, 1.0 / n)
        profile = MixedProfile.from_arrays(uniform, uniform)
        return QrePoint(lam=0.0, profile=profile, residual=0.0, iterations=1)

    u_l_mat = float_payoff_matrix(spec, LV)
    u_h_mat = float_payoff_matrix(spec, HV)
    if init is None:
        s_l = np.full(n, 1.0 / n)
        s_h = np.full(n, 1.0 / n)
    else:
        s_l, s_h = init.arrays()

    total_its = 0
    res = np.inf
    d = damping
    while total_its < max_iter:
        phase_budget = min(_PHASE_ITERS, max_iter - total_its)
        for _ in range(phase_budget):
            r_l, r_h, res = _joint_residual(u_l_mat, u_h_mat, lam, s_l, s_h)
            total_its += 1
            if res <= tol:
                break
            s_l = (1 - d) * s_l + d * r_l
            s_h = (1 - d) * s_h + d * r_h
        if res <= tol:
            break
        s_l, s_h, res, newton_its = _newton(u_l_mat, u_h_mat, lam, s_l, s_h, tol)
        total_its += newton_its
        if res <= tol:
            break
        d *= 0.4  # damped map is oscillating; slow it down and retry

    if res > tol:
        raise QreConvergenceError(spec, lam, res, total_its)

    if res > 1e-13:
        # push toward machine precision so the exactness polish has headroom
        s_l, s_h, res, newton_its = _newton(u_l_mat, u_h_mat, lam, s_l, s_h, 1e-14)
        total_its += newton_its

    last_role = LV if spec.alpha >= Fraction(1, 2) else HV
    s_l, s_h = _polish_bitstable(u_l_mat, u_h_mat, lam, s_l, s_h, tol, last_role)
    _, _, final_res = _joint_residual(u_l_mat, u_h_mat, lam, s_l, s_h)
    profile = MixedProfile.from_arrays(s_l, s_h)
    return QrePoint(lam=float(lam), profile=profile, residual=float(final_res), iterations=total_its)


def efficiency(spec: AuctionSpec, profile: MixedProfile) -> float:
    """Percent of allocations going to the high-valuation agent."""
    s_l, s_h = profile.arrays()
    n = spec.n_bids
    win = np.tril(np.ones((n, n)), -1) + float(spec.gamma) * np.eye(n)
    return 100.0 * float(s_h @ win @ s_l)


def standardized_bid_means(spec: AuctionSpec, profile: MixedProfile):
    """Mean bid per role in equity-surplus units above the LV maximin."""
    cons = constants(spec)
    bids = np.arange(spec.n_bids, dtype=float)
    s_l, s_h = profile.arrays()
    es = cons.equity_surplus
    return (float(bids @ s_l) - cons.c_l) / es, (float(bids @ s_h) - cons.c_l) / es


def standardized_payoffs(spec: AuctionSpec, profile: MixedProfile):
    """Expected payoff per role in equity-surplus units above own maximin."""
    cons = constants(spec)
    s_l, s_h = profile.arrays()
    pi_l = float(s_l @ (float_payoff_matrix(spec, LV) @ s_h))
    pi_h = float(s_h @ (float_payoff_matrix(spec, HV) @ s_l))
    es = cons.equity_surplus
    return (pi_l - cons.maximin_l) / es, (pi_h - cons.maximin_h) / es


def sweep(
    spec: AuctionSpec,
    lambda_grid: Sequence[float],
    continuation: bool = True,
    damping: float = DEFAULT_DAMPING,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SweepCurve:
    """Solve the QRE along an ascending lambda grid.

    With continuation on, each solve warm-starts from the previous lambda's
    profile (the principal branch from uniform at lambda = 0).
    """
    grid = [float(x) for x in lambda_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda grid must be strictly increasing")
    if not grid or grid[0] != 0.0:
        raise ValueError("lambda grid must start at 0")
    rows = []
    prev = None
    for lam in grid:
        point = solve_qre(spec, lam, init=prev, damping=damping, tol=tol, max_iter=max_iter)
        if continuation:
            prev = point.profile
        bid_l, bid_h = standardized_bid_means(spec, point.profile)
        pay_l, pay_h = standardized_payoffs(spec, point.profile)
        rows.append(
            SweepRow(
                lam=point.lam,
                efficiency_pct=efficiency(spec, point.profile),
                mean_std_bid_lv=bid_l,
                mean_std_bid_hv=bid_h,
                std_payoff_lv=pay_l,
                std_payoff_hv=pay_h,
                iterations=point.iterations,
                residual=point.residual,
            )
        )
    return SweepCurve(spec=spec, rows=tuple(rows))


SWEEP_CSV_HEADER = [
    "auction", "alpha", "gamma", "v_l", "v_h", "p_max", "lambda",
    "efficiency_pct", "mean_std_bid_lv", "mean_std_bid_hv",
    "std_payoff_lv", "std_payoff_hv", "iterations", "residual",
]


def write_sweep_csv(curves, path):
    """Write one or more sweep curves to the canonical CSV layout."""
    if isinstance(curves, SweepCurve):
        curves = [curves]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_HEADER)
        for curve in curves:
            spec = curve.spec
            for row in curve.rows:
                writer.writerow([
                    spec.label, str(spec.alpha), str(spec.gamma),
                    spec.valuations.v_l, spec.valuations.v_h, spec.p_max,
                    f"{row.lam:.6g}",
                    f"{row.efficiency_pct:.10g}",
                    f"{row.mean_std_bid_lv:.10g}",
                    f"{row.mean_std_bid_hv:.10g}",
                    f"{row.std_payoff_lv:.10g}",
                    f"{row.std_payoff_hv:.10g}",
                    row.iterations,
                    f"{row.residual:.6g}",
                ])
