"""Standardized metrics, outcome classification, empirical payoff fields,
ventile histograms, played-vs-unplayed comparisons, sign and permutation
tests, and a conditional-logit estimator over session logs.

Everything reads the canonical period CSV; nothing depends on live engine
state, so analyses replay bit-identically from flat files.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game import HV, LV, AuctionSpec, BidDomain, ValuationPair, float_payoff_matrix
from .session import PeriodRecord, structure_label

AUCTION_BY_ALPHA = {Fraction(1): "WB", Fraction(1, 2): "AB", Fraction(0): "LB"}


class DataError(ValueError):
    """Malformed or incomplete log data."""


@dataclass(frozen=True)
class LogRow:
    """One subject-period line of the canonical CSV, typed."""

    session_id: str
    session_type: int
    alpha: Fraction
    period: int
    pair_id: int
    subject_id: int
    role: str
    item_a: int
    item_b_own: int
    item_b_other: int
    bid: int
    revisions: int
    opp_bid: int
    winner_role: str
    transfer: Fraction
    raw_points: Fraction
    efficient: bool
    equilibrium_outcome: bool

    @property
    def v_own(self) -> int:
        return self.item_b_own - self.item_a

    @property
    def v_other(self) -> int:
        return self.item_b_other - self.item_a

    @property
    def v_l(self) -> int:
        return min(self.v_own, self.v_other)

    @property
    def v_h(self) -> int:
        return max(self.v_own, self.v_other)

    @property
    def c_l(self) -> Fraction:
        return Fraction(self.v_l, 2)

    @property
    def c_h(self) -> Fraction:
        return Fraction(self.v_h, 2)

    @property
    def equity_surplus(self) -> Fraction:
        return self.c_h - self.c_l

    @property
    def bid_cap(self) -> int:
        return max(self.item_b_own, self.item_b_other)

    @property
    def auction(self) -> str:
        return AUCTION_BY_ALPHA.get(self.alpha, f"alpha={self.alpha}")

    @property
    def reduced_payoff(self) -> Fraction:
        return self.raw_points - self.item_a

    @property
    def std_payoff(self) -> Fraction:
        c_own = self.c_h if self.role == HV else self.c_l
        return (self.reduced_payoff - c_own) / self.equity_surplus

    @property
    def std_bid(self) -> Fraction:
        return (self.bid - self.c_l) / self.equity_surplus

    def reduced_spec(self, gamma: Fraction = Fraction(1)) -> AuctionSpec:
        return AuctionSpec(self.alpha, ValuationPair(self.v_l, self.v_h),
                           BidDomain(self.bid_cap), gamma)


def parse_session_csv(source) -> list:
    """Read canonical CSV rows from a path, file object, or string."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
        if "\n" not in text:
            with open(text) as fh:
                text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        try:
            rows.append(LogRow(
                session_id=raw["session_id"],
                session_type=int(raw["session_type"]),
                alpha=Fraction(raw["auction_alpha"]),
                period=int(raw["period"]),
                pair_id=int(raw["pair_id"]),
                subject_id=int(raw["subject_id"]),
                role=raw["role"],
                item_a=int(raw["item_a"]),
                item_b_own=int(raw["item_b_own"]),
                item_b_other=int(raw["item_b_other"]),
                bid=int(raw["bid"]),
                revisions=int(raw["revisions"]),
                opp_bid=int(raw["opp_bid"]),
                winner_role=raw["winner_role"],
                transfer=Fraction(raw["transfer"]),
                raw_points=Fraction(raw["raw_points"]),
                efficient=bool(int(raw["efficient"])),
                equilibrium_outcome=bool(int(raw["equilibrium_outcome"])),
            ))
        except (KeyError, ValueError) as exc:
            raise DataError(f"bad CSV row {raw!r}: {exc}") from exc
    return rows


def row_structure(row: LogRow, periods_by_session: dict) -> str:
    return structure_label(row.session_type, row.period, periods_by_session[row.session_id])


def _periods_by_session(rows) -> dict:
    out: dict = {}
    for r in rows:
        out[r.session_id] = max(out.get(r.session_id, 0), r.period)
    return out


@dataclass(frozen=True)
class StandardizedMetrics:
    """Equity-surplus-unit payoffs and bids for one resolved pair-period."""

    std_payoff_lv: Fraction
    std_payoff_hv: Fraction
    std_bid_lv: Fraction
    std_bid_hv: Fraction
    efficient: bool
    equilibrium_outcome: bool

    @property
    def payoff_sum(self) -> Fraction:
        return self.std_payoff_lv + self.std_payoff_hv


def standardize(record: PeriodRecord) -> StandardizedMetrics:
    """Standardized payoffs and bids from an engine period record; the payoff
    pair sums to exactly +1 when efficient and -1 otherwise."""
    valuation = record.valuation
    v_l = valuation.item_b_low - valuation.item_a
    v_h = valuation.item_b_high - valuation.item_a
    c_l, c_h = Fraction(v_l, 2), Fraction(v_h, 2)
    es = c_h - c_l
    hv_out = record.outcome_of(record.hv_subject)
    lv_out = record.outcome_of(record.lv_subject)
    pi_h = hv_out.raw_points - valuation.item_a
    pi_l = lv_out.raw_points - valuation.item_a
    return StandardizedMetrics(
        std_payoff_lv=(pi_l - c_l) / es,
        std_payoff_hv=(pi_h - c_h) / es,
        std_bid_lv=(lv_out.bid - c_l) / es,
        std_bid_hv=(hv_out.bid - c_l) / es,
        efficient=record.efficient,
        equilibrium_outcome=record.equilibrium_outcome,
    )


@dataclass(frozen=True)
class GroupSummary:
    auction: str
    structure: str
    role: str
    n: int
    mean_std_payoff: float
    sd_std_payoff: Optional[float]
    mean_std_bid: float
    sd_std_bid: Optional[float]
    efficiency_rate: float
    equilibrium_rate: float


def _mean_sd(values):
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return float(mean), None
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return float(mean), math.sqrt(float(var))


def summary_table(rows: Sequence[LogRow]) -> list:
    """Mean, sd (n-1), and N of standardized payoffs and bids, with outcome
    rates, grouped by auction x valuation structure x role."""
    periods = _periods_by_session(rows)
    groups: dict = {}
    for r in rows:
        key = (r.auction, row_structure(r, periods), r.role)
        groups.setdefault(key, []).append(r)
    out = []
    for (auction, structure, role), members in sorted(groups.items()):
        payoffs = [float(m.std_payoff) for m in members]
        bids = [float(m.std_bid) for m in members]
        mean_p, sd_p = _mean_sd(payoffs)
        mean_b, sd_b = _mean_sd(bids)
        out.append(GroupSummary(
            auction=auction, structure=structure, role=role, n=len(members),
            mean_std_payoff=mean_p, sd_std_payoff=sd_p,
            mean_std_bid=mean_b, sd_std_bid=sd_b,
            efficiency_rate=sum(m.efficient for m in members) / len(members),
            equilibrium_rate=sum(m.equilibrium_outcome for m in members) / len(members),
        ))
    return out


def write_summary_csv(summaries, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["auction", "structure", "role", "n", "mean_std_payoff",
                         "sd_std_payoff", "mean_std_bid", "sd_std_bid",
                         "efficiency_rate", "equilibrium_rate"])
        for s in summaries:
            writer.writerow([
                s.auction, s.structure, s.role, s.n,
                f"{s.mean_std_payoff:.6f}",
                "" if s.sd_std_payoff is None else f"{s.sd_std_payoff:.6f}",
                f"{s.mean_std_bid:.6f}",
                "" if s.sd_std_bid is None else f"{s.sd_std_bid:.6f}",
                f"{s.efficiency_rate:.6f}", f"{s.equilibrium_rate:.6f}",
            ])


@dataclass(frozen=True)
class EmpiricalPayoffField:
    """Per-bid expected payoff against the uniform draw over that period's
    opposite-role bids, in reduced points."""

    session_id: str
    period: int
    values: dict  # role -> np.ndarray over the full bid domain

    def of(self, role: str) -> np.ndarray:
        return self.values[role]


def empirical_payoff_field(rows: Sequence[LogRow], session_id: str, period: int) -> EmpiricalPayoffField:
    members = [r for r in rows if r.session_id == session_id and r.period == period]
    if not members:
        raise DataError(f"no rows for session {session_id!r} period {period}")
    bids = {LV: [r.bid for r in members if r.role == LV],
            HV: [r.bid for r in members if r.role == HV]}
    if not bids[LV] or not bids[HV]:
        raise DataError(f"period {period} is missing a role")
    spec = members[0].reduced_spec()
    n = spec.n_bids
    values = {}
    for role, opp_role in ((LV, HV), (HV, LV)):
        opp = np.bincount(bids[opp_role], minlength=n).astype(float)
        opp /= opp.sum()
        values[role] = float_payoff_matrix(spec, role) @ opp
    return EmpiricalPayoffField(session_id=session_id, period=period, values=values)


def _fields_by_period(rows):
    keys = sorted({(r.session_id, r.period) for r in rows})
    return {key: empirical_payoff_field(rows, *key) for key in keys}


def ventile_histogram(rows: Sequence[LogRow]) -> dict:
    """20-bin frequency of each chosen bid's payoff rank within its period,
    per auction x role; tied payoffs share the mean rank and the bins of each
    group sum to one."""
    from scipy.stats import rankdata

    fields = _fields_by_period(rows)
    counts: dict = {}
    for r in rows:
        field = fields[(r.session_id, r.period)].of(r.role)
        ranks = rankdata(field, method="average")
        q = ranks[r.bid] / len(field)
        bin_idx = min(19, max(0, math.ceil(20 * q) - 1))
        key = (r.auction, r.role)
        counts.setdefault(key, np.zeros(20))[bin_idx] += 1
    return {key: c / c.sum() for key, c in sorted(counts.items())}


def write_ventile_csv(hist: dict, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["auction", "role", "ventile", "frequency"])
        for (auction, role), freqs in hist.items():
            for k, f in enumerate(freqs, start=1):
                writer.writerow([auction, role, k, f"{f:.6f}"])


@dataclass(frozen=True)
class SignTestResult:
    units: tuple              # (unit label, mean played - mean unplayed)
    n_positive: int
    n_effective: int
    p_value: float            # one-sided exact binomial, H1: played > unplayed


def played_vs_unplayed(rows: Sequence[LogRow], level: str = "session") -> SignTestResult:
    """Mean expected payoff of played vs unplayed bids per observation unit,
    with an exact one-sided sign test across units."""
    if level not in ("session", "valuation-session"):
        raise ValueError("level must be 'session' or 'valuation-session'")
    periods = _periods_by_session(rows)
    fields = _fields_by_period(rows)
    buckets: dict = {}
    for r in rows:
        unit = r.session_id if level == "session" else (r.session_id, row_structure(r, periods))
        buckets.setdefault(unit, []).append(r)
    units = []
    for unit, members in sorted(buckets.items()):
        played_vals = []
        unplayed_vals = []
        for (sid, period) in sorted({(m.session_id, m.period) for m in members}):
            for role in (LV, HV):
                chosen = [m.bid for m in members if m.session_id == sid and m.period == period and m.role == role]
                if not chosen:
                    continue
                field = fields[(sid, period)].of(role)
                played_set = set(chosen)
                played_vals.extend(field[b] for b in chosen)
                unplayed_vals.extend(field[b] for b in range(len(field)) if b not in played_set)
        if not played_vals or not unplayed_vals:
            continue
        units.append((unit, float(np.mean(played_vals) - np.mean(unplayed_vals))))
    diffs = [d for _, d in units if d != 0.0]
    k = sum(1 for d in diffs if d > 0)
    n = len(diffs)
    p = sum(math.comb(n, j) for j in range(k, n + 1)) / 2 ** n if n else 1.0
    return SignTestResult(units=tuple(units), n_positive=k, n_effective=n, p_value=p)


@dataclass(frozen=True)
class CLogitFit:
    beta: np.ndarray
    se: np.ndarray            # observed-information standard errors, unclustered
    log_likelihood: float
    ll_at_zero: float
    iterations: int
    converged: bool
    separation_flagged: bool
    covariates: tuple


_SEPARATION_CAP = 50.0


def fit_conditional_logit(design, chosen, tol: float = 1e-9, max_iter: int = 200) -> CLogitFit:
    """Damped Newton MLE for a conditional logit over per-observation choice
    sets.

    design: list of (n_alternatives x K) covariate arrays; chosen: index of
    the selected alternative per observation.  Runaway coefficients flag
    (quasi-)separation and the fit reports the capped value.
    """
    design = [np.asarray(x, dtype=float) for x in design]
    K = design[0].shape[1]
    beta = np.zeros(K)

    same_shape = all(x.shape == design[0].shape for x in design)
    if same_shape:
        # batched path: one (N, A, K) tensor instead of a Python loop
        stacked = np.stack(design)
        chosen_idx = np.asarray(chosen)
        obs = np.arange(len(design))
        x_chosen = stacked[obs, chosen_idx]

        def _weights(b):
            z = stacked @ b
            z -= z.max(axis=1, keepdims=True)
            w = np.exp(z)
            w /= w.sum(axis=1, keepdims=True)
            return z, w

        def loglik(b):
            z, w = _weights(b)
            return float((z[obs, chosen_idx] - np.log(np.exp(z).sum(axis=1))).sum())

        def grad_hess(b):
            _, w = _weights(b)
            xbar = np.einsum("na,nak->nk", w, stacked)
            g = (x_chosen - xbar).sum(axis=0)
            h = -(np.einsum("na,nak,nam->km", w, stacked, stacked)
                  - np.einsum("nk,nm->km", xbar, xbar))
            return g, h
    else:
        def loglik(b):
            total = 0.0
            for X, c in zip(design, chosen):
                z = X @ b
                z -= z.max()
                total += z[c] - math.log(np.exp(z).sum())
            return total

        def grad_hess(b):
            g = np.zeros(K)
            h = np.zeros((K, K))
            for X, c in zip(design, chosen):
                z = X @ b
                z -= z.max()
                w = np.exp(z)
                w /= w.sum()
                xbar = w @ X
                g += X[c] - xbar
                h -= (X * w[:, None]).T @ X - np.outer(xbar, xbar)
            return g, h

    ll = loglik(beta)
    ll_zero = ll
    converged = False
    separation = False
    it = 0
    for it in range(1, max_iter + 1):
        g, h = grad_hess(beta)
        if np.abs(g).max() <= tol:
            converged = True
            break
        try:
            step = np.linalg.solve(h, -g)
        except np.linalg.LinAlgError:
            break
        # Newton decrement: expected log-likelihood gain from a full step
        decrement = float(g @ step)
        if 0 <= decrement <= 2e-9 * max(1.0, abs(ll)):
            converged = True
            break
        t = 1.0
        improved = False
        for _ in range(40):
            cand = beta + t * step
            cand_ll = loglik(cand)
            if cand_ll > ll:
                beta, ll = cand, cand_ll
                improved = True
                break
            t *= 0.5
        if not improved:
            converged = decrement <= 1e-6 * max(1.0, abs(ll))
            break
        if np.abs(beta).max() > _SEPARATION_CAP:
            separation = True
            beta = np.clip(beta, -_SEPARATION_CAP, _SEPARATION_CAP)
            ll = loglik(beta)
            break
    _, h = grad_hess(beta)
    try:
        cov = np.linalg.inv(-h)
        se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        se = np.full(K, np.nan)
    return CLogitFit(beta=beta, se=se, log_likelihood=float(ll), ll_at_zero=float(ll_zero),
                     iterations=it, converged=converged, separation_flagged=separation,
                     covariates=tuple(f"x{k}" for k in range(K)))


def conditional_logit(rows: Sequence[LogRow], period_interaction: bool = False,
                      round_dummies: bool = False) -> CLogitFit:
    """Conditional logit of bid choice on the bid's expected payoff over the
    full bid domain per subject-period.

    Optional covariates: payoff x period interaction and round-number
    dummies (divisible by 5, 10, 50).  Standard errors are plain
    observed-information values, not clustered.
    """
    fields = _fields_by_period(rows)
    names = ["expected_payoff"]
    if period_interaction:
        names.append("expected_payoff_x_period")
    if round_dummies:
        names += ["div5", "div10", "div50"]
    design = []
    chosen = []
    for r in rows:
        field = fields[(r.session_id, r.period)].of(r.role)
        n = len(field)
        cols = [field]
        if period_interaction:
            cols.append(field * r.period)
        if round_dummies:
            b = np.arange(n)
            cols += [(b % 5 == 0).astype(float), (b % 10 == 0).astype(float),
                     (b % 50 == 0).astype(float)]
        design.append(np.column_stack(cols))
        chosen.append(r.bid)
    fit = fit_conditional_logit(design, chosen)
    return CLogitFit(beta=fit.beta, se=fit.se, log_likelihood=fit.log_likelihood,
                     ll_at_zero=fit.ll_at_zero, iterations=fit.iterations,
                     converged=fit.converged, separation_flagged=fit.separation_flagged,
                     covariates=tuple(names))


def fit_report_lines(fit: CLogitFit):
    lines = []
    for name, b, s in zip(fit.covariates, fit.beta, fit.se):
        lines.append(f"beta[{name}]={b:.6g}")
        lines.append(f"se[{name}]={s:.6g}")
    lines.append(f"log_likelihood={fit.log_likelihood:.6f}")
    lines.append(f"ll_at_zero={fit.ll_at_zero:.6f}")
    lines.append(f"iterations={fit.iterations}")
    lines.append(f"converged={fit.converged}")
    lines.append(f"separation_flagged={fit.separation_flagged}")
    return lines


@dataclass(frozen=True)
class PermutationTestResult:
    p_value: float
    n_units: int
    n_consistent: int
    exact: bool
    space: int


def permutation_test(unit_values: Sequence[dict], hypothesis: Sequence[str],
                     seed: int = 0, mc_draws: int = 100_000,
                     exact_cap: int = 1_000_000) -> PermutationTestResult:
    """Probability of seeing at least as many units consistent with the
    hypothesized strict ordering when each unit's labels are permuted
    uniformly.

    Exact (distribution of the consistency count by dynamic programming)
    when the product permutation space is within exact_cap; seeded Monte
    Carlo otherwise.
    """
    hypothesis = list(hypothesis)
    k = len(hypothesis)
    n_perms = math.factorial(k)

    def consistent(values_in_order) -> bool:
        return all(a < b for a, b in zip(values_in_order, values_in_order[1:]))

    import itertools
    probs = []
    observed = 0
    for unit in unit_values:
        vals = [unit[label] for label in hypothesis]
        observed += consistent(vals)
        m = sum(consistent(perm) for perm in itertools.permutations(vals))
        probs.append(m / n_perms)

    n = len(unit_values)
    space = n_perms ** n if n else 1
    if space <= exact_cap:
        # exact tail of the consistency-count distribution
        dist = np.zeros(n + 1)
        dist[0] = 1.0
        for q in probs:
            nxt = np.zeros(n + 1)
            nxt[1:] += dist[:-1] * q
            nxt += dist * (1 - q)
            dist = nxt
        p = float(dist[observed:].sum())
        return PermutationTestResult(p_value=p, n_units=n, n_consistent=observed,
                                     exact=True, space=space)
    rng = np.random.default_rng(seed)
    draws = (rng.random((mc_draws, n)) < np.array(probs)).sum(axis=1)
    p = float((draws >= observed).mean())
    return PermutationTestResult(p_value=p, n_units=n, n_consistent=observed,
                                 exact=False, space=space)
