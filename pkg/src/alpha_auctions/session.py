"""Experiment protocol engine: valuation schedules, random rematching, the
bid / what-if / confirm loop, feedback, logging, and random-period payment.

Subjects bid over two items: everyone values item A equally within a session
and the contested item B carries a (low, high) valuation pair.  The auction
runs on reduced net values v_i = (item B value) - (item A value); raw points
convert back as winner = own B value - transfer, loser = A value + transfer.

Sessions are driven either synchronously (`run_session` with bot or scripted
actors) or message-by-message through `LiveSession`, which the network
service wraps.  All randomness flows from one seed, so identical configs and
actor scripts replay byte-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .game import HV, LV, AuctionSpec, BidDomain, DomainError, ValuationPair, constants, exact_str, resolve
from .nash import best_response_set
from .qre import solve_qre

CASE_BELOW = "below"
CASE_EQUAL = "equal"
CASE_ABOVE = "above"

PHASE_BIDDING = "bidding"
PHASE_REVIEWING = "reviewing"
PHASE_FEEDBACK = "feedback"
PHASE_PAID = "paid"

AUCTION_ALPHAS = {"wb": Fraction(1), "ab": Fraction(1, 2), "lb": Fraction(0)}


class SessionError(ValueError):
    """Protocol misuse: wrong phase, unknown subject, malformed action."""


@dataclass(frozen=True)
class PeriodValuation:
    """Raw valuations in force for one period."""

    item_a: int
    item_b_low: int
    item_b_high: int

    @property
    def bid_cap(self) -> int:
        return self.item_b_high

    def reduced(self, alpha: Fraction, gamma: Fraction = Fraction(1)) -> AuctionSpec:
        return AuctionSpec(
            alpha,
            ValuationPair(self.item_b_low - self.item_a, self.item_b_high - self.item_a),
            BidDomain(self.bid_cap),
            gamma,
        )

    def b_value(self, role: str) -> int:
        return self.item_b_high if role == HV else self.item_b_low


# Valuation structures by session type: (item A, first-half B pair,
# second-half B pair).  Types 3 and 4 keep one pair throughout.
_TYPE_TABLE = {
    1: (100, (120, 160), (120, 320)),
    2: (50, (250, 290), (250, 450)),
    3: (50, (250, 450), (250, 450)),
    4: (50, (250, 290), (250, 290)),
}

# structure labels for analytics grouping, first half / second half
_TYPE_LABELS = {1: ("1A", "1B"), 2: ("2A", "2B"), 3: ("3", "3"), 4: ("4", "4")}


def schedule_for_type(session_type: int, periods: int = 40):
    """Per-period valuations: types 1 and 2 switch halfway, 3 and 4 do not."""
    if session_type not in _TYPE_TABLE:
        raise SessionError(f"unknown session type {session_type}")
    item_a, first, second = _TYPE_TABLE[session_type]
    half = periods // 2
    out = []
    for period in range(1, periods + 1):
        low, high = first if period <= half else second
        out.append(PeriodValuation(item_a, low, high))
    return out


def structure_label(session_type: int, period: int, periods: int = 40) -> str:
    first, second = _TYPE_LABELS[session_type]
    return first if period <= periods // 2 else second


@dataclass(frozen=True)
class SessionConfig:
    auction: str                   # wb | ab | lb
    session_type: int
    n_subjects: int
    rng_seed: int
    periods: int = 40
    gamma: Fraction = Fraction(1)
    point_rate: Optional[Fraction] = None   # dollars per point
    show_up: Fraction = Fraction(5)
    session_id: Optional[str] = None

    def __post_init__(self):
        if self.auction not in AUCTION_ALPHAS:
            raise SessionError(f"unknown auction {self.auction!r}")
        if self.session_type not in _TYPE_TABLE:
            raise SessionError(f"unknown session type {self.session_type}")
        if self.n_subjects < 4 or self.n_subjects % 2:
            raise SessionError("n_subjects must be an even integer >= 4")
        if self.periods < 1:
            raise SessionError("periods must be positive")
        if self.point_rate is None:
            rate = Fraction(13, 100) if self.session_type == 1 else Fraction(10, 100)
            object.__setattr__(self, "point_rate", rate)
        if self.session_id is None:
            object.__setattr__(
                self, "session_id",
                f"{self.auction}-t{self.session_type}-n{self.n_subjects}-s{self.rng_seed}",
            )

    @property
    def alpha(self) -> Fraction:
        return AUCTION_ALPHAS[self.auction]


def rematch(subject_ids: Sequence[int], rng: np.random.Generator):
    """Uniform random perfect matching with a fair-coin role draw per pair.

    Returns a list of (hv_subject, lv_subject) tuples.
    """
    ids = list(subject_ids)
    if len(ids) % 2:
        raise SessionError("need an even number of subjects")
    order = [ids[i] for i in rng.permutation(len(ids))]
    pairs = []
    for k in range(0, len(order), 2):
        a, b = order[k], order[k + 1]
        if rng.integers(2):
            a, b = b, a
        pairs.append((a, b))  # (hv, lv)
    return pairs


@dataclass(frozen=True)
class WhatIfRow:
    """One row of the three-case table: what happens if the opponent bids
    below, equal to, or above the submitted bid."""

    case: str
    possible: bool
    you_get_item_b: Optional[bool] = None
    transfer_lo: Optional[Fraction] = None
    transfer_hi: Optional[Fraction] = None
    points_lo: Optional[Fraction] = None
    points_hi: Optional[Fraction] = None

    @property
    def transfer_exact(self) -> bool:
        return self.possible and self.transfer_lo == self.transfer_hi


def what_if_table(spec: AuctionSpec, role: str, own_bid: int, valuation: PeriodValuation):
    """The three-case summary shown after a bid is submitted.

    Transfers are exact when determined (extreme-price cases and ties) and
    inclusive ranges when they depend on the unknown opposing bid.
    """
    if own_bid not in spec.bids:
        raise DomainError(f"bid {own_bid} outside {{0,...,{spec.p_max}}}")
    alpha = spec.alpha
    own_b_value = valuation.b_value(role)
    rows = []

    if own_bid > 0:
        lo = alpha * own_bid                              # opponent at 0
        hi = alpha * own_bid + (1 - alpha) * (own_bid - 1)
        rows.append(WhatIfRow(CASE_BELOW, True, True, lo, hi,
                              own_b_value - hi, own_b_value - lo))
    else:
        rows.append(WhatIfRow(CASE_BELOW, False))

    wins_tie = role == HV if spec.gamma == 1 else (role == LV if spec.gamma == 0 else None)
    transfer = Fraction(own_bid)
    if wins_tie is None:
        raise DomainError("what-if table requires a deterministic tie rule (gamma 0 or 1)")
    tie_points = own_b_value - transfer if wins_tie else valuation.item_a + transfer
    rows.append(WhatIfRow(CASE_EQUAL, True, wins_tie, transfer, transfer, tie_points, tie_points))

    if own_bid < spec.p_max:
        lo = alpha * (own_bid + 1) + (1 - alpha) * own_bid
        hi = alpha * spec.p_max + (1 - alpha) * own_bid
        rows.append(WhatIfRow(CASE_ABOVE, True, False, lo, hi,
                              valuation.item_a + lo, valuation.item_a + hi))
    else:
        rows.append(WhatIfRow(CASE_ABOVE, False))
    return rows


def hypothesize(spec: AuctionSpec, role: str, own_bid: int, guessed_opponent_bid: int,
                valuation: PeriodValuation) -> dict:
    """Exact outcome, in raw points, if the opponent bid the guessed amount."""
    if own_bid not in spec.bids or guessed_opponent_bid not in spec.bids:
        raise DomainError("bid out of domain")
    bid_l, bid_h = (own_bid, guessed_opponent_bid) if role == LV else (guessed_opponent_bid, own_bid)
    out = resolve(spec, bid_l, bid_h)
    you_win = out.winner == role
    your_points = (valuation.b_value(role) - out.transfer) if you_win else (valuation.item_a + out.transfer)
    other_role = HV if role == LV else LV
    other_points = (valuation.item_a + out.transfer) if you_win else (valuation.b_value(other_role) - out.transfer)
    return {
        "winner_role": out.winner,
        "you_get_item_b": you_win,
        "transfer": out.transfer,
        "your_points": your_points,
        "other_points": other_points,
    }


@dataclass(frozen=True)
class SubjectOutcome:
    subject: int
    role: str
    bid: int
    revisions: int
    guesses: tuple
    raw_points: Fraction


@dataclass(frozen=True)
class PeriodRecord:
    period: int
    pair_id: int
    valuation: PeriodValuation
    hv_subject: int
    lv_subject: int
    outcomes: tuple            # (SubjectOutcome for hv, SubjectOutcome for lv)
    winner_role: str
    transfer: Fraction
    efficient: bool
    equilibrium_outcome: bool

    def outcome_of(self, subject: int) -> SubjectOutcome:
        for o in self.outcomes:
            if o.subject == subject:
                return o
        raise KeyError(subject)


def _resolve_pair(spec: AuctionSpec, valuation: PeriodValuation, period: int, pair_id: int,
                  hv_subject: int, lv_subject: int, bid_h: int, bid_l: int,
                  rev_h: int, rev_l: int, guesses_h: tuple, guesses_l: tuple) -> PeriodRecord:
    out = resolve(spec, bid_l, bid_h)
    cons = constants(spec)
    win_role = out.winner
    raw = {}
    for role, subject, bid in ((HV, hv_subject, bid_h), (LV, lv_subject, bid_l)):
        if role == win_role:
            raw[role] = valuation.b_value(role) - out.transfer
        else:
            raw[role] = valuation.item_a + out.transfer
    efficient = win_role == HV
    in_range = cons.c_l <= out.transfer <= cons.c_h
    return PeriodRecord(
        period=period,
        pair_id=pair_id,
        valuation=valuation,
        hv_subject=hv_subject,
        lv_subject=lv_subject,
        outcomes=(
            SubjectOutcome(hv_subject, HV, bid_h, rev_h, guesses_h, Fraction(raw[HV])),
            SubjectOutcome(lv_subject, LV, bid_l, rev_l, guesses_l, Fraction(raw[LV])),
        ),
        winner_role=win_role,
        transfer=out.transfer,
        efficient=efficient,
        equilibrium_outcome=efficient and in_range,
    )


class LiveSession:
    """One session as an explicit state machine.

    Mutations are single calls (submit_bid / hypothesize / revise / confirm)
    that never block on an actor, so a service can multiplex many sessions
    and feed human input as it arrives.  Events are appended in a fixed
    order with logical sequence numbers; no wall-clock state enters the log.
    """

    def __init__(self, config: SessionConfig):
        self.config = config
        self.schedule = schedule_for_type(config.session_type, config.periods)
        self.subjects = list(range(1, config.n_subjects + 1))
        seed_seq = np.random.SeedSequence(config.rng_seed)
        match_seed, pay_seed, actor_seed = seed_seq.spawn(3)
        self._match_rng = np.random.default_rng(match_seed)
        self._pay_rng = np.random.default_rng(pay_seed)
        self.actor_seed_root = actor_seed
        self.period = 0
        self.records: list = []
        self.events: list = []
        self.paid_period: Optional[int] = None
        self.payments: dict = {}
        self.finished = False
        self.aborted = False
        self._pairs = {}        # subject -> (pair_id, role, opponent)
        self._state = {}        # subject -> dict(phase, bid, guesses, revisions, transcript)
        self._emit("session_created", session_id=config.session_id, auction=config.auction,
                   session_type=config.session_type, n_subjects=config.n_subjects,
                   periods=config.periods, rng_seed=config.rng_seed,
                   point_rate=str(config.point_rate), show_up=str(config.show_up))

    # -- event log ---------------------------------------------------------

    def _emit(self, kind: str, **payload):
        self.events.append({"seq": len(self.events), "kind": kind, **payload})

    def event_lines(self):
        return [json.dumps(e, separators=(",", ":")) for e in self.events]

    # -- period flow -------------------------------------------------------

    @property
    def valuation(self) -> PeriodValuation:
        return self.schedule[self.period - 1]

    @property
    def spec(self) -> AuctionSpec:
        return self.valuation.reduced(self.config.alpha, self.config.gamma)

    def start(self):
        if self.period != 0:
            raise SessionError("session already started")
        self._begin_period(1)

    def _begin_period(self, period: int):
        self.period = period
        valuation = self.valuation
        self._emit("period_started", period=period, item_a=valuation.item_a,
                   item_b_low=valuation.item_b_low, item_b_high=valuation.item_b_high,
                   bid_cap=valuation.bid_cap)
        pairs = rematch(self.subjects, self._match_rng)
        self._pairs = {}
        self._state = {}
        matched = []
        for pair_id, (hv_subj, lv_subj) in enumerate(pairs, start=1):
            self._pairs[hv_subj] = (pair_id, HV, lv_subj)
            self._pairs[lv_subj] = (pair_id, LV, hv_subj)
            matched.append({"pair_id": pair_id, "hv": hv_subj, "lv": lv_subj})
            for subj in (hv_subj, lv_subj):
                self._state[subj] = {
                    "phase": PHASE_BIDDING, "bid": None, "guess": None,
                    "revisions": 0, "guesses": [], "transcript": [],
                }
        self._emit("matched", period=period, pairs=matched)

    def _require(self, subject: int, phase: str):
        if self.finished:
            raise SessionError("session finished")
        if subject not in self._state:
            raise SessionError(f"unknown subject {subject}")
        st = self._state[subject]
        if st["phase"] != phase:
            raise SessionError(f"subject {subject} is in phase {st['phase']}, expected {phase}")
        return st

    def submit_bid(self, subject: int, bid, guess=None) -> dict:
        """Enter a bid (and optionally a guess of the opponent's bid).

        Returns the review payload: the three-case table and, when a guess
        was supplied, the hypothetical outcome.  Non-integer bids are
        rejected, not coerced.
        """
        st = self._require(subject, PHASE_BIDDING)
        if isinstance(bid, bool) or not isinstance(bid, (int, np.integer)):
            raise DomainError(f"bid must be an integer, got {bid!r}")
        bid = int(bid)
        spec = self.spec
        if bid not in spec.bids:
            raise DomainError(f"bid out of range: {bid} not in {{0,...,{spec.p_max}}}")
        _, role, _ = self._pairs[subject]
        st["phase"] = PHASE_REVIEWING
        st["bid"] = bid
        st["guess"] = None
        self._emit("bid_submitted", period=self.period, subject=subject, bid=bid)
        payload = {"bid": bid, "table": what_if_table(spec, role, bid, self.valuation)}
        if guess is not None:
            payload["hypothetical"] = self.hypothesize(subject, guess)
        return payload

    def hypothesize(self, subject: int, guess) -> dict:
        """Show the exact outcome against a guessed opposing bid; allowed any
        time while reviewing, with every guess recorded."""
        st = self._require(subject, PHASE_REVIEWING)
        if isinstance(guess, bool) or not isinstance(guess, (int, np.integer)):
            raise DomainError(f"guess must be an integer, got {guess!r}")
        guess = int(guess)
        spec = self.spec
        if guess not in spec.bids:
            raise DomainError(f"guess out of range: {guess} not in {{0,...,{spec.p_max}}}")
        _, role, _ = self._pairs[subject]
        outcome = hypothesize(spec, role, st["bid"], guess, self.valuation)
        st["guess"] = guess
        st["guesses"].append(guess)
        self._emit("hypothesize", period=self.period, subject=subject, bid=st["bid"], guess=guess,
                   transfer=exact_str(outcome["transfer"]), your_points=exact_str(outcome["your_points"]))
        return outcome

    def revise(self, subject: int):
        """Abandon the pending bid and return to the bidding screen."""
        st = self._require(subject, PHASE_REVIEWING)
        st["transcript"].append((st["bid"], st["guess"]))
        st["revisions"] += 1
        st["bid"] = None
        st["guess"] = None
        st["phase"] = PHASE_BIDDING
        self._emit("revised", period=self.period, subject=subject)

    def confirm(self, subject: int):
        """Lock the pending bid; the period resolves once every subject in
        the session has confirmed."""
        st = self._require(subject, PHASE_REVIEWING)
        st["transcript"].append((st["bid"], st["guess"]))
        st["phase"] = "confirmed"
        self._emit("confirmed", period=self.period, subject=subject, bid=st["bid"])
        if all(s["phase"] == "confirmed" for s in self._state.values()):
            self._resolve_period()

    def auto_confirm_last(self, subject: int):
        """Timeout action: confirm the pending bid, or re-enter and confirm
        the last entered bid, falling back to the maximin bid."""
        if self.finished or subject not in self._state:
            return
        st = self._state[subject]
        if st["phase"] == PHASE_REVIEWING:
            self.confirm(subject)
            return
        if st["phase"] == PHASE_BIDDING:
            if st["transcript"]:
                last_bid = st["transcript"][-1][0]
            else:
                _, role, _ = self._pairs[subject]
                last_bid = constants(self.spec).nash_range[0 if role == LV else -1]
            self.submit_bid(subject, last_bid)
            self.confirm(subject)

    def _resolve_period(self):
        spec = self.spec
        seen = set()
        period_records = []
        for subject, (pair_id, role, opponent) in sorted(self._pairs.items()):
            if pair_id in seen:
                continue
            seen.add(pair_id)
            hv_subj = subject if role == HV else opponent
            lv_subj = opponent if role == HV else subject
            st_h, st_l = self._state[hv_subj], self._state[lv_subj]
            record = _resolve_pair(
                spec, self.valuation, self.period, pair_id, hv_subj, lv_subj,
                st_h["bid"], st_l["bid"], st_h["revisions"], st_l["revisions"],
                tuple(st_h["guesses"]), tuple(st_l["guesses"]),
            )
            period_records.append(record)
        self.records.extend(period_records)
        self._emit("period_resolved", period=self.period, outcomes=[
            {
                "pair_id": r.pair_id, "hv": r.hv_subject, "lv": r.lv_subject,
                "bid_hv": r.outcome_of(r.hv_subject).bid, "bid_lv": r.outcome_of(r.lv_subject).bid,
                "winner_role": r.winner_role, "transfer": exact_str(r.transfer),
                "points_hv": exact_str(r.outcome_of(r.hv_subject).raw_points),
                "points_lv": exact_str(r.outcome_of(r.lv_subject).raw_points),
                "efficient": int(r.efficient), "equilibrium_outcome": int(r.equilibrium_outcome),
            }
            for r in period_records
        ])
        if self.period < self.config.periods:
            self._begin_period(self.period + 1)
        else:
            self._finish()

    def _finish(self):
        self.paid_period = int(self._pay_rng.integers(1, self.config.periods + 1))
        for subject in self.subjects:
            points = Fraction(0)
            for record in self.records:
                if record.period == self.paid_period:
                    try:
                        points = record.outcome_of(subject).raw_points
                        break
                    except KeyError:
                        continue
            self.payments[subject] = points * self.config.point_rate + self.config.show_up
        self.finished = True
        self._emit("session_ended", paid_period=self.paid_period,
                   payments={str(s): exact_str(p) for s, p in sorted(self.payments.items())})

    # -- views -------------------------------------------------------------

    def feedback_for(self, subject: int, period: Optional[int] = None) -> Optional[dict]:
        """Both bids, the allocation, transfer, and own points for a resolved
        period (the latest by default)."""
        target = period if period is not None else (self.period if self.finished else self.period - 1)
        for record in self.records:
            if record.period != target:
                continue
            try:
                own = record.outcome_of(subject)
            except KeyError:
                continue
            other = next(o for o in record.outcomes if o.subject != subject)
            return {
                "period": record.period,
                "your_role": own.role,
                "your_bid": own.bid,
                "other_bid": other.bid,
                "you_got_item_b": record.winner_role == own.role,
                "transfer": record.transfer,
                "your_points": own.raw_points,
                "efficient": record.efficient,
            }
        return None

    def state_for(self, subject: int) -> dict:
        """Subject-visible view: never includes identities or the opponent's
        unconfirmed bid."""
        if subject not in set(self.subjects):
            raise SessionError(f"unknown subject {subject}")
        if self.finished:
            return {
                "phase": PHASE_PAID,
                "period": self.config.periods,
                "paid_period": self.paid_period,
                "points_paid_period": exact_str(self._paid_points(subject)),
                "cash": exact_str(self.payments[subject]),
                "feedback": self._fb_str(subject, self.paid_period),
            }
        if self.period == 0:
            return {"phase": "waiting", "period": 0}
        st = self._state.get(subject)
        _, role, _ = self._pairs[subject]
        valuation = self.valuation
        view = {
            "phase": st["phase"] if st["phase"] != "confirmed" else "waiting",
            "period": self.period,
            "item_a": valuation.item_a,
            "item_b_own": valuation.b_value(role),
            "item_b_other": valuation.b_value(HV if role == LV else LV),
            "bid_cap": valuation.bid_cap,
            "pending_bid": st["bid"],
            "revisions": st["revisions"],
            "feedback": self._fb_str(subject, self.period - 1),
        }
        return view

    def _paid_points(self, subject: int):
        for record in self.records:
            if record.period == self.paid_period:
                try:
                    return record.outcome_of(subject).raw_points
                except KeyError:
                    continue
        return Fraction(0)

    def _fb_str(self, subject, period):
        fb = self.feedback_for(subject, period) if period and period >= 1 else None
        if fb is None:
            return None
        return {k: (exact_str(v) if isinstance(v, Fraction) else v) for k, v in fb.items()}


# -- actors ----------------------------------------------------------------


@dataclass(frozen=True)
class BotPolicy:
    """Bid policy for a bot seat: uniform, qre(lam), empirical_best_response,
    or fixed(bid)."""

    kind: str
    lam: float = 0.0
    bid: int = 0

    @staticmethod
    def uniform() -> "BotPolicy":
        return BotPolicy("uniform")

    @staticmethod
    def qre(lam: float) -> "BotPolicy":
        return BotPolicy("qre", lam=lam)

    @staticmethod
    def empirical_best_response() -> "BotPolicy":
        return BotPolicy("empirical_best_response")

    @staticmethod
    def fixed(bid: int) -> "BotPolicy":
        return BotPolicy("fixed", bid=bid)

    @staticmethod
    def parse(text: str) -> "BotPolicy":
        text = text.strip().lower()
        if text == "uniform":
            return BotPolicy.uniform()
        if text in ("ebr", "empirical_best_response"):
            return BotPolicy.empirical_best_response()
        if text.startswith("qre:"):
            return BotPolicy.qre(float(text.split(":", 1)[1]))
        if text.startswith("fixed:"):
            return BotPolicy.fixed(int(text.split(":", 1)[1]))
        raise SessionError(f"unknown bot policy {text!r}")


_QRE_CACHE: dict = {}


def _qre_marginals(spec: AuctionSpec, lam: float):
    key = (spec, round(lam, 12))
    if key not in _QRE_CACHE:
        point = None
        prev = None
        steps = max(1, int(round(lam / 0.05)))
        for k in range(1, steps + 1):
            point = solve_qre(spec, lam * k / steps, init=prev)
            prev = point.profile
        _QRE_CACHE[key] = point.profile.arrays()
    return _QRE_CACHE[key]


class BotActor:
    """Confirms immediately; never hypothesizes."""

    def __init__(self, policy: BotPolicy, rng: np.random.Generator):
        self.policy = policy
        self.rng = rng
        self._history: dict = {}

    def choose_bid(self, spec: AuctionSpec, role: str, opponent_bids_last_period) -> int:
        cap = spec.p_max
        kind = self.policy.kind
        if kind == "fixed":
            return min(max(self.policy.bid, 0), cap)
        if kind == "uniform":
            return int(self.rng.integers(0, cap + 1))
        if kind == "qre":
            s_l, s_h = _qre_marginals(spec, self.policy.lam)
            sigma = s_l if role == LV else s_h
            return int(self.rng.choice(cap + 1, p=sigma))
        if kind == "empirical_best_response":
            if opponent_bids_last_period:
                weights = np.bincount(opponent_bids_last_period, minlength=cap + 1)
                sigma = tuple(Fraction(int(w), len(opponent_bids_last_period)) for w in weights)
            else:
                sigma = (Fraction(1, cap + 1),) * (cap + 1)
            return min(best_response_set(spec, role, sigma))
        raise SessionError(f"unknown bot policy kind {self.policy.kind!r}")


class ScriptedActor:
    """Plays back a fixed script of period actions.

    Each period entry is a list of (bid, guess_or_None) attempts: every
    attempt but the last is revised, the last is confirmed.
    """

    def __init__(self, script):
        self.script = list(script)

    def attempts_for(self, period: int):
        entry = self.script[(period - 1) % len(self.script)]
        return [(b, g) for b, g in entry]


def confirm_loop(session: LiveSession, subject: int, actor,
                 opponent_bids_last_period=None) -> tuple:
    """Drive one subject's bid / review / confirm loop with an actor.

    Leaves the subject in the reviewing state with the final bid pending
    (the caller confirms), and returns (final_bid, transcript) where the
    transcript lists every (bid, guess) attempt in order.
    """
    if isinstance(actor, ScriptedActor):
        attempts = actor.attempts_for(session.period)
        for i, (bid, guess) in enumerate(attempts):
            session.submit_bid(subject, bid, guess=guess)
            if i + 1 < len(attempts):
                session.revise(subject)
        return attempts[-1][0], list(attempts)
    _, role, _ = session._pairs[subject]
    final_bid = actor.choose_bid(session.spec, role, opponent_bids_last_period or [])
    session.submit_bid(subject, final_bid)
    return final_bid, [(final_bid, None)]


def run_session(config: SessionConfig, seats: dict) -> LiveSession:
    """Drive a full session synchronously.

    seats maps subject id -> BotPolicy | BotActor | ScriptedActor; every
    subject must be seated.  Returns the finished LiveSession.  An actor
    failure aborts the session, leaving the partial log flagged invalid.
    """
    session = LiveSession(config)
    missing = [s for s in session.subjects if s not in seats]
    if missing:
        raise SessionError(f"unseated subjects: {missing}")
    actors = {}
    children = session.actor_seed_root.spawn(len(session.subjects))
    for idx, subject in enumerate(session.subjects):
        actor = seats[subject]
        if isinstance(actor, BotPolicy):
            actor = BotActor(actor, np.random.default_rng(children[idx]))
        actors[subject] = actor

    opponent_bids_prev: dict = {HV: [], LV: []}
    session.start()
    try:
        while not session.finished:
            this_period_bids: dict = {HV: [], LV: []}
            for subject in session.subjects:
                _, role, _ = session._pairs[subject]
                opp_role = HV if role == LV else LV
                final_bid, _ = confirm_loop(session, subject, actors[subject],
                                            opponent_bids_prev[opp_role])
                this_period_bids[role].append(final_bid)
            for subject in session.subjects:
                session.confirm(subject)
            opponent_bids_prev = this_period_bids
    except Exception:
        session.aborted = True
        session._emit("session_aborted", period=session.period)
        raise
    return session


# -- canonical CSV ---------------------------------------------------------

SESSION_CSV_HEADER = [
    "session_id", "session_type", "auction_alpha", "period", "pair_id", "subject_id",
    "role", "item_a", "item_b_own", "item_b_other", "bid", "revisions", "opp_bid",
    "winner_role", "transfer", "raw_points", "efficient", "equilibrium_outcome",
]


def session_csv_lines(session: LiveSession):
    """Two rows per pair-period in the canonical field order."""
    cfg = session.config
    lines = [",".join(SESSION_CSV_HEADER)]
    for record in session.records:
        valuation = record.valuation
        for own in record.outcomes:
            other = next(o for o in record.outcomes if o.subject != own.subject)
            lines.append(",".join(str(x) for x in [
                cfg.session_id, cfg.session_type, cfg.alpha, record.period,
                record.pair_id, own.subject, own.role, valuation.item_a,
                valuation.b_value(own.role), valuation.b_value(other.role),
                own.bid, own.revisions, other.bid, record.winner_role,
                record.transfer, own.raw_points,
                int(record.efficient), int(record.equilibrium_outcome),
            ]))
    return lines


def write_session_csv(session: LiveSession, path):
    with open(path, "w") as fh:
        fh.write("\n".join(session_csv_lines(session)) + "\n")


def write_event_log(session: LiveSession, path):
    with open(path, "w") as fh:
        fh.write("\n".join(session.event_lines()) + "\n")
