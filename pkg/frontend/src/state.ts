/** Client view state: a pure reducer over server messages.
 *
 * The client is a dumb terminal for the session: all transitions are driven
 * by server messages, there is no optimistic UI, and every number kept here
 * is a verbatim server field.  Input drafts (bid and guess text boxes) are
 * the only locally-owned values and they never enter the rendered outcome
 * numbers.
 */

import {
  FeedbackInfo,
  Hypothetical,
  Phase,
  ServerMessage,
  StateMessage,
  TableRow,
} from "./protocol.js";

export interface TranscriptEntry {
  bid: number;
  hypothetical: Hypothetical | null;
}

export interface ViewState {
  phase: Phase;
  period: number;
  itemA: number | null;
  itemBOwn: number | null;
  itemBOther: number | null;
  bidCap: number | null;
  pendingBid: number | null;
  revisions: number;
  table: TableRow[] | null;
  hypothetical: Hypothetical | null;
  transcript: TranscriptEntry[];
  lastFeedback: FeedbackInfo | null;
  history: FeedbackInfo[];
  paidPeriod: number | null;
  pointsPaidPeriod: string | null;
  cash: string | null;
  errors: string[];
  bidDraft: string;
  guessDraft: string;
}

export function initialViewState(): ViewState {
  return {
    phase: "waiting",
    period: 0,
    itemA: null,
    itemBOwn: null,
    itemBOther: null,
    bidCap: null,
    pendingBid: null,
    revisions: 0,
    table: null,
    hypothetical: null,
    transcript: [],
    lastFeedback: null,
    history: [],
    paidPeriod: null,
    pointsPaidPeriod: null,
    cash: null,
    errors: [],
    bidDraft: "",
    guessDraft: "",
  };
}

function applyState(state: ViewState, msg: StateMessage): ViewState {
  const next: ViewState = { ...state, errors: [] };
  if (msg.period !== state.period) {
    next.transcript = [];
    next.table = null;
    next.hypothetical = null;
    next.bidDraft = "";
    next.guessDraft = "";
  }
  next.phase = msg.phase;
  next.period = msg.period;
  next.itemA = msg.item_a ?? next.itemA;
  next.itemBOwn = msg.item_b_own ?? next.itemBOwn;
  next.itemBOther = msg.item_b_other ?? next.itemBOther;
  next.bidCap = msg.bid_cap ?? next.bidCap;
  next.revisions = msg.revisions ?? next.revisions;
  next.pendingBid = msg.pending_bid ?? null;
  if (msg.feedback) {
    next.lastFeedback = msg.feedback;
  }
  if (msg.phase === "reviewing") {
    next.table = msg.table ?? next.table;
    next.hypothetical = msg.hypothetical ?? null;
    const head = next.transcript[next.transcript.length - 1];
    if (msg.pending_bid != null && (!head || head.bid !== msg.pending_bid)) {
      next.transcript = [...next.transcript, { bid: msg.pending_bid, hypothetical: next.hypothetical }];
    } else if (head && next.hypothetical && head.hypothetical !== next.hypothetical) {
      const updated = { ...head, hypothetical: next.hypothetical };
      next.transcript = [...next.transcript.slice(0, -1), updated];
    }
  } else if (msg.phase === "bidding") {
    next.table = null;
    next.hypothetical = null;
  }
  if (msg.phase === "paid") {
    next.paidPeriod = msg.paid_period ?? null;
    next.pointsPaidPeriod = msg.points_paid_period ?? null;
    next.cash = msg.cash ?? null;
  }
  return next;
}

export function reduce(state: ViewState, msg: ServerMessage): ViewState {
  switch (msg.kind) {
    case "state":
      return applyState(state, msg);
    case "feedback": {
      const { kind: _kind, ...info } = msg;
      return { ...state, lastFeedback: info, history: [...state.history, info] };
    }
    case "error":
      return { ...state, errors: [...state.errors, msg.message] };
    default:
      return state;
  }
}

/** Integer-only bid entry with domain hinting; the server re-validates. */
export function validateBidText(text: string, bidCap: number | null): { ok: boolean; value?: number; error?: string } {
  if (!/^\d+$/.test(text.trim())) {
    return { ok: false, error: "bid must be a whole number" };
  }
  const value = Number(text.trim());
  if (!Number.isSafeInteger(value)) {
    return { ok: false, error: "bid must be a whole number" };
  }
  if (bidCap !== null && (value < 0 || value > bidCap)) {
    return { ok: false, error: `bid must be between 0 and ${bidCap}` };
  }
  return { ok: true, value };
}
