/** Pure client logic: reducer transitions, input validation, rendering. */

import assert from "node:assert/strict";
import { test } from "node:test";

import { initialViewState, reduce, validateBidText } from "../src/state.js";
import { render, tableRowCells } from "../src/render.js";
import { ServerMessage, StateMessage, TableRow } from "../src/protocol.js";

const biddingState: StateMessage = {
  kind: "state", session_id: "s", subject: 1, phase: "bidding", period: 1,
  item_a: 100, item_b_own: 160, item_b_other: 120, bid_cap: 160,
  pending_bid: null, revisions: 0, feedback: null,
};

const table: TableRow[] = [
  { case: "below", possible: true, you_get_item_b: true, transfer_lo: "15", transfer_hi: "15", transfer_exact: true, points_lo: "145", points_hi: "145" },
  { case: "equal", possible: true, you_get_item_b: true, transfer_lo: "15", transfer_hi: "15", transfer_exact: true, points_lo: "145", points_hi: "145" },
  { case: "above", possible: true, you_get_item_b: false, transfer_lo: "16", transfer_hi: "160", transfer_exact: false, points_lo: "116", points_hi: "260" },
];

const reviewingState: StateMessage = {
  ...biddingState, phase: "reviewing", pending_bid: 15, table,
};

test("bidding to reviewing keeps valuations and shows the table", () => {
  let s = reduce(initialViewState(), biddingState);
  assert.equal(s.phase, "bidding");
  assert.equal(s.bidCap, 160);
  s = reduce(s, reviewingState);
  assert.equal(s.phase, "reviewing");
  assert.equal(s.pendingBid, 15);
  const screen = render(s);
  assert.ok(screen.table);
  assert.deepEqual(screen.table![1], ["below", "you", "15", "145"]);
  assert.deepEqual(screen.table![3], ["above", "other", "16 to 160", "116 to 260"]);
});

test("revise returns to bidding and retains the transcript", () => {
  let s = reduce(initialViewState(), biddingState);
  s = reduce(s, reviewingState);
  s = reduce(s, { ...biddingState, revisions: 1 });
  assert.equal(s.phase, "bidding");
  assert.equal(s.revisions, 1);
  assert.deepEqual(s.transcript.map((t) => t.bid), [15]);
  const screen = render(s);
  assert.ok(screen.lines.some((l) => l.label === "earlier bid 1" && l.value === "15"));
  s = reduce(s, { ...reviewingState, pending_bid: 25, revisions: 1 });
  assert.deepEqual(s.transcript.map((t) => t.bid), [15, 25]);
});

test("period change clears the transcript", () => {
  let s = reduce(initialViewState(), biddingState);
  s = reduce(s, reviewingState);
  s = reduce(s, { ...biddingState, period: 2 });
  assert.deepEqual(s.transcript, []);
});

test("errors accumulate and clear on the next state", () => {
  let s = reduce(initialViewState(), biddingState);
  s = reduce(s, { kind: "error", message: "bid out of range" });
  assert.deepEqual(render(s).errors, ["bid out of range"]);
  s = reduce(s, biddingState);
  assert.deepEqual(render(s).errors, []);
});

test("feedback messages append to the history verbatim", () => {
  let s = reduce(initialViewState(), biddingState);
  const fb: ServerMessage = {
    kind: "feedback", period: 1, your_role: "hv", your_bid: 25, other_bid: 10,
    you_got_item_b: true, transfer: "25", your_points: "135", efficient: true,
  };
  s = reduce(s, fb);
  assert.equal(s.history.length, 1);
  assert.equal(s.lastFeedback!.your_points, "135");
});

test("paid screen renders the drawn period and cash", () => {
  let s = reduce(initialViewState(), biddingState);
  s = reduce(s, {
    kind: "state", session_id: "s", subject: 1, phase: "paid", period: 2,
    paid_period: 2, points_paid_period: "135", cash: "18.50",
  });
  const screen = render(s);
  assert.equal(screen.name, "paid");
  assert.ok(screen.lines.some((l) => l.value === "$18.50"));
  assert.ok(screen.lines.some((l) => l.value === "135"));
});

test("integer-only bid validation with domain hinting", () => {
  assert.equal(validateBidText("15", 160).ok, true);
  assert.equal(validateBidText("15.5", 160).ok, false);
  assert.equal(validateBidText("-3", 160).ok, false);
  assert.equal(validateBidText("aaa", 160).ok, false);
  assert.equal(validateBidText("161", 160).ok, false);
  assert.equal(validateBidText("161", null).ok, true); // no hint yet: server decides
});

test("impossible table rows render as dashes", () => {
  assert.deepEqual(tableRowCells({ case: "below", possible: false }), ["below", "-", "-", "-"]);
});
