/** Screen models: plain label/value lines built verbatim from server fields.
 *
 * Rendering is a projection, never a computation: a value cell is either a
 * server string copied as-is or String() of a server JSON number.  Tests
 * check this provenance mechanically, which is what guarantees the display
 * always agrees with the engine.
 */

import { Hypothetical, TableRow } from "./protocol.js";
import { ViewState } from "./state.js";

export interface ScreenLine {
  label: string;
  value: string;
}

export interface Screen {
  name: "waiting" | "bidding" | "reviewing" | "feedback" | "paid";
  lines: ScreenLine[];
  table: string[][] | null;
  actions: string[];
  errors: string[];
}

const TABLE_HEADER = ["other bid is", "item B goes to", "transfer", "your points"];

function rangeText(lo?: string, hi?: string, exact?: boolean): string {
  if (lo === undefined || hi === undefined) return "-";
  return exact ? lo : `${lo} to ${hi}`;
}

export function tableRowCells(row: TableRow): string[] {
  if (!row.possible) {
    return [row.case, "-", "-", "-"];
  }
  return [
    row.case,
    row.you_get_item_b ? "you" : "other",
    rangeText(row.transfer_lo, row.transfer_hi, row.transfer_exact),
    rangeText(row.points_lo, row.points_hi, row.points_lo === row.points_hi),
  ];
}

function valuationLines(state: ViewState): ScreenLine[] {
  const lines: ScreenLine[] = [{ label: "period", value: String(state.period) }];
  if (state.itemA !== null) lines.push({ label: "your item A value", value: String(state.itemA) });
  if (state.itemBOwn !== null) lines.push({ label: "your item B value", value: String(state.itemBOwn) });
  if (state.itemBOther !== null) lines.push({ label: "other's item B value", value: String(state.itemBOther) });
  if (state.bidCap !== null) lines.push({ label: "bids allowed", value: `0 to ${state.bidCap}` });
  return lines;
}

function hypotheticalLines(h: Hypothetical): ScreenLine[] {
  return [
    { label: "if the other bid", value: String(h.guess) },
    { label: "item B would go to", value: h.you_get_item_b ? "you" : "other" },
    { label: "transfer would be", value: h.transfer },
    { label: "your points would be", value: h.your_points },
    { label: "other's points would be", value: h.other_points },
  ];
}

function feedbackLines(state: ViewState): ScreenLine[] {
  const fb = state.lastFeedback;
  if (!fb) return [];
  return [
    { label: "feedback period", value: String(fb.period) },
    { label: "your bid", value: String(fb.your_bid) },
    { label: "other's bid", value: String(fb.other_bid) },
    { label: "item B went to", value: fb.you_got_item_b ? "you" : "other" },
    { label: "transfer", value: fb.transfer },
    { label: "your points", value: fb.your_points },
  ];
}

export function render(state: ViewState): Screen {
  const errors = [...state.errors];
  if (state.phase === "paid") {
    const lines: ScreenLine[] = [];
    if (state.paidPeriod !== null) lines.push({ label: "paid period", value: String(state.paidPeriod) });
    if (state.pointsPaidPeriod !== null) lines.push({ label: "points that period", value: state.pointsPaidPeriod });
    if (state.cash !== null) lines.push({ label: "cash earned", value: `$${state.cash}` });
    lines.push(...feedbackLines(state));
    return { name: "paid", lines, table: null, actions: [], errors };
  }
  if (state.phase === "reviewing") {
    const lines = valuationLines(state);
    if (state.pendingBid !== null) lines.push({ label: "your bid", value: String(state.pendingBid) });
    lines.push({ label: "revisions so far", value: String(state.revisions) });
    if (state.hypothetical) lines.push(...hypotheticalLines(state.hypothetical));
    const table = [TABLE_HEADER, ...(state.table ?? []).map(tableRowCells)];
    return { name: "reviewing", lines, table, actions: ["confirm", "choose alternate bid", "try a guess"], errors };
  }
  if (state.phase === "bidding") {
    const lines = valuationLines(state);
    lines.push({ label: "revisions so far", value: String(state.revisions) });
    for (const [i, entry] of state.transcript.entries()) {
      lines.push({ label: `earlier bid ${i + 1}`, value: String(entry.bid) });
    }
    lines.push(...feedbackLines(state));
    return { name: "bidding", lines, table: null, actions: ["submit bid (guess optional)"], errors };
  }
  if (state.phase === "feedback") {
    return { name: "feedback", lines: feedbackLines(state), table: null, actions: [], errors };
  }
  return { name: "waiting", lines: [{ label: "period", value: String(state.period) }], table: null, actions: [], errors };
}
