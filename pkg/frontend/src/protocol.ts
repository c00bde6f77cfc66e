/** Wire protocol shared with the session service.
 *
 * Every payload is a JSON object with a "kind" tag.  Exact amounts arrive as
 * canonical strings ("145", "17.5", "1/3"); the client renders them verbatim
 * and never does payoff arithmetic of its own.
 */

export type Phase = "waiting" | "bidding" | "reviewing" | "feedback" | "paid";

export interface TableRow {
  case: "below" | "equal" | "above";
  possible: boolean;
  you_get_item_b?: boolean;
  transfer_lo?: string;
  transfer_hi?: string;
  transfer_exact?: boolean;
  points_lo?: string;
  points_hi?: string;
}

export interface Hypothetical {
  guess: number;
  winner_role: string;
  you_get_item_b: boolean;
  transfer: string;
  your_points: string;
  other_points: string;
}

export interface FeedbackInfo {
  period: number;
  your_role: string;
  your_bid: number;
  other_bid: number;
  you_got_item_b: boolean;
  transfer: string;
  your_points: string;
  efficient: boolean;
}

export interface StateMessage {
  kind: "state";
  session_id: string;
  subject: number;
  phase: Phase;
  period: number;
  item_a?: number;
  item_b_own?: number;
  item_b_other?: number;
  bid_cap?: number;
  pending_bid?: number | null;
  revisions?: number;
  feedback?: FeedbackInfo | null;
  table?: TableRow[];
  hypothetical?: Hypothetical;
  paid_period?: number;
  points_paid_period?: string;
  cash?: string;
}

export interface FeedbackMessage extends FeedbackInfo {
  kind: "feedback";
}

export interface ErrorMessage {
  kind: "error";
  message: string;
}

export type ServerMessage = StateMessage | FeedbackMessage | ErrorMessage;

export type ClientMessage =
  | { kind: "join" }
  | { kind: "submit_bid"; bid: number; guess?: number }
  | { kind: "hypothesize"; guess: number }
  | { kind: "confirm" }
  | { kind: "revise" };

export interface AdminConfig {
  auction: "wb" | "ab" | "lb";
  session_type: 1 | 2 | 3 | 4;
  n_subjects: number;
  rng_seed: number;
  periods?: number;
  session_id?: string;
  human_seats?: number[];
  timeout_s?: number | null;
}

export interface AdminStatus {
  kind: "admin_status";
  session_id: string;
  seats?: Record<string, string>;
  started?: boolean;
  period?: number;
  periods?: number;
  finished?: boolean;
  paid_period?: number | null;
  bots?: number[];
  connected?: number[];
  ok?: boolean;
}

export function parseServerMessage(text: string): ServerMessage {
  const data = JSON.parse(text);
  if (typeof data !== "object" || data === null || typeof data.kind !== "string") {
    throw new Error("malformed server message");
  }
  return data as ServerMessage;
}
