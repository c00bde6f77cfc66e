/** Participant client: one event loop, transport-agnostic.
 *
 * The host (browser bootstrap or test harness) owns the socket and feeds
 * incoming text to handleMessage; the client sends protocol messages through
 * the injected sender.  Client-side validation covers only input shape
 * (integers within the advertised domain) for latency; the server remains
 * authoritative and its errors surface inline.
 */

import { ClientMessage, parseServerMessage, ServerMessage } from "./protocol.js";
import { initialViewState, reduce, validateBidText, ViewState } from "./state.js";
import { render, Screen } from "./render.js";

export class ParticipantClient {
  state: ViewState = initialViewState();
  received: ServerMessage[] = [];
  screens: Screen[] = [];
  onScreen: ((screen: Screen, state: ViewState) => void) | null = null;

  constructor(private sendText: (text: string) => void) {}

  handleMessage(text: string): void {
    let msg: ServerMessage;
    try {
      msg = parseServerMessage(text);
    } catch {
      return;
    }
    this.received.push(msg);
    this.state = reduce(this.state, msg);
    const screen = render(this.state);
    this.screens.push(screen);
    if (this.onScreen) this.onScreen(screen, this.state);
  }

  private send(msg: ClientMessage): void {
    this.sendText(JSON.stringify(msg));
  }

  join(): void {
    this.send({ kind: "join" });
  }

  /** Validate and submit the bid draft; returns a local error or null. */
  submitBid(bidText: string, guessText?: string): string | null {
    const bid = validateBidText(bidText, this.state.bidCap);
    if (!bid.ok) return bid.error ?? "invalid bid";
    let guess: number | undefined;
    if (guessText !== undefined && guessText.trim() !== "") {
      const g = validateBidText(guessText, this.state.bidCap);
      if (!g.ok) return g.error ?? "invalid guess";
      guess = g.value;
    }
    this.send(guess === undefined ? { kind: "submit_bid", bid: bid.value! }
                                  : { kind: "submit_bid", bid: bid.value!, guess });
    return null;
  }

  hypothesize(guessText: string): string | null {
    const g = validateBidText(guessText, this.state.bidCap);
    if (!g.ok) return g.error ?? "invalid guess";
    this.send({ kind: "hypothesize", guess: g.value! });
    return null;
  }

  confirm(): void {
    this.send({ kind: "confirm" });
  }

  revise(): void {
    this.send({ kind: "revise" });
  }

  /** Await a state predicate; test convenience, resolution driven purely by
   * incoming messages. */
  waitFor(predicate: (state: ViewState) => boolean, timeoutMs = 10_000): Promise<ViewState> {
    if (predicate(this.state)) return Promise.resolve(this.state);
    return new Promise((resolve, reject) => {
      const prev = this.onScreen;
      const timer = setTimeout(() => {
        this.onScreen = prev;
        reject(new Error(`timed out waiting for state (phase=${this.state.phase}, period=${this.state.period})`));
      }, timeoutMs);
      this.onScreen = (screen, state) => {
        if (prev) prev(screen, state);
        if (predicate(state)) {
          clearTimeout(timer);
          this.onScreen = prev;
          resolve(state);
        }
      };
    });
  }
}
