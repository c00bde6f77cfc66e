/** Browser bootstrap: joins a seat over the native WebSocket and renders the
 * screen model into the page; also hosts the admin dashboard panel. */

import { AdminClient } from "./admin.js";
import { ParticipantClient } from "./client.js";
import { Screen } from "./render.js";

function el<K extends keyof HTMLElementTagNameMap>(tag: K, text?: string, cls?: string) {
  const node = document.createElement(tag);
  if (text !== undefined) node.textContent = text;
  if (cls) node.className = cls;
  return node;
}

function drawScreen(root: HTMLElement, screen: Screen, client: ParticipantClient) {
  root.replaceChildren();
  root.appendChild(el("h2", `· ${screen.name} ·`));
  for (const err of screen.errors) root.appendChild(el("p", err, "error"));
  const dl = el("dl");
  for (const line of screen.lines) {
    dl.appendChild(el("dt", line.label));
    dl.appendChild(el("dd", line.value));
  }
  root.appendChild(dl);

  if (screen.table) {
    const table = el("table");
    for (const [i, cells] of screen.table.entries()) {
      const tr = el("tr");
      for (const cell of cells) tr.appendChild(el(i === 0 ? "th" : "td", cell));
      table.appendChild(tr);
    }
    root.appendChild(table);
  }

  if (screen.name === "bidding") {
    const bid = el("input") as HTMLInputElement;
    bid.placeholder = "bid";
    bid.value = client.state.bidDraft;
    const guess = el("input") as HTMLInputElement;
    guess.placeholder = "guess (optional)";
    guess.value = client.state.guessDraft;
    const go = el("button", "Submit bid") as HTMLButtonElement;
    go.onclick = () => {
      client.state.bidDraft = bid.value;
      client.state.guessDraft = guess.value;
      const err = client.submitBid(bid.value, guess.value);
      if (err) root.appendChild(el("p", err, "error"));
    };
    root.append(bid, guess, go);
  }
  if (screen.name === "reviewing") {
    const confirm = el("button", "Confirm bid") as HTMLButtonElement;
    confirm.onclick = () => client.confirm();
    const revise = el("button", "Choose alternate bid") as HTMLButtonElement;
    revise.onclick = () => client.revise();
    const guess = el("input") as HTMLInputElement;
    guess.placeholder = "guess the other bid";
    const hypo = el("button", "Show outcome for guess") as HTMLButtonElement;
    hypo.onclick = () => {
      const err = client.hypothesize(guess.value);
      if (err) root.appendChild(el("p", err, "error"));
    };
    root.append(confirm, revise, guess, hypo);
  }
}

function startParticipant() {
  const root = document.getElementById("participant")!;
  const form = el("div");
  const session = el("input") as HTMLInputElement;
  session.placeholder = "session id";
  const token = el("input") as HTMLInputElement;
  token.placeholder = "seat token";
  const join = el("button", "Join seat") as HTMLButtonElement;
  form.append(session, token, join);
  root.appendChild(form);
  const screenRoot = el("div");
  root.appendChild(screenRoot);

  join.onclick = () => {
    const proto = location.protocol === "https:" ? "wss" : "ws";
    const socket = new WebSocket(
      `${proto}://${location.host}/ws?session=${encodeURIComponent(session.value)}&token=${encodeURIComponent(token.value)}`,
    );
    const client = new ParticipantClient((text) => socket.send(text));
    client.onScreen = (screen) => drawScreen(screenRoot, screen, client);
    socket.onmessage = (ev) => client.handleMessage(String(ev.data));
    socket.onclose = () => screenRoot.appendChild(el("p", "disconnected; rejoin to resync", "error"));
  };
}

function startAdmin() {
  const root = document.getElementById("admin")!;
  const admin = new AdminClient("");
  const out = el("pre");
  const show = (x: unknown) => { out.textContent = typeof x === "string" ? x : JSON.stringify(x, null, 2); };

  const auction = el("input") as HTMLInputElement;
  auction.value = "wb";
  const type = el("input") as HTMLInputElement;
  type.value = "4";
  const seats = el("input") as HTMLInputElement;
  seats.value = "18";
  const seed = el("input") as HTMLInputElement;
  seed.value = "1";
  const humans = el("input") as HTMLInputElement;
  humans.placeholder = "human seats e.g. 1";
  const create = el("button", "Create session") as HTMLButtonElement;
  const start = el("button", "Start") as HTMLButtonElement;
  const status = el("button", "Status") as HTMLButtonElement;
  const exportBtn = el("button", "Export CSV") as HTMLButtonElement;
  const sid = el("input") as HTMLInputElement;
  sid.placeholder = "session id";

  create.onclick = async () => {
    try {
      const human_seats = humans.value.trim() ? humans.value.split(",").map(Number) : [];
      const created = await admin.createSession({
        auction: auction.value as "wb" | "ab" | "lb",
        session_type: Number(type.value) as 1 | 2 | 3 | 4,
        n_subjects: Number(seats.value),
        rng_seed: Number(seed.value),
        human_seats,
      });
      sid.value = created.session_id;
      const bots: Record<string, string> = {};
      for (const s of Object.keys(created.seats ?? {})) {
        if (!human_seats.includes(Number(s))) bots[s] = "uniform";
      }
      await admin.seatBots(created.session_id, bots);
      show(created);
    } catch (err) {
      show(String(err));
    }
  };
  start.onclick = () => admin.start(sid.value).then(show, (e) => show(String(e)));
  status.onclick = () => admin.status(sid.value).then(show, (e) => show(String(e)));
  exportBtn.onclick = () => admin.exportCsv(sid.value).then(show, (e) => show(String(e)));

  root.append(auction, type, seats, seed, humans, create, sid, start, status, exportBtn, out);
}

if (typeof document !== "undefined") {
  startParticipant();
  startAdmin();
}
