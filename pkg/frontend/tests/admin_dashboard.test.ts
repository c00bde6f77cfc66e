/** Admin dashboard flows: create/seat/start, progress, export, validation. */

import assert from "node:assert/strict";
import { after, before, test } from "node:test";

import { AdminError } from "../src/admin.js";
import { connectSeat, startService, Service } from "./harness.js";

let service: Service;

before(async () => {
  service = await startService();
});

after(async () => {
  await service.stop();
});

test("all-bot session auto-runs to completion and exports", async () => {
  const created = await service.admin.createSession({
    auction: "lb", session_type: 3, n_subjects: 20, rng_seed: 11, periods: 40,
    session_id: "dash-bots",
  });
  assert.equal(Object.keys(created.seats!).length, 20);
  const bots: Record<string, string> = {};
  for (let s = 1; s <= 20; s++) bots[String(s)] = "uniform";
  await service.admin.seatBots("dash-bots", bots);
  await service.admin.start("dash-bots");
  const status = await service.admin.waitFinished("dash-bots");
  assert.equal(status.finished, true);
  assert.equal(status.periods, 40);
  assert.ok(status.paid_period! >= 1 && status.paid_period! <= 40);

  const csv = await service.admin.exportCsv("dash-bots");
  const lines = csv.trim().split("\n");
  assert.equal(lines[0].split(",")[0], "session_id");
  assert.equal(lines.length, 1 + 40 * 20);

  const events = await service.admin.exportEvents("dash-bots");
  assert.ok(events.includes('"kind":"session_ended"'));
});

test("invalid config surfaces an inline error", async () => {
  await assert.rejects(
    service.admin.createSession({
      auction: "wb", session_type: 4, n_subjects: 5, rng_seed: 1,  // odd seats
    }),
    (err: unknown) => err instanceof AdminError && /even/.test(String(err)),
  );
  await assert.rejects(
    service.admin.seatBots("no-such-session", { "1": "uniform" }),
    AdminError,
  );
});

test("status shows the period counter advancing in a live session", async () => {
  const created = await service.admin.createSession({
    auction: "ab", session_type: 2, n_subjects: 4, rng_seed: 3, periods: 6,
    session_id: "dash-live", human_seats: [1], timeout_s: null,
  });
  await service.admin.seatBots("dash-live", { "2": "uniform", "3": "uniform", "4": "uniform" });
  await service.admin.start("dash-live");
  const seat = await connectSeat(service, "dash-live", created.seats!["1"]);
  const first = await service.admin.status("dash-live");
  assert.equal(first.period, 1);
  assert.deepEqual(first.connected, [1]);

  for (const period of [1, 2, 3]) {
    await seat.client.waitFor((s) => s.phase === "bidding" && s.period === period);
    assert.equal(seat.client.submitBid("150"), null);
    await seat.client.waitFor((s) => s.phase === "reviewing");
    seat.client.confirm();
  }
  await seat.client.waitFor((s) => s.period === 4);
  const later = await service.admin.status("dash-live");
  assert.ok(later.period! > first.period!);
  await seat.close();
});
