/** Admin dashboard client: idempotent HTTP requests against the service. */

import { AdminConfig, AdminStatus } from "./protocol.js";

export class AdminError extends Error {}

export class AdminClient {
  constructor(private baseUrl: string,
              private fetchFn: typeof fetch = fetch.bind(globalThis)) {}

  private async post(path: string, body: unknown): Promise<any> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    const data = await resp.json();
    if (data.kind === "error") throw new AdminError(data.message);
    return data;
  }

  private async get(path: string): Promise<any> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    const type = resp.headers.get("content-type") ?? "";
    if (type.includes("application/json")) {
      const data = await resp.json();
      if (data.kind === "error") throw new AdminError(data.message);
      return data;
    }
    if (!resp.ok) throw new AdminError(`HTTP ${resp.status}`);
    return resp.text();
  }

  createSession(config: AdminConfig): Promise<AdminStatus> {
    return this.post("/admin/sessions", { kind: "admin_create", config });
  }

  seatBots(sessionId: string, seats: Record<string, string>): Promise<AdminStatus> {
    return this.post(`/admin/sessions/${sessionId}/bots`, { seats });
  }

  start(sessionId: string): Promise<AdminStatus> {
    return this.post(`/admin/sessions/${sessionId}/start`, {});
  }

  status(sessionId: string): Promise<AdminStatus> {
    return this.get(`/admin/sessions/${sessionId}`);
  }

  exportCsv(sessionId: string): Promise<string> {
    return this.get(`/admin/sessions/${sessionId}/export.csv`);
  }

  exportEvents(sessionId: string): Promise<string> {
    return this.get(`/admin/sessions/${sessionId}/events.jsonl`);
  }

  /** Poll status until the session finishes or the deadline passes. */
  async waitFinished(sessionId: string, timeoutMs = 30_000, intervalMs = 150): Promise<AdminStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.status(sessionId);
      if (status.finished) return status;
      if (Date.now() > deadline) throw new AdminError(`session ${sessionId} still running`);
      await new Promise((r) => setTimeout(r, intervalMs));
    }
  }
}
