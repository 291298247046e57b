// HTTP transport for one server session. Message ids are client-local and
// only used to match responses in logs.

import type { Envelope, SessionPort } from "./protocol.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient implements SessionPort {
  private seq = 0;
  sessionId: string | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  async createSession(): Promise<string> {
    const res = await this.fetchImpl(`${this.baseUrl}/sessions`, { method: "POST" });
    if (res.status !== 201) throw new Error(`session create failed: ${res.status}`);
    const doc = (await res.json()) as { session_id: string };
    this.sessionId = doc.session_id;
    return this.sessionId;
  }

  async send(type: string, payload: Record<string, unknown> = {}): Promise<Envelope> {
    if (!this.sessionId) throw new Error("no session");
    const id = `m${++this.seq}`;
    const res = await this.fetchImpl(`${this.baseUrl}/sessions/${this.sessionId}/message`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ id, type, payload }),
    });
    if (!res.ok && res.status !== 200) throw new Error(`message failed: HTTP ${res.status}`);
    return (await res.json()) as Envelope;
  }

  async listPuzzles(): Promise<{ id: string; title: string; brief: string }[]> {
    const res = await this.fetchImpl(`${this.baseUrl}/puzzles`);
    if (!res.ok) throw new Error(`puzzles failed: HTTP ${res.status}`);
    return (await res.json()) as { id: string; title: string; brief: string }[];
  }

  async close(): Promise<void> {
    if (!this.sessionId) return;
    await this.fetchImpl(`${this.baseUrl}/sessions/${this.sessionId}`, { method: "DELETE" });
    this.sessionId = null;
  }
}
