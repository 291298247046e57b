// Editor state. Two rules shape everything here:
//  - manipulate mode never emits an edit message (inspect/run only);
//  - edits are never applied optimistically: the mirror changes only after
//    the server acknowledges, and always by re-fetching get_state, so the
//    local copy is the server document, not a client reconstruction.

import type {
  DiagnosticDoc,
  EditDoc,
  Envelope,
  InspectDoc,
  PuzzleDoc,
  SessionPort,
  StateDoc,
  ValueDoc,
} from "./protocol.js";
import { formatValue } from "./protocol.js";

export type Mode = "manipulate" | "modify";

export interface PendingDrag {
  node: string;
  port: string;
  dir: "in" | "out";
  x: number;
  y: number;
}

export interface InspectPopup {
  node: string;
  text: string;
  isError: boolean;
}

export interface Toast {
  id: number;
  text: string;
}

export type EditOutcome =
  | { sent: false; reason: string }
  | { sent: true; ok: true }
  | { sent: true; ok: false; code: string; message: string };

export interface SentRecord {
  type: string;
  payload: Record<string, unknown>;
}

const TOAST_LIMIT = 4;

export class EditorStore {
  mode: Mode = "manipulate";
  puzzle: PuzzleDoc | null = null;
  mirror: StateDoc | null = null;
  selection: string | null = null;
  drag: PendingDrag | null = null;
  popups: InspectPopup[] = [];
  toasts: Toast[] = [];
  banner: string | null = null; // protocol/transport failure banner
  runStatus: string | null = null;
  sent: SentRecord[] = []; // every message that left the store, in order
  private toastSeq = 0;

  constructor(private readonly port: SessionPort) {}

  private async exchange(type: string, payload: Record<string, unknown> = {}): Promise<Envelope> {
    this.sent.push({ type, payload });
    try {
      const reply = await this.port.send(type, payload);
      this.banner = null;
      return reply;
    } catch (err) {
      this.banner = `connection lost: ${String(err)}`;
      throw err;
    }
  }

  async loadPuzzle(puzzleId: string): Promise<void> {
    let reply: Envelope;
    try {
      reply = await this.exchange("load_puzzle", { puzzle_id: puzzleId });
    } catch {
      return; // banner already set
    }
    if (reply.status !== "ok") {
      this.banner = `load failed: ${reply.error?.message ?? "unknown error"}`;
      return;
    }
    this.puzzle = reply.payload as PuzzleDoc;
    this.selection = null;
    this.drag = null;
    this.popups = [];
    this.runStatus = null;
    await this.refresh();
  }

  // Replace the mirror with the server's current document.
  async refresh(): Promise<void> {
    let reply: Envelope;
    try {
      reply = await this.exchange("get_state", {});
    } catch {
      return;
    }
    if (reply.status === "ok") this.mirror = reply.payload as StateDoc;
    else this.banner = `get_state failed: ${reply.error?.message ?? "unknown error"}`;
  }

  toggleMode(): Mode {
    this.mode = this.mode === "manipulate" ? "modify" : "manipulate";
    this.drag = null;
    return this.mode;
  }

  beginDrag(node: string, portName: string, dir: "in" | "out", x: number, y: number): boolean {
    if (this.mode !== "modify") return false;
    this.drag = { node, port: portName, dir, x, y };
    return true;
  }

  moveDrag(x: number, y: number): void {
    if (this.drag) {
      this.drag.x = x;
      this.drag.y = y;
    }
  }

  cancelDrag(): void {
    this.drag = null;
  }

  // Complete a pending drag onto a target port. Direction decides which end
  // is which; same-direction drops are ignored locally.
  async completeDrag(node: string, portName: string, dir: "in" | "out"): Promise<EditOutcome> {
    const drag = this.drag;
    this.drag = null;
    if (!drag) return { sent: false, reason: "no drag in progress" };
    if (drag.dir === dir) return { sent: false, reason: "need one output and one input" };
    const [from, to] =
      drag.dir === "out"
        ? [[drag.node, drag.port], [node, portName]]
        : [[node, portName], [drag.node, drag.port]];
    return this.requestConnect(from as [string, string], to as [string, string]);
  }

  async requestConnect(from: [string, string], to: [string, string]): Promise<EditOutcome> {
    return this.applyEdit({ op: "connect", from, to });
  }

  async requestDisconnect(to: [string, string]): Promise<EditOutcome> {
    return this.applyEdit({ op: "disconnect", to });
  }

  async requestSetConstant(node: string, value: ValueDoc): Promise<EditOutcome> {
    return this.applyEdit({ op: "set_constant", node, value });
  }

  async applyEdit(edit: EditDoc): Promise<EditOutcome> {
    if (this.mode !== "modify") {
      return { sent: false, reason: "edits are disabled in manipulate mode" };
    }
    let reply: Envelope;
    try {
      reply = await this.exchange("apply_edit", { edit });
    } catch (err) {
      return { sent: true, ok: false, code: "Transport", message: String(err) };
    }
    if (reply.status !== "ok") {
      const code = reply.error?.code ?? "Error";
      const message = reply.error?.message ?? "edit rejected";
      this.pushToast(`${code}: ${message}`);
      return { sent: true, ok: false, code, message };
    }
    await this.refresh();
    return { sent: true, ok: true };
  }

  async tick(): Promise<void> {
    let reply: Envelope;
    try {
      reply = await this.exchange("tick", {});
    } catch {
      return;
    }
    if (reply.status !== "ok") {
      this.pushToast(`tick failed: ${reply.error?.message ?? "unknown error"}`);
      return;
    }
    await this.refresh();
  }

  async runUntil(maxTicks?: number): Promise<string | null> {
    const payload = maxTicks === undefined ? {} : { max_ticks: maxTicks };
    let reply: Envelope;
    try {
      reply = await this.exchange("run_until", payload);
    } catch {
      return null;
    }
    if (reply.status !== "ok") {
      this.pushToast(`run failed: ${reply.error?.message ?? "unknown error"}`);
      return null;
    }
    this.runStatus = (reply.payload as { status: string }).status;
    await this.refresh();
    return this.runStatus;
  }

  async reset(): Promise<void> {
    let reply: Envelope;
    try {
      reply = await this.exchange("reset", {});
    } catch {
      return;
    }
    if (reply.status !== "ok") {
      this.pushToast(`reset failed: ${reply.error?.message ?? "unknown error"}`);
      return;
    }
    this.runStatus = null;
    await this.refresh();
  }

  async inspect(node: string): Promise<InspectPopup> {
    let popup: InspectPopup;
    try {
      const reply = await this.exchange("inspect_node", { node });
      if (reply.status !== "ok") {
        popup = { node, text: `${reply.error?.code}: ${reply.error?.message}`, isError: true };
      } else {
        const doc = reply.payload as InspectDoc;
        popup = describeInspect(doc);
      }
    } catch (err) {
      popup = { node, text: String(err), isError: true };
    }
    this.popups = [...this.popups.filter((p) => p.node !== node), popup];
    return popup;
  }

  closePopup(node: string): void {
    this.popups = this.popups.filter((p) => p.node !== node);
  }

  pushToast(text: string): void {
    this.toasts.push({ id: ++this.toastSeq, text });
    if (this.toasts.length > TOAST_LIMIT) this.toasts.shift();
  }

  dismissToast(id: number): void {
    this.toasts = this.toasts.filter((t) => t.id !== id);
  }
}

function describeInspect(doc: InspectDoc): InspectPopup {
  if (doc.diagnostic) {
    return { node: doc.node, text: describeDiagnostic(doc.diagnostic), isError: true };
  }
  if (doc.value) {
    return { node: doc.node, text: formatValue(doc.value), isError: false };
  }
  return { node: doc.node, text: "no output this tick", isError: false };
}

export function describeDiagnostic(d: DiagnosticDoc): string {
  return d.port ? `${d.code} on ${d.port}: ${d.message}` : `${d.code}: ${d.message}`;
}
