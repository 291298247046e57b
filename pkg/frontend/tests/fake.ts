// A scripted stand-in for one server session. It keeps a state document and
// mutates it the way the protocol describes, without any engine semantics:
// tube states and inspection answers are set by the test, not computed.

import type {
  EditDoc,
  Envelope,
  ErrorDoc,
  InspectDoc,
  ProgramDoc,
  SessionPort,
  StateDoc,
  TubeDoc,
} from "../src/protocol.js";
import { tubeKey } from "../src/protocol.js";

export function clone<T>(doc: T): T {
  return JSON.parse(JSON.stringify(doc)) as T;
}

export function twoNodeProgram(): ProgramDoc {
  return {
    format_version: 1,
    nodes: [
      {
        id: "c_true",
        kind: { type: "constant", value: { type: "boolean", value: true } },
        position: [0, 0],
        locked: false,
      },
      {
        id: "e_door",
        kind: { type: "entity", entity: "d1", entity_kind: "door" },
        position: [2, 0],
        locked: true,
      },
    ],
    tubes: [],
  };
}

export function baseState(): StateDoc {
  return {
    puzzle_id: "p01",
    tick: 0,
    solved: false,
    program: twoNodeProgram(),
    world: {
      grid: { width: 5, height: 3, cells: [] },
      entities: [
        { kind: "avatar", id: "av1", col: 0, row: 1, riding: null },
        { kind: "door", id: "d1", col: 2, row: 1, open: false },
      ],
      tick: 0,
    },
    classes: [],
    instances: [],
    eval: { outputs: {}, diagnostics: [], actions: [], tube_states: {}, fired_events: [] },
  };
}

interface Step {
  resolve: () => void;
  promise: Promise<void>;
}

export class FakeSession implements SessionPort {
  state: StateDoc;
  private initial: StateDoc;
  received: { type: string; payload: Record<string, unknown> }[] = [];
  nextEditError: ErrorDoc | null = null;
  failTransport = false;
  inspectAnswers = new Map<string, InspectDoc>();
  // When set, apply_edit responses wait until the test releases them.
  private gate: Step | null = null;
  private seq = 0;

  constructor(state: StateDoc = baseState()) {
    this.state = state;
    this.initial = clone(state);
  }

  holdNextEdit(): () => void {
    let release: () => void = () => {};
    const promise = new Promise<void>((res) => {
      release = res;
    });
    this.gate = { resolve: release, promise };
    return release;
  }

  private ok(type: string, payload: unknown): Envelope {
    return { id: `f${++this.seq}`, type, status: "ok", payload };
  }

  private err(type: string, error: ErrorDoc): Envelope {
    return { id: `f${++this.seq}`, type, status: "error", error };
  }

  async send(type: string, payload: Record<string, unknown> = {}): Promise<Envelope> {
    if (this.failTransport) throw new Error("connection refused");
    this.received.push({ type, payload });
    switch (type) {
      case "get_state":
        return this.ok(type, clone(this.state));
      case "load_puzzle":
        return this.ok(type, {
          puzzle_id: this.state.puzzle_id,
          title: "First Door",
          brief: "open it",
          program: clone(this.state.program),
          world: clone(this.state.world),
          classes: [],
          instances: [],
          allowed_edits: { ops: ["connect"], editable_constants: [] },
          max_ticks: 10,
        });
      case "apply_edit": {
        if (this.gate) {
          const gate = this.gate;
          this.gate = null;
          await gate.promise;
        }
        if (this.nextEditError) {
          const e = this.nextEditError;
          this.nextEditError = null;
          return this.err(type, e);
        }
        this.applyEdit(payload["edit"] as EditDoc);
        return this.ok(type, { program: clone(this.state.program) });
      }
      case "tick":
        this.state.tick += 1;
        this.state.world.tick = this.state.tick;
        return this.ok(type, {
          tick: this.state.tick,
          solved: this.state.solved,
          world: clone(this.state.world),
          eval: clone(this.state.eval),
        });
      case "run_until":
        this.state.solved = true;
        this.state.tick += 1;
        return this.ok(type, { status: "solved", tick: this.state.tick });
      case "reset": {
        const program = clone(this.state.program); // edits survive reset
        this.state = clone(this.initial);
        this.state.program = program;
        return this.ok(type, { tick: 0, world: clone(this.state.world) });
      }
      case "inspect_node": {
        const node = payload["node"] as string;
        const answer = this.inspectAnswers.get(node);
        if (!answer) return this.err(type, { code: "UnknownEndpoint", message: `no node '${node}'` });
        return this.ok(type, clone(answer));
      }
      default:
        return this.err(type, { code: "UnknownMessageType", message: `no message type '${type}'` });
    }
  }

  private applyEdit(edit: EditDoc): void {
    if (edit.op === "connect") {
      const tube: TubeDoc = {
        from_node: edit.from[0],
        from_port: edit.from[1],
        to_node: edit.to[0],
        to_port: edit.to[1],
      };
      this.state.program.tubes.push(tube);
      this.state.eval.tube_states[tubeKey(tube)] = "normal";
    } else if (edit.op === "disconnect") {
      this.state.program.tubes = this.state.program.tubes.filter(
        (t) => !(t.to_node === edit.to[0] && t.to_port === edit.to[1]),
      );
    } else {
      const node = this.state.program.nodes.find((n) => n.id === edit.node);
      if (node && node.kind.type === "constant") node.kind.value = edit.value;
    }
  }
}
