// Wire types for the session protocol. Everything here mirrors documents
// produced by the server; the client never computes engine semantics, it
// only renders what these documents say.

export type ValueDoc =
  | { type: "boolean"; value: boolean }
  | { type: "number"; value: number }
  | { type: "text"; value: string }
  | { type: "color"; value: string }
  | { type: "entity_ref"; value: string }
  | { type: "instance_ref"; value: string }
  | { type: "class_ref"; value: string }
  | { type: "pulse"; value: null };

export type DataTypeName =
  | "boolean"
  | "number"
  | "text"
  | "color"
  | "entity_ref"
  | "instance_ref"
  | "class_ref"
  | "pulse"
  | "any";

export type Signature = [string, DataTypeName][];

export type KindDoc =
  | { type: "constant"; value: ValueDoc }
  | { type: "arithmetic"; op: "add" | "sub" | "mul" | "div" }
  | { type: "logical"; op: "and" | "or" | "xor" }
  | { type: "not" }
  | { type: "compare"; op: "eq" | "neq" | "lt" | "leq" | "gt" | "geq" }
  | { type: "conditional" }
  | { type: "event_handler"; event: "tick" | "pressed" | "enter_column"; entity: string | null }
  | { type: "function_call"; function: string; ins: Signature; outs: Signature }
  | { type: "method_call"; class_id: string; method: string; args: Signature; outs: Signature }
  | { type: "constructor_call"; class_id: string; params: Signature }
  | { type: "class"; class_id: string; fields: Signature }
  | { type: "entity"; entity: string; entity_kind: string };

export interface NodeDoc {
  id: string;
  kind: KindDoc;
  position: [number, number];
  locked: boolean;
}

export interface TubeDoc {
  from_node: string;
  from_port: string;
  to_node: string;
  to_port: string;
}

export interface ProgramDoc {
  format_version: number;
  nodes: NodeDoc[];
  tubes: TubeDoc[];
}

export interface MarkerDoc {
  number: number;
  color: string;
}

export interface CellDoc {
  col: number;
  row: number;
  terrain: "floor" | "lava" | "narrow" | "rubble" | "barricade";
  marker: MarkerDoc | null;
}

export interface EntityDoc {
  kind: string;
  id: string;
  col: number;
  row: number;
  [key: string]: unknown;
}

export interface WorldDoc {
  grid: { width: number; height: number; cells: CellDoc[] };
  entities: EntityDoc[];
  tick: number;
}

export interface DiagnosticDoc {
  node: string;
  code: string;
  message: string;
  port: string | null;
  severity: "error" | "warning";
}

export interface EvalDoc {
  outputs: Record<string, ValueDoc>; // "node.port" -> value
  diagnostics: DiagnosticDoc[];
  actions: { entity: string; prop: string; value: ValueDoc }[];
  tube_states: Record<string, "normal" | "error">; // "a.p->b.q" -> state
  fired_events: unknown[];
}

export interface StateDoc {
  puzzle_id: string;
  tick: number;
  solved: boolean;
  program: ProgramDoc;
  world: WorldDoc;
  classes: unknown[];
  instances: unknown[];
  eval: EvalDoc;
}

export interface PuzzleDoc {
  puzzle_id: string;
  title: string;
  brief: string;
  program: ProgramDoc;
  world: WorldDoc;
  classes: unknown[];
  instances: unknown[];
  allowed_edits: { ops: string[]; editable_constants: string[] };
  max_ticks: number;
}

export interface TickDoc {
  tick: number;
  solved: boolean;
  world: WorldDoc;
  eval: EvalDoc;
}

export interface InspectDoc {
  node: string;
  value: ValueDoc | null;
  diagnostic: DiagnosticDoc | null;
}

export type EditDoc =
  | { op: "connect"; from: [string, string]; to: [string, string] }
  | { op: "disconnect"; to: [string, string] }
  | { op: "set_constant"; node: string; value: ValueDoc };

export interface ErrorDoc {
  code: string;
  message: string;
}

export interface Envelope {
  id: string;
  type: string;
  status: "ok" | "error";
  payload?: unknown;
  error?: ErrorDoc;
}

// Anything that can carry one session's messages: the HTTP client in the
// browser, or a scripted fake in unit tests.
export interface SessionPort {
  send(type: string, payload?: Record<string, unknown>): Promise<Envelope>;
}

const TUBE_KEY_ARROW = "->";

export function tubeKey(t: TubeDoc): string {
  return `${t.from_node}.${t.from_port}${TUBE_KEY_ARROW}${t.to_node}.${t.to_port}`;
}

export function outputKey(node: string, port: string): string {
  return `${node}.${port}`;
}

export function formatValue(v: ValueDoc): string {
  switch (v.type) {
    case "boolean":
      return v.value ? "true" : "false";
    case "number": {
      const n = v.value;
      return Number.isInteger(n) ? String(n) : n.toFixed(3).replace(/0+$/, "").replace(/\.$/, "");
    }
    case "pulse":
      return "pulse";
    default:
      return String(v.value);
  }
}
