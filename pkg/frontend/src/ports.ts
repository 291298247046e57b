// Port signatures per node kind. This is structural metadata the server
// fixes per kind; the client needs it to draw sockets and aim drags. Data
// still only flows through protocol responses.

import type { DataTypeName, KindDoc } from "./protocol.js";

export interface PortInfo {
  name: string;
  dir: "in" | "out";
  dtype: DataTypeName;
}

const ENTITY_PORTS: Record<string, { ins: [string, DataTypeName][]; outs: [string, DataTypeName][] }> = {
  door: { ins: [["open", "boolean"]], outs: [["open", "boolean"]] },
  robot: {
    ins: [
      ["command", "text"],
      ["blueprint", "instance_ref"],
    ],
    outs: [
      ["col", "number"],
      ["row", "number"],
      ["heading", "text"],
      ["movement_type", "text"],
      ["body_type", "text"],
      ["carrying", "boolean"],
      ["alive", "boolean"],
    ],
  },
  elevator: { ins: [["target", "number"]], outs: [["height", "number"]] },
  button: { ins: [], outs: [["pressed", "boolean"]] },
  cube: {
    ins: [],
    outs: [
      ["col", "number"],
      ["row", "number"],
      ["carried", "boolean"],
    ],
  },
  console: { ins: [["entered", "text"]], outs: [["unlocked", "boolean"]] },
  avatar: {
    ins: [],
    outs: [
      ["col", "number"],
      ["row", "number"],
    ],
  },
};

function fixed(ins: [string, DataTypeName][], outs: [string, DataTypeName][]): PortInfo[] {
  return [
    ...ins.map(([name, dtype]): PortInfo => ({ name, dir: "in", dtype })),
    ...outs.map(([name, dtype]): PortInfo => ({ name, dir: "out", dtype })),
  ];
}

export function portsFor(kind: KindDoc): PortInfo[] {
  switch (kind.type) {
    case "constant":
      return fixed([], [["out", kind.value.type === "pulse" ? "pulse" : kind.value.type]]);
    case "arithmetic":
      return fixed(
        [
          ["a", "number"],
          ["b", "number"],
        ],
        [["out", "number"]],
      );
    case "logical":
      return fixed(
        [
          ["a", "boolean"],
          ["b", "boolean"],
        ],
        [["out", "boolean"]],
      );
    case "not":
      return fixed([["in", "boolean"]], [["out", "boolean"]]);
    case "compare":
      return fixed(
        [
          ["a", "any"],
          ["b", "any"],
        ],
        [["out", "boolean"]],
      );
    case "conditional":
      return fixed(
        [
          ["cond", "boolean"],
          ["then", "any"],
          ["else", "any"],
        ],
        [["out", "any"]],
      );
    case "event_handler": {
      const outs: [string, DataTypeName][] = [["fired", "pulse"]];
      if (kind.event === "enter_column") {
        outs.push(["column", "number"], ["color", "color"]);
      }
      return fixed([], outs);
    }
    case "function_call":
      return fixed(kind.ins, kind.outs);
    case "method_call":
      return fixed([["target", "any"], ...kind.args], kind.outs);
    case "constructor_call":
      return fixed(kind.params, [["out", "instance_ref"]]);
    case "class":
      return fixed(kind.fields, [["class", "class_ref"]]);
    case "entity": {
      const table = ENTITY_PORTS[kind.entity_kind];
      if (!table) return [];
      return fixed(table.ins, table.outs);
    }
  }
}

export function kindLabel(kind: KindDoc): string {
  switch (kind.type) {
    case "constant":
      return "Constant";
    case "arithmetic":
      return kind.op.toUpperCase();
    case "logical":
      return kind.op.toUpperCase();
    case "not":
      return "NOT";
    case "compare":
      return { eq: "=", neq: "≠", lt: "<", leq: "≤", gt: ">", geq: "≥" }[kind.op];
    case "conditional":
      return "IF";
    case "event_handler":
      return `On ${kind.event.replace("_", " ")}`;
    case "function_call":
      return kind.function;
    case "method_call":
      return `${kind.class_id}.${kind.method}()`;
    case "constructor_call":
      return `new ${kind.class_id}`;
    case "class":
      return `class ${kind.class_id}`;
    case "entity":
      return `${kind.entity_kind} ${kind.entity}`;
  }
}
