// Node geometry. Positions in the program document are abstract editor
// coordinates; this maps them to pixels and answers hit tests.

import type { NodeDoc, ProgramDoc } from "./protocol.js";
import { portsFor, type PortInfo } from "./ports.js";

export const GRID_X = 200;
export const GRID_Y = 130;
export const MARGIN = 48;
export const NODE_W = 156;
export const HEADER_H = 26;
export const ROW_H = 18;
export const PORT_R = 5;
export const PORT_HIT_R = 9;

export interface PortAnchor extends PortInfo {
  node: string;
  x: number;
  y: number;
}

export interface NodeBox {
  id: string;
  doc: NodeDoc;
  x: number;
  y: number;
  w: number;
  h: number;
  ins: PortAnchor[];
  outs: PortAnchor[];
}

export type Hit =
  | { kind: "port"; port: PortAnchor }
  | { kind: "node"; node: NodeBox }
  | null;

export function nodeBox(doc: NodeDoc): NodeBox {
  const ports = portsFor(doc.kind);
  const ins = ports.filter((p) => p.dir === "in");
  const outs = ports.filter((p) => p.dir === "out");
  const rows = Math.max(ins.length, outs.length, 1);
  const x = MARGIN + doc.position[0] * GRID_X;
  const y = MARGIN + doc.position[1] * GRID_Y;
  const h = HEADER_H + rows * ROW_H + 8;
  const anchor = (p: PortInfo, i: number): PortAnchor => ({
    ...p,
    node: doc.id,
    x: p.dir === "in" ? x : x + NODE_W,
    y: y + HEADER_H + 6 + i * ROW_H + ROW_H / 2,
  });
  return {
    id: doc.id,
    doc,
    x,
    y,
    w: NODE_W,
    h,
    ins: ins.map(anchor),
    outs: outs.map(anchor),
  };
}

export class GraphLayout {
  boxes = new Map<string, NodeBox>();

  constructor(program: ProgramDoc) {
    for (const n of program.nodes) this.boxes.set(n.id, nodeBox(n));
  }

  box(id: string): NodeBox | undefined {
    return this.boxes.get(id);
  }

  port(node: string, name: string, dir: "in" | "out"): PortAnchor | undefined {
    const b = this.boxes.get(node);
    if (!b) return undefined;
    const list = dir === "in" ? b.ins : b.outs;
    return list.find((p) => p.name === name);
  }

  // Ports win over node bodies so sockets stay grabbable at the edge.
  hitTest(x: number, y: number): Hit {
    for (const b of this.boxes.values()) {
      for (const p of [...b.ins, ...b.outs]) {
        const dx = x - p.x;
        const dy = y - p.y;
        if (dx * dx + dy * dy <= PORT_HIT_R * PORT_HIT_R) return { kind: "port", port: p };
      }
    }
    for (const b of this.boxes.values()) {
      if (x >= b.x && x <= b.x + b.w && y >= b.y && y <= b.y + b.h) return { kind: "node", node: b };
    }
    return null;
  }

  extent(): { w: number; h: number } {
    let w = MARGIN;
    let h = MARGIN;
    for (const b of this.boxes.values()) {
      w = Math.max(w, b.x + b.w + MARGIN);
      h = Math.max(h, b.y + b.h + MARGIN);
    }
    return { w, h };
  }
}
