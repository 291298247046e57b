// Graph rendering in two stages: build a plain scene description from the
// mirrored state (testable without a browser), then paint it onto a 2D
// context. Tube colors and badges come straight from the server's eval doc.

import type { StateDoc, TubeDoc } from "./protocol.js";
import { tubeKey } from "./protocol.js";
import { GraphLayout, PORT_R, type PortAnchor } from "./layout.js";
import { kindLabel } from "./ports.js";
import type { InspectPopup, PendingDrag } from "./store.js";
import { describeDiagnostic } from "./store.js";

export const TUBE_BLUE = "#3b82f6";
export const TUBE_RED = "#ef4444";
export const TUBE_IDLE = "#64748b"; // connected but carried nothing this tick
export const BADGE_ERROR = "#ef4444";
export const BADGE_WARNING = "#f59e0b";

export interface TubeShape {
  key: string;
  color: string;
  from: { x: number; y: number };
  to: { x: number; y: number };
}

export interface BadgeShape {
  text: string;
  color: string;
}

export interface NodeShape {
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
  title: string;
  label: string;
  locked: boolean;
  selected: boolean;
  badges: BadgeShape[];
}

export interface PortShape {
  node: string;
  name: string;
  dir: "in" | "out";
  x: number;
  y: number;
  connected: boolean;
}

export interface PopupShape {
  node: string;
  x: number;
  y: number;
  text: string;
  isError: boolean;
}

export interface GraphScene {
  nodes: NodeShape[];
  ports: PortShape[];
  tubes: TubeShape[];
  dragLine: { from: { x: number; y: number }; to: { x: number; y: number } } | null;
  popups: PopupShape[];
  banner: string | null;
}

export interface GraphUi {
  selection: string | null;
  drag: PendingDrag | null;
  popups: InspectPopup[];
  banner: string | null;
}

function tubeEnds(layout: GraphLayout, t: TubeDoc): { from: PortAnchor; to: PortAnchor } | null {
  const from = layout.port(t.from_node, t.from_port, "out");
  const to = layout.port(t.to_node, t.to_port, "in");
  return from && to ? { from, to } : null;
}

export function buildGraphScene(state: StateDoc, layout: GraphLayout, ui: GraphUi): GraphScene {
  const states = state.eval.tube_states;
  const connected = new Set<string>();
  const tubes: TubeShape[] = [];
  for (const t of state.program.tubes) {
    const ends = tubeEnds(layout, t);
    if (!ends) continue;
    const key = tubeKey(t);
    connected.add(`${t.from_node}.${t.from_port}.out`);
    connected.add(`${t.to_node}.${t.to_port}.in`);
    const st = states[key];
    tubes.push({
      key,
      color: st === "error" ? TUBE_RED : st === "normal" ? TUBE_BLUE : TUBE_IDLE,
      from: { x: ends.from.x, y: ends.from.y },
      to: { x: ends.to.x, y: ends.to.y },
    });
  }

  const byNode = new Map<string, BadgeShape[]>();
  for (const d of state.eval.diagnostics) {
    const list = byNode.get(d.node) ?? [];
    list.push({
      text: describeDiagnostic(d),
      color: d.severity === "warning" ? BADGE_WARNING : BADGE_ERROR,
    });
    byNode.set(d.node, list);
  }

  const nodes: NodeShape[] = [];
  const ports: PortShape[] = [];
  for (const box of layout.boxes.values()) {
    nodes.push({
      id: box.id,
      x: box.x,
      y: box.y,
      w: box.w,
      h: box.h,
      title: box.id,
      label: kindLabel(box.doc.kind),
      locked: box.doc.locked,
      selected: ui.selection === box.id,
      badges: byNode.get(box.id) ?? [],
    });
    for (const p of [...box.ins, ...box.outs]) {
      ports.push({
        node: p.node,
        name: p.name,
        dir: p.dir,
        x: p.x,
        y: p.y,
        connected: connected.has(`${p.node}.${p.name}.${p.dir}`),
      });
    }
  }

  let dragLine: GraphScene["dragLine"] = null;
  if (ui.drag) {
    const from = layout.port(ui.drag.node, ui.drag.port, ui.drag.dir);
    if (from) dragLine = { from: { x: from.x, y: from.y }, to: { x: ui.drag.x, y: ui.drag.y } };
  }

  const popups: PopupShape[] = [];
  for (const p of ui.popups) {
    const box = layout.box(p.node);
    if (!box) continue;
    popups.push({ node: p.node, x: box.x + box.w + 12, y: box.y, text: p.text, isError: p.isError });
  }

  return { nodes, ports, tubes, dragLine, popups, banner: ui.banner };
}

// The slice of CanvasRenderingContext2D the painters use; tests substitute
// a recording stub.
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  textBaseline: CanvasTextBaseline;
  globalAlpha: number;
  save(): void;
  restore(): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  bezierCurveTo(c1x: number, c1y: number, c2x: number, c2y: number, x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  setLineDash(segments: number[]): void;
}

const BG = "#0f172a";
const NODE_FILL = "#1e293b";
const NODE_EDGE = "#475569";
const NODE_EDGE_SELECTED = "#e2e8f0";
const HEADER_FILL = "#334155";
const TEXT_MAIN = "#e2e8f0";
const TEXT_DIM = "#94a3b8";

function tubePath(ctx: Ctx2D, from: { x: number; y: number }, to: { x: number; y: number }): void {
  const bend = Math.max(40, Math.abs(to.x - from.x) / 2);
  ctx.beginPath();
  ctx.moveTo(from.x, from.y);
  ctx.bezierCurveTo(from.x + bend, from.y, to.x - bend, to.y, to.x, to.y);
  ctx.stroke();
}

export function paintGraphScene(ctx: Ctx2D, scene: GraphScene, width: number, height: number): void {
  ctx.save();
  ctx.fillStyle = BG;
  ctx.fillRect(0, 0, width, height);

  for (const tube of scene.tubes) {
    ctx.strokeStyle = tube.color;
    ctx.lineWidth = 2.5;
    ctx.setLineDash([]);
    tubePath(ctx, tube.from, tube.to);
  }

  if (scene.dragLine) {
    ctx.strokeStyle = TEXT_DIM;
    ctx.lineWidth = 1.5;
    ctx.setLineDash([6, 4]);
    tubePath(ctx, scene.dragLine.from, scene.dragLine.to);
    ctx.setLineDash([]);
  }

  for (const n of scene.nodes) {
    ctx.fillStyle = NODE_FILL;
    ctx.fillRect(n.x, n.y, n.w, n.h);
    ctx.fillStyle = HEADER_FILL;
    ctx.fillRect(n.x, n.y, n.w, 24);
    ctx.strokeStyle = n.selected ? NODE_EDGE_SELECTED : NODE_EDGE;
    ctx.lineWidth = n.selected ? 2 : 1;
    ctx.setLineDash(n.locked ? [4, 3] : []);
    ctx.strokeRect(n.x, n.y, n.w, n.h);
    ctx.setLineDash([]);

    ctx.fillStyle = TEXT_MAIN;
    ctx.font = "bold 12px system-ui, sans-serif";
    ctx.textAlign = "left";
    ctx.textBaseline = "middle";
    ctx.fillText(n.title, n.x + 8, n.y + 12);
    ctx.fillStyle = TEXT_DIM;
    ctx.font = "11px system-ui, sans-serif";
    ctx.fillText(n.label + (n.locked ? "  locked" : ""), n.x + 8, n.y + n.h - 10);

    let badgeY = n.y + n.h + 6;
    for (const b of n.badges) {
      ctx.fillStyle = b.color;
      ctx.fillRect(n.x, badgeY, n.w, 16);
      ctx.fillStyle = "#ffffff";
      ctx.font = "10px system-ui, sans-serif";
      ctx.fillText(clip(b.text, 26), n.x + 4, badgeY + 8);
      badgeY += 20;
    }
  }

  for (const p of scene.ports) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, PORT_R, 0, Math.PI * 2);
    ctx.fillStyle = p.connected ? TUBE_BLUE : NODE_EDGE;
    ctx.fill();
    ctx.strokeStyle = TEXT_DIM;
    ctx.lineWidth = 1;
    ctx.stroke();
    ctx.fillStyle = TEXT_DIM;
    ctx.font = "10px system-ui, sans-serif";
    ctx.textAlign = p.dir === "in" ? "left" : "right";
    ctx.textBaseline = "middle";
    ctx.fillText(p.name, p.dir === "in" ? p.x + 9 : p.x - 9, p.y);
  }

  for (const pop of scene.popups) {
    const w = Math.max(90, pop.text.length * 6 + 16);
    ctx.fillStyle = pop.isError ? "#7f1d1d" : "#1e3a8a";
    ctx.fillRect(pop.x, pop.y, w, 34);
    ctx.strokeStyle = pop.isError ? TUBE_RED : TUBE_BLUE;
    ctx.lineWidth = 1;
    ctx.strokeRect(pop.x, pop.y, w, 34);
    ctx.fillStyle = "#ffffff";
    ctx.font = "10px system-ui, sans-serif";
    ctx.textAlign = "left";
    ctx.fillText(pop.node, pop.x + 8, pop.y + 10);
    ctx.font = "12px system-ui, sans-serif";
    ctx.fillText(clip(pop.text, 40), pop.x + 8, pop.y + 24);
  }

  if (scene.banner) {
    ctx.fillStyle = "#7f1d1d";
    ctx.fillRect(0, 0, width, 28);
    ctx.fillStyle = "#ffffff";
    ctx.font = "bold 12px system-ui, sans-serif";
    ctx.textAlign = "left";
    ctx.textBaseline = "middle";
    ctx.fillText(scene.banner, 10, 14);
  }

  ctx.restore();
}

function clip(text: string, max: number): string {
  return text.length <= max ? text : text.slice(0, max - 1) + "…";
}
