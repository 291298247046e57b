import { describe, expect, it } from "vitest";

import { GraphLayout } from "../src/layout.js";
import type { NodeDoc, StateDoc, TubeDoc } from "../src/protocol.js";
import {
  BADGE_ERROR,
  BADGE_WARNING,
  TUBE_BLUE,
  TUBE_IDLE,
  TUBE_RED,
  buildGraphScene,
  paintGraphScene,
  type Ctx2D,
  type GraphUi,
} from "../src/render.js";
import { baseState } from "./fake.js";

function node(id: string, kind: NodeDoc["kind"], col: number, row: number, locked = false): NodeDoc {
  return { id, kind, position: [col, row], locked };
}

function tube(a: string, ap: string, b: string, bp: string): TubeDoc {
  return { from_node: a, from_port: ap, to_node: b, to_port: bp };
}

// constant -> not -> door, plus a spur off the door's readback port
function wiredState(): StateDoc {
  const state = baseState();
  state.program.nodes = [
    node("c_true", { type: "constant", value: { type: "boolean", value: true } }, 0, 0),
    node("n_not", { type: "not" }, 1, 0),
    node("e_door", { type: "entity", entity: "d1", entity_kind: "door" }, 2, 0, true),
    node("n_spur", { type: "not" }, 3, 0),
  ];
  state.program.tubes = [
    tube("c_true", "out", "n_not", "in"),
    tube("n_not", "out", "e_door", "open"),
    tube("e_door", "open", "n_spur", "in"),
  ];
  state.eval.tube_states = {
    "c_true.out->n_not.in": "error",
    "n_not.out->e_door.open": "normal",
    // the spur carried nothing this tick: no entry at all
  };
  state.eval.diagnostics = [
    { node: "n_not", code: "InvalidInputType", message: "expected boolean", port: "in", severity: "error" },
    { node: "c_true", code: "UnusedOutput", message: "nothing listens", port: null, severity: "warning" },
  ];
  return state;
}

const IDLE_UI: GraphUi = { selection: null, drag: null, popups: [], banner: null };

describe("graph scene", () => {
  const state = wiredState();
  const layout = new GraphLayout(state.program);

  it("colors tubes from the server's tube states", () => {
    const scene = buildGraphScene(state, layout, IDLE_UI);
    const byKey = new Map(scene.tubes.map((t) => [t.key, t.color]));
    expect(byKey.get("c_true.out->n_not.in")).toBe(TUBE_RED);
    expect(byKey.get("n_not.out->e_door.open")).toBe(TUBE_BLUE);
    expect(byKey.get("e_door.open->n_spur.in")).toBe(TUBE_IDLE);
  });

  it("runs tubes from the out-anchor to the in-anchor", () => {
    const scene = buildGraphScene(state, layout, IDLE_UI);
    const first = scene.tubes.find((t) => t.key === "c_true.out->n_not.in")!;
    const from = layout.port("c_true", "out", "out")!;
    const to = layout.port("n_not", "in", "in")!;
    expect(first.from).toEqual({ x: from.x, y: from.y });
    expect(first.to).toEqual({ x: to.x, y: to.y });
  });

  it("marks exactly the wired ports as connected", () => {
    const scene = buildGraphScene(state, layout, IDLE_UI);
    const flag = (node: string, name: string, dir: "in" | "out") =>
      scene.ports.find((p) => p.node === node && p.name === name && p.dir === dir)!.connected;
    expect(flag("c_true", "out", "out")).toBe(true);
    expect(flag("n_not", "in", "in")).toBe(true);
    expect(flag("e_door", "open", "in")).toBe(true);
    expect(flag("e_door", "open", "out")).toBe(true);
    expect(flag("n_spur", "in", "in")).toBe(true);
    expect(flag("n_spur", "out", "out")).toBe(false);
  });

  it("hangs diagnostics as badges on the reported node", () => {
    const scene = buildGraphScene(state, layout, IDLE_UI);
    const shapes = new Map(scene.nodes.map((n) => [n.id, n]));
    expect(shapes.get("n_not")!.badges).toEqual([
      { text: "InvalidInputType on in: expected boolean", color: BADGE_ERROR },
    ]);
    expect(shapes.get("c_true")!.badges).toEqual([
      { text: "UnusedOutput: nothing listens", color: BADGE_WARNING },
    ]);
    expect(shapes.get("e_door")!.badges).toEqual([]);
  });

  it("carries locked and selected flags", () => {
    const scene = buildGraphScene(state, layout, { ...IDLE_UI, selection: "e_door" });
    const shapes = new Map(scene.nodes.map((n) => [n.id, n]));
    expect(shapes.get("e_door")).toMatchObject({ locked: true, selected: true });
    expect(shapes.get("c_true")).toMatchObject({ locked: false, selected: false });
  });

  it("draws the drag line from the grabbed port to the pointer", () => {
    const scene = buildGraphScene(state, layout, {
      ...IDLE_UI,
      drag: { node: "c_true", port: "out", dir: "out", x: 300, y: 222 },
    });
    const anchor = layout.port("c_true", "out", "out")!;
    expect(scene.dragLine).toEqual({
      from: { x: anchor.x, y: anchor.y },
      to: { x: 300, y: 222 },
    });
  });

  it("anchors popups beside their node", () => {
    const scene = buildGraphScene(state, layout, {
      ...IDLE_UI,
      popups: [{ node: "n_not", text: "boom", isError: true }],
    });
    const box = layout.box("n_not")!;
    expect(scene.popups).toEqual([
      { node: "n_not", x: box.x + box.w + 12, y: box.y, text: "boom", isError: true },
    ]);
  });

  it("passes the banner through", () => {
    const scene = buildGraphScene(state, layout, { ...IDLE_UI, banner: "connection lost: x" });
    expect(scene.banner).toBe("connection lost: x");
  });
});

// Records every style assignment and drawn string; enough to prove the
// painter consumed the scene without a DOM.
export class RecordingCtx implements Ctx2D {
  styles: string[] = [];
  texts: string[] = [];
  calls: string[] = [];
  lineWidth = 0;
  font = "";
  textAlign: CanvasTextAlign = "left";
  textBaseline: CanvasTextBaseline = "alphabetic";
  globalAlpha = 1;

  private _fill: string | CanvasGradient | CanvasPattern = "";
  get fillStyle() {
    return this._fill;
  }
  set fillStyle(v: string | CanvasGradient | CanvasPattern) {
    this._fill = v;
    this.styles.push(String(v));
  }

  private _stroke: string | CanvasGradient | CanvasPattern = "";
  get strokeStyle() {
    return this._stroke;
  }
  set strokeStyle(v: string | CanvasGradient | CanvasPattern) {
    this._stroke = v;
    this.styles.push(String(v));
  }

  private log(name: string) {
    this.calls.push(name);
  }
  save() {
    this.log("save");
  }
  restore() {
    this.log("restore");
  }
  beginPath() {
    this.log("beginPath");
  }
  moveTo() {
    this.log("moveTo");
  }
  lineTo() {
    this.log("lineTo");
  }
  bezierCurveTo() {
    this.log("bezierCurveTo");
  }
  arc() {
    this.log("arc");
  }
  rect() {
    this.log("rect");
  }
  closePath() {
    this.log("closePath");
  }
  fill() {
    this.log("fill");
  }
  stroke() {
    this.log("stroke");
  }
  fillRect() {
    this.log("fillRect");
  }
  strokeRect() {
    this.log("strokeRect");
  }
  fillText(text: string) {
    this.texts.push(text);
    this.log("fillText");
  }
  setLineDash() {
    this.log("setLineDash");
  }
}

describe("graph painter", () => {
  it("paints every scene element", () => {
    const state = wiredState();
    const layout = new GraphLayout(state.program);
    const scene = buildGraphScene(state, layout, {
      selection: "c_true",
      drag: { node: "c_true", port: "out", dir: "out", x: 250, y: 100 },
      popups: [{ node: "e_door", text: "true", isError: false }],
      banner: "connection lost: refused",
    });
    const ctx = new RecordingCtx();
    paintGraphScene(ctx, scene, 800, 400);

    expect(ctx.styles).toContain(TUBE_RED);
    expect(ctx.styles).toContain(TUBE_BLUE);
    expect(ctx.styles).toContain(TUBE_IDLE);
    expect(ctx.texts).toContain("c_true");
    expect(ctx.texts.some((t) => t.includes("locked"))).toBe(true);
    expect(ctx.texts).toContain("connection lost: refused");
    expect(ctx.texts).toContain("true");
    expect(ctx.calls.filter((c) => c === "bezierCurveTo").length).toBe(4); // 3 tubes + drag line
    expect(ctx.calls[ctx.calls.length - 1]).toBe("restore");
  });
});
