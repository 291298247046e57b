// Top-down world panel: grid cells, entity sprites, win banner. Same
// two-stage shape as the graph: build a scene, then paint it.

import type { EntityDoc, StateDoc } from "./protocol.js";
import type { Ctx2D } from "./render.js";

export const CELL = 56;
export const WORLD_MARGIN = 24;

export const TERRAIN_FILL: Record<string, string> = {
  floor: "#1e293b",
  lava: "#b91c1c",
  narrow: "#155e75",
  rubble: "#713f12",
  barricade: "#3f3f46",
};

const MARKER_FILL: Record<string, string> = {
  red: "#ef4444",
  green: "#22c55e",
  blue: "#3b82f6",
  yellow: "#eab308",
};

export interface CellShape {
  col: number;
  row: number;
  fill: string;
  terrain: string;
  marker: { number: number; color: string } | null;
}

export interface SpriteShape {
  kind: string; // robot | wreck | door | elevator | button | cube | console | avatar
  id: string;
  col: number;
  row: number;
  label: string;
  accent: string;
}

export interface WorldScene {
  cols: number;
  rows: number;
  cells: CellShape[];
  sprites: SpriteShape[];
  banner: string | null;
  tick: number;
}

function sprite(e: EntityDoc): SpriteShape {
  const base = { id: e.id, col: e.col, row: e.row };
  switch (e.kind) {
    case "robot": {
      if (!e["alive"]) return { ...base, kind: "wreck", label: `${e.id} ✕`, accent: "#71717a" };
      const move = String(e["movement_type"]);
      return {
        ...base,
        kind: "robot",
        label: `${e.id} ${String(e["heading"])}${move === "hover" ? " ⌃" : ""}`,
        accent: move === "hover" ? "#22d3ee" : "#a3e635",
      };
    }
    case "door":
      return {
        ...base,
        kind: "door",
        label: e["open"] ? `${e.id} open` : `${e.id} shut`,
        accent: e["open"] ? "#22c55e" : "#f87171",
      };
    case "elevator":
      return {
        ...base,
        kind: "elevator",
        label: `${e.id} h=${Number(e["height"]).toFixed(1)}`,
        accent: "#818cf8",
      };
    case "button":
      return {
        ...base,
        kind: "button",
        label: e["pressed"] ? `${e.id} down` : e.id,
        accent: e["pressed"] ? "#fbbf24" : "#94a3b8",
      };
    case "cube":
      return { ...base, kind: "cube", label: e.id, accent: "#f472b6" };
    case "console":
      return {
        ...base,
        kind: "console",
        label: e["unlocked"] ? `${e.id} ✓` : e.id,
        accent: e["unlocked"] ? "#22c55e" : "#94a3b8",
      };
    case "avatar":
      return { ...base, kind: "avatar", label: e.id, accent: "#fde047" };
    default:
      return { ...base, kind: e.kind, label: e.id, accent: "#94a3b8" };
  }
}

export function buildWorldScene(state: StateDoc): WorldScene {
  const grid = state.world.grid;
  const special = new Map<string, CellShape>();
  for (const c of state.world.grid.cells) {
    special.set(`${c.col},${c.row}`, {
      col: c.col,
      row: c.row,
      fill: TERRAIN_FILL[c.terrain] ?? TERRAIN_FILL.floor,
      terrain: c.terrain,
      marker: c.marker ? { number: c.marker.number, color: MARKER_FILL[c.marker.color] ?? c.marker.color } : null,
    });
  }
  const cells: CellShape[] = [];
  for (let row = 0; row < grid.height; row++) {
    for (let col = 0; col < grid.width; col++) {
      cells.push(
        special.get(`${col},${row}`) ?? {
          col,
          row,
          fill: TERRAIN_FILL.floor,
          terrain: "floor",
          marker: null,
        },
      );
    }
  }

  // Carried cubes ride their carrier; skip them so the carrier's tile stays readable.
  const sprites = state.world.entities
    .filter((e) => !(e.kind === "cube" && e["carried_by"]))
    .map(sprite);

  return {
    cols: grid.width,
    rows: grid.height,
    cells,
    sprites,
    banner: state.solved ? "SOLVED" : null,
    tick: state.tick,
  };
}

export function worldPixelSize(scene: WorldScene): { w: number; h: number } {
  return {
    w: scene.cols * CELL + WORLD_MARGIN * 2,
    h: scene.rows * CELL + WORLD_MARGIN * 2 + 30,
  };
}

export function paintWorldScene(ctx: Ctx2D, scene: WorldScene, width: number, height: number): void {
  ctx.save();
  ctx.fillStyle = "#0f172a";
  ctx.fillRect(0, 0, width, height);

  const ox = WORLD_MARGIN;
  const oy = WORLD_MARGIN;
  for (const c of scene.cells) {
    const x = ox + c.col * CELL;
    const y = oy + c.row * CELL;
    ctx.fillStyle = c.fill;
    ctx.fillRect(x + 1, y + 1, CELL - 2, CELL - 2);
    if (c.marker) {
      ctx.beginPath();
      ctx.arc(x + CELL - 12, y + 12, 8, 0, Math.PI * 2);
      ctx.fillStyle = c.marker.color;
      ctx.fill();
      ctx.fillStyle = "#0f172a";
      ctx.font = "bold 10px system-ui, sans-serif";
      ctx.textAlign = "center";
      ctx.textBaseline = "middle";
      ctx.fillText(String(c.marker.number), x + CELL - 12, y + 12);
    }
    if (c.terrain !== "floor") {
      ctx.fillStyle = "#f8fafc";
      ctx.globalAlpha = 0.7;
      ctx.font = "9px system-ui, sans-serif";
      ctx.textAlign = "left";
      ctx.textBaseline = "middle";
      ctx.fillText(c.terrain, x + 4, y + CELL - 9);
      ctx.globalAlpha = 1;
    }
  }

  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (const s of scene.sprites) {
    const cx = ox + s.col * CELL + CELL / 2;
    const cy = oy + s.row * CELL + CELL / 2;
    ctx.fillStyle = s.accent;
    if (s.kind === "wreck") {
      ctx.font = "bold 20px system-ui, sans-serif";
      ctx.fillText("✕", cx, cy - 6);
    } else if (s.kind === "cube") {
      ctx.fillRect(cx - 8, cy - 14, 16, 16);
    } else {
      ctx.beginPath();
      ctx.arc(cx, cy - 6, 10, 0, Math.PI * 2);
      ctx.fill();
    }
    ctx.fillStyle = "#e2e8f0";
    ctx.font = "9px system-ui, sans-serif";
    ctx.fillText(s.label, cx, cy + 14);
  }

  ctx.fillStyle = "#94a3b8";
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "left";
  ctx.fillText(`tick ${scene.tick}`, ox, height - 12);

  if (scene.banner) {
    ctx.fillStyle = "#14532d";
    ctx.fillRect(0, 0, width, 26);
    ctx.fillStyle = "#bbf7d0";
    ctx.font = "bold 13px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(scene.banner, width / 2, 13);
  }

  ctx.restore();
}
