// Browser bootstrap: wires the store to two canvases and the control bar.
// All state changes flow through EditorStore; this file is only plumbing
// between DOM events and store calls, then repainting.

import { ApiClient } from "./api.js";
import { EditorStore } from "./store.js";
import { GraphLayout } from "./layout.js";
import { buildGraphScene, paintGraphScene, type Ctx2D } from "./render.js";
import { buildWorldScene, paintWorldScene, worldPixelSize } from "./world.js";

const $ = <T extends HTMLElement>(sel: string): T => {
  const el = document.querySelector(sel);
  if (!el) throw new Error(`missing element ${sel}`);
  return el as T;
};

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const store = new EditorStore(api);

  const graphCanvas = $<HTMLCanvasElement>("#graph");
  const worldCanvas = $<HTMLCanvasElement>("#world");
  const puzzleSelect = $<HTMLSelectElement>("#puzzle-select");
  const modeButton = $<HTMLButtonElement>("#mode-toggle");
  const titleEl = $<HTMLElement>("#puzzle-title");
  const briefEl = $<HTMLElement>("#puzzle-brief");
  const toastsEl = $<HTMLElement>("#toasts");
  const statusEl = $<HTMLElement>("#run-status");

  let layout: GraphLayout | null = null;

  function repaint(): void {
    const state = store.mirror;
    modeButton.textContent = `mode: ${store.mode}`;
    modeButton.classList.toggle("modify", store.mode === "modify");
    statusEl.textContent = store.runStatus ?? "";
    toastsEl.replaceChildren(
      ...store.toasts.map((t) => {
        const li = document.createElement("li");
        li.textContent = t.text;
        li.onclick = () => {
          store.dismissToast(t.id);
          repaint();
        };
        return li;
      }),
    );
    if (!state) return;

    layout = new GraphLayout(state.program);
    const extent = layout.extent();
    graphCanvas.width = Math.max(extent.w, 640);
    graphCanvas.height = Math.max(extent.h, 360);
    const gctx = graphCanvas.getContext("2d") as unknown as Ctx2D;
    const scene = buildGraphScene(state, layout, {
      selection: store.selection,
      drag: store.drag,
      popups: store.popups,
      banner: store.banner,
    });
    paintGraphScene(gctx, scene, graphCanvas.width, graphCanvas.height);

    const wscene = buildWorldScene(state);
    const size = worldPixelSize(wscene);
    worldCanvas.width = size.w;
    worldCanvas.height = size.h;
    const wctx = worldCanvas.getContext("2d") as unknown as Ctx2D;
    paintWorldScene(wctx, wscene, size.w, size.h);
  }

  function canvasPoint(ev: MouseEvent): { x: number; y: number } {
    const r = graphCanvas.getBoundingClientRect();
    return { x: ev.clientX - r.left, y: ev.clientY - r.top };
  }

  graphCanvas.addEventListener("pointerdown", (ev) => {
    if (!layout) return;
    const { x, y } = canvasPoint(ev);
    const hit = layout.hitTest(x, y);
    if (hit?.kind === "port") {
      store.beginDrag(hit.port.node, hit.port.name, hit.port.dir, x, y);
    } else if (hit?.kind === "node") {
      store.selection = hit.node.id;
    } else {
      store.selection = null;
    }
    repaint();
  });

  graphCanvas.addEventListener("pointermove", (ev) => {
    if (!store.drag) return;
    const { x, y } = canvasPoint(ev);
    store.moveDrag(x, y);
    repaint();
  });

  graphCanvas.addEventListener("pointerup", async (ev) => {
    if (!layout || !store.drag) return;
    const { x, y } = canvasPoint(ev);
    const hit = layout.hitTest(x, y);
    if (hit?.kind === "port") {
      await store.completeDrag(hit.port.node, hit.port.name, hit.port.dir);
    } else {
      store.cancelDrag();
    }
    repaint();
  });

  graphCanvas.addEventListener("dblclick", async (ev) => {
    if (!layout) return;
    const { x, y } = canvasPoint(ev);
    const hit = layout.hitTest(x, y);
    if (hit?.kind === "node") {
      await store.inspect(hit.node.id);
    } else if (hit?.kind === "port") {
      await store.inspect(hit.port.node);
    } else {
      store.popups = [];
    }
    repaint();
  });

  document.addEventListener("keydown", (ev) => {
    if (ev.key === "m" && !(ev.target instanceof HTMLInputElement)) {
      store.toggleMode();
      repaint();
    }
  });

  modeButton.onclick = () => {
    store.toggleMode();
    repaint();
  };
  $<HTMLButtonElement>("#btn-tick").onclick = async () => {
    await store.tick();
    repaint();
  };
  $<HTMLButtonElement>("#btn-run").onclick = async () => {
    await store.runUntil();
    repaint();
  };
  $<HTMLButtonElement>("#btn-reset").onclick = async () => {
    await store.reset();
    repaint();
  };
  $<HTMLButtonElement>("#btn-load").onclick = async () => {
    await store.loadPuzzle(puzzleSelect.value);
    titleEl.textContent = store.puzzle ? `${store.puzzle.puzzle_id}  ${store.puzzle.title}` : "";
    briefEl.textContent = store.puzzle?.brief ?? "";
    repaint();
  };

  await api.createSession();
  const puzzles = await api.listPuzzles();
  puzzleSelect.replaceChildren(
    ...puzzles.map((p) => {
      const opt = document.createElement("option");
      opt.value = p.id;
      opt.textContent = `${p.id}  ${p.title}`;
      return opt;
    }),
  );
  repaint();
}

boot().catch((err) => {
  document.body.insertAdjacentHTML("afterbegin", `<div class="boot-error">${String(err)}</div>`);
});
