// Browser bootstrap: canvas, mouse tools, and the service connection.

import { ExplorerApp, REMOVED_RAY_FLASH_MS } from "./app";
import { ExplorerClient, fetchTransport } from "./client";
import { buildDrawList, paint } from "./render";
import { fitBounds, panBy, zoomAt } from "./transform";
import type { MapPoint, ToolMode } from "./types";

const BASE_URL = (window as unknown as { AXIALGEN_URL?: string }).AXIALGEN_URL ?? "";

function ringBounds(rings: MapPoint[][]): [number, number, number, number] {
  let minX = Infinity,
    minY = Infinity,
    maxX = -Infinity,
    maxY = -Infinity;
  for (const ring of rings)
    for (const [x, y] of ring) {
      minX = Math.min(minX, x);
      minY = Math.min(minY, y);
      maxX = Math.max(maxX, x);
      maxY = Math.max(maxY, y);
    }
  return [minX, minY, maxX, maxY];
}

export function start(): void {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const status = document.getElementById("status")!;
  const diagnostics = document.getElementById("diagnostics")!;

  const app = new ExplorerApp(new ExplorerClient(fetchTransport(BASE_URL)), {
    scale: 1,
    centerX: 0,
    centerY: 0,
    screenWidth: canvas.width,
    screenHeight: canvas.height,
  });

  let mapRings: MapPoint[][] = [];
  let dragStart: MapPoint | null = null;
  let panning = false;

  function redraw(): void {
    paint(ctx, buildDrawList(app, mapRings));
    const mode = `tool: ${app.toolMode}`;
    const badge =
      app.remainingRays !== null ? ` | remaining rays: ${app.remainingRays}` : "";
    const done = app.reductionComplete ? " | reduction complete" : "";
    const hint = app.hint ? ` | ${app.hint}` : "";
    status.textContent = mode + badge + done + hint;
    diagnostics.innerHTML = app.diagnostics
      .map(
        (d) =>
          `<li${d.overlap >= 0.85 ? ' class="redundant"' : ""}>line #${d.selection_order}: ${(
            d.overlap * 100
          ).toFixed(1)}% inside</li>`,
      )
      .join("");
  }

  async function loadMap(): Promise<void> {
    const text = (document.getElementById("map-input") as HTMLTextAreaElement).value;
    const payload = JSON.parse(text);
    await app.openSession(payload);
    mapRings = payload.coordinates as MapPoint[][];
    const [minX, minY, maxX, maxY] = ringBounds(mapRings);
    app.viewport = fitBounds(app.viewport, minX, minY, maxX, maxY);
    redraw();
  }

  (document.getElementById("load") as HTMLButtonElement).onclick = () => void loadMap();
  for (const mode of ["viewpoint", "draw-ray", "step"] as ToolMode[]) {
    (document.getElementById(`tool-${mode}`) as HTMLButtonElement).onclick = () => {
      app.setTool(mode);
      redraw();
    };
  }
  for (const layer of ["map", "medial", "isovists", "buckets", "axial"] as const) {
    (document.getElementById(`layer-${layer}`) as HTMLInputElement).onchange = () => {
      app.toggleLayer(layer);
      redraw();
    };
  }
  (document.getElementById("step-once") as HTMLButtonElement).onclick = () => {
    app.setTool("step");
    void app.onStep("global").then(() => {
      redraw();
      setTimeout(() => {
        app.clearFlash();
        redraw();
      }, REMOVED_RAY_FLASH_MS);
    });
  };

  canvas.onmousedown = (ev) => {
    const p: MapPoint = [ev.offsetX, ev.offsetY];
    if (ev.shiftKey) {
      panning = true;
      dragStart = p;
    } else if (app.toolMode === "draw-ray") {
      dragStart = p;
    }
  };
  canvas.onmousemove = (ev) => {
    if (panning && dragStart) {
      app.viewport = panBy(app.viewport, ev.offsetX - dragStart[0], ev.offsetY - dragStart[1]);
      dragStart = [ev.offsetX, ev.offsetY];
      redraw();
    }
  };
  canvas.onmouseup = (ev) => {
    const p: MapPoint = [ev.offsetX, ev.offsetY];
    if (panning) {
      panning = false;
      dragStart = null;
      return;
    }
    if (app.toolMode === "viewpoint") {
      void app.onClickViewpoint(p).then(redraw);
    } else if (app.toolMode === "draw-ray" && dragStart) {
      void app.onDrawRay(dragStart, p).then(redraw);
      dragStart = null;
    }
  };
  canvas.onwheel = (ev) => {
    ev.preventDefault();
    app.viewport = zoomAt(app.viewport, [ev.offsetX, ev.offsetY], ev.deltaY < 0 ? 1.2 : 1 / 1.2);
    redraw();
  };

  redraw();
}

if (typeof document !== "undefined" && document.getElementById("view")) {
  start();
}
