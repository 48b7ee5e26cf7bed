// Turns app state into a flat draw list of screen-space primitives.
// Rendered geometry is exactly the service geometry put through the
// viewport transform; nothing is simplified or recomputed.

import { ExplorerApp } from "./app";
import { mapToScreen } from "./transform";
import type { LineStringGeom, MapPoint, Overlay, PolygonGeom, Viewport } from "./types";

export interface DrawItem {
  layer: "map" | "medial" | "isovists" | "buckets" | "axial" | "flash";
  kind: "polygon" | "polyline";
  points: MapPoint[]; // screen space
  style: string;
}

const STYLES: Record<string, string> = {
  isovist: "fill:rgba(214,69,65,0.25);stroke:#d64541",
  ridge: "stroke:#1f3a93;width:2",
  bucket: "fill:rgba(38,166,91,0.25);stroke:#26a65b",
  "axial-line": "stroke:#cf000f;width:3",
  "removed-ray": "stroke:rgba(150,150,150,0.6);width:1",
};

function project(viewport: Viewport, coords: MapPoint[]): MapPoint[] {
  return coords.map((p) => mapToScreen(viewport, p));
}

function overlayItems(viewport: Viewport, overlay: Overlay, layer: DrawItem["layer"]): DrawItem[] {
  if (overlay.geometry.type === "Polygon") {
    const poly = overlay.geometry as PolygonGeom;
    return poly.coordinates.map((ring) => ({
      layer,
      kind: "polygon" as const,
      points: project(viewport, ring),
      style: STYLES[overlay.kind],
    }));
  }
  const line = overlay.geometry as LineStringGeom;
  return [
    {
      layer,
      kind: "polyline",
      points: project(viewport, line.coordinates),
      style: STYLES[overlay.kind],
    },
  ];
}

export function buildDrawList(app: ExplorerApp, mapRings: MapPoint[][] = []): DrawItem[] {
  const items: DrawItem[] = [];
  const v = app.viewport;
  if (app.layers.map) {
    for (const ring of mapRings) {
      items.push({
        layer: "map",
        kind: "polygon",
        points: project(v, ring),
        style: "fill:none;stroke:#4a4a4a",
      });
    }
  }
  if (app.layers.medial && app.medialGraph) {
    for (const edge of app.medialGraph.edges.features) {
      items.push({
        layer: "medial",
        kind: "polyline",
        points: project(v, edge.geometry.coordinates),
        style: "stroke:#4477cc;width:1",
      });
    }
  }
  if (app.layers.buckets || app.layers.isovists) {
    for (const overlay of app.probeOverlays) {
      const isBucket = overlay.kind === "bucket";
      if (isBucket && !app.layers.buckets) continue;
      if (!isBucket && !app.layers.isovists) continue;
      items.push(...overlayItems(v, overlay, isBucket ? "buckets" : "isovists"));
    }
  }
  for (const overlay of app.flashOverlays) {
    items.push(...overlayItems(v, overlay, "flash"));
  }
  if (app.layers.axial) {
    for (const overlay of app.axialOverlays) {
      items.push(...overlayItems(v, overlay, "axial"));
    }
  }
  return items;
}

export function paint(ctx: CanvasRenderingContext2D, items: DrawItem[]): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const item of items) {
    const style = parseStyle(item.style);
    ctx.beginPath();
    item.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    if (item.kind === "polygon") {
      ctx.closePath();
      if (style.fill && style.fill !== "none") {
        ctx.fillStyle = style.fill;
        ctx.fill();
      }
    }
    ctx.strokeStyle = style.stroke ?? "#000";
    ctx.lineWidth = style.width ?? 1;
    ctx.stroke();
  }
}

function parseStyle(style: string): { fill?: string; stroke?: string; width?: number } {
  const out: { fill?: string; stroke?: string; width?: number } = {};
  for (const part of style.split(";")) {
    const [key, value] = part.split(":");
    if (key === "fill") out.fill = value;
    if (key === "stroke") out.stroke = value;
    if (key === "width") out.width = Number(value);
  }
  return out;
}
