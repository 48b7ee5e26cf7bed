// Invertible viewport transform between map and screen coordinates.

import type { MapPoint, Viewport } from "./types";

export function mapToScreen(v: Viewport, p: MapPoint): MapPoint {
  return [
    (p[0] - v.centerX) * v.scale + v.screenWidth / 2,
    (v.centerY - p[1]) * v.scale + v.screenHeight / 2,
  ];
}

export function screenToMap(v: Viewport, p: MapPoint): MapPoint {
  return [
    (p[0] - v.screenWidth / 2) / v.scale + v.centerX,
    v.centerY - (p[1] - v.screenHeight / 2) / v.scale,
  ];
}

export function panBy(v: Viewport, dxScreen: number, dyScreen: number): Viewport {
  return {
    ...v,
    centerX: v.centerX - dxScreen / v.scale,
    centerY: v.centerY + dyScreen / v.scale,
  };
}

export function zoomAt(v: Viewport, screenPoint: MapPoint, factor: number): Viewport {
  // keep the map point under the cursor fixed while scaling
  const anchor = screenToMap(v, screenPoint);
  const scale = v.scale * factor;
  const next = { ...v, scale };
  const moved = screenToMap(next, screenPoint);
  return {
    ...next,
    centerX: next.centerX + (anchor[0] - moved[0]),
    centerY: next.centerY + (anchor[1] - moved[1]),
  };
}

export function fitBounds(
  v: Viewport,
  minX: number,
  minY: number,
  maxX: number,
  maxY: number,
  padding = 0.05,
): Viewport {
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min(
    v.screenWidth / (spanX * (1 + 2 * padding)),
    v.screenHeight / (spanY * (1 + 2 * padding)),
  );
  return {
    ...v,
    scale,
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
  };
}
