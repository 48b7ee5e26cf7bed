// Wire types for the axialgen explorer service and the client's view state.

export type MapPoint = [number, number];

export interface LineStringGeom {
  type: "LineString";
  coordinates: MapPoint[];
}

export interface PolygonGeom {
  type: "Polygon";
  coordinates: MapPoint[][];
}

export interface PointGeom {
  type: "Point";
  coordinates: MapPoint;
}

export interface Feature<G> {
  type: "Feature";
  geometry: G;
  properties: Record<string, unknown>;
}

export interface FeatureCollection<G> {
  type: "FeatureCollection";
  features: Feature<G>[];
}

export interface SessionInfo {
  id: string;
  cell_size: number;
  counts: { boundary_samples: number; medial_vertices: number; medial_edges: number };
}

export interface MedialResponse {
  cell_size: number;
  vertices: FeatureCollection<PointGeom>;
  edges: FeatureCollection<LineStringGeom>;
}

export interface IsovistResponse {
  isovist: PolygonGeom;
  area: number;
  ridge: LineStringGeom;
  ridge_length: number;
}

export interface BucketDiagnostic {
  selection_order: number;
  line_id: number;
  overlap: number;
}

export interface BucketResponse {
  ray: LineStringGeom;
  ray_length: number;
  bucket: PolygonGeom;
  bucket_area: number;
  crossings: MapPoint[];
  diagnostics: BucketDiagnostic[];
}

export interface StepResponse {
  step: number;
  line: LineStringGeom;
  line_id: number;
  line_length: number;
  bucket: PolygonGeom;
  removed_ray_ids: number[];
  remaining: number;
}

export interface AxialResponse {
  axial: FeatureCollection<LineStringGeom>;
  lines_selected: number;
  remaining_rays: number | null;
}

export interface ServiceError {
  code: string;
  message: string;
}

export type OverlayKind = "isovist" | "ridge" | "bucket" | "axial-line" | "removed-ray";

export interface Overlay {
  kind: OverlayKind;
  geometry: PolygonGeom | LineStringGeom;
  // request echo: the exact payload that produced this overlay
  provenance: Record<string, unknown>;
}

export type ToolMode = "viewpoint" | "draw-ray" | "step";

export interface LayerToggles {
  map: boolean;
  medial: boolean;
  isovists: boolean;
  buckets: boolean;
  axial: boolean;
}

export interface Viewport {
  // screen = (map - center) * scale * (1, -1) + screenCenter; y flips so
  // map north is up on the canvas
  scale: number;
  centerX: number;
  centerY: number;
  screenWidth: number;
  screenHeight: number;
}
