// Explorer application state: one active tool, overlays traced to service
// responses, and step-wise reduction. No geometry is computed client-side;
// every overlay carries exactly the coordinates the service returned.

import { ExplorerClient, ServiceFailure } from "./client";
import { screenToMap } from "./transform";
import type {
  BucketDiagnostic,
  LayerToggles,
  MapPoint,
  MedialResponse,
  Overlay,
  StepResponse,
  ToolMode,
  Viewport,
} from "./types";

// Removed rays flash briefly after a step, then drop; cosmetic only.
export const REMOVED_RAY_FLASH_MS = 600;
export const REDUNDANCY_THRESHOLD = 0.85;

export interface StepSummary {
  step: number;
  lineLength: number;
  removedCount: number;
  remaining: number;
}

export class ExplorerApp {
  sessionId: string | null = null;
  viewport: Viewport;
  toolMode: ToolMode = "viewpoint";
  layers: LayerToggles = { map: true, medial: true, isovists: true, buckets: true, axial: true };

  medialGraph: MedialResponse | null = null;
  // probe overlays are replaced by the next probe; axial overlays accumulate
  probeOverlays: Overlay[] = [];
  axialOverlays: Overlay[] = [];
  flashOverlays: Overlay[] = [];
  diagnostics: BucketDiagnostic[] = [];
  hint: string | null = null;
  reductionComplete = false;
  remainingRays: number | null = null;

  private stepCounter = 0;
  private strategyInUse: string | null = null;
  private pending = false;

  constructor(
    private readonly client: ExplorerClient,
    viewport: Viewport,
  ) {
    this.viewport = viewport;
  }

  get busy(): boolean {
    return this.pending;
  }

  async openSession(mapPayload: unknown, cellSize: "auto" | number = "auto"): Promise<void> {
    const info = await this.client.createSession(mapPayload, cellSize);
    this.sessionId = info.id;
    this.medialGraph = await this.client.medial(info.id);
    this.probeOverlays = [];
    this.axialOverlays = [];
    this.flashOverlays = [];
    this.diagnostics = [];
    this.stepCounter = 0;
    this.strategyInUse = null;
    this.reductionComplete = false;
    this.remainingRays = null;
    this.hint = null;
  }

  setTool(mode: ToolMode): void {
    this.toolMode = mode;
  }

  toggleLayer(name: keyof LayerToggles): void {
    // pure view concern: session state never changes here
    this.layers = { ...this.layers, [name]: !this.layers[name] };
  }

  /** Click in viewpoint mode: isovist + ridge overlays replace the last probe. */
  async onClickViewpoint(screenPoint: MapPoint): Promise<void> {
    if (this.sessionId === null || this.toolMode !== "viewpoint" || this.pending) return;
    const mapPoint = screenToMap(this.viewport, screenPoint);
    this.pending = true;
    try {
      const res = await this.client.isovist(this.sessionId, mapPoint);
      this.probeOverlays = [
        { kind: "isovist", geometry: res.isovist, provenance: { point: mapPoint } },
        { kind: "ridge", geometry: res.ridge, provenance: { point: mapPoint } },
      ];
      this.diagnostics = [];
      this.hint = null;
    } catch (err) {
      if (err instanceof ServiceFailure && err.status === 422) {
        this.hint = err.payload.message;
      } else {
        throw err;
      }
    } finally {
      this.pending = false;
    }
  }

  /** Drag in draw-ray mode: stretched ray + bucket + overlap diagnostics. */
  async onDrawRay(screenFrom: MapPoint, screenTo: MapPoint): Promise<void> {
    if (this.sessionId === null || this.toolMode !== "draw-ray" || this.pending) return;
    if (screenFrom[0] === screenTo[0] && screenFrom[1] === screenTo[1]) return; // zero-length drag
    const from = screenToMap(this.viewport, screenFrom);
    const to = screenToMap(this.viewport, screenTo);
    this.pending = true;
    try {
      const res = await this.client.bucket(this.sessionId, [from, to]);
      this.probeOverlays = [
        { kind: "bucket", geometry: res.bucket, provenance: { segment: [from, to] } },
        { kind: "ridge", geometry: res.ray, provenance: { segment: [from, to] } },
      ];
      this.diagnostics = res.diagnostics;
      this.hint = null;
    } catch (err) {
      if (err instanceof ServiceFailure && err.status === 422) {
        this.hint = err.payload.message;
      } else {
        throw err;
      }
    } finally {
      this.pending = false;
    }
  }

  /** One reduction step: the new line accumulates, removed rays flash. */
  async onStep(strategy: string, threshold: number = REDUNDANCY_THRESHOLD): Promise<StepSummary | null> {
    if (this.sessionId === null || this.toolMode !== "step" || this.pending) return null;
    if (this.reductionComplete) return null;
    this.pending = true;
    try {
      const res = await this.client.step(this.sessionId, strategy, threshold, this.stepCounter);
      if (res === null) {
        this.reductionComplete = true;
        this.remainingRays = 0;
        return null;
      }
      this.applyStep(res, strategy);
      return {
        step: res.step,
        lineLength: res.line_length,
        removedCount: res.removed_ray_ids.length,
        remaining: res.remaining,
      };
    } catch (err) {
      if (err instanceof ServiceFailure && err.status === 409) {
        this.hint = err.payload.message; // strategy switch mid-run: state unchanged
        return null;
      }
      throw err;
    } finally {
      this.pending = false;
    }
  }

  private applyStep(res: StepResponse, strategy: string): void {
    this.stepCounter = res.step + 1;
    this.strategyInUse = strategy;
    this.axialOverlays = [
      ...this.axialOverlays,
      {
        kind: "axial-line",
        geometry: res.line,
        provenance: { step: res.step, line_id: res.line_id },
      },
    ];
    this.flashOverlays = [
      {
        kind: "removed-ray",
        geometry: res.bucket,
        provenance: { step: res.step, removed_ray_ids: res.removed_ray_ids },
      },
    ];
    this.remainingRays = res.remaining;
    this.hint = null;
    // completion is observed via the service's 204, not inferred here
  }

  /** Called by the render loop once the flash duration elapsed. */
  clearFlash(): void {
    this.flashOverlays = [];
  }

  redundantDiagnostics(): BucketDiagnostic[] {
    return this.diagnostics.filter((d) => d.overlap >= REDUNDANCY_THRESHOLD);
  }

  get strategy(): string | null {
    return this.strategyInUse;
  }
}
