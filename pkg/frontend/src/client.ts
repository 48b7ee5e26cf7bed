// Thin service client; the transport is injectable so tests can replay
// recorded exchanges.

import type {
  AxialResponse,
  BucketResponse,
  IsovistResponse,
  MapPoint,
  MedialResponse,
  ServiceError,
  SessionInfo,
  StepResponse,
} from "./types";

export interface TransportResult {
  status: number;
  body: unknown;
}

export type Transport = (
  method: "GET" | "POST",
  path: string,
  body?: unknown,
) => Promise<TransportResult>;

export class ServiceFailure extends Error {
  constructor(
    public readonly status: number,
    public readonly payload: ServiceError,
  ) {
    super(`${payload.code}: ${payload.message}`);
  }
}

export function fetchTransport(baseUrl: string): Transport {
  return async (method, path, body) => {
    const res = await fetch(baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    return { status: res.status, body: text ? JSON.parse(text) : null };
  };
}

function expect<T>(result: TransportResult, okStatus: number): T {
  if (result.status !== okStatus) {
    const payload = (result.body ?? { code: "Unknown", message: "no body" }) as ServiceError;
    throw new ServiceFailure(result.status, payload);
  }
  return result.body as T;
}

export class ExplorerClient {
  constructor(private readonly transport: Transport) {}

  async createSession(mapPayload: unknown, cellSize: "auto" | number = "auto"): Promise<SessionInfo> {
    const res = await this.transport("POST", "/sessions", { map: mapPayload, cell_size: cellSize });
    return expect<SessionInfo>(res, 201);
  }

  async medial(sessionId: string): Promise<MedialResponse> {
    const res = await this.transport("GET", `/sessions/${sessionId}/medial`);
    return expect<MedialResponse>(res, 200);
  }

  async isovist(sessionId: string, point: MapPoint): Promise<IsovistResponse> {
    const res = await this.transport("POST", `/sessions/${sessionId}/isovist`, { point });
    return expect<IsovistResponse>(res, 200);
  }

  async bucket(sessionId: string, segment: [MapPoint, MapPoint]): Promise<BucketResponse> {
    const res = await this.transport("POST", `/sessions/${sessionId}/bucket`, { segment });
    return expect<BucketResponse>(res, 200);
  }

  /** One reduction step; null means the reduction is complete (204). */
  async step(
    sessionId: string,
    strategy: string,
    overlapThreshold: number,
    step: number,
  ): Promise<StepResponse | null> {
    const res = await this.transport("POST", `/sessions/${sessionId}/reduce/step`, {
      strategy,
      overlap_threshold: overlapThreshold,
      step,
    });
    if (res.status === 204) return null;
    return expect<StepResponse>(res, 200);
  }

  async axial(sessionId: string): Promise<AxialResponse> {
    const res = await this.transport("GET", `/sessions/${sessionId}/axial`);
    return expect<AxialResponse>(res, 200);
  }
}
