"""Local HTTP/JSON facade for the interactive explorer.

Sessions hold a validated map and its medial graph; the explorer client
queries isovists and buckets and steps the reduction one selection at a
time.  All geometry in responses comes straight from the core operations,
serialized without rounding.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import io as io_mod
from .bucket import build_bucket, ray_bucket_overlap, trace_crossings
from .errors import AxialGenError, GeometryError
from .geom import FreeSpaceMap, Point2, Ray, Segment, cast_ray, compute_isovist, contains
from .medial import MedialAxisGraph, auto_cell_size, build_graph
from .reduce import ReduceConfig, ReductionStepper, StepResult
from .ridge import RidgeConfig, isovist_ridge, rays_from_medial

_session_counter = itertools.count(1)


@dataclass
class Session:
    id: str
    space: FreeSpaceMap
    graph: MedialAxisGraph
    lock: threading.Lock = field(default_factory=threading.Lock)
    stepper: Optional[ReductionStepper] = None
    strategy: Optional[str] = None
    threshold: float = 0.85
    step_payloads: list[dict] = field(default_factory=list)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _line_geojson(ray: Ray) -> dict:
    return {
        "type": "LineString",
        "coordinates": [[ray.seg.a.x, ray.seg.a.y], [ray.seg.b.x, ray.seg.b.y]],
    }


def _polygon_geojson(boundary) -> dict:
    ring = [[float(x), float(y)] for x, y in boundary]
    ring.append(ring[0])
    return {"type": "Polygon", "coordinates": [ring]}


def create_app() -> FastAPI:
    app = FastAPI(title="axialgen explorer service")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def get_session(session_id: str) -> Optional[Session]:
        with store_lock:
            return sessions.get(session_id)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        payload = body.get("map")
        if payload is None:
            return _error(400, "MissingMap", "request body needs a 'map' GeoJSON object")
        cell_size = body.get("cell_size", "auto")
        try:
            if isinstance(payload, str):
                rings = io_mod._parse_wkt(payload)
            else:
                rings = io_mod._find_polygon(payload)
            space = io_mod.polygon_to_free_space(rings)
            cell = auto_cell_size(space) if cell_size == "auto" else float(cell_size)
            graph = build_graph(space, cell)
        except (AxialGenError, ValueError) as exc:
            cause = exc.__cause__
            code = type(cause).__name__ if cause is not None else type(exc).__name__
            return _error(400, code, str(exc))
        session_id = f"s{next(_session_counter)}"
        session = Session(id=session_id, space=space, graph=graph)
        with store_lock:
            sessions[session_id] = session
        return {
            "id": session_id,
            "cell_size": graph.cell_size,
            "counts": {
                "boundary_samples": len(graph.samples),
                "medial_vertices": len(graph.vertices),
                "medial_edges": len(graph.edges),
            },
        }

    @app.get("/sessions/{session_id}/medial")
    def get_medial(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        return io_mod.graph_geojson(session.graph)

    @app.post("/sessions/{session_id}/isovist")
    async def query_isovist(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        body = await request.json()
        try:
            x, y = body["point"]
            p = Point2(float(x), float(y))
        except (KeyError, TypeError, ValueError):
            return _error(400, "BadRequest", "body needs 'point': [x, y]")
        if not contains(session.space, p):
            return _error(422, "ViewpointOutsideFreeSpace", "point is not in free space")
        iso = compute_isovist(session.space, p)
        ridge = isovist_ridge(session.space, p)
        return {
            "isovist": _polygon_geojson(iso.boundary),
            "area": iso.area,
            "ridge": _line_geojson(ridge),
            "ridge_length": ridge.length,
        }

    @app.post("/sessions/{session_id}/bucket")
    async def query_bucket(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        body = await request.json()
        try:
            (x1, y1), (x2, y2) = body["segment"]
            seg = Segment(Point2(float(x1), float(y1)), Point2(float(x2), float(y2)))
        except (KeyError, TypeError, ValueError, GeometryError):
            return _error(400, "BadRequest", "body needs 'segment': [[x1, y1], [x2, y2]]")
        mid = Point2((seg.a.x + seg.b.x) / 2, (seg.a.y + seg.b.y) / 2)
        if not contains(session.space, mid):
            return _error(422, "SegmentOutsideFreeSpace", "segment midpoint is not in free space")
        stretched = cast_ray(session.space, mid, seg.direction())
        stretched = Ray(seg=stretched.seg, origin=stretched.origin, length=stretched.length, id=-2)
        trace = trace_crossings(stretched, session.graph)
        bkt = build_bucket(stretched, trace, session.space)
        with session.lock:
            selected = list(session.stepper.selected) if session.stepper else []
        diagnostics = [
            {
                "selection_order": i,
                "line_id": line.id,
                "overlap": ray_bucket_overlap(line, bkt),
            }
            for i, line in enumerate(selected)
        ]
        return {
            "ray": _line_geojson(stretched),
            "ray_length": stretched.length,
            "bucket": _polygon_geojson(bkt.boundary),
            "bucket_area": bkt.area,
            "crossings": [[p.x, p.y] for p in trace.crossings],
            "diagnostics": diagnostics,
        }

    @app.post("/sessions/{session_id}/reduce/step")
    async def step_reduction(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        body = await request.json()
        strategy = body.get("strategy", "global")
        threshold = float(body.get("overlap_threshold", 0.85))
        step = body.get("step")
        with session.lock:
            if session.stepper is None:
                try:
                    cfg = ReduceConfig(overlap_threshold=threshold, strategy=strategy)
                except AxialGenError as exc:
                    return _error(400, type(exc).__name__, str(exc))
                rays = rays_from_medial(session.space, session.graph, RidgeConfig())
                session.stepper = ReductionStepper(rays, session.graph, session.space, cfg)
                session.strategy = strategy
                session.threshold = threshold
            elif strategy != session.strategy or threshold != session.threshold:
                return _error(
                    409,
                    "StrategyChanged",
                    f"reduction already running with strategy {session.strategy!r} "
                    f"at threshold {session.threshold}",
                )
            if step is not None and step < len(session.step_payloads):
                return session.step_payloads[step]
            if step is not None and step > len(session.step_payloads):
                return _error(
                    400,
                    "StepOutOfOrder",
                    f"next step is {len(session.step_payloads)}, got {step}",
                )
            result: Optional[StepResult] = session.stepper.step()
            if result is None:
                return Response(status_code=204)
            payload = {
                "step": result.step,
                "line": _line_geojson(result.line),
                "line_id": result.line.id,
                "line_length": result.line.length,
                "bucket": _polygon_geojson(result.bucket.boundary),
                "removed_ray_ids": list(result.removed_ray_ids),
                "remaining": result.remaining,
            }
            session.step_payloads.append(payload)
            return payload

    @app.get("/sessions/{session_id}/axial")
    def get_axial(session_id: str):
        session = get_session(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        with session.lock:
            selected = list(session.stepper.selected) if session.stepper else []
            remaining = session.stepper.remaining() if session.stepper else None
        features = [io_mod.ray_feature(r, selection_order=i) for i, r in enumerate(selected)]
        return {
            "axial": io_mod.feature_collection(features),
            "lines_selected": len(selected),
            "remaining_rays": remaining,
        }

    return app
