"""Map ingestion (GeoJSON, WKT) and result export (GeoJSON, SVG, stats)."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bucket import Bucket
from .errors import GeometryError, NoPolygonFound, ParseError, ValidationError
from .geom import FreeSpaceMap, Ray, build_free_space
from .medial import MedialAxisGraph
from .reduce import AxialMap


def _find_polygon(obj) -> list[list[list[float]]]:
    """First Polygon coordinate array in a GeoJSON object tree."""
    if not isinstance(obj, dict):
        raise ParseError("GeoJSON root must be an object")
    kind = obj.get("type")
    if kind == "Polygon":
        return obj["coordinates"]
    if kind == "MultiPolygon":
        raise ValidationError("multi-polygon inputs are not supported; supply one polygon per run")
    if kind == "Feature":
        geom = obj.get("geometry")
        if isinstance(geom, dict):
            try:
                return _find_polygon(geom)
            except NoPolygonFound:
                pass
        raise NoPolygonFound("feature carries no polygon geometry")
    if kind == "FeatureCollection":
        for feature in obj.get("features", []):
            try:
                return _find_polygon(feature)
            except NoPolygonFound:
                continue
        raise NoPolygonFound("no polygon feature in collection")
    if kind == "GeometryCollection":
        for geom in obj.get("geometries", []):
            try:
                return _find_polygon(geom)
            except NoPolygonFound:
                continue
        raise NoPolygonFound("no polygon geometry in collection")
    raise NoPolygonFound(f"no polygon found in GeoJSON object of type {kind!r}")


_WKT_POLYGON = re.compile(r"^\s*POLYGON\s*\(\s*(.*)\)\s*$", re.IGNORECASE | re.DOTALL)


def _parse_wkt(text: str) -> list[list[list[float]]]:
    if re.match(r"^\s*MULTIPOLYGON", text, re.IGNORECASE):
        raise ValidationError("multi-polygon inputs are not supported; supply one polygon per run")
    m = _WKT_POLYGON.match(text)
    if not m:
        raise NoPolygonFound("input does not contain a WKT POLYGON")
    body = m.group(1)
    rings = []
    for ring_text in re.findall(r"\(([^()]*)\)", body):
        ring = []
        for pair in ring_text.split(","):
            parts = pair.split()
            if len(parts) != 2:
                raise ParseError(f"malformed WKT coordinate {pair!r}")
            ring.append([float(parts[0]), float(parts[1])])
        rings.append(ring)
    if not rings:
        raise ParseError("WKT POLYGON contains no rings")
    return rings


def polygon_to_free_space(rings: Sequence[Sequence[Sequence[float]]]) -> FreeSpaceMap:
    try:
        return build_free_space(rings[0], rings[1:])
    except GeometryError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc


def load_map(path: str | Path, format: str | None = None) -> FreeSpaceMap:
    """Read the first polygon-with-holes from a GeoJSON or WKT file."""
    path = Path(path)
    text = path.read_text()
    if format is None:
        format = "wkt" if path.suffix.lower() in (".wkt", ".txt") else "geojson"
    if format == "geojson":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {path}: {exc}") from exc
        rings = _find_polygon(obj)
    elif format == "wkt":
        rings = _parse_wkt(text)
    else:
        raise ParseError(f"unknown map format {format!r}")
    return polygon_to_free_space(rings)


# --- GeoJSON construction -------------------------------------------------

def ray_feature(ray: Ray, selection_order: int | None = None) -> dict:
    props: dict = {"id": ray.id, "length": ray.length}
    if selection_order is not None:
        props["selection_order"] = selection_order
    return {
        "type": "Feature",
        "geometry": {
            "type": "LineString",
            "coordinates": [[ray.seg.a.x, ray.seg.a.y], [ray.seg.b.x, ray.seg.b.y]],
        },
        "properties": props,
    }


def bucket_feature(b: Bucket) -> dict:
    ring = [[float(x), float(y)] for x, y in b.boundary]
    ring.append(ring[0])
    return {
        "type": "Feature",
        "geometry": {"type": "Polygon", "coordinates": [ring]},
        "properties": {"owner_ray_id": b.owner_ray_id, "area": b.area},
    }


def feature_collection(features: Iterable[dict]) -> dict:
    return {"type": "FeatureCollection", "features": list(features)}


def graph_geojson(graph: MedialAxisGraph) -> dict:
    pos = graph.positions
    vertex_features = [
        {
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [v.pos.x, v.pos.y]},
            "properties": {"id": v.id, "clearance": v.clearance},
        }
        for v in graph.vertices
    ]
    edge_features = [
        {
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": [
                    [float(pos[a][0]), float(pos[a][1])],
                    [float(pos[b][0]), float(pos[b][1])],
                ],
            },
            "properties": {"vertex_ids": [a, b]},
        }
        for a, b in graph.edges
    ]
    return {
        "cell_size": graph.cell_size,
        "vertices": feature_collection(vertex_features),
        "edges": feature_collection(edge_features),
    }


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def export_axial_map(axial: AxialMap, out_dir: str | Path, outputs: set[str] | None = None) -> list[Path]:
    """Write axial lines, buckets, and stats; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = outputs or {"axial-geojson", "stats-json"}
    written: list[Path] = []
    if "axial-geojson" in outputs:
        fc = feature_collection(
            ray_feature(r, selection_order=i) for i, r in enumerate(axial.lines)
        )
        path = out_dir / "axial.geojson"
        _dump_json(fc, path)
        written.append(path)
        bpath = out_dir / "buckets.geojson"
        _dump_json(feature_collection(bucket_feature(b) for b in axial.buckets), bpath)
        written.append(bpath)
    if "stats-json" in outputs:
        stats = {
            "lines_selected": len(axial.lines),
            "config": {
                "strategy": axial.config.strategy,
                "overlap_threshold": axial.config.overlap_threshold,
                "coverage_target": axial.config.coverage_target,
                "connectivity_tiebreak": axial.config.connectivity_tiebreak,
            },
            **axial.stats,
        }
        path = out_dir / "stats.json"
        _dump_json(stats, path)
        written.append(path)
    return written


def load_axial_geojson(path: str | Path) -> list[list[list[float]]]:
    """Coordinates of every LineString feature, for round-trip checks."""
    obj = json.loads(Path(path).read_text())
    return [f["geometry"]["coordinates"] for f in obj.get("features", [])]


# --- SVG rendering ----------------------------------------------------------

_SVG_STYLE = {
    "map": 'fill="#f4f1ea" fill-rule="evenodd" stroke="#4a4a4a" stroke-width="{sw}"',
    "medial": 'fill="none" stroke="#4477cc" stroke-width="{sw}"',
    "buckets": 'fill="#7fbf7f" fill-opacity="0.25" stroke="#2d7f2d" stroke-width="{sw}"',
    "rays": 'fill="none" stroke="#d08770" stroke-width="{sw}"',
    "axial": 'fill="none" stroke="#bf1d1d" stroke-width="{sw2}"',
}


def _fmt(x: float) -> str:
    return repr(float(x))


def _path_for_ring(ring: np.ndarray) -> str:
    coords = " L ".join(f"{_fmt(x)} {_fmt(y)}" for x, y in ring)
    return f"M {coords} Z"


def _svg_line(a, b) -> str:
    return (
        f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" '
        f'x2="{_fmt(b[0])}" y2="{_fmt(b[1])}"/>'
    )


def render_svg(
    space: FreeSpaceMap,
    medial: MedialAxisGraph | None = None,
    rays: Sequence[Ray] = (),
    buckets: Sequence[Bucket] = (),
    axial: Sequence[Ray] = (),
) -> str:
    """Deterministic SVG document, one group per populated layer.

    Layer z-order, bottom to top: map (outer ring with hole subpaths),
    medial axes, buckets, rays, axial lines.  Viewport is the map bbox
    padded by 5%.
    """
    x0, y0, x1, y1 = space.bbox
    pad = 0.05 * max(x1 - x0, y1 - y0)
    vb = (x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad)
    sw = _fmt(0.002 * max(vb[2], vb[3]))
    sw2 = _fmt(0.005 * max(vb[2], vb[3]))

    def style(layer: str) -> str:
        return _SVG_STYLE[layer].format(sw=sw, sw2=sw2)

    map_path = " ".join([_path_for_ring(space.outer)] + [_path_for_ring(h) for h in space.holes])
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(vb[0])} {_fmt(-(vb[1] + vb[3]))} {_fmt(vb[2])} {_fmt(vb[3])}">',
        '<g transform="scale(1,-1)">',
        f'<g id="map" {style("map")}>',
        f'<path d="{map_path}"/>',
        "</g>",
    ]
    if medial is not None and medial.vertices:
        lines.append(f'<g id="medial" {style("medial")}>')
        pos = medial.positions
        for a, b in medial.edges:
            lines.append(_svg_line(pos[a], pos[b]))
        lines.append("</g>")
    if buckets:
        lines.append(f'<g id="buckets" {style("buckets")}>')
        for b in buckets:
            lines.append(f'<path d="{_path_for_ring(b.boundary)}"/>')
        lines.append("</g>")
    if rays:
        lines.append(f'<g id="rays" {style("rays")}>')
        for r in rays:
            lines.append(_svg_line((r.seg.a.x, r.seg.a.y), (r.seg.b.x, r.seg.b.y)))
        lines.append("</g>")
    if axial:
        lines.append(f'<g id="axial" {style("axial")}>')
        for r in axial:
            lines.append(_svg_line((r.seg.a.x, r.seg.a.y), (r.seg.b.x, r.seg.b.y)))
        lines.append("</g>")
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
