"""Bucket construction: the closed polygon a ray can see along its length.

The bucket of a ray is chained from boundary points associated with the
skeleton structure the ray traverses: two associates flanking each ray
endpoint, plus the associates of branch vertices harvested along the ray
(skeleton vertices sitting on the ray, and the apex vertex between each
pair of consecutive transverse crossings whose clearance disk the ray
passes through).  The chained ring is clipped against free space so a
bucket never includes hole interiors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from shapely.geometry import LineString, Polygon
from shapely.validation import make_valid

from .errors import DegenerateBucket, GeometryError
from .geom import FreeSpaceMap, Point2, Ray, length_inside
from .medial import MedialAxisGraph, MedialVertex

# Vertices within this fraction of the scene diagonal of the ray line are
# treated as lying on the ray (collinear skeleton stretches).
NEAR_LINE_REL = 1e-6


@dataclass(frozen=True)
class BucketTrace:
    """Skeleton structure collected along a ray before chaining its bucket.

    ``branch_points`` are the skeleton vertices the construction names:
    vertices sitting on the ray plus the apex vertex between consecutive
    crossings.  ``support_vertices`` is the full set of vertices whose
    clearance disk the ray passes through; their associates line the walls
    the ray runs along and provide the bucket's chaining points.
    """

    ray_id: int
    crossings: tuple[Point2, ...]
    branch_points: tuple[MedialVertex, ...]
    endpoint_associates: tuple[Point2, Point2, Point2, Point2]
    branch_associates: tuple[tuple[Point2, ...], ...]
    collinear_spans: tuple[tuple[float, float], ...]
    support_vertices: tuple[MedialVertex, ...] = ()
    cell_size: float = 0.0


@dataclass(frozen=True)
class Bucket:
    owner_ray_id: int
    boundary: np.ndarray  # (n, 2) closed ring, not repeated
    area: float


def _merge_intervals(spans: list[tuple[float, float]]) -> list[tuple[float, float]]:
    if not spans:
        return []
    spans = sorted(spans)
    merged = [spans[0]]
    for lo, hi in spans[1:]:
        if lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _endpoint_flankers(
    end: np.ndarray,
    u: np.ndarray,
    n: np.ndarray,
    samples_xy: np.ndarray,
    reach: float,
    band: float,
) -> tuple[Point2, Point2]:
    """Nearest boundary sample on each side of the ray at one endpoint."""
    rel = samples_xy - end
    d = np.linalg.norm(rel, axis=1)
    side = rel @ n
    near = d <= reach
    best: list[Point2 | None] = [None, None]
    for k, mask in enumerate((near & (side > band), near & (side < -band))):
        idx = np.flatnonzero(mask)
        if len(idx):
            j = idx[np.argmin(d[idx])]
            best[k] = Point2(float(samples_xy[j, 0]), float(samples_xy[j, 1]))
    if best[0] is None and best[1] is None:
        p = Point2(float(end[0]), float(end[1]))
        return p, p
    if best[0] is None:
        best[0] = best[1]
    if best[1] is None:
        best[1] = best[0]
    return best[0], best[1]  # type: ignore[return-value]


def trace_crossings(ray: Ray, graph: MedialAxisGraph) -> BucketTrace:
    """Crossings, branch vertices, and associates of a ray over the skeleton."""
    a = ray.seg.a.as_array()
    b = ray.seg.b.as_array()
    L = ray.length
    u = (b - a) / L
    n = np.array([-u[1], u[0]])

    samples_xy = graph.sample_positions
    pos = graph.positions
    if len(pos) == 0 and len(samples_xy) == 0:
        return BucketTrace(ray.id, (), (), (ray.seg.a, ray.seg.a, ray.seg.b, ray.seg.b), (), ())

    ref = samples_xy if len(samples_xy) else pos
    diag = float(np.linalg.norm(ref.max(axis=0) - ref.min(axis=0)))
    band = NEAR_LINE_REL * diag
    cell = graph.cell_size if graph.cell_size > 0 else band

    t_v = (pos - a) @ u
    side_v = (pos - a) @ n

    # Transverse crossings: edges whose endpoints straddle the ray line.
    cross_ts: list[float] = []
    collinear: list[tuple[float, float]] = []
    for i, j in graph.edges:
        si, sj = side_v[i], side_v[j]
        if abs(si) <= band and abs(sj) <= band:
            lo, hi = sorted((t_v[i], t_v[j]))
            lo, hi = max(lo, 0.0), min(hi, L)
            if hi > lo:
                collinear.append((lo, hi))
            continue
        if (si > band and sj < -band) or (si < -band and sj > band):
            t_cross = t_v[i] + (t_v[j] - t_v[i]) * si / (si - sj)
            if -band <= t_cross <= L + band:
                cross_ts.append(float(t_cross))

    cross_ts.sort()
    clusters: list[list[float]] = []
    for t in cross_ts:
        if clusters and t - clusters[-1][-1] <= max(cell * 0.5, band):
            clusters[-1].append(t)
        else:
            clusters.append([t])
    crossing_ts = [float(np.mean(c)) for c in clusters]
    crossings = tuple(
        Point2(float(q[0]), float(q[1])) for q in (a + t * u for t in crossing_ts)
    )

    # Support vertices: the ray passes through their clearance disk, i.e.
    # through the local corridor cross-section they stand for.
    clear = graph.clearances
    t_clamped = np.clip(t_v, 0.0, L)
    foot = a[None, :] + t_clamped[:, None] * u[None, :]
    seg_dist = np.linalg.norm(pos - foot, axis=1)
    support_mask = seg_dist < clear
    support_idx = np.flatnonzero(support_mask)
    support = tuple(
        graph.vertices[int(i)]
        for i in sorted(support_idx, key=lambda i: (t_v[i], side_v[i], int(i)))
    )

    # Named branch vertices: on-ray vertices plus the apex per side between
    # consecutive crossings.
    chosen: dict[int, MedialVertex] = {}
    on_ray = np.flatnonzero(
        (np.abs(side_v) <= band) & (t_v >= -cell) & (t_v <= L + cell)
    )
    for i in on_ray:
        chosen[int(i)] = graph.vertices[int(i)]

    for t0, t1 in zip(crossing_ts[:-1], crossing_ts[1:]):
        gap = t1 - t0
        if gap <= cell:
            continue
        margin = min(cell, gap / 4.0)
        in_gap = (
            support_mask
            & (t_v > t0 + margin)
            & (t_v < t1 - margin)
            & (np.abs(side_v) > band)
        )
        for sign in (1.0, -1.0):
            idx = np.flatnonzero(in_gap & (np.sign(side_v) == sign))
            if len(idx):
                apex = idx[np.argmax(np.abs(side_v[idx]))]
                chosen[int(apex)] = graph.vertices[int(apex)]

    ordered = sorted(chosen.values(), key=lambda v: (t_v[v.id], side_v[v.id], v.id))
    branch_points = tuple(ordered)
    branch_associates = tuple(v.associated for v in ordered)

    reach = 2.0 * cell
    e11, e12 = _endpoint_flankers(a, u, n, samples_xy, reach, band)
    e21, e22 = _endpoint_flankers(b, u, n, samples_xy, reach, band)

    return BucketTrace(
        ray_id=ray.id,
        crossings=crossings,
        branch_points=branch_points,
        endpoint_associates=(e11, e12, e21, e22),
        branch_associates=branch_associates,
        collinear_spans=tuple(_merge_intervals(collinear)),
        support_vertices=support,
        cell_size=cell,
    )


def _visible_corners(
    ray: Ray, trace: BucketTrace, space: FreeSpaceMap
) -> list[Point2]:
    """Ring corners inside a support vertex's reach and visible from the ray.

    A corner wedge the ray can see belongs to the space the ray covers;
    without these points the chained bucket clips every room corner.
    """
    if not trace.support_vertices:
        return []
    corners = space._vertices
    sup = np.array([(v.pos.x, v.pos.y) for v in trace.support_vertices])
    reach = np.array([v.clearance for v in trace.support_vertices]) + trace.cell_size
    d = np.linalg.norm(corners[:, None, :] - sup[None, :, :], axis=2)
    near = (d <= reach[None, :]).any(axis=1)
    if not near.any():
        return []
    a = ray.seg.a.as_array()
    u = ray.seg.direction()
    out: list[Point2] = []
    fracs = np.linspace(0.15, 0.85, 6)
    for c in corners[near]:
        t = float(np.clip((c - a) @ u, 0.0, ray.length))
        foot = a + t * u
        probe = c[None, :] + fracs[:, None] * (foot - c)[None, :]
        if space.contains_many(probe).all():
            out.append(Point2(float(c[0]), float(c[1])))
    return out


def build_bucket(ray: Ray, trace: BucketTrace, space: FreeSpaceMap) -> Bucket:
    """Chain the trace's associate points into the ray's bucket polygon.

    The two ray endpoints and the associate points are chained by polar
    angle around the ray midpoint (the bucket is tube-like around its
    ray, so the angular order walks one side out and the other back);
    the ring is then clipped against free space.
    """
    if trace.ray_id != ray.id:
        raise GeometryError(f"trace belongs to ray {trace.ray_id}, not {ray.id}")
    a = ray.seg.a.as_array()
    b = ray.seg.b.as_array()
    L = ray.length
    u = (b - a) / L
    band = NEAR_LINE_REL * space.diagonal

    pool: list[Point2] = list(trace.endpoint_associates)
    sources = trace.support_vertices if trace.support_vertices else trace.branch_points
    for v in sources:
        pool.extend(v.associated)
    pool.extend(_visible_corners(ray, trace, space))

    mid = 0.5 * (a + b)
    perp = np.array([-u[1], u[0]])
    entries: list[tuple[float, float, float, float]] = []
    for p in pool:
        d = np.array((p.x, p.y)) - mid
        if abs(float(d @ perp)) <= band:
            continue  # on the ray line: adds nothing to the chain
        ang = math.atan2(float(d[0] * u[1] - d[1] * u[0]), float(d @ u))
        entries.append((ang, float(np.hypot(*d)), p.x, p.y))
    for end in (ray.seg.a, ray.seg.b):
        d = np.array((end.x, end.y)) - mid
        ang = math.atan2(float(d[0] * u[1] - d[1] * u[0]), float(d @ u))
        entries.append((ang, float(np.hypot(*d)), end.x, end.y))
    entries.sort()
    ring = [(x, y) for _, _, x, y in entries]

    # Drop consecutive duplicates (wrap included).
    eps = max(space.epsilon, band * 1e-3)
    cleaned: list[tuple[float, float]] = []
    for pt in ring:
        if cleaned and math.hypot(pt[0] - cleaned[-1][0], pt[1] - cleaned[-1][1]) <= eps:
            continue
        cleaned.append(pt)
    while len(cleaned) > 1 and math.hypot(
        cleaned[0][0] - cleaned[-1][0], cleaned[0][1] - cleaned[-1][1]
    ) <= eps:
        cleaned.pop()
    if len(cleaned) < 3:
        raise DegenerateBucket(
            f"bucket of ray {ray.id} has fewer than 3 distinct chain points"
        )

    shape = make_valid(Polygon(cleaned))
    free = Polygon(
        [tuple(p) for p in space.outer], [[tuple(p) for p in h] for h in space.holes]
    )
    clipped = shape.intersection(free)
    parts = [g for g in getattr(clipped, "geoms", [clipped]) if g.geom_type == "Polygon" and g.area > 0]
    if not parts:
        raise DegenerateBucket(f"bucket of ray {ray.id} vanished after clipping")
    ray_line = LineString([tuple(a), tuple(b)])
    part = max(parts, key=lambda g: (ray_line.intersection(g).length, g.area))
    boundary = np.array(part.exterior.coords)[:-1]
    return Bucket(owner_ray_id=ray.id, boundary=boundary, area=float(part.area))


def ray_bucket_overlap(candidate: Ray, b: Bucket) -> float:
    """Fraction of the candidate ray's length inside the bucket polygon."""
    frac = length_inside(candidate.seg, b.boundary) / candidate.length
    return float(min(1.0, max(0.0, frac)))


def fallback_bucket(ray: Ray, space: FreeSpaceMap) -> Bucket:
    """Thin quadrilateral tube around a ray whose trace degenerated."""
    a = ray.seg.a.as_array()
    b = ray.seg.b.as_array()
    u = (b - a) / ray.length
    n = np.array([-u[1], u[0]])
    h = max(100.0 * space.epsilon, 1e-6 * ray.length)
    ring = np.array([a + h * n, b + h * n, b - h * n, a - h * n])
    return Bucket(owner_ray_id=ray.id, boundary=ring, area=float(2 * h * ray.length))
