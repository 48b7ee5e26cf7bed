"""Planar geometry kernel: free-space maps, containment, visibility, chords.

Open space is a complex polygon with holes.  Rings are stored as (n, 2)
float64 arrays without a repeated closing vertex; the outer ring is
counter-clockwise and holes are clockwise.  All incidence tests use the
map's scale-free tolerance ``epsilon`` (1e-9 of the bbox diagonal), and
boundary points count as inside free space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateRing,
    GeometryError,
    HoleOutsideOuter,
    NestedHoles,
    OverlappingHoles,
    PointOutsideFreeSpace,
    SelfIntersectingRing,
    ViewpointOutsideFreeSpace,
)

# Relative factor defining the global tolerance.
REL_EPSILON = 1e-9
# Angular nudge for the auxiliary sweep rays cast either side of a vertex.
ANGULAR_NUDGE = 1e-7


@dataclass(frozen=True, slots=True)
class Point2:
    """A finite point in map units."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinates ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y), dtype=float)

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Segment:
    """A non-degenerate straight segment between two points."""

    a: Point2
    b: Point2

    def __post_init__(self) -> None:
        scale = max(1.0, abs(self.a.x), abs(self.a.y), abs(self.b.x), abs(self.b.y))
        if self.a.distance_to(self.b) <= 1e-12 * scale:
            raise GeometryError(f"degenerate segment at ({self.a.x}, {self.a.y})")

    @property
    def length(self) -> float:
        return self.a.distance_to(self.b)

    def direction(self) -> np.ndarray:
        d = self.b.as_array() - self.a.as_array()
        return d / np.linalg.norm(d)

    def as_array(self) -> np.ndarray:
        return np.array(((self.a.x, self.a.y), (self.b.x, self.b.y)), dtype=float)


@dataclass(frozen=True, slots=True)
class Ray:
    """A maximal free-space chord, both endpoints on the boundary.

    ``origin`` is the standing point the ray was generated from and lies
    on the segment.
    """

    seg: Segment
    origin: Point2
    length: float
    id: int = -1


@dataclass(frozen=True)
class Isovist:
    """Visibility polygon of a single standing viewpoint."""

    viewpoint: Point2
    boundary: np.ndarray  # (n, 2), not closed
    area: float


RingInput = Sequence  # sequence of (x, y) pairs, Point2, or an (n, 2) array


def _coerce_ring(ring: RingInput) -> np.ndarray:
    if isinstance(ring, np.ndarray):
        pts = np.asarray(ring, dtype=float)
    else:
        rows = [(p.x, p.y) if isinstance(p, Point2) else (float(p[0]), float(p[1])) for p in ring]
        pts = np.asarray(rows, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateRing(f"ring must be a sequence of 2D points, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise DegenerateRing("ring contains non-finite coordinates")
    # Drop an explicit closing vertex (GeoJSON-style rings repeat the first point).
    if len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    return pts


def ring_area(ring: np.ndarray) -> float:
    """Signed shoelace area; positive for counter-clockwise rings."""
    x, y = ring[:, 0], ring[:, 1]
    x2, y2 = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * y2 - x2 * y))


def _ring_edges(ring: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return ring, np.roll(ring, -1, axis=0)


def _orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _segments_touch(p1, q1, p2, q2, tol: float) -> bool:
    """True if segment p1q1 intersects or touches segment p2q2."""
    d1 = _orient(p2, q2, p1)
    d2 = _orient(p2, q2, q1)
    d3 = _orient(p1, q1, p2)
    d4 = _orient(p1, q1, q2)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True

    def on_seg(a, b, c) -> bool:
        if abs(_orient(a, b, c)) > tol:
            return False
        return (
            min(a[0], b[0]) - tol <= c[0] <= max(a[0], b[0]) + tol
            and min(a[1], b[1]) - tol <= c[1] <= max(a[1], b[1]) + tol
        )

    return on_seg(p2, q2, p1) or on_seg(p2, q2, q1) or on_seg(p1, q1, p2) or on_seg(p1, q1, q2)


def _check_simple(ring: np.ndarray, scale: float) -> None:
    n = len(ring)
    a, b = _ring_edges(ring)
    lengths = np.linalg.norm(b - a, axis=1)
    if np.any(lengths <= 1e-12 * scale):
        raise DegenerateRing("ring has a zero-length edge")
    tol = 1e-12 * scale * scale
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue  # adjacent edges share a vertex by construction
            if _segments_touch(a[i], b[i], a[j], b[j], tol):
                raise SelfIntersectingRing(f"ring edges {i} and {j} intersect")


def points_in_ring(pts: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Even-odd containment test for an array of points against one ring."""
    pts = np.atleast_2d(pts)
    x = pts[:, 0][:, None]
    y = pts[:, 1][:, None]
    a, b = _ring_edges(ring)
    x1, y1 = a[:, 0][None, :], a[:, 1][None, :]
    x2, y2 = b[:, 0][None, :], b[:, 1][None, :]
    crosses = (y1 <= y) != (y2 <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    hits = crosses & (x < xint)
    return hits.sum(axis=1) % 2 == 1


def distance_to_segments(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise distances (P, E) from points to segments a[i]->b[i]."""
    pts = np.atleast_2d(pts)
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom == 0.0, 1.0, denom)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pej,ej->pe", ap, ab) / denom, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    return np.linalg.norm(pts[:, None, :] - proj, axis=2)


class FreeSpaceMap:
    """Validated open space: one outer ring minus disjoint hole rings."""

    __slots__ = ("outer", "holes", "bbox", "epsilon", "_edges_a", "_edges_b", "_edge_feature", "_vertices")

    def __init__(self, outer: np.ndarray, holes: list[np.ndarray]):
        self.outer = outer
        self.holes = holes
        xy = np.vstack([outer] + holes)
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        self.bbox = (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        self.epsilon = REL_EPSILON * float(np.linalg.norm(hi - lo))
        rings = [outer] + holes
        self._edges_a = np.vstack([_ring_edges(r)[0] for r in rings])
        self._edges_b = np.vstack([_ring_edges(r)[1] for r in rings])
        self._edge_feature = np.concatenate(
            [np.full(len(r), i, dtype=int) for i, r in enumerate(rings)]
        )
        self._vertices = xy
        for arr in (self.outer, *self.holes, self._edges_a, self._edges_b, self._vertices):
            arr.setflags(write=False)

    @property
    def rings(self) -> list[np.ndarray]:
        return [self.outer] + self.holes

    @property
    def diagonal(self) -> float:
        x0, y0, x1, y1 = self.bbox
        return math.hypot(x1 - x0, y1 - y0)

    def free_area(self) -> float:
        return ring_area(self.outer) + sum(ring_area(h) for h in self.holes)

    def boundary_distance(self, pts: np.ndarray) -> np.ndarray:
        return distance_to_segments(pts, self._edges_a, self._edges_b).min(axis=1)

    def contains_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        inside = points_in_ring(pts, self.outer)
        for hole in self.holes:
            inside &= ~points_in_ring(pts, hole)
        on_boundary = self.boundary_distance(pts) <= self.epsilon
        return inside | on_boundary


def build_free_space(outer: RingInput, holes: Iterable[RingInput] = ()) -> FreeSpaceMap:
    """Validate and orientation-normalize a complex polygon with holes."""
    outer_ring = _coerce_ring(outer)
    hole_rings = [_coerce_ring(h) for h in holes]
    for ring in [outer_ring] + hole_rings:
        if len(ring) < 3:
            raise DegenerateRing(f"ring needs at least 3 vertices, got {len(ring)}")

    xy = np.vstack([outer_ring] + hole_rings)
    scale = max(1.0, float(np.abs(xy).max()))
    for ring in [outer_ring] + hole_rings:
        _check_simple(ring, scale)
        if abs(ring_area(ring)) <= (1e-12 * scale) ** 2:
            raise DegenerateRing("ring encloses no area")

    # Normalize winding: outer counter-clockwise, holes clockwise.
    if ring_area(outer_ring) < 0:
        outer_ring = outer_ring[::-1].copy()
    hole_rings = [h[::-1].copy() if ring_area(h) > 0 else h for h in hole_rings]

    tol = 1e-12 * scale * scale
    oa, ob = _ring_edges(outer_ring)
    for k, hole in enumerate(hole_rings):
        ha, hb = _ring_edges(hole)
        for i in range(len(hole)):
            for j in range(len(outer_ring)):
                if _segments_touch(ha[i], hb[i], oa[j], ob[j], tol):
                    raise HoleOutsideOuter(f"hole {k} touches the outer ring")
        if not points_in_ring(hole[:1], outer_ring)[0]:
            raise HoleOutsideOuter(f"hole {k} lies outside the outer ring")

    for k in range(len(hole_rings)):
        for m in range(k + 1, len(hole_rings)):
            ka, kb = _ring_edges(hole_rings[k])
            ma, mb = _ring_edges(hole_rings[m])
            crossing = any(
                _segments_touch(ka[i], kb[i], ma[j], mb[j], tol)
                for i in range(len(ka))
                for j in range(len(ma))
            )
            if crossing:
                raise OverlappingHoles(f"holes {k} and {m} intersect")
            if points_in_ring(hole_rings[m][:1], hole_rings[k])[0] or points_in_ring(
                hole_rings[k][:1], hole_rings[m]
            )[0]:
                raise NestedHoles(f"holes {k} and {m} are nested")

    return FreeSpaceMap(outer_ring, hole_rings)


def contains(space: FreeSpaceMap, p: Point2) -> bool:
    """True iff ``p`` is in open space; boundary points (within epsilon) count."""
    return bool(space.contains_many(p.as_array()[None, :])[0])


def _ray_edge_params(space: FreeSpaceMap, p: np.ndarray, dirs: np.ndarray):
    """Intersection parameters of rays p + t*dirs with every boundary edge.

    Returns (t, valid) of shape (D, E); ``valid`` marks hits with the edge
    parameter inside [0, 1] (with slack) and a non-parallel direction.
    """
    a = space._edges_a
    e = space._edges_b - a
    ap = a - p  # (E, 2)
    denom = dirs[:, 0][:, None] * e[:, 1][None, :] - dirs[:, 1][:, None] * e[:, 0][None, :]
    num_t = ap[:, 0][None, :] * e[:, 1][None, :] - ap[:, 1][None, :] * e[:, 0][None, :]
    num_s = ap[:, 0][None, :] * dirs[:, 1][:, None] - ap[:, 1][None, :] * dirs[:, 0][:, None]
    tiny = 1e-14 * max(1.0, space.diagonal)
    ok = np.abs(denom) > tiny
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ok, num_t / denom, np.inf)
        s = np.where(ok, num_s / denom, np.inf)
    valid = ok & (s >= -1e-9) & (s <= 1.0 + 1e-9)
    return t, valid


def chord_spans(space: FreeSpaceMap, p: np.ndarray, dirs: np.ndarray):
    """First boundary hit in both directions for each unit vector in ``dirs``.

    Returns (t_neg, t_pos) arrays; directions with no hit get 0 spans.
    """
    t, valid = _ray_edge_params(space, p, dirs)
    eps = space.epsilon
    pos = np.where(valid & (t > eps), t, np.inf)
    neg = np.where(valid & (t < -eps), t, -np.inf)
    t_pos = pos.min(axis=1)
    t_neg = neg.max(axis=1)
    t_pos = np.where(np.isfinite(t_pos), t_pos, 0.0)
    t_neg = np.where(np.isfinite(t_neg), t_neg, 0.0)
    return t_neg, t_pos


def first_hits(space: FreeSpaceMap, p: np.ndarray, dirs: np.ndarray):
    """Nearest forward boundary hit per direction; (points, distances, hit mask)."""
    t, valid = _ray_edge_params(space, p, dirs)
    pos = np.where(valid & (t > space.epsilon), t, np.inf)
    t_pos = pos.min(axis=1)
    hit = np.isfinite(t_pos)
    t_safe = np.where(hit, t_pos, 0.0)
    return p[None, :] + t_safe[:, None] * dirs, t_safe, hit


def cast_ray(space: FreeSpaceMap, p: Point2, direction: Sequence[float]) -> Ray:
    """Maximal free-space chord through ``p`` along +/- ``direction``."""
    if not contains(space, p):
        raise PointOutsideFreeSpace(f"standing point ({p.x}, {p.y}) is not in free space")
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if not np.isfinite(norm) or norm == 0.0:
        raise GeometryError("direction must be a nonzero vector")
    d = d / norm
    origin = p.as_array()
    t_neg, t_pos = chord_spans(space, origin, d[None, :])
    span = float(t_pos[0] - t_neg[0])
    if span <= space.epsilon:
        raise PointOutsideFreeSpace(
            f"no free-space chord through ({p.x}, {p.y}); boundary not hit in both directions"
        )
    a = origin + t_neg[0] * d
    b = origin + t_pos[0] * d
    seg = Segment(Point2(float(a[0]), float(a[1])), Point2(float(b[0]), float(b[1])))
    return Ray(seg=seg, origin=p, length=seg.length)


def compute_isovist(space: FreeSpaceMap, viewpoint: Point2) -> Isovist:
    """Exact visibility polygon via an angular sweep over all ring vertices.

    Each vertex receives a primary ray plus two auxiliary rays nudged by
    ``ANGULAR_NUDGE`` so the sweep captures continuations past silhouette
    vertices.
    """
    if not contains(space, viewpoint):
        raise ViewpointOutsideFreeSpace(f"viewpoint ({viewpoint.x}, {viewpoint.y}) is not in free space")
    p = viewpoint.as_array()
    rel = space._vertices - p
    dist = np.linalg.norm(rel, axis=1)
    keep = dist > space.epsilon
    base = np.arctan2(rel[keep, 1], rel[keep, 0])
    angles = np.concatenate([base - ANGULAR_NUDGE, base, base + ANGULAR_NUDGE])
    angles = np.mod(angles + np.pi, 2 * np.pi) - np.pi
    order = np.argsort(angles, kind="stable")
    angles = angles[order]
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    pts, _, hit = first_hits(space, p, dirs)
    pts = pts[hit]
    if len(pts) < 3:
        raise GeometryError("isovist sweep produced fewer than 3 boundary hits")
    # Collapse consecutive near-duplicate hits (wrapping).
    d = np.linalg.norm(pts - np.roll(pts, 1, axis=0), axis=1)
    pts = pts[d > space.epsilon]
    if len(pts) < 3:
        raise GeometryError("isovist collapsed to a degenerate polygon")
    return Isovist(viewpoint=viewpoint, boundary=pts, area=ring_area(pts))


def _segment_param_hits(p0: np.ndarray, p1: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Parameters s in [0, 1] where p0 + s*(p1-p0) meets the ring's edges."""
    a, b = _ring_edges(ring)
    d = p1 - p0
    e = b - a
    ap = a - p0
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    num_s = ap[:, 0] * e[:, 1] - ap[:, 1] * e[:, 0]
    num_u = ap[:, 0] * d[1] - ap[:, 1] * d[0]
    scale = max(1.0, float(np.abs(ring).max()), float(np.abs(p0).max()), float(np.abs(p1).max()))
    ok = np.abs(denom) > 1e-14 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(ok, num_s / denom, np.nan)
        u = np.where(ok, num_u / denom, np.nan)
    hits = s[ok & (u >= -1e-9) & (u <= 1 + 1e-9) & (s >= -1e-9) & (s <= 1 + 1e-9)]
    return np.clip(hits, 0.0, 1.0)


def length_inside(seg: Segment, poly: np.ndarray) -> float:
    """Arc length of ``seg`` inside the simple ring ``poly``.

    Sums disjoint sub-intervals; points on the ring (within a scale-free
    tolerance) count as inside, matching the boundary rule of
    :func:`contains`.
    """
    poly = _coerce_ring(poly)
    p0, p1 = seg.a.as_array(), seg.b.as_array()
    cuts = np.concatenate([[0.0, 1.0], _segment_param_hits(p0, p1, poly)])
    cuts = np.unique(cuts)
    mids = p0[None, :] + (0.5 * (cuts[:-1] + cuts[1:]))[:, None] * (p1 - p0)[None, :]
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    eps = REL_EPSILON * float(np.linalg.norm(hi - lo))
    inside = points_in_ring(mids, poly)
    a, b = _ring_edges(poly)
    near = distance_to_segments(mids, a, b).min(axis=1) <= eps
    frac = float(np.sum((cuts[1:] - cuts[:-1]) * (inside | near)))
    return frac * seg.length
