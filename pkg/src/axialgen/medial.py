"""Medial axes of the free space, approximated by a discrete Voronoi skeleton.

Boundary rings are densified to samples at most one cell apart; the Voronoi
diagram of the samples is filtered down to the edges whose two generators
come from distinct features (or from the same ring far apart along the arc)
and which lie inside free space.  Those edges approximate the medial axes,
i.e. the edges of the Voronoi regions of the closed spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import Voronoi

from .errors import InsufficientSamples, NonPositiveCellSize
from .geom import FreeSpaceMap, Point2, distance_to_segments, _ring_edges

# A same-ring generator pair whose Euclidean distance is at least this
# fraction of its ring-arc distance spans a straight wall stretch; its
# Voronoi edge is a boundary sliver, not medial structure.  Pairs spanning
# a corner (arc noticeably longer than the chord) are real skeleton.
SLIVER_CHORD_ARC_RATIO = 0.95
# Width of a skeleton vertex is twice its clearance; vertices further apart
# than DENSIFY_FACTOR * mean width leave the skeleton too scattered.
DENSIFY_FACTOR = 4.0
# Every ring gets at least this many samples, or the sliver filter would
# swallow the whole skeleton of coarse rings.
MIN_SAMPLES_PER_RING = 24


@dataclass(frozen=True, slots=True)
class BoundarySample:
    """A point on a boundary ring; feature 0 is the outer ring, 1.. are holes."""

    pos: Point2
    feature_id: int
    arc_index: int


@dataclass(frozen=True)
class MedialVertex:
    """Skeleton vertex, equidistant from its associated boundary points."""

    pos: Point2
    associated: tuple[Point2, ...]
    clearance: float
    id: int


@dataclass
class MedialAxisGraph:
    vertices: list[MedialVertex]
    edges: list[tuple[int, int]]
    cell_size: float
    samples: list[BoundarySample] = field(default_factory=list)

    @cached_property
    def positions(self) -> np.ndarray:
        if not self.vertices:
            return np.empty((0, 2))
        return np.array([(v.pos.x, v.pos.y) for v in self.vertices])

    @cached_property
    def clearances(self) -> np.ndarray:
        return np.array([v.clearance for v in self.vertices])

    @cached_property
    def sample_positions(self) -> np.ndarray:
        if not self.samples:
            return np.empty((0, 2))
        return np.array([(s.pos.x, s.pos.y) for s in self.samples])

    def total_edge_length(self) -> float:
        pos = self.positions
        return float(
            sum(np.linalg.norm(pos[a] - pos[b]) for a, b in self.edges)
        )


def _min_ring_distance(ring_a: np.ndarray, ring_b: np.ndarray) -> float:
    a0, a1 = _ring_edges(ring_a)
    b0, b1 = _ring_edges(ring_b)
    d_ab = distance_to_segments(ring_a, b0, b1).min()
    d_ba = distance_to_segments(ring_b, a0, a1).min()
    return float(min(d_ab, d_ba))


def _outer_self_width(ring: np.ndarray) -> float:
    """Smallest gap between non-adjacent edges of a single ring."""
    a, b = _ring_edges(ring)
    n = len(ring)
    best = math.inf
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            seg_pts = np.array([a[i], b[i]])
            other_a = a[j][None, :]
            other_b = b[j][None, :]
            d = distance_to_segments(seg_pts, other_a, other_b).min()
            d2 = distance_to_segments(np.array([a[j], b[j]]), a[i][None, :], b[i][None, :]).min()
            best = min(best, float(d), float(d2))
    return best


def _ring_perimeter(ring: np.ndarray) -> float:
    a, b = _ring_edges(ring)
    return float(np.linalg.norm(b - a, axis=1).sum())


def auto_cell_size(space: FreeSpaceMap) -> float:
    """One third of the smallest gap between closed spaces or to the boundary.

    Maps without holes fall back to one third of the outer ring's own
    smallest edge-to-edge width.  Either way the cell is capped so every
    ring receives at least MIN_SAMPLES_PER_RING samples.
    """
    rings = space.rings
    if not space.holes:
        base = _outer_self_width(space.outer) / 3.0
    else:
        base = math.inf
        for i in range(1, len(rings)):
            base = min(base, _min_ring_distance(rings[i], rings[0]))
            for j in range(i + 1, len(rings)):
                base = min(base, _min_ring_distance(rings[i], rings[j]))
        base /= 3.0
    cap = min(_ring_perimeter(r) for r in rings) / MIN_SAMPLES_PER_RING
    return min(base, cap)


def densify_boundary(space: FreeSpaceMap, cell_size: float) -> list[BoundarySample]:
    """Subdivide every ring so consecutive samples are at most one cell apart."""
    if not (cell_size > 0) or not math.isfinite(cell_size):
        raise NonPositiveCellSize(f"cell size must be positive, got {cell_size}")
    samples: list[BoundarySample] = []
    for feature_id, ring in enumerate(space.rings):
        arc = 0
        starts, ends = _ring_edges(ring)
        for a, b in zip(starts, ends):
            edge_len = float(np.linalg.norm(b - a))
            pieces = max(1, math.ceil(edge_len / cell_size))
            for k in range(pieces):
                t = k / pieces
                p = a + t * (b - a)
                samples.append(BoundarySample(Point2(float(p[0]), float(p[1])), feature_id, arc))
                arc += 1
    return samples


def _cyclic_separation(i: int, j: int, n: int) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def _ring_arc_positions(samples: list[BoundarySample]) -> tuple[dict[int, np.ndarray], dict[int, float]]:
    """Cumulative arc position of each sample along its ring, plus perimeters."""
    by_ring: dict[int, list[BoundarySample]] = {}
    for s in samples:
        by_ring.setdefault(s.feature_id, []).append(s)
    arc_pos: dict[int, np.ndarray] = {}
    perimeter: dict[int, float] = {}
    for fid, ring_samples in by_ring.items():
        ring_samples = sorted(ring_samples, key=lambda s: s.arc_index)
        pos = np.array([(s.pos.x, s.pos.y) for s in ring_samples])
        gaps = np.linalg.norm(np.roll(pos, -1, axis=0) - pos, axis=1)
        cum = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        arc_pos[fid] = cum
        perimeter[fid] = float(gaps.sum())
    return arc_pos, perimeter


def _is_wall_sliver(s1: BoundarySample, s2: BoundarySample, arc_pos, perimeter) -> bool:
    cum = arc_pos[s1.feature_id]
    perim = perimeter[s1.feature_id]
    arc = abs(cum[s1.arc_index] - cum[s2.arc_index])
    arc = min(arc, perim - arc)
    if arc <= 0:
        return True
    chord = s1.pos.distance_to(s2.pos)
    return chord >= SLIVER_CHORD_ARC_RATIO * arc


def build_medial_axes(space: FreeSpaceMap, samples: list[BoundarySample]) -> MedialAxisGraph:
    """Filtered Voronoi diagram of the boundary samples.

    A Voronoi edge is kept when its two generator samples sit on distinct
    features (or span a corner of the same ring rather than a straight
    wall stretch) and the edge lies inside free space; its endpoints
    become skeleton vertices whose associated points are the generators
    of the incident kept edges.
    """
    if len(samples) < 4:
        raise InsufficientSamples(f"need at least 4 boundary samples, got {len(samples)}")
    pts = np.array([(s.pos.x, s.pos.y) for s in samples])
    arc_pos, perimeter = _ring_arc_positions(samples)

    vor = Voronoi(pts)
    candidates = []
    check_points = []
    for (g1, g2), (v1, v2) in zip(vor.ridge_points, vor.ridge_vertices):
        if v1 < 0 or v2 < 0:
            continue
        s1, s2 = samples[g1], samples[g2]
        if s1.feature_id == s2.feature_id and _is_wall_sliver(s1, s2, arc_pos, perimeter):
            continue
        p1, p2 = vor.vertices[v1], vor.vertices[v2]
        if not np.isfinite(p1).all() or not np.isfinite(p2).all():
            continue
        candidates.append((int(g1), int(g2), int(v1), int(v2)))
        check_points.append((p1, p2, 0.5 * (p1 + p2)))

    if not candidates:
        return MedialAxisGraph([], [], cell_size=_infer_cell(samples), samples=list(samples))

    flat = np.array(check_points).reshape(-1, 2)
    inside = space.contains_many(flat).reshape(-1, 3).all(axis=1)

    vertex_ids: dict[int, int] = {}
    vertex_assoc: dict[int, dict[int, None]] = {}
    edges: list[tuple[int, int]] = []
    for keep, (g1, g2, v1, v2) in zip(inside, candidates):
        if not keep or v1 == v2:
            continue
        for v in (v1, v2):
            if v not in vertex_ids:
                vertex_ids[v] = len(vertex_ids)
                vertex_assoc[v] = {}
            vertex_assoc[v].setdefault(g1)
            vertex_assoc[v].setdefault(g2)
        edges.append((vertex_ids[v1], vertex_ids[v2]))

    vertices: list[MedialVertex] = [None] * len(vertex_ids)  # type: ignore[list-item]
    for v, new_id in vertex_ids.items():
        pos = vor.vertices[v]
        assoc_idx = list(vertex_assoc[v])
        assoc_pts = pts[assoc_idx]
        dists = np.linalg.norm(assoc_pts - pos, axis=1)
        vertices[new_id] = MedialVertex(
            pos=Point2(float(pos[0]), float(pos[1])),
            associated=tuple(samples[i].pos for i in assoc_idx),
            clearance=float(dists.mean()),
            id=new_id,
        )
    cell = _infer_cell(samples)
    _attach_corner_tips(space, pts, vertices, edges, cell)
    return MedialAxisGraph(vertices, edges, cell_size=cell, samples=list(samples))


def _attach_corner_tips(
    space: FreeSpaceMap,
    sample_xy: np.ndarray,
    vertices: list[MedialVertex],
    edges: list[tuple[int, int]],
    cell: float,
) -> None:
    """Extend branch tips to free-space-convex ring corners.

    The medial axis terminates at convex corners of the free space; the
    Voronoi approximation stops one circumcenter short, so each such
    corner is joined to its nearest skeleton vertex.
    """
    if not vertices:
        return
    pos = np.array([(v.pos.x, v.pos.y) for v in vertices])
    for ring in space.rings:  # outer CCW, holes CW: left turns face free space
        prev = np.roll(ring, 1, axis=0)
        nxt = np.roll(ring, -1, axis=0)
        d1 = ring - prev
        d2 = nxt - ring
        cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        for corner in ring[cross > space.epsilon]:
            d = np.linalg.norm(pos - corner, axis=1)
            j = int(np.argmin(d))
            if d[j] <= space.epsilon or d[j] > 3.0 * cell:
                continue
            probe = corner + np.linspace(0.1, 0.9, 5)[:, None] * (pos[j] - corner)
            if not space.contains_many(probe).all():
                continue
            ds = np.linalg.norm(sample_xy - corner, axis=1)
            order = np.argsort(ds, kind="stable")
            neighbors = [k for k in order if ds[k] > space.epsilon][:2]
            assoc = tuple(
                Point2(float(sample_xy[k][0]), float(sample_xy[k][1])) for k in neighbors
            )
            tip = MedialVertex(
                pos=Point2(float(corner[0]), float(corner[1])),
                associated=assoc if len(assoc) == 2 else (Point2(*map(float, corner)),) * 2,
                clearance=float(np.mean([ds[k] for k in neighbors])) if neighbors else 0.0,
                id=len(vertices),
            )
            vertices.append(tip)
            edges.append((j, tip.id))


def _infer_cell(samples: list[BoundarySample]) -> float:
    """Largest consecutive sample gap, the effective build resolution."""
    by_ring: dict[int, list[BoundarySample]] = {}
    for s in samples:
        by_ring.setdefault(s.feature_id, []).append(s)
    worst = 0.0
    for ring_samples in by_ring.values():
        ring_samples = sorted(ring_samples, key=lambda s: s.arc_index)
        pos = np.array([(s.pos.x, s.pos.y) for s in ring_samples])
        gaps = np.linalg.norm(np.roll(pos, -1, axis=0) - pos, axis=1)
        worst = max(worst, float(gaps.max()))
    return worst


def _nearest_boundary_associates(space: FreeSpaceMap, p: np.ndarray) -> tuple[list[Point2], float]:
    """Associated points for an interpolated vertex by nearest-boundary projection."""
    a, b = space._edges_a, space._edges_b
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom == 0.0, 1.0, denom)
    t = np.clip(((p - a) * ab).sum(axis=1) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    dist = np.linalg.norm(proj - p, axis=1)
    order = np.argsort(dist, kind="stable")
    d0 = float(dist[order[0]])
    tol = max(space.epsilon, d0 * 0.05)
    chosen: list[np.ndarray] = []
    for idx in order:
        if len(chosen) >= 2 and dist[idx] > d0 * 1.1:
            break
        q = proj[idx]
        if any(np.linalg.norm(q - c) <= tol for c in chosen):
            continue
        chosen.append(q)
        if len(chosen) >= 4:
            break
    while len(chosen) < 2:
        chosen.append(chosen[0])
    pts = [Point2(float(q[0]), float(q[1])) for q in chosen]
    dmean = float(np.mean([math.hypot(q[0] - p[0], q[1] - p[1]) for q in chosen]))
    return pts, dmean


def densify_medial_vertices(graph: MedialAxisGraph, space: FreeSpaceMap) -> MedialAxisGraph:
    """Insert interpolated vertices on edges longer than 4x the average width.

    Width at a vertex is twice its clearance (the distance to either
    associated point in a two-sided corridor), so a corridor of width w
    reports width w.  Iterates to a fixpoint.
    """
    if not graph.edges:
        return graph

    vertices = list(graph.vertices)
    edges = list(graph.edges)
    changed_any = False
    for _ in range(16):
        widths = np.array([2.0 * v.clearance for v in vertices])
        threshold = DENSIFY_FACTOR * float(widths.mean())
        if threshold <= 0:
            break
        pos = np.array([(v.pos.x, v.pos.y) for v in vertices])
        new_edges: list[tuple[int, int]] = []
        changed = False
        for a, b in edges:
            pa, pb = pos[a], pos[b]
            length = float(np.linalg.norm(pb - pa))
            if length <= threshold:
                new_edges.append((a, b))
                continue
            changed = True
            pieces = math.ceil(length / threshold)
            chain = [a]
            for k in range(1, pieces):
                q = pa + (k / pieces) * (pb - pa)
                assoc, dmean = _nearest_boundary_associates(space, q)
                vertices.append(
                    MedialVertex(
                        pos=Point2(float(q[0]), float(q[1])),
                        associated=tuple(assoc),
                        clearance=dmean,
                        id=len(vertices),
                    )
                )
                chain.append(len(vertices) - 1)
            chain.append(b)
            new_edges.extend(zip(chain[:-1], chain[1:]))
        edges = new_edges
        if not changed:
            break
        changed_any = True
    if not changed_any:
        return graph
    return MedialAxisGraph(vertices, edges, cell_size=graph.cell_size, samples=list(graph.samples))


def build_graph(space: FreeSpaceMap, cell_size: float | None = None) -> MedialAxisGraph:
    """Convenience pipeline: densify boundary, build skeleton, densify vertices."""
    cell = auto_cell_size(space) if cell_size is None else cell_size
    samples = densify_boundary(space, cell)
    graph = build_medial_axes(space, samples)
    return densify_medial_vertices(graph, space)
