"""Isovist ridges: the visually dominant free-space chord through a point.

The ridge of a standing point is the longest maximal chord over a uniform
angular sweep of [0, 180) degrees (a chord and its opposite direction
coincide); ties go to the smallest angle.  Batch generation runs the sweep
at every medial vertex, or at discrete points along a seeded first ray.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .errors import GeometryError, SeedOutsideFreeSpace, ViewpointOutsideFreeSpace
from .geom import FreeSpaceMap, Point2, Ray, Segment, cast_ray, chord_spans, contains
from .medial import MedialAxisGraph, auto_cell_size

# Fractions along a chord where boundary clearance is sampled for the
# dominance tie rule.
_CLEARANCE_FRACTIONS = np.linspace(0.1, 0.9, 9)


@dataclass(frozen=True)
class RidgeConfig:
    """Resolution knobs for ridge sweeps and seed-line discretization.

    Chords within ``dominance_tolerance`` (relative) of the longest sweep
    chord count as equally dominant; among them the chord with the largest
    mean interior clearance wins, then the smallest angle.  A corridor's
    corner-grazing near-diagonal is a hair longer than the centered chord
    but is not a dominant sightline; the tolerance keeps ridge selection
    stable against that.
    """

    angular_step: float = 1.0  # degrees
    discretization_step: float | None = None  # map units; None = auto cell size
    dominance_tolerance: float = 0.06

    def __post_init__(self) -> None:
        if not (0.0 < self.angular_step <= 10.0):
            raise GeometryError(f"angular_step must be in (0, 10], got {self.angular_step}")
        if self.discretization_step is not None and not (self.discretization_step > 0):
            raise GeometryError(
                f"discretization_step must be positive, got {self.discretization_step}"
            )
        if not (0.0 <= self.dominance_tolerance < 0.5):
            raise GeometryError(
                f"dominance_tolerance must be in [0, 0.5), got {self.dominance_tolerance}"
            )

    def resolve_step(self, space: FreeSpaceMap) -> float:
        if self.discretization_step is not None:
            return self.discretization_step
        return auto_cell_size(space)


def sweep_angles(cfg: RidgeConfig) -> np.ndarray:
    return np.deg2rad(np.arange(0.0, 180.0, cfg.angular_step))


def sweep_chords(space: FreeSpaceMap, p: Point2, cfg: RidgeConfig):
    """All sweep chords through ``p``: (endpoints_a, endpoints_b, lengths)."""
    angles = sweep_angles(cfg)
    dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    origin = p.as_array()
    t_neg, t_pos = chord_spans(space, origin, dirs)
    a = origin[None, :] + t_neg[:, None] * dirs
    b = origin[None, :] + t_pos[:, None] * dirs
    return a, b, t_pos - t_neg


def _ray_from_chord(a: np.ndarray, b: np.ndarray, origin: Point2) -> Ray:
    seg = Segment(Point2(float(a[0]), float(a[1])), Point2(float(b[0]), float(b[1])))
    return Ray(seg=seg, origin=origin, length=seg.length)


def chord_clearances(space: FreeSpaceMap, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Mean boundary distance over interior sample points, per chord."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    pts = a[:, None, :] + _CLEARANCE_FRACTIONS[None, :, None] * (b - a)[:, None, :]
    d = space.boundary_distance(pts.reshape(-1, 2)).reshape(len(a), -1)
    return d.mean(axis=1)


def pick_dominant(
    space: FreeSpaceMap, a: np.ndarray, b: np.ndarray, lengths: np.ndarray, tol: float
) -> int:
    """Index of the dominant chord.

    Near-longest chords (within ``tol``) compete on mean interior
    clearance; among clearance ties the longest wins, then the first
    (smallest angle).
    """
    best_len = float(lengths.max())
    group = np.flatnonzero(lengths >= best_len * (1.0 - tol))
    if len(group) == 1:
        return int(group[0])
    clear = chord_clearances(space, a[group], b[group])
    best_clear = float(clear.max())
    finalists = group[clear >= best_clear * (1.0 - 1e-9)]
    final_lens = lengths[finalists]
    longest = finalists[final_lens >= float(final_lens.max()) * (1.0 - 1e-12)]
    return int(longest[0])


def isovist_ridge(space: FreeSpaceMap, viewpoint: Point2, cfg: RidgeConfig | None = None) -> Ray:
    """Dominant sweep chord through ``viewpoint``."""
    cfg = cfg or RidgeConfig()
    if not contains(space, viewpoint):
        raise ViewpointOutsideFreeSpace(
            f"viewpoint ({viewpoint.x}, {viewpoint.y}) is not in free space"
        )
    a, b, lengths = sweep_chords(space, viewpoint, cfg)
    best_len = float(lengths.max())
    if best_len <= space.epsilon:
        raise GeometryError("no chord found through viewpoint")
    best = pick_dominant(space, a, b, lengths, cfg.dominance_tolerance)
    return _ray_from_chord(a[best], b[best], viewpoint)


class _RayDeduper:
    """Keeps the earliest ray per unordered endpoint pair (within epsilon)."""

    def __init__(self, eps: float):
        self.eps = eps
        self._keys: list[np.ndarray] = []
        self.rays: list[Ray] = []

    @staticmethod
    def _key(ray: Ray) -> np.ndarray:
        pts = sorted([(ray.seg.a.x, ray.seg.a.y), (ray.seg.b.x, ray.seg.b.y)])
        return np.array(pts).ravel()

    def add(self, ray: Ray) -> bool:
        key = self._key(ray)
        if self._keys:
            diffs = np.abs(np.vstack(self._keys) - key).max(axis=1)
            if bool((diffs <= self.eps).any()):
                return False
        self._keys.append(key)
        self.rays.append(Ray(seg=ray.seg, origin=ray.origin, length=ray.length, id=len(self.rays)))
        return True


def rays_from_medial(space: FreeSpaceMap, graph: MedialAxisGraph, cfg: RidgeConfig | None = None) -> list[Ray]:
    """One ridge per medial vertex, deduplicated, with stable ids."""
    cfg = cfg or RidgeConfig()
    ridges = ordered_map(
        lambda v: isovist_ridge(space, v.pos, cfg), graph.vertices
    )
    dedup = _RayDeduper(eps=max(space.epsilon, 1e-7 * space.diagonal))
    for ray in ridges:
        dedup.add(ray)
    return dedup.rays


def _seed_base_point(space: FreeSpaceMap, seed: Segment) -> Point2:
    """First point of the seed (by dyadic subdivision) that lies in free space."""
    a, b = seed.a.as_array(), seed.b.as_array()
    fractions = [0.5]
    for depth in (4, 8, 16, 32):
        fractions.extend(k / depth for k in range(1, depth) if (k / depth) not in fractions)
    for t in fractions:
        q = a + t * (b - a)
        p = Point2(float(q[0]), float(q[1]))
        if contains(space, p):
            return p
    raise SeedOutsideFreeSpace("seed segment has no point in free space")


def rays_from_seed_line(space: FreeSpaceMap, seed: Segment, cfg: RidgeConfig | None = None) -> list[Ray]:
    """Stretch the seed into a first ray, then ridge every discretized point.

    Returns the first ray followed by the ridge of each point along it
    (spaced one discretization step apart), deduplicated.
    """
    cfg = cfg or RidgeConfig()
    base = _seed_base_point(space, seed)
    first = cast_ray(space, base, seed.direction())
    step = cfg.resolve_step(space)
    dedup = _RayDeduper(eps=max(space.epsilon, 1e-7 * space.diagonal))
    dedup.add(first)
    for p in discretize_ray(first, step):
        if not contains(space, p):
            continue
        dedup.add(isovist_ridge(space, p, cfg))
    return dedup.rays


def discretize_ray(ray: Ray, step: float) -> list[Point2]:
    """Interior points along the ray, one per step, centered in their cells."""
    a = ray.seg.a.as_array()
    d = ray.seg.direction()
    count = int(ray.length / step)
    pts = []
    for k in range(count):
        q = a + ((k + 0.5) * step) * d
        pts.append(Point2(float(q[0]), float(q[1])))
    return pts
