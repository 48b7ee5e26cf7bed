"""Ray reduction: from a redundant ray population to the axial map.

Selection repeatedly takes the longest surviving ray, builds its bucket,
and removes every ray at least ``overlap_threshold`` inside it.  The
global strategy scans all survivors; the BFS/DFS strategies restrict the
scan to survivors intersecting already-selected lines; the line-seeded
pipeline grows the population round by round from a drawn segment.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from shapely.geometry import Polygon
from shapely.ops import unary_union

from ._parallel import ordered_map
from .bucket import Bucket, build_bucket, fallback_bucket, ray_bucket_overlap, trace_crossings
from .errors import DegenerateBucket, InvalidStrategy
from .geom import FreeSpaceMap, Point2, Ray, Segment, _segments_touch, contains
from .medial import MedialAxisGraph
from .ridge import (
    RidgeConfig,
    _RayDeduper,
    discretize_ray,
    pick_dominant,
    rays_from_seed_line,
    sweep_chords,
)

STRATEGIES = ("global", "bfs", "dfs", "line_seeded")


@dataclass(frozen=True)
class ReduceConfig:
    overlap_threshold: float = 0.85
    strategy: str = "global"
    coverage_target: float = 0.99
    connectivity_tiebreak: bool = True

    def __post_init__(self) -> None:
        if not (0.0 < self.overlap_threshold <= 1.0):
            raise InvalidStrategy(
                f"overlap_threshold must be in (0, 1], got {self.overlap_threshold}"
            )
        if not (0.0 < self.coverage_target <= 1.0):
            raise InvalidStrategy(
                f"coverage_target must be in (0, 1], got {self.coverage_target}"
            )
        if self.strategy not in STRATEGIES:
            raise InvalidStrategy(f"unknown strategy {self.strategy!r}")


@dataclass
class AxialMap:
    lines: list[Ray]
    buckets: list[Bucket]
    config: ReduceConfig
    stats: dict = field(default_factory=dict)


@dataclass(frozen=True)
class StepResult:
    step: int
    line: Ray
    bucket: Bucket
    removed_ray_ids: tuple[int, ...]
    remaining: int
    dropped_line_ids: tuple[int, ...] = ()


def _rays_intersect(r1: Ray, r2: Ray) -> bool:
    a1, b1 = r1.seg.a, r1.seg.b
    a2, b2 = r2.seg.a, r2.seg.b
    scale = max(1.0, abs(a1.x), abs(a1.y), abs(b1.x), abs(b1.y))
    tol = 1e-12 * scale * scale
    return _segments_touch(
        np.array((a1.x, a1.y)),
        np.array((b1.x, b1.y)),
        np.array((a2.x, a2.y)),
        np.array((b2.x, b2.y)),
        tol,
    )


def _midpoint_key(ray: Ray, quantum: float) -> tuple[int, int]:
    """Midpoint quantized to a scale-free grid, so equal-length ties break
    identically regardless of last-ulp noise or coordinate scale."""
    mx = (ray.seg.a.x + ray.seg.b.x) / 2.0
    my = (ray.seg.a.y + ray.seg.b.y) / 2.0
    return (round(mx / quantum), round(my / quantum))


class ReductionStepper:
    """One-selection-at-a-time reduction shared by the batch and service paths."""

    def __init__(
        self,
        rays: list[Ray],
        graph: MedialAxisGraph,
        space: FreeSpaceMap,
        cfg: ReduceConfig,
    ):
        if cfg.strategy not in ("global", "bfs", "dfs"):
            raise InvalidStrategy(f"stepper cannot run strategy {cfg.strategy!r}")
        self.space = space
        self.graph = graph
        self.cfg = cfg
        self._input_order: list[Ray] = list(rays)
        self.survivors: list[Ray] = list(rays)
        self.selected: list[Ray] = []
        self.buckets: list[Bucket] = []
        self.history: list[StepResult] = []
        self._constituents: list[list[Ray]] = []
        self._dfs_stack: list[int] = []  # ray ids of the recursion path

    def remaining(self) -> int:
        return len(self.survivors)

    def _length_tol(self) -> float:
        return 1e-9 * self.space.diagonal

    def _midkey(self, ray: Ray):
        return _midpoint_key(ray, 1e-6 * self.space.diagonal)

    def _pick_global(self, pool: list[Ray]) -> Ray:
        longest = max(r.length for r in pool)
        tol = self._length_tol()
        ties = [r for r in pool if r.length >= longest - tol]
        return min(ties, key=self._midkey)

    def _connectivity(self, ray: Ray) -> int:
        return sum(
            1 for other in self.survivors if other.id != ray.id and _rays_intersect(ray, other)
        )

    def _pick_bfs(self) -> Ray:
        frontier = [
            r
            for r in self.survivors
            if any(_rays_intersect(r, sel) for sel in self.selected)
        ]
        if not frontier:
            return self._pick_global(self.survivors)
        longest = max(r.length for r in frontier)
        tol = self._length_tol()
        ties = [r for r in frontier if r.length >= longest - tol]
        if self.cfg.connectivity_tiebreak and len(ties) > 1:
            best_conn = max(self._connectivity(r) for r in ties)
            ties = [r for r in ties if self._connectivity(r) == best_conn]
        return min(ties, key=self._midkey)

    def _pick_dfs(self) -> Ray:
        tol = self._length_tol()
        by_id = {r.id: r for r in self.selected}
        while self._dfs_stack:
            anchor = by_id.get(self._dfs_stack[-1])
            if anchor is None:  # the anchor line was dropped as redundant
                self._dfs_stack.pop()
                continue
            children = [r for r in self.survivors if _rays_intersect(r, anchor)]
            if children:
                longest = max(r.length for r in children)
                ties = [r for r in children if r.length >= longest - tol]
                return min(ties, key=self._midkey)
            self._dfs_stack.pop()
        return self._pick_global(self.survivors)

    def _pick(self) -> Ray:
        if not self.selected or self.cfg.strategy == "global":
            return self._pick_global(self.survivors)
        if self.cfg.strategy == "bfs":
            return self._pick_bfs()
        return self._pick_dfs()

    def bucket_for(self, ray: Ray) -> Bucket:
        try:
            return build_bucket(ray, trace_crossings(ray, self.graph), self.space)
        except DegenerateBucket:
            return fallback_bucket(ray, self.space)

    def step(self) -> Optional[StepResult]:
        if not self.survivors:
            return None
        chosen = self._pick()
        bucket = self.bucket_for(chosen)
        threshold = self.cfg.overlap_threshold
        overlaps = ordered_map(lambda r: ray_bucket_overlap(r, bucket), self.survivors)
        removed = [
            r
            for r, ov in zip(self.survivors, overlaps)
            if ov >= threshold or r.id == chosen.id
        ]
        removed_ids = {r.id for r in removed}
        survivor_ids = {r.id for r in self.survivors} - removed_ids

        # An earlier selection sitting inside the new bucket is now provably
        # redundant: drop it and give its constituency another chance.
        dropped: list[int] = []
        keep_idx = []
        for k, line in enumerate(self.selected):
            if ray_bucket_overlap(line, bucket) >= threshold:
                dropped.append(line.id)
            else:
                keep_idx.append(k)
        self.survivors = [r for r in self._input_order if r.id in survivor_ids]
        if dropped:
            freed: list[Ray] = []
            for k, line in enumerate(self.selected):
                if line.id in dropped:
                    freed.extend(self._constituents[k])
            self.selected = [self.selected[k] for k in keep_idx]
            self.buckets = [self.buckets[k] for k in keep_idx]
            self._constituents = [self._constituents[k] for k in keep_idx]
        self.selected.append(chosen)
        self.buckets.append(bucket)
        self._constituents.append(removed)
        if dropped:
            # Re-home every freed constituent: keep it absorbed by whichever
            # current bucket still covers it, else return it to the pool.
            for r in freed:
                if r.id in removed_ids or r.id in dropped or r.id == chosen.id:
                    continue
                absorber = next(
                    (k for k, b in enumerate(self.buckets) if ray_bucket_overlap(r, b) >= threshold),
                    None,
                )
                if absorber is None:
                    survivor_ids.add(r.id)
                else:
                    self._constituents[absorber].append(r)
            self.survivors = [r for r in self._input_order if r.id in survivor_ids]
        if self.cfg.strategy == "dfs":
            self._dfs_stack.append(chosen.id)
        result = StepResult(
            step=len(self.history),
            line=chosen,
            bucket=bucket,
            removed_ray_ids=tuple(r.id for r in removed),
            remaining=len(self.survivors),
            dropped_line_ids=tuple(dropped),
        )
        self.history.append(result)
        return result

    def run(self) -> None:
        while self.step() is not None:
            pass


def _finish(
    stepper: ReductionStepper, cfg: ReduceConfig, input_count: int, space: FreeSpaceMap
) -> AxialMap:
    axial = AxialMap(
        lines=list(stepper.selected),
        buckets=list(stepper.buckets),
        config=cfg,
        stats={},
    )
    axial.stats = {
        "input_ray_count": input_count,
        "coverage_fraction": coverage_fraction(axial, space),
        "total_length": float(sum(r.length for r in axial.lines)),
    }
    return axial


def reduce_global(
    rays: list[Ray], graph: MedialAxisGraph, space: FreeSpaceMap, cfg: ReduceConfig
) -> AxialMap:
    """Longest-first greedy reduction over the whole surviving population."""
    cfg = dataclasses.replace(cfg, strategy="global")
    stepper = ReductionStepper(rays, graph, space, cfg)
    stepper.run()
    return _finish(stepper, cfg, len(rays), space)


def reduce_search(
    rays: list[Ray], graph: MedialAxisGraph, space: FreeSpaceMap, cfg: ReduceConfig
) -> AxialMap:
    """Frontier reduction: BFS or DFS over lines intersecting prior selections."""
    if cfg.strategy not in ("bfs", "dfs"):
        raise InvalidStrategy(f"reduce_search requires bfs or dfs, got {cfg.strategy!r}")
    stepper = ReductionStepper(rays, graph, space, cfg)
    stepper.run()
    return _finish(stepper, cfg, len(rays), space)


def coverage_fraction(axial: AxialMap, space: FreeSpaceMap) -> float:
    """Area of the selected buckets' union inside free space, as a fraction."""
    if not axial.buckets:
        return 0.0
    free = Polygon(
        [tuple(p) for p in space.outer], [[tuple(p) for p in h] for h in space.holes]
    )
    union = unary_union([Polygon([tuple(p) for p in b.boundary]).buffer(0) for b in axial.buckets])
    covered = union.intersection(free).area
    total = free.area
    return float(covered / total) if total > 0 else 0.0


def _local_maxima_dirs(lengths: np.ndarray) -> np.ndarray:
    """Indices of directions whose chord length is a cyclic local maximum."""
    prev = np.roll(lengths, 1)  # chord(0 deg) neighbours chord(180 - step)
    nxt = np.roll(lengths, -1)
    is_max = (lengths >= prev) & (lengths >= nxt) & ((lengths > prev) | (lengths > nxt))
    idx = np.flatnonzero(is_max)
    if len(idx) == 0:
        idx = np.array([int(np.argmax(lengths))])
    return idx


# A candidate chord at least this far inside the bucket that absorbed the
# dominant pick belongs to the same direction family and is discarded with
# it, rather than surviving as a barely-under-threshold tilt variant.
FAMILY_OVERLAP = 0.5


def _propose_new_direction(
    space: FreeSpaceMap,
    p: Point2,
    rcfg: RidgeConfig,
    buckets: list[Bucket],
    min_length: float,
) -> Optional[Ray]:
    """Dominant sweep chord through ``p`` opening a not-yet-covered direction.

    Only locally maximal directions comparable to the point's global
    maximum qualify (a sub-dominant sliver chord is not an isovist
    ridge), and a chord mostly inside an existing bucket is that line's
    own direction family, not a new one.
    """
    a, b, lengths = sweep_chords(space, p, rcfg)

    def mk_ray(idx: int) -> Ray:
        seg = Segment(
            Point2(float(a[idx, 0]), float(a[idx, 1])),
            Point2(float(b[idx, 0]), float(b[idx, 1])),
        )
        return Ray(seg=seg, origin=p, length=seg.length)

    floor = max(min_length, float(lengths.max()) * (1.0 - rcfg.dominance_tolerance))
    alive = [int(i) for i in _local_maxima_dirs(lengths) if lengths[i] >= floor]
    while alive:
        sub = np.array(alive)
        best = int(sub[pick_dominant(space, a[sub], b[sub], lengths[sub], rcfg.dominance_tolerance)])
        if lengths[best] < min_length:
            return None
        candidate = mk_ray(best)
        blocker = next(
            (bk for bk in buckets if ray_bucket_overlap(candidate, bk) >= FAMILY_OVERLAP), None
        )
        if blocker is None:
            return candidate
        alive = [
            i
            for i in alive
            if i != best and ray_bucket_overlap(mk_ray(i), blocker) < FAMILY_OVERLAP
        ]
    return None


def axialgen_line_seeded(
    space: FreeSpaceMap,
    seed: Segment,
    graph: MedialAxisGraph,
    rcfg: RidgeConfig,
    cfg: ReduceConfig,
) -> AxialMap:
    """Grow the axial map from an arbitrarily drawn line.

    Each round discretizes the current frontier lines, ridges every point
    (falling back to the longest not-yet-redundant chord when the primary
    ridge is already absorbed), removes candidates redundant with selected
    buckets, and selects survivors longest-first.  Stops at the coverage
    target or when a round selects nothing.
    """
    step = rcfg.resolve_step(space)
    threshold = cfg.overlap_threshold
    selected: list[Ray] = []
    buckets: list[Bucket] = []
    seen = _RayDeduper(eps=max(space.epsilon, 1e-7 * space.diagonal))
    input_count = 0

    pool = rays_from_seed_line(space, seed, rcfg)  # raises SeedOutsideFreeSpace
    if len(pool) > 1:
        # The arbitrarily drawn first ray seeds discretization but is not
        # itself a ridge; its points' ridges are the candidates.
        pool = pool[1:]
    frontier: list[Ray] = []
    for round_no in range(64):
        if round_no > 0:
            pool = []
            for line in frontier:
                for p in discretize_ray(line, step):
                    if not contains(space, p):
                        continue
                    ray = _propose_new_direction(
                        space, p, rcfg, buckets, min_length=2.0 * step
                    )
                    if ray is not None:
                        pool.append(ray)
        candidates = []
        for ray in pool:
            if not seen.add(ray):
                continue
            kept = seen.rays[-1]
            if any(ray_bucket_overlap(kept, bk) >= threshold for bk in buckets):
                continue
            candidates.append(kept)
        input_count += len(pool)
        if not candidates:
            break
        sub = reduce_global(candidates, graph, space, cfg)
        if not sub.lines:
            break
        selected.extend(sub.lines)
        buckets.extend(sub.buckets)
        frontier = sub.lines
        interim = AxialMap(lines=selected, buckets=buckets, config=cfg, stats={})
        if coverage_fraction(interim, space) >= cfg.coverage_target:
            break

    axial = AxialMap(
        lines=selected,
        buckets=buckets,
        config=dataclasses.replace(cfg, strategy="line_seeded"),
        stats={},
    )
    axial.stats = {
        "input_ray_count": input_count,
        "coverage_fraction": coverage_fraction(axial, space),
        "total_length": float(sum(r.length for r in axial.lines)),
    }
    return axial
