"""Batch pipeline: load, skeletonize, generate rays, reduce, export."""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import io as io_mod
from .errors import ValidationError
from .geom import Segment
from .medial import auto_cell_size, build_medial_axes, densify_boundary, densify_medial_vertices
from .reduce import AxialMap, ReduceConfig, axialgen_line_seeded, reduce_global, reduce_search
from .ridge import RidgeConfig, rays_from_medial

log = logging.getLogger(__name__)

ALL_OUTPUTS = ("axial-geojson", "medial-geojson", "svg", "stats-json")


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str
    cell_size: str | float = "auto"
    ridge: RidgeConfig = field(default_factory=RidgeConfig)
    reduce: ReduceConfig = field(default_factory=ReduceConfig)
    seed: Segment | None = None
    outputs: tuple[str, ...] = ALL_OUTPUTS
    out_dir: str = "."

    def __post_init__(self) -> None:
        if self.reduce.strategy == "line_seeded" and self.seed is None:
            raise ValidationError("line_seeded strategy requires a seed segment")
        if self.cell_size != "auto" and not (float(self.cell_size) > 0):
            raise ValidationError(f"cell_size must be 'auto' or positive, got {self.cell_size}")
        unknown = set(self.outputs) - set(ALL_OUTPUTS)
        if unknown:
            raise ValidationError(f"unknown outputs: {sorted(unknown)}")


@dataclass
class RunReport:
    counts: dict
    coverage_fraction: float
    wall_time: dict
    config: dict
    written: list[str] = field(default_factory=list)
    axial: AxialMap | None = None
    graph: object = None
    space: object = None


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Load, build medial axes, generate rays, reduce, and export.

    Stage wall times go to the report (and the log), never to the exported
    stats file, which must be byte-identical across runs.
    """
    timings: dict[str, float] = {}

    def staged(name: str, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:
            head = exc.args[0] if exc.args else exc
            exc.args = (f"[stage {name}] {head}",) + tuple(exc.args[1:])
            raise
        timings[name] = time.perf_counter() - t0
        log.info("stage %s: %.3fs", name, timings[name])
        return result

    space = staged("load", lambda: io_mod.load_map(cfg.input_path))
    cell = staged(
        "cell_size",
        lambda: auto_cell_size(space) if cfg.cell_size == "auto" else float(cfg.cell_size),
    )
    samples = staged("densify_boundary", lambda: densify_boundary(space, cell))
    graph = staged("medial_axes", lambda: build_medial_axes(space, samples))
    graph = staged("densify_vertices", lambda: densify_medial_vertices(graph, space))

    strategy = cfg.reduce.strategy
    if strategy == "line_seeded":
        rays = []
        axial = staged(
            "reduce",
            lambda: axialgen_line_seeded(space, cfg.seed, graph, cfg.ridge, cfg.reduce),
        )
        rays_generated = axial.stats["input_ray_count"]
    else:
        rays = staged("rays", lambda: rays_from_medial(space, graph, cfg.ridge))
        rays_generated = len(rays)
        if strategy == "global":
            axial = staged("reduce", lambda: reduce_global(rays, graph, space, cfg.reduce))
        else:
            axial = staged("reduce", lambda: reduce_search(rays, graph, space, cfg.reduce))

    written: list[Path] = []
    out_dir = Path(cfg.out_dir)
    exports = set(cfg.outputs)
    written += io_mod.export_axial_map(axial, out_dir, exports & {"axial-geojson", "stats-json"})
    if "medial-geojson" in exports:
        path = out_dir / "medial.geojson"
        out_dir.mkdir(parents=True, exist_ok=True)
        io_mod._dump_json(io_mod.graph_geojson(graph), path)
        written.append(path)
    if "svg" in exports:
        path = out_dir / "render.svg"
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(
            io_mod.render_svg(
                space, medial=graph, rays=rays, buckets=axial.buckets, axial=axial.lines
            )
        )
        written.append(path)

    config_echo = {
        "input_path": cfg.input_path,
        "cell_size": cell,
        "ridge": dataclasses.asdict(cfg.ridge),
        "reduce": dataclasses.asdict(cfg.reduce),
        "seed": _seed_echo(cfg.seed),
        "outputs": list(cfg.outputs),
        "out_dir": cfg.out_dir,
    }
    return RunReport(
        counts={
            "boundary_samples": len(samples),
            "medial_vertices": len(graph.vertices),
            "rays_generated": rays_generated,
            "lines_selected": len(axial.lines),
        },
        coverage_fraction=axial.stats.get("coverage_fraction", 0.0),
        wall_time=timings,
        config=config_echo,
        written=[str(p) for p in written],
        axial=axial,
        graph=graph,
        space=space,
    )


def _seed_echo(seed: Segment | None):
    if seed is None:
        return None
    return [[seed.a.x, seed.a.y], [seed.b.x, seed.b.y]]
