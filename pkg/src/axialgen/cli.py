"""Command line entry points for batch runs and the explorer service."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import io as io_mod
from .errors import AxialGenError, GeometryError, NoPolygonFound, ParseError, ValidationError
from .geom import Point2, Ray, Segment, cast_ray, compute_isovist
from .medial import auto_cell_size, build_graph
from .pipeline import ALL_OUTPUTS, PipelineConfig, RunReport, run_pipeline
from .reduce import ReduceConfig
from .ridge import RidgeConfig, isovist_ridge
from .bucket import build_bucket, trace_crossings

log = logging.getLogger("axialgen")

_VALIDATION_ERRORS = (ValidationError, ParseError, NoPolygonFound, GeometryError, ValueError)


def _parse_point(text: str) -> Point2:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise ValidationError(f"expected x,y got {text!r}")
    return Point2(parts[0], parts[1])


def _parse_segment(text: str) -> Segment:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise ValidationError(f"expected x1,y1,x2,y2 got {text!r}")
    return Segment(Point2(parts[0], parts[1]), Point2(parts[2], parts[3]))


def _cell_size_value(text: str) -> str | float:
    return "auto" if text == "auto" else float(text)


_EMIT_ALIASES = {
    "axial": "axial-geojson",
    "medial": "medial-geojson",
    "stats": "stats-json",
    "svg": "svg",
}


def _parse_emit(text: str) -> tuple[str, ...]:
    names = []
    for raw in text.split(","):
        name = raw.strip()
        if not name:
            continue
        names.append(_EMIT_ALIASES.get(name, name))
    return tuple(names)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log stage timings to stderr.")
def cli(verbose: bool) -> None:
    """Generate axial maps from the open space of an urban environment."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--strategy",
    type=click.Choice(["global", "bfs", "dfs", "line-seeded"]),
    default="global",
    show_default=True,
)
@click.option("--seed", default=None, help="x1,y1,x2,y2 seed segment (line-seeded only).")
@click.option("--cell-size", default="auto", show_default=True, help="'auto' or a length.")
@click.option("--overlap", default=0.85, show_default=True, type=float)
@click.option("--angular-step", default=1.0, show_default=True, type=float)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--emit",
    default=",".join(ALL_OUTPUTS),
    show_default=True,
    help="Comma-separated subset of axial-geojson,medial-geojson,svg,stats-json.",
)
def run(input_path, strategy, seed, cell_size, overlap, angular_step, out_dir, emit) -> None:
    """Run the full pipeline and export the axial map."""
    strategy = strategy.replace("-", "_")
    cfg = PipelineConfig(
        input_path=input_path,
        cell_size=_cell_size_value(cell_size),
        ridge=RidgeConfig(angular_step=angular_step),
        reduce=ReduceConfig(overlap_threshold=overlap, strategy=strategy),
        seed=_parse_segment(seed) if seed else None,
        outputs=_parse_emit(emit),
        out_dir=out_dir,
    )
    report = run_pipeline(cfg)
    _echo_report(report)


def _echo_report(report: RunReport) -> None:
    for key, value in report.counts.items():
        click.echo(f"{key}: {value}")
    click.echo(f"coverage_fraction: {report.coverage_fraction:.4f}")
    for path in report.written:
        click.echo(f"wrote {path}")
    for stage, secs in report.wall_time.items():
        log.info("%s: %.3fs", stage, secs)


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--cell-size", default="auto", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def medial(input_path, cell_size, out_dir) -> None:
    """Generate only the medial axes of the open space."""
    space = io_mod.load_map(input_path)
    cell = auto_cell_size(space) if cell_size == "auto" else float(cell_size)
    graph = build_graph(space, cell)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io_mod._dump_json(io_mod.graph_geojson(graph), out / "medial.geojson")
    (out / "render.svg").write_text(io_mod.render_svg(space, medial=graph))
    click.echo(f"medial_vertices: {len(graph.vertices)}")
    click.echo(f"wrote {out / 'medial.geojson'}")
    click.echo(f"wrote {out / 'render.svg'}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--at", "at_point", required=True, help="x,y standing point.")
@click.option("--angular-step", default=1.0, show_default=True, type=float)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def isovist(input_path, at_point, angular_step, out_dir) -> None:
    """Isovist polygon and ridge of a standing point."""
    space = io_mod.load_map(input_path)
    p = _parse_point(at_point)
    iso = compute_isovist(space, p)
    ray = isovist_ridge(space, p, RidgeConfig(angular_step=angular_step))
    ring = [[float(x), float(y)] for x, y in iso.boundary]
    ring.append(ring[0])
    ridge_feat = io_mod.ray_feature(ray)
    ridge_feat["properties"]["kind"] = "ridge"
    doc = io_mod.feature_collection(
        [
            {
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring]},
                "properties": {"kind": "isovist", "area": iso.area},
            },
            ridge_feat,
        ]
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io_mod._dump_json(doc, out / "isovist.geojson")
    click.echo(f"isovist_area: {iso.area}")
    click.echo(f"ridge_length: {ray.length}")
    click.echo(f"wrote {out / 'isovist.geojson'}")


@cli.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ray", "ray_text", required=True, help="x1,y1,x2,y2 drawn segment.")
@click.option("--cell-size", default="auto", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
def bucket(input_path, ray_text, cell_size, out_dir) -> None:
    """Stretch a drawn segment into a ray and build its bucket."""
    space = io_mod.load_map(input_path)
    seg = _parse_segment(ray_text)
    cell = auto_cell_size(space) if cell_size == "auto" else float(cell_size)
    graph = build_graph(space, cell)
    mid = Point2((seg.a.x + seg.b.x) / 2, (seg.a.y + seg.b.y) / 2)
    stretched = cast_ray(space, mid, seg.direction())
    stretched = Ray(seg=stretched.seg, origin=stretched.origin, length=stretched.length, id=0)
    trace = trace_crossings(stretched, graph)
    bkt = build_bucket(stretched, trace, space)
    doc = io_mod.feature_collection(
        [io_mod.ray_feature(stretched), io_mod.bucket_feature(bkt)]
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io_mod._dump_json(doc, out / "bucket.geojson")
    click.echo(f"crossings: {len(trace.crossings)}")
    click.echo(f"bucket_area: {bkt.area}")
    click.echo(f"wrote {out / 'bucket.geojson'}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8008, show_default=True, type=int)
def serve(host, port) -> None:
    """Serve the interactive explorer API."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(2)
    except click.Abort:
        sys.exit(1)
    except _VALIDATION_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except AxialGenError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"io error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
