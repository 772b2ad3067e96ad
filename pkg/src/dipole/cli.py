"""Command-line pipeline: data in, corrected embedding and reports out.

Subcommands:
  embed      generate or load data, build the target metric, initialize with
             classical MDS on geodesics, run the descent, write artifacts
  evaluate   score an embedding CSV against a target metric
  grid       run embed+evaluate over a Cartesian hyperparameter grid

Artifacts are CSV (matrices, traces, grid rows), JSON (manifests, metrics),
an optional dependency-free SVG scatter, and matplotlib figures rendered
alongside the delimited outputs. Exit codes: 0 success, 1 validation error,
2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from itertools import product
from pathlib import Path

from . import __version__
from .datasets import (
    DatasetSpec,
    circle_sample,
    load_cloud,
    load_distance,
    swiss_roll,
    swiss_roll_hole,
    torus_sample,
)
from .errors import (
    DegenerateInputError,
    DisconnectedGraphError,
    MatchingConsistencyError,
    NumericalError,
    ParameterError,
    ValidationError,
)
from .evaluation import evaluate
from .geometry import (
    DistanceMatrix,
    PointCloud,
    euclidean_distances,
    geodesic_distances,
    knn_graph,
)
from .isomap import isomap_embed
from .optimizer import DipoleConfig, run
from .report import (
    emit_svg,
    save_embedding_figure,
    save_grid_figure,
    save_scores_figure,
    save_trace_figure,
)
from .serialize import atomic_write_text, fmt_float, read_matrix_csv, write_json, write_matrix_csv, write_trace_csv

GENERATORS = ("swiss-roll-hole", "swiss-roll", "circle", "torus")

CONFIG_KEYS = (
    "alpha",
    "k",
    "lr",
    "m2",
    "seed",
    "batch_size",
    "p",
    "max_degree",
    "steps",
    "anneal_const",
    "schedule",
)


def _resolve_dataset(spec: DatasetSpec):
    """Materialize a dataset spec into (cloud, distance, colors)."""
    kind = spec.kind
    if kind == "swiss_roll_hole":
        cloud, params = swiss_roll_hole(spec.n, spec.seed, return_params=True)
        return cloud, None, params[:, 0]
    if kind == "swiss_roll":
        cloud, params = swiss_roll(spec.n, spec.seed, noise=spec.noise, return_params=True)
        return cloud, None, params[:, 0]
    if kind == "circle":
        cloud = circle_sample(
            spec.n, radius=spec.params.get("radius", 1.0), noise=spec.noise, seed=spec.seed
        )
        return cloud, None, None
    if kind == "torus":
        cloud = torus_sample(
            spec.n,
            R=spec.params.get("R", 2.0),
            r=spec.params.get("r", 0.5),
            seed=spec.seed,
        )
        return cloud, None, None
    if kind == "csv_cloud":
        cloud = load_cloud(spec.params["path"])
        colors = None
        col = spec.params.get("color_column")
        if col is not None:
            if not 0 <= int(col) < cloud.dim:
                raise ParameterError(f"color column {col} out of range")
            colors = cloud.coords[:, int(col)]
        return cloud, None, colors
    if kind == "csv_distance":
        return None, load_distance(spec.params["path"]), None
    raise ParameterError(f"unknown dataset kind {kind!r}")


def _target_metric(cloud, dist, m1: int, connect: bool) -> DistanceMatrix:
    """Geodesics on the m1-NN graph for clouds; pass-through for metric input."""
    if dist is not None:
        return dist
    ambient = euclidean_distances(cloud)
    graph = knn_graph(ambient, m1)
    return geodesic_distances(graph, connect=connect, dist=ambient)


def _dataset_spec_from_args(args) -> DatasetSpec:
    if args.manifest:
        raise AssertionError("manifest handled before dataset resolution")
    sources = [bool(args.dataset), bool(args.cloud), bool(args.distance)]
    if sum(sources) != 1:
        raise ValidationError("exactly one of --dataset, --cloud, --distance is required")
    if args.cloud:
        params = {"path": str(args.cloud)}
        if args.color_column is not None:
            params["color_column"] = args.color_column
        return DatasetSpec(kind="csv_cloud", params=params)
    if args.distance:
        return DatasetSpec(kind="csv_distance", params={"path": str(args.distance)})
    kind = args.dataset.replace("-", "_")
    params = {}
    if kind == "circle":
        params["radius"] = args.circle_radius
    if kind == "torus":
        params = {"R": args.torus_R, "r": args.torus_r}
    return DatasetSpec(kind=kind, n=args.n, noise=args.noise, seed=args.seed, params=params)


def _settings_from_args(args) -> dict:
    return {
        "dataset": _dataset_spec_from_args(args).to_dict(),
        "dim": args.dim,
        "m1": args.m1,
        "connect": bool(args.connect),
        "config": {
            "alpha": args.alpha,
            "k": args.k,
            "lr": args.lr,
            "m2": args.m2,
            "seed": args.seed,
            "batch_size": args.batch,
            "p": args.p,
            "max_degree": args.max_degree,
            "steps": args.steps,
            "anneal_const": args.anneal,
            "schedule": args.schedule,
        },
    }


def _settings_from_manifest(path) -> dict:
    with open(path) as fh:
        manifest = json.load(fh)
    for key in ("dataset", "dim", "m1", "connect", "config"):
        if key not in manifest:
            raise ValidationError(f"{path}: manifest is missing {key!r}")
    return {key: manifest[key] for key in ("dataset", "dim", "m1", "connect", "config")}


def run_embed_pipeline(settings: dict, threads: int = 1):
    """Shared embed pipeline; returns (state, target metric, colors, timings)."""
    timings = {}
    t0 = time.perf_counter()
    spec = DatasetSpec(**settings["dataset"])
    cloud, dist, colors = _resolve_dataset(spec)
    timings["load_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    target = _target_metric(cloud, dist, settings["m1"], settings["connect"])
    timings["metric_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    initial = isomap_embed(target, settings["dim"])
    timings["init_s"] = time.perf_counter() - t0

    cfg = DipoleConfig(**{k: settings["config"][k] for k in CONFIG_KEYS})
    t0 = time.perf_counter()
    state = run(initial, target, cfg, threads=threads)
    timings["optimize_s"] = time.perf_counter() - t0
    return state, target, colors, timings


def cmd_embed(args) -> int:
    if args.manifest:
        settings = _settings_from_manifest(args.manifest)
    else:
        if args.dim is None or args.seed is None:
            raise ValidationError("--dim and --seed are required")
        settings = _settings_from_args(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    state, target, colors, timings = run_embed_pipeline(settings, threads=args.threads)

    t0 = time.perf_counter()
    write_matrix_csv(outdir / "embedding.csv", state.embedding.coords)
    write_trace_csv(outdir / "trace.csv", state.trace)
    if args.svg:
        atomic_write_text(outdir / "embedding.svg", emit_svg(state.embedding.coords, colors))
    if args.figures:
        save_embedding_figure(
            state.embedding.coords, outdir / "embedding.png", colors=colors
        )
        if state.trace:
            save_trace_figure(state.trace, outdir / "loss_trace.png")
    timings["write_s"] = time.perf_counter() - t0

    manifest = dict(settings)
    manifest["tool"] = "dipole"
    manifest["version"] = __version__
    manifest["timings_s"] = {k: round(v, 6) for k, v in timings.items()}
    write_json(outdir / "manifest.json", manifest)
    return 0


def _load_target_for_eval(args) -> DistanceMatrix:
    if bool(args.cloud) == bool(args.distance):
        raise ValidationError("exactly one of --cloud, --distance is required")
    if args.distance:
        return load_distance(args.distance)
    cloud = load_cloud(args.cloud)
    return _target_metric(cloud, None, args.m1, args.connect)


def cmd_evaluate(args) -> int:
    target = _load_target_for_eval(args)
    coords = read_matrix_csv(args.embedding)
    if coords.shape[0] != target.n:
        raise ValidationError(
            f"embedding has {coords.shape[0]} rows but the metric has {target.n} points"
        )
    embedded = euclidean_distances(PointCloud(coords))
    report = evaluate(
        target,
        embedded,
        ijk_samples=args.ijk_samples,
        fps_size=args.fps_size,
        seed=args.seed,
    )
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_json(outdir / "metrics.json", report.to_dict())
    if args.figures:
        save_scores_figure(report, outdir / "scores.png")
    return 0


def _axis_values_key(values: dict, axes: list) -> tuple:
    return tuple(str(values[a]) for a in axes)


def _format_cell(v) -> str:
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def cmd_grid(args) -> int:
    with open(args.grid) as fh:
        try:
            grid = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.grid}: malformed grid file: {exc}") from exc
    if "base" not in grid or "axes" not in grid or not isinstance(grid["axes"], dict):
        raise ValidationError(f"{args.grid}: grid file needs 'base' and 'axes' objects")
    base = grid["base"]
    axes = sorted(grid["axes"].keys())
    eval_opts = grid.get("evaluate", {})
    for axis in axes:
        if axis not in CONFIG_KEYS and axis not in ("dim", "m1"):
            raise ValidationError(f"{args.grid}: unknown grid axis {axis!r}")

    def order_key(combo):
        return tuple(
            float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else str(v)
            for v in combo
        )

    combos = sorted(product(*(grid["axes"][a] for a in axes)), key=order_key)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    out_csv = outdir / "grid.csv"
    header = axes + ["ijk_score", "residual_variance", "ph0_score", "ph1_score", "wall_time_s"]
    rows: list[dict] = []
    done = set()
    if out_csv.exists():
        existing = out_csv.read_text().strip().splitlines()
        if existing and existing[0].split(",")[: len(axes)] == axes:
            for line in existing[1:]:
                cells = line.split(",")
                row = dict(zip(header, cells))
                rows.append(row)
                done.add(tuple(cells[: len(axes)]))

    def write_rows():
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(row[h] for h in header))
        atomic_write_text(out_csv, "\n".join(lines) + "\n")

    for combo in combos:
        key = tuple(_format_cell(v) for v in combo)
        if key in done:
            continue
        settings = json.loads(json.dumps(base))  # deep copy
        settings.setdefault("connect", False)
        for axis, value in zip(axes, combo):
            if axis in ("dim", "m1"):
                settings[axis] = value
            else:
                settings["config"][axis] = value
        t0 = time.perf_counter()
        state, target, _, _ = run_embed_pipeline(settings, threads=args.threads)
        embedded = euclidean_distances(PointCloud(state.embedding.coords))
        report = evaluate(
            target,
            embedded,
            ijk_samples=eval_opts.get("ijk_samples", 10000),
            fps_size=eval_opts.get("fps_size", 256),
            seed=eval_opts.get("seed", 0),
        )
        wall = time.perf_counter() - t0
        row = dict(zip(axes, key))
        row.update(
            {
                "ijk_score": fmt_float(report.ijk_score),
                "residual_variance": fmt_float(report.residual_variance),
                "ph0_score": fmt_float(report.ph0_score),
                "ph1_score": fmt_float(report.ph1_score),
                "wall_time_s": fmt_float(wall),
            }
        )
        rows.append(row)
        done.add(key)
        write_rows()

    if not rows:
        raise ValidationError("grid produced no rows")
    write_rows()
    if args.figures:
        save_grid_figure(rows, outdir / "grid_scores.png")
    return 0


def _add_embed_parser(sub):
    p = sub.add_parser("embed", help="run the full embedding pipeline")
    src = p.add_argument_group("input (exactly one)")
    src.add_argument("--dataset", choices=GENERATORS, help="synthetic dataset generator")
    src.add_argument("--cloud", help="point cloud CSV (one point per row)")
    src.add_argument("--distance", help="distance matrix CSV")
    src.add_argument("--manifest", help="re-run from an emitted manifest JSON")
    p.add_argument("--n", type=int, default=1000, help="generator point count")
    p.add_argument("--noise", type=float, default=0.0, help="generator noise stddev")
    p.add_argument("--circle-radius", type=float, default=1.0)
    p.add_argument("--torus-R", type=float, default=2.0)
    p.add_argument("--torus-r", type=float, default=0.5)
    p.add_argument("--dim", type=int, help="target dimension (required)")
    p.add_argument("--seed", type=int, help="RNG seed (required)")
    p.add_argument("--m1", type=int, default=5, help="neighbor count for the geodesic graph")
    p.add_argument("--m2", type=int, default=3, help="neighbor count for the metric-pair set")
    p.add_argument("--k", type=int, default=64, help="subset size for the topological term")
    p.add_argument("--alpha", type=float, default=0.1, help="metric/topology tradeoff in [0,1]")
    p.add_argument("--lr", type=float, default=1.0, help="base learning rate")
    p.add_argument("--p", type=float, default=2.0, help="Wasserstein order")
    p.add_argument("--steps", type=int, default=2500, help="descent step count")
    p.add_argument("--anneal", type=float, default=1000.0, help="annealing constant c in c/(c+step)")
    p.add_argument("--batch", type=int, default=1, help="subsets sampled per step")
    p.add_argument("--max-degree", type=int, default=1, choices=(0, 1))
    p.add_argument("--schedule", choices=("anneal", "inverse"), default="anneal")
    p.add_argument("--connect", action="store_true", help="bridge disconnected graph components")
    p.add_argument("--threads", type=int, default=1, help="parallel subset computations per step")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG scatter")
    p.add_argument("--color-column", type=int, default=None, help="cloud CSV column used for point colors")
    p.add_argument("--no-figures", dest="figures", action="store_false", help="skip matplotlib figures")
    p.set_defaults(func=cmd_embed)


def _add_evaluate_parser(sub):
    p = sub.add_parser("evaluate", help="score an embedding against a target metric")
    p.add_argument("--cloud", help="point cloud CSV defining the target metric")
    p.add_argument("--distance", help="distance matrix CSV used as the target metric")
    p.add_argument("--embedding", required=True, help="embedding CSV to score")
    p.add_argument("--m1", type=int, default=5)
    p.add_argument("--connect", action="store_true")
    p.add_argument("--ijk-samples", type=int, default=10000)
    p.add_argument("--fps-size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=cmd_evaluate)


def _add_grid_parser(sub):
    p = sub.add_parser("grid", help="run a hyperparameter grid and collect scores")
    p.add_argument("--grid", required=True, help="grid JSON file with 'base' and 'axes'")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-figures", dest="figures", action="store_false")
    p.set_defaults(func=cmd_grid)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipole",
        description="Topology-aware metric dimensionality reduction",
    )
    parser.add_argument("--version", action="version", version=f"dipole {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_embed_parser(sub)
    _add_evaluate_parser(sub)
    _add_grid_parser(sub)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        ParameterError,
        ValidationError,
        DegenerateInputError,
        DisconnectedGraphError,
        FileNotFoundError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, MatchingConsistencyError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
