"""Command line interface: validate, run, ingest, and plot workflows.

Exit codes: 0 success, 1 validation/input error, 2 internal error.
Identical argv + identical input files always produce byte-identical
output, regardless of --jobs.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analytics import average, render_saturation_report, saturation_report
from .ingest import (
    IngestError,
    aggregate_monthly,
    discretize_uniform,
    extend_series,
    read_raw_csv,
    series_to_toggles,
)
from .model import InvalidModelError, Model, require_valid, validate_model
from .modelio import (
    FormatError,
    bind_toggles,
    model_digest,
    parse_model,
    parse_toggles,
    read_trace_csv,
    write_metadata,
    write_toggles_csv,
    write_trace_csv,
)
from .plotting import render_plot
from .analytics import AveragedTrajectory
from .scheduler import (
    GroupUpdate,
    RandomSequential,
    SchemeError,
    SequentialFixed,
    SimulationConfig,
    Simultaneous,
    simulate,
    validate_scheme,
)


class CliError(Exception):
    """User-facing input/validation failure (exit 1)."""


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise CliError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _load_model(model_path: str, toggles_path: str | None = None) -> Model:
    try:
        model = parse_model(_read_text(model_path))
        if toggles_path is not None:
            model = bind_toggles(model, parse_toggles(_read_text(toggles_path)))
        return require_valid(model)
    except (FormatError, InvalidModelError) as exc:
        for diag in exc.diagnostics:
            print(str(diag), file=sys.stderr)
        raise CliError("invalid input") from exc


def _build_scheme(args) -> object:
    if args.scheme == "simultaneous":
        return Simultaneous()
    if args.scheme == "rsb":
        return RandomSequential()
    if args.scheme == "seq-fixed":
        if not args.order:
            raise CliError("--scheme seq-fixed requires --order a,b,...")
        return SequentialFixed(tuple(n.strip() for n in args.order.split(",")))
    if args.scheme == "group":
        if not args.groups:
            raise CliError('--scheme group requires --groups "a,b;c,d"')
        groups = tuple(
            tuple(n.strip() for n in grp.split(",") if n.strip())
            for grp in args.groups.split(";")
        )
        return GroupUpdate(groups)
    raise CliError(f"unknown scheme '{args.scheme}'")


def cmd_validate(args) -> int:
    try:
        model = parse_model(_read_text(args.model))
    except FormatError as exc:
        for diag in exc.diagnostics:
            print(str(diag), file=sys.stderr)
        return 1
    diags = validate_model(model)
    for diag in diags:
        print(str(diag), file=sys.stderr)
    if any(d.severity == "error" for d in diags):
        return 1
    print(f"model '{model.name}' is valid ({len(model.elements)} elements, "
          f"{len(model.hyperedges)} hyperedges)")
    return 0


def cmd_run(args) -> int:
    model = _load_model(args.model, args.toggles)
    scheme = _build_scheme(args)
    try:
        validate_scheme(model, scheme)
        config = SimulationConfig(
            scheme=scheme,
            steps=args.steps,
            runs=args.runs,
            base_seed=args.seed,
        )
    except (SchemeError, ValueError) as exc:
        raise CliError(str(exc)) from exc

    ensemble = simulate(model, config, jobs=args.jobs)
    avg = average(ensemble)
    order = model.element_order

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.average_only:
        width = max(3, len(str(config.runs - 1)))
        for i, trace in enumerate(ensemble.traces):
            path = out_dir / f"run_{i:0{width}d}.csv"
            path.write_text(
                write_trace_csv(trace.recorded_steps, trace.values, order),
                encoding="utf-8",
            )
    (out_dir / "average.csv").write_text(
        write_trace_csv(avg.recorded_steps, avg.means, order), encoding="utf-8"
    )
    (out_dir / "metadata.json").write_text(
        write_metadata(config, model_digest(model)), encoding="utf-8"
    )
    (out_dir / "saturation.txt").write_text(
        render_saturation_report(saturation_report(ensemble)), encoding="utf-8"
    )
    return 0


def cmd_ingest(args) -> int:
    try:
        raw = read_raw_csv(_read_text(args.raw), args.element)
        aligned = aggregate_monthly(raw, args.agg)
        extension = None
        if args.horizon is not None:
            if args.extend and args.extend.startswith("periodic:"):
                period = int(args.extend.split(":", 1)[1])
                aligned = extend_series(aligned, args.horizon, periodic=period)
                extension = {"strategy": "periodic", "period": period}
            elif args.extend in (None, "hold"):
                aligned = extend_series(aligned, args.horizon)
                extension = {"strategy": "hold_last"}
            else:
                raise CliError(f"unknown --extend value '{args.extend}'")
        levels = discretize_uniform(aligned.values, args.levels)
        toggles = series_to_toggles(levels, args.levels)
    except (IngestError, ValueError) as exc:
        raise CliError(str(exc)) from exc

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(write_toggles_csv({args.element: toggles}), encoding="utf-8")
    meta = {
        "element": args.element,
        "cadence": raw.cadence,
        "aggregation": args.agg,
        "levels": args.levels,
        "bin_range": [min(aligned.values), max(aligned.values)],
        "start": {"year": aligned.start[0], "month": aligned.start[1]},
        "months": len(aligned.values),
        "extension": extension,
        "yearly_fill": "forward-fill per month" if raw.cadence == "yearly" else None,
    }
    Path(str(out) + ".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    return 0


def cmd_plot(args) -> int:
    elements = [n.strip() for n in args.elements.split(",") if n.strip()]
    trajectories = []
    try:
        for path in args.avg.split(","):
            steps, series = read_trace_csv(_read_text(path.strip()))
            trajectories.append(
                (Path(path.strip()).stem, AveragedTrajectory(steps, series, runs=1))
            )
        svg = render_plot(trajectories, elements)
    except (FormatError, KeyError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg, encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trendnet",
        description="Discrete dynamic network simulator with trend-aware regulation",
    )
    parser.add_argument("--version", action="version", version=f"trendnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="simulate an ensemble and write traces")
    p.add_argument("--model", required=True)
    p.add_argument("--toggles")
    p.add_argument("--scheme", default="rsb",
                   choices=["simultaneous", "seq-fixed", "rsb", "group"])
    p.add_argument("--order", help="comma-separated update order for seq-fixed")
    p.add_argument("--groups", help='semicolon-separated groups, e.g. "a,b;c,d"')
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--average-only", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("ingest", help="convert a raw time series into a toggle CSV")
    p.add_argument("--raw", required=True, help="CSV with header date,value")
    p.add_argument("--element", required=True)
    p.add_argument("--agg", required=True, choices=["sum", "mean"])
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--extend", help="periodic:<months> or hold")
    p.add_argument("--horizon", type=int, help="total months after extension")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("plot", help="render averaged trajectories to SVG")
    p.add_argument("--avg", required=True, help="comma-separated average.csv paths")
    p.add_argument("--elements", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; map to the input-error code
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
