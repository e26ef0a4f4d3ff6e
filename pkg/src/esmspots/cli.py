"""Batch command-line front end.

Subcommands: ``analyze`` (CSV in, GeoJSON/CSV/manifest out), ``synth``
(write a synthetic dataset), ``calibrate`` (replicated null or planted-
cluster experiments). Exit codes: 0 success, 2 input error, 3 degenerate
statistics, 4 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .errors import (
    DegenerateValues,
    EmptyDataset,
    EsmSpotsError,
    InsufficientPoints,
    InvalidBand,
    InvalidConfig,
    NoNeighbors,
    SchemaError,
)
from .exports import points_geojson, spots_geojson, write_geojson, write_spot_csv
from .pipeline import AnalysisConfig, AnalysisResult, analyze_reports
from .reports import parse_reports, write_rejections, write_reports
from .synth import (
    CalibrationResult,
    null_scenario,
    generate,
    run_calibration,
    standard_scenario,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_CONFIG = 4

_INPUT_ERRORS = (EmptyDataset, SchemaError, FileNotFoundError, IsADirectoryError)
_DEGENERATE_ERRORS = (DegenerateValues, NoNeighbors, InsufficientPoints)
_CONFIG_ERRORS = (InvalidConfig, InvalidBand)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esmspots",
        description="Hot and cold spot analysis of experience-sampling reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full analysis on a report CSV")
    analyze.add_argument("--input", required=True, help="report CSV path")
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.add_argument("--band", type=float, default=None,
                         help="fixed distance band in meters (skips optimization)")
    analyze.add_argument("--min-conf", type=int, default=90,
                         help="minimum spot confidence: 90, 95, or 99")
    analyze.add_argument("--min-size", type=int, default=5,
                         help="minimum points per spot")
    analyze.add_argument("--increments", type=int, default=10,
                         help="distance steps in the band sweep")

    synth = sub.add_parser("synth", help="write a synthetic report dataset")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--preset", choices=["standard", "null"], default="standard")
    synth.add_argument("--n-background", type=int, default=None,
                       help="override the background point count")
    synth.add_argument("--radius", type=float, default=500.0,
                       help="planted cluster radius in meters (standard preset)")

    calibrate = sub.add_parser("calibrate", help="replicated calibration runs")
    calibrate.add_argument("--out", required=True, help="output directory")
    calibrate.add_argument("--replicates", type=int, required=True)
    calibrate.add_argument("--seed", type=int, default=0)
    calibrate.add_argument("--preset", choices=["null", "planted"], default="null")
    calibrate.add_argument("--min-conf", type=int, default=90)
    calibrate.add_argument("--min-size", type=int, default=5)
    calibrate.add_argument("--increments", type=int, default=10)
    return parser


def _analysis_config(args: argparse.Namespace) -> AnalysisConfig:
    config = AnalysisConfig(
        band=args.band if hasattr(args, "band") else None,
        min_conf=args.min_conf,
        min_size=args.min_size,
        steps=args.increments,
    )
    config.validate()
    return config


def _curve_json(result: AnalysisResult) -> list[dict]:
    if result.band_selection is None:
        return []
    return [
        {
            "distance": m.distance,
            "i": m.i_value,
            "expected_i": m.expected_i,
            "variance": m.variance,
            "z": m.z,
            "p": m.p_two_sided,
        }
        for m in result.band_selection.curve
    ]


def _manifest(args, result: AnalysisResult, n_rejected: int) -> dict:
    selection = result.band_selection
    bins = result.bin_counts()
    return {
        "created_utc": None,  # kept free of wall-clock state so runs are comparable
        "config": {
            "input": str(args.input),
            "band": args.band,
            "min_conf": args.min_conf,
            "min_size": args.min_size,
            "increments": args.increments,
        },
        "n_reports": len(result.gi),
        "n_rejected": n_rejected,
        "origin": {"lat": result.origin.lat, "lon": result.origin.lon},
        "band": {
            "chosen": result.band,
            "optimized": selection is not None,
            "start_distance": selection.start_distance if selection else None,
            "peak_significant": selection.peak_significant if selection else None,
            "monotone": selection.monotone if selection else None,
            "curve": _curve_json(result),
        },
        "bins": {str(b): c for b, c in bins.items()},
        "significant_total": sum(c for b, c in bins.items() if b != 0),
        "fdr": {
            f"{level.alpha:.2f}": {
                "critical_p": level.critical_p,
                "n_significant": len(level.significant),
            }
            for level in result.fdr.levels
        },
        "spots": [
            {
                "spot_id": s.spot_id,
                "polarity": s.polarity,
                "n_reports": s.n_reports,
                "n_participants": s.n_participants,
                "mean_experience": s.mean_experience,
            }
            for s in result.spots
        ],
    }


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _analysis_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        parsed = parse_reports(args.input)
    except EmptyDataset as exc:
        if exc.rejections:
            path = out_dir / "rejections.csv"
            write_rejections(exc.rejections, path)
            print(f"no valid rows; rejection report: {path}", file=sys.stderr)
        raise
    if parsed.rejections:
        path = out_dir / "rejections.csv"
        write_rejections(parsed.rejections, path)
        print(f"{len(parsed.rejections)} rows rejected; see {path}", file=sys.stderr)

    reports = list(parsed.reports)
    result = analyze_reports(reports, config)

    n_participants = len({r.participant_id for r in reports})
    manifest = _manifest(args, result, n_rejected=len(parsed.rejections))
    manifest["n_participants"] = n_participants

    write_geojson(points_geojson(result.gi, result.coords, result.origin, result.spot_of()),
                  out_dir / "points.geojson")
    write_geojson(spots_geojson(result.spots, result.origin), out_dir / "spots.geojson")
    write_spot_csv(result.spots, out_dir / "spots.csv")
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )

    bins = result.bin_counts()
    print(f"analyzed {len(reports)} reports from {n_participants} participants")
    print(f"distance band: {result.band:.1f} m "
          f"({'optimized' if args.band is None else 'fixed'})")
    print(f"significant points: {sum(c for b, c in bins.items() if b != 0)} "
          f"(hot {sum(c for b, c in bins.items() if b > 0)}, "
          f"cold {sum(c for b, c in bins.items() if b < 0)})")
    print(f"spots: {len(result.spots)}")
    print(f"artifacts written to {out_dir}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    if args.preset == "standard":
        scenario = standard_scenario(seed=args.seed, radius=args.radius)
    else:
        scenario = null_scenario(seed=args.seed)
    if args.n_background is not None:
        if args.n_background < 0:
            raise InvalidConfig("--n-background must be >= 0")
        scenario = replace(scenario, n_background=args.n_background)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports, _ = generate(scenario)
    path = out_dir / "dataset.csv"
    write_reports(reports, path)
    print(f"wrote {len(reports)} reports to {path}")
    return EXIT_OK


def _write_calibration_csv(result: CalibrationResult, path: Path) -> None:
    columns = [
        "replicate", "seed", "n_points", "chosen_band", "pre_fdr_rate",
        "significant_fraction", "recovery_fraction", "false_positive_fraction",
        "n_spots_hot", "n_spots_cold", "error",
    ]
    with open(path, "w", encoding="utf-8", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in result.rows:
            writer.writerow([
                row.replicate, row.seed, row.n_points, repr(row.chosen_band),
                repr(row.pre_fdr_rate), repr(row.significant_fraction),
                repr(row.recovery_fraction), repr(row.false_positive_fraction),
                row.n_spots_hot, row.n_spots_cold, row.error,
            ])
        summary = result.summary()
        writer.writerow([
            "mean", "", int(summary["n_replicates"]),
            repr(summary.get("mean_chosen_band", float("nan"))),
            repr(summary.get("mean_pre_fdr_rate", float("nan"))),
            repr(summary.get("mean_significant_fraction", float("nan"))),
            repr(summary.get("mean_recovery_fraction", float("nan"))),
            repr(summary.get("mean_false_positive_fraction", float("nan"))),
            "", "", f"failed={int(summary['n_failed'])}",
        ])


def cmd_calibrate(args: argparse.Namespace) -> int:
    if args.replicates < 1:
        raise InvalidConfig("--replicates must be >= 1")
    config = AnalysisConfig(
        min_conf=args.min_conf, min_size=args.min_size, steps=args.increments
    )
    config.validate()
    if args.preset == "planted":
        scenario = standard_scenario(seed=args.seed)
    else:
        scenario = null_scenario(seed=args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_calibration(args.replicates, scenario, config)
    path = out_dir / "calibration.csv"
    _write_calibration_csv(result, path)
    summary = result.summary()
    print(f"{args.replicates} replicates ({args.preset} preset)")
    for key in sorted(summary):
        print(f"  {key}: {summary[key]:.4f}")
    print(f"wrote {path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    commands = {"analyze": cmd_analyze, "synth": cmd_synth, "calibrate": cmd_calibrate}
    try:
        return commands[args.command](args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DEGENERATE_ERRORS as exc:
        print(f"degenerate statistics ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except _INPUT_ERRORS as exc:
        print(f"input error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except EsmSpotsError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
