"""Batch evaluation command line.

Loads per-image ground-truth and detection files, runs the selected
metric, prints a human-readable summary followed by a single
machine-readable line ``R=<r> P=<p> H=<h>``, and optionally writes a JSON
report and per-sample SVG overlays.

Exit status: 0 on success, 1 on annotation or scoring errors, 2 on bad
invocation (unknown flags, unreadable paths, format mismatch).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .annotations import GT_FORMATS, ParseError, load_dataset
from .iou_baseline import DEFAULT_IOU_THRESHOLD
from .matching import Thresholds
from .overlay import render_overlay
from .report import evaluate_dataset, render_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tedeval",
        description="Evaluate scene-text detections against ground truth.",
    )
    parser.add_argument("--gt", required=True,
                        help="ground-truth directory or zip archive")
    parser.add_argument("--det", required=True,
                        help="detection directory or zip archive")
    parser.add_argument("--format", required=True, choices=GT_FORMATS,
                        help="ground-truth annotation format")
    parser.add_argument("--metric", choices=("tedeval", "iou"), default="tedeval",
                        help="evaluation metric (default: tedeval)")
    parser.add_argument("--area-recall-min", type=float, default=0.4,
                        help="area recall threshold for matching (default: 0.4)")
    parser.add_argument("--area-precision-min", type=float, default=0.4,
                        help="area precision threshold for matching (default: 0.4)")
    parser.add_argument("--multiline-angle", type=float, default=45.0,
                        help="degrees at which a pair counts as separate lines (default: 45)")
    parser.add_argument("--iou-threshold", type=float, default=DEFAULT_IOU_THRESHOLD,
                        help="IoU acceptance threshold for the baseline metric (default: 0.5)")
    parser.add_argument("--report", metavar="PATH",
                        help="write a JSON report to PATH")
    parser.add_argument("--overlay-dir", metavar="PATH",
                        help="write one SVG overlay per sample into PATH")
    parser.add_argument("--per-sample", action="store_true",
                        help="print one score line per sample")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for per-sample evaluation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    for flag, value in (("--gt", args.gt), ("--det", args.det)):
        if not Path(value).exists():
            print(f"error: {flag} path does not exist: {value}", file=sys.stderr)
            return 2
    try:
        thresholds = Thresholds(
            area_recall_min=args.area_recall_min,
            area_precision_min=args.area_precision_min,
            multiline_angle_min=args.multiline_angle,
        )
    except ValueError as exc:
        print(f"error: bad threshold flag: {exc}", file=sys.stderr)
        return 2

    try:
        samples = load_dataset(args.gt, args.det, args.format)
    except ParseError as exc:
        if exc.field_count:
            print(f"error: {exc} (does --format {args.format} match the files?)",
                  file=sys.stderr)
            return 2
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        evaluation = evaluate_dataset(
            samples,
            metric=args.metric,
            thresholds=thresholds,
            iou_threshold=args.iou_threshold,
            jobs=args.jobs,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    report = evaluation.report
    if args.report:
        render_report(report, args.report)
    if args.overlay_dir:
        overlay_dir = Path(args.overlay_dir)
        overlay_dir.mkdir(parents=True, exist_ok=True)
        matrices = evaluation.matrices or (None,) * len(samples)
        tallies = evaluation.tallies or (None,) * len(samples)
        for sample, matrix, tally in zip(samples, matrices, tallies):
            render_overlay(sample, matrix, tally, overlay_dir / f"{sample.id}.svg")

    d = report.dataset
    print(f"metric: {report.metric}")
    print(f"samples: {d.num_samples}  ground truths: {d.num_gts}  detections: {d.num_dets}")
    if report.factors is not None:
        f = report.factors
        print(f"granularity: {f.granularity}  completeness: {f.completeness}  "
              f"multiline rejections: {f.multiline_rejections}  "
              f"successful detections: {f.successful_detections}")
    if args.per_sample:
        for score in report.sample_scores:
            print(f"  {score.sample_id}: R={score.recall:.4f} "
                  f"P={score.precision:.4f} H={score.hmean:.4f}")
    print(f"recall: {d.recall:.4f}  precision: {d.precision:.4f}  hmean: {d.hmean:.4f}")
    print(f"R={d.recall:.4f} P={d.precision:.4f} H={d.hmean:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
