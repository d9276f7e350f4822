"""Dataset evaluation pipeline, qualitative factor counts, and reports.

Samples are evaluated independently (optionally across worker processes)
and reduced in input order, so results do not depend on the degree of
parallelism. Reports serialize to JSON with stable field ordering:
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Sequence

from . import __version__
from .annotations import Sample
from .iou_baseline import (DEFAULT_IOU_THRESHOLD, DONT_CARE_PRECISION_MIN,
                           IouResult, iou_evaluate)
from .matching import (MatchMatrix, Thresholds, build_match_matrix,
                       excluded_detections)
from .scoring import (CharTally, DatasetScore, SampleScore, aggregate_dataset,
                      char_tally, det_precision, score_sample)

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class FactorCounts:
    """How often the behaviors the character-aware metric targets occur.

    Counted over predictions: granularity tallies detections taking part
    in accepted split or merge matches, completeness tallies matched
    ground truths with missing or overlapping characters, and proportions
    are reported relative to the number of successful detections.
    """

    granularity: int
    completeness: int
    multiline_rejections: int
    successful_detections: int

    def proportions(self) -> dict[str, float]:
        base = self.successful_detections
        if base == 0:
            return {"granularity": 0.0, "completeness": 0.0, "multiline_rejections": 0.0}
        return {
            "granularity": self.granularity / base,
            "completeness": self.completeness / base,
            "multiline_rejections": self.multiline_rejections / base,
        }


@dataclass(frozen=True)
class EvalReport:
    """Everything a batch run produces, ready for rendering."""

    metric: str
    thresholds: Thresholds
    iou_threshold: float | None
    dataset: DatasetScore
    sample_scores: tuple[SampleScore, ...]
    factors: FactorCounts | None
    nonconvex_quads: int
    version: str = __version__


@dataclass(frozen=True)
class DatasetEvaluation:
    """Report plus the per-sample intermediates overlays need."""

    report: EvalReport
    matrices: tuple[MatchMatrix, ...] | None = None
    tallies: tuple[CharTally, ...] | None = None
    iou_results: tuple[IouResult, ...] | None = None


def count_factors(samples: Sequence[Sample], matrices: Sequence[MatchMatrix],
                  tallies: Sequence[CharTally]) -> FactorCounts:
    """Count granularity, completeness, and multiline events over a dataset."""
    granularity = 0
    completeness = 0
    rejections = 0
    successful = 0
    for sample, matrix, tally in zip(samples, matrices, tallies):
        many_dets = set()
        for record in matrix.matches:
            if record.kind in ("one_to_many", "many_to_one"):
                many_dets.update(record.det_indices)
        granularity += len(many_dets)
        for i, g in enumerate(sample.gts):
            if g.dont_care or not matrix.matched_dets(i):
                continue
            if bool((tally.s[i] != 1).any()):
                completeness += 1
        rejections += matrix.multiline_rejections
        for j in range(len(sample.dets)):
            if j in matrix.excluded_dets:
                continue
            if det_precision(j, tally, matrix) > 0.0:
                successful += 1
    return FactorCounts(
        granularity=granularity,
        completeness=completeness,
        multiline_rejections=rejections,
        successful_detections=successful,
    )


def evaluate_sample(sample: Sample, thresholds: Thresholds,
                    ) -> tuple[MatchMatrix, CharTally, SampleScore]:
    """Match and score one sample with the character-aware metric."""
    matrix = build_match_matrix(sample, thresholds)
    tally = char_tally(sample, matrix)
    return matrix, tally, score_sample(sample, matrix, tally)


def _iou_sample_score(sample: Sample, result: IouResult) -> SampleScore:
    """Express an exclusive IoU matching as binary per-instance scores."""
    matched_gts = {i for i, _ in result.matched_pairs}
    matched_dets = {j for _, j in result.matched_pairs}
    shielded = excluded_detections(sample, DONT_CARE_PRECISION_MIN)
    per_gt = tuple(
        None if g.dont_care else (1.0 if i in matched_gts else 0.0)
        for i, g in enumerate(sample.gts)
    )
    per_det = tuple(
        None if j in shielded else (1.0 if j in matched_dets else 0.0)
        for j in range(len(sample.dets))
    )
    return SampleScore(
        sample_id=sample.id,
        per_gt_recall=per_gt,
        per_det_precision=per_det,
        recall=result.recall,
        precision=result.precision,
        hmean=result.hmean,
        num_gts=result.num_gts,
        num_dets=result.num_dets,
    )


def _evaluate_iou(sample: Sample, threshold: float) -> tuple[IouResult, SampleScore]:
    result = iou_evaluate(sample, threshold)
    return result, _iou_sample_score(sample, result)


def _map_samples(fn, samples: Sequence[Sample], jobs: int):
    if jobs <= 1 or len(samples) <= 1:
        return [fn(s) for s in samples]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, samples))


def _count_nonconvex(samples: Sequence[Sample]) -> int:
    return sum(
        1
        for sample in samples
        for quad in ([g.quad for g in sample.gts] + [d.quad for d in sample.dets])
        if not quad.is_convex
    )


def evaluate_dataset(samples: Sequence[Sample], metric: str = "tedeval",
                     thresholds: Thresholds | None = None,
                     iou_threshold: float = DEFAULT_IOU_THRESHOLD,
                     jobs: int | None = None) -> DatasetEvaluation:
    """Evaluate a dataset with the chosen metric.

    ``jobs`` controls per-sample parallelism (default: all processors);
    the outcome is identical for any value.
    """
    if metric not in ("tedeval", "iou"):
        raise ValueError(f"unknown metric {metric!r}")
    if not samples:
        raise ValueError("cannot evaluate an empty dataset")
    thresholds = thresholds or Thresholds()
    jobs = os.cpu_count() or 1 if jobs is None else jobs

    if metric == "tedeval":
        results = _map_samples(partial(evaluate_sample, thresholds=thresholds),
                               samples, jobs)
        matrices = tuple(r[0] for r in results)
        tallies = tuple(r[1] for r in results)
        scores = tuple(r[2] for r in results)
        factors = count_factors(samples, matrices, tallies)
        report = EvalReport(
            metric=metric,
            thresholds=thresholds,
            iou_threshold=None,
            dataset=aggregate_dataset(scores),
            sample_scores=scores,
            factors=factors,
            nonconvex_quads=_count_nonconvex(samples),
        )
        return DatasetEvaluation(report=report, matrices=matrices, tallies=tallies)

    results = _map_samples(partial(_evaluate_iou, threshold=iou_threshold),
                           samples, jobs)
    iou_results = tuple(r[0] for r in results)
    scores = tuple(r[1] for r in results)
    report = EvalReport(
        metric=metric,
        thresholds=thresholds,
        iou_threshold=iou_threshold,
        dataset=aggregate_dataset(scores),
        sample_scores=scores,
        factors=None,
        nonconvex_quads=_count_nonconvex(samples),
    )
    return DatasetEvaluation(report=report, iou_results=iou_results)


def report_to_dict(report: EvalReport) -> dict:
    """Report as a JSON-ready tree with stable field ordering."""
    data: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool": {"name": "tedeval", "version": report.version},
        "metric": report.metric,
        "thresholds": {
            "area_recall_min": report.thresholds.area_recall_min,
            "area_precision_min": report.thresholds.area_precision_min,
            "multiline_angle_min": report.thresholds.multiline_angle_min,
        },
    }
    if report.iou_threshold is not None:
        data["iou_threshold"] = report.iou_threshold
    d = report.dataset
    data["dataset"] = {
        "recall": d.recall,
        "precision": d.precision,
        "hmean": d.hmean,
        "num_samples": d.num_samples,
        "num_gts": d.num_gts,
        "num_dets": d.num_dets,
        "recall_sum": d.recall_sum,
        "precision_sum": d.precision_sum,
    }
    if report.factors is not None:
        f = report.factors
        data["factors"] = {
            "granularity": f.granularity,
            "completeness": f.completeness,
            "multiline_rejections": f.multiline_rejections,
            "successful_detections": f.successful_detections,
            "proportions": f.proportions(),
        }
    data["nonconvex_quads"] = report.nonconvex_quads
    data["samples"] = [
        {
            "id": s.sample_id,
            "recall": s.recall,
            "precision": s.precision,
            "hmean": s.hmean,
            "num_gts": s.num_gts,
            "num_dets": s.num_dets,
            "per_gt_recall": list(s.per_gt_recall),
            "per_det_precision": list(s.per_det_precision),
        }
        for s in report.sample_scores
    ]
    return data


def render_report(report: EvalReport, path: str | Path) -> None:
    """Write the report as deterministic, pretty-printed JSON."""
    text = json.dumps(report_to_dict(report), indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
