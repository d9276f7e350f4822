"""Box-level IoU baseline metric for side-by-side comparison.

Matches ground truths and detections exclusively one-to-one by greedy
descending IoU at a fixed threshold (0.5 by default), ties broken by
index order. Unlike the character-aware metric, a match scores a flat 1,
so split and merged detections earn nothing here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .annotations import Sample
from .geometry import Quad, area, intersect_area
from .matching import excluded_detections
from .scoring import hmean

DEFAULT_IOU_THRESHOLD = 0.5
DONT_CARE_PRECISION_MIN = 0.4


@dataclass(frozen=True)
class IouResult:
    """Exclusive one-to-one matching outcome for one sample."""

    recall: float
    precision: float
    hmean: float
    matched_pairs: tuple[tuple[int, int], ...]
    num_gts: int
    num_dets: int


def iou(a: Quad, b: Quad) -> float:
    """Intersection over union of two quads."""
    inter = intersect_area(a, b)
    union = area(a) + area(b) - inter
    return inter / union if union > 0.0 else 0.0


def iou_evaluate(sample: Sample, threshold: float = DEFAULT_IOU_THRESHOLD) -> IouResult:
    """Score one sample with greedy exclusive IoU matching.

    Don't-care ground truths are skipped, and detections they shield (by
    the same area-precision rule the main metric uses) are dropped from
    the precision denominator.
    """
    excluded = excluded_detections(sample, DONT_CARE_PRECISION_MIN)
    gt_idx = [i for i, g in enumerate(sample.gts) if not g.dont_care]
    det_idx = [j for j in range(len(sample.dets)) if j not in excluded]

    candidates = []
    for i in gt_idx:
        for j in det_idx:
            value = iou(sample.gts[i].quad, sample.dets[j].quad)
            if value >= threshold:
                candidates.append((-value, i, j))
    candidates.sort()

    used_gts: set[int] = set()
    used_dets: set[int] = set()
    pairs = []
    for _, i, j in candidates:
        if i in used_gts or j in used_dets:
            continue
        used_gts.add(i)
        used_dets.add(j)
        pairs.append((i, j))
    pairs.sort()

    recall = len(pairs) / len(gt_idx) if gt_idx else 1.0
    precision = len(pairs) / len(det_idx) if det_idx else 1.0
    return IouResult(
        recall=recall,
        precision=precision,
        hmean=hmean(recall, precision),
        matched_pairs=tuple(pairs),
        num_gts=len(gt_idx),
        num_dets=len(det_idx),
    )


def aggregate_iou(results: Sequence[IouResult]) -> tuple[float, float, float]:
    """Micro-averaged dataset recall, precision, and H-mean."""
    if not results:
        raise ValueError("cannot aggregate an empty dataset")
    matches = sum(len(r.matched_pairs) for r in results)
    num_gts = sum(r.num_gts for r in results)
    num_dets = sum(r.num_dets for r in results)
    recall = matches / num_gts if num_gts else 1.0
    precision = matches / num_dets if num_dets else 1.0
    return recall, precision, hmean(recall, precision)
