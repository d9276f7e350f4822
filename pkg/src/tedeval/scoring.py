"""Character-level scoring of matched detections.

Each ground truth contributes one estimated center point per character,
spread evenly along the midline from the left-edge midpoint to the
right-edge midpoint. A character counts as correctly detected when it is
covered by exactly one matched detection: misses (covered zero times) and
overlaps (covered more than once) both score as incorrect. Detection
precision divides the characters a detection covers (once each, over its
matched ground truths) by the total transcription length it claims.

Sample and dataset recall/precision are micro-averages over instances;
H-mean is the harmonic mean of the two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .annotations import GtInstance, Sample
from .geometry import CONTAINS_EPS, Point, contains_point, pivot_points
from .matching import MatchMatrix


class PccSet(NamedTuple):
    """Estimated character centers of one ground truth, left to right."""

    centers: tuple[Point, ...]


@dataclass(frozen=True)
class CharTally:
    """Per-character match counts for one sample.

    ``m[i]`` is a binary (num_dets, length_i) array: m[i][j, k] says whether
    matched detection j covers character k of ground truth i. ``s[i]`` is the
    per-character sum over detections. Don't-care rows are zero-width.
    """

    m: tuple[np.ndarray, ...]
    s: tuple[np.ndarray, ...]
    lengths: tuple[int, ...]


@dataclass(frozen=True)
class SampleScore:
    """Instance-level and aggregate scores for one sample.

    Per-instance entries are None for don't-care ground truths and for
    detections excluded by don't-care overlap; those carry no weight in
    the aggregates.
    """

    sample_id: str
    per_gt_recall: tuple[float | None, ...]
    per_det_precision: tuple[float | None, ...]
    recall: float
    precision: float
    hmean: float
    num_gts: int
    num_dets: int


@dataclass(frozen=True)
class DatasetScore:
    recall: float
    precision: float
    hmean: float
    num_samples: int
    num_gts: int
    num_dets: int
    recall_sum: float
    precision_sum: float


def hmean(recall: float, precision: float) -> float:
    if recall + precision == 0.0:
        return 0.0
    return 2.0 * recall * precision / (recall + precision)


def pcc(g: GtInstance) -> PccSet:
    """Pseudo character centers of a ground truth.

    Centers sit on the segment from the left-edge midpoint to the
    right-edge midpoint, at fractions (k - 1/2) / length for k = 1..length.
    """
    if g.dont_care:
        raise ValueError("don't-care ground truths have no character centers")
    length = g.length
    if length < 1:
        raise ValueError("ground truth has an empty transcription")
    v = g.quad.vertices
    left = pivot_points(g.quad).p1
    right = Point((v[1].x + v[2].x) / 2.0, (v[1].y + v[2].y) / 2.0)
    dx = right.x - left.x
    dy = right.y - left.y
    centers = tuple(
        Point(left.x + dx / length * (k - 0.5), left.y + dy / length * (k - 0.5))
        for k in range(1, length + 1)
    )
    return PccSet(centers)


def char_tally(sample: Sample, matrix: MatchMatrix,
               eps: float = CONTAINS_EPS) -> CharTally:
    """Count, per character, how many matched detections cover it."""
    n_dets = len(sample.dets)
    m_list, s_list, lengths = [], [], []
    for i, g in enumerate(sample.gts):
        if g.dont_care:
            m = np.zeros((n_dets, 0), dtype=np.int8)
        else:
            centers = pcc(g).centers
            m = np.zeros((n_dets, g.length), dtype=np.int8)
            for j in matrix.matched_dets(i):
                quad = sample.dets[j].quad
                for k, center in enumerate(centers):
                    if contains_point(quad, center, eps):
                        m[j, k] = 1
        m.setflags(write=False)
        m_list.append(m)
        s_list.append(m.sum(axis=0, dtype=np.int64))
        lengths.append(m.shape[1])
    return CharTally(m=tuple(m_list), s=tuple(s_list), lengths=tuple(lengths))


def gt_recall(i: int, tally: CharTally) -> float:
    """Fraction of ground truth i's characters covered exactly once."""
    length = tally.lengths[i]
    if length == 0:
        raise ValueError(f"ground truth {i} has no characters to score")
    return int(np.count_nonzero(tally.s[i] == 1)) / length


def det_precision(j: int, tally: CharTally, matrix: MatchMatrix) -> float:
    """Characters detection j covers over the text length it is matched to.

    A detection with no matches scores 0.
    """
    rows = matrix.matched_gts(j)
    denominator = sum(tally.lengths[i] for i in rows)
    if denominator == 0:
        return 0.0
    numerator = sum(int(tally.m[i][j, :].sum()) for i in rows)
    return numerator / denominator


def score_sample(sample: Sample, matrix: MatchMatrix,
                 tally: CharTally | None = None) -> SampleScore:
    """Score one sample: per-instance values plus micro-averaged aggregates.

    A sample with no scorable ground truths has recall 1.0 (vacuously), and
    one with no scorable detections precision 1.0; an empty scene therefore
    scores 1.0 / 1.0.
    """
    if tally is None:
        tally = char_tally(sample, matrix)
    per_gt = tuple(
        None if g.dont_care else gt_recall(i, tally)
        for i, g in enumerate(sample.gts)
    )
    per_det = tuple(
        None if j in matrix.excluded_dets else det_precision(j, tally, matrix)
        for j in range(len(sample.dets))
    )
    gt_values = [r for r in per_gt if r is not None]
    det_values = [p for p in per_det if p is not None]
    recall = sum(gt_values) / len(gt_values) if gt_values else 1.0
    precision = sum(det_values) / len(det_values) if det_values else 1.0
    return SampleScore(
        sample_id=sample.id,
        per_gt_recall=per_gt,
        per_det_precision=per_det,
        recall=recall,
        precision=precision,
        hmean=hmean(recall, precision),
        num_gts=len(gt_values),
        num_dets=len(det_values),
    )


def aggregate_dataset(scores: Sequence[SampleScore]) -> DatasetScore:
    """Micro-average sample scores: pool all instances, then divide."""
    if not scores:
        raise ValueError("cannot aggregate an empty dataset")
    recall_sum = sum(r for s in scores for r in s.per_gt_recall if r is not None)
    precision_sum = sum(p for s in scores for p in s.per_det_precision if p is not None)
    num_gts = sum(s.num_gts for s in scores)
    num_dets = sum(s.num_dets for s in scores)
    recall = recall_sum / num_gts if num_gts else 1.0
    precision = precision_sum / num_dets if num_dets else 1.0
    return DatasetScore(
        recall=recall,
        precision=precision,
        hmean=hmean(recall, precision),
        num_samples=len(scores),
        num_gts=num_gts,
        num_dets=num_dets,
        recall_sum=recall_sum,
        precision_sum=precision_sum,
    )
