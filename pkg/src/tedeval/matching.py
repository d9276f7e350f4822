"""Non-exclusive instance matching between ground truths and detections.

A match table is built by accepting every viable one-to-one pair plus
one-to-many and many-to-one groups formed greedily from per-instance
candidate sets. Accepted matches set binary entries idempotently, so a
pair matched through several routes is recorded once. Groups whose boxes
sit on different text lines (by the turning-angle test) are rejected.

Don't-care ground truths never match, and detections overlapping a
don't-care strongly enough are excluded from evaluation entirely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from shapely.ops import unary_union

from .annotations import DetInstance, GtInstance, Sample
from .geometry import MULTILINE_ANGLE_DEG, Quad, area, intersect_area, is_multiline

MatchKind = str  # "one_to_one" | "one_to_many" | "many_to_one"


@dataclass(frozen=True)
class Thresholds:
    """Acceptance thresholds for the matching stage."""

    area_recall_min: float = 0.4
    area_precision_min: float = 0.4
    multiline_angle_min: float = MULTILINE_ANGLE_DEG

    def __post_init__(self) -> None:
        if not 0.0 < self.area_recall_min <= 1.0:
            raise ValueError(f"area_recall_min {self.area_recall_min} outside (0, 1]")
        if not 0.0 < self.area_precision_min <= 1.0:
            raise ValueError(f"area_precision_min {self.area_precision_min} outside (0, 1]")
        if not 0.0 < self.multiline_angle_min < 180.0:
            raise ValueError(f"multiline_angle_min {self.multiline_angle_min} outside (0, 180)")


@dataclass(frozen=True)
class MatchRecord:
    kind: MatchKind
    gt_indices: tuple[int, ...]
    det_indices: tuple[int, ...]


@dataclass(frozen=True)
class MatchMatrix:
    """Binary |G| x |D| match table plus the accepted match records."""

    entries: np.ndarray
    matches: tuple[MatchRecord, ...]
    excluded_dets: frozenset[int]
    multiline_rejections: int = 0

    def matched_gts(self, j: int) -> list[int]:
        """Row indices matched to detection j."""
        return [int(i) for i in np.flatnonzero(self.entries[:, j])]

    def matched_dets(self, i: int) -> list[int]:
        """Column indices matched to ground truth i."""
        return [int(j) for j in np.flatnonzero(self.entries[i, :])]


def area_recall(g: GtInstance, d: DetInstance) -> float:
    """Fraction of the ground-truth area covered by the detection."""
    return min(1.0, intersect_area(g.quad, d.quad) / area(g.quad))


def area_precision(g: GtInstance, d: DetInstance) -> float:
    """Fraction of the detection area covering the ground truth."""
    return min(1.0, intersect_area(g.quad, d.quad) / area(d.quad))


def _coverage(base: Quad, others: list[Quad]) -> float:
    """Fraction of base covered by the union of the other quads."""
    covered = base.polygon.intersection(unary_union([q.polygon for q in others])).area
    return min(1.0, covered / area(base))


def match_one_to_one(g: GtInstance, d: DetInstance, t: Thresholds) -> bool:
    """One pair matches when both area recall and area precision qualify."""
    return (area_recall(g, d) >= t.area_recall_min
            and area_precision(g, d) >= t.area_precision_min)


def match_one_to_many(g: GtInstance, dets: list[DetInstance], t: Thresholds) -> bool:
    """One ground truth split across several detections.

    Every detection must individually qualify on area precision against the
    ground truth, their union must cover enough of it, and the detections
    must all sit on one text line.
    """
    if len(dets) < 2:
        raise ValueError("one-to-many needs at least 2 detections")
    if any(area_precision(g, d) < t.area_precision_min for d in dets):
        return False
    if _coverage(g.quad, [d.quad for d in dets]) < t.area_recall_min:
        return False
    return not is_multiline([d.quad for d in dets], t.multiline_angle_min)


def match_many_to_one(gts: list[GtInstance], d: DetInstance, t: Thresholds) -> bool:
    """Several ground truths merged into one detection.

    Every ground truth must individually qualify on area recall against the
    detection, the detection must spend enough of its area on their union,
    and the ground truths must all sit on one text line.
    """
    if len(gts) < 2:
        raise ValueError("many-to-one needs at least 2 ground truths")
    if any(area_recall(g, d) < t.area_recall_min for g in gts):
        return False
    if _coverage(d.quad, [g.quad for g in gts]) < t.area_precision_min:
        return False
    return not is_multiline([g.quad for g in gts], t.multiline_angle_min)


def excluded_detections(sample: Sample, area_precision_min: float) -> frozenset[int]:
    """Detections spending enough area on a don't-care ground truth."""
    excluded = set()
    for j, d in enumerate(sample.dets):
        for g in sample.gts:
            if g.dont_care and area_precision(g, d) >= area_precision_min:
                excluded.add(j)
                break
    return frozenset(excluded)


def build_match_matrix(sample: Sample, t: Thresholds | None = None) -> MatchMatrix:
    """Collect all viable matches for one sample, non-exclusively.

    Candidate groups are formed greedily: for each ground truth, the group
    is every detection qualifying on area precision against it; for each
    detection, every ground truth qualifying on area recall. Each multiline
    rejection of an otherwise viable group is counted.
    """
    t = t or Thresholds()
    n_gts, n_dets = len(sample.gts), len(sample.dets)
    entries = np.zeros((n_gts, n_dets), dtype=np.int8)
    excluded = excluded_detections(sample, t.area_precision_min)
    active_gts = [i for i, g in enumerate(sample.gts) if not g.dont_care]
    active_dets = [j for j in range(n_dets) if j not in excluded]

    recall = np.zeros((n_gts, n_dets))
    precision = np.zeros((n_gts, n_dets))
    for i in active_gts:
        for j in active_dets:
            inter = intersect_area(sample.gts[i].quad, sample.dets[j].quad)
            recall[i, j] = min(1.0, inter / area(sample.gts[i].quad))
            precision[i, j] = min(1.0, inter / area(sample.dets[j].quad))

    matches: list[MatchRecord] = []
    rejections = 0

    def accept(kind: MatchKind, gt_idx: tuple[int, ...], det_idx: tuple[int, ...]) -> None:
        for i in gt_idx:
            for j in det_idx:
                entries[i, j] = 1  # overwrite, never accumulate
        matches.append(MatchRecord(kind, gt_idx, det_idx))

    for i in active_gts:
        for j in active_dets:
            if recall[i, j] >= t.area_recall_min and precision[i, j] >= t.area_precision_min:
                accept("one_to_one", (i,), (j,))

    for i in active_gts:
        group = [j for j in active_dets if precision[i, j] >= t.area_precision_min]
        if len(group) < 2:
            continue
        quads = [sample.dets[j].quad for j in group]
        if _coverage(sample.gts[i].quad, quads) < t.area_recall_min:
            continue
        if is_multiline(quads, t.multiline_angle_min):
            rejections += 1
            continue
        accept("one_to_many", (i,), tuple(group))

    for j in active_dets:
        group = [i for i in active_gts if recall[i, j] >= t.area_recall_min]
        if len(group) < 2:
            continue
        quads = [sample.gts[i].quad for i in group]
        if _coverage(sample.dets[j].quad, quads) < t.area_precision_min:
            continue
        if is_multiline(quads, t.multiline_angle_min):
            rejections += 1
            continue
        accept("many_to_one", tuple(group), (j,))

    entries.setflags(write=False)
    return MatchMatrix(entries=entries, matches=tuple(matches),
                       excluded_dets=excluded, multiline_rejections=rejections)
