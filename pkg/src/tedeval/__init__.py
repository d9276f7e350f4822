"""Scene-text detection evaluation toolkit.

Character-aware evaluation of text detectors (non-exclusive box matching
plus per-character scoring from estimated character centers), an IoU
baseline, ICDAR 2013/2015 annotation parsing, and a batch CLI.
"""

__version__ = "0.1.0"

from .annotations import (DetInstance, GtInstance, ParseError, Sample,
                          load_dataset, normalize_vertex_order, parse_det_line,
                          parse_gt_line)
from .geometry import (Point, PivotPoints, Quad, area, contains_point,
                       intersect_area, is_multiline, pair_angle, pivot_points)
from .iou_baseline import IouResult, aggregate_iou, iou, iou_evaluate
from .matching import (MatchMatrix, MatchRecord, Thresholds, area_precision,
                       area_recall, build_match_matrix, match_many_to_one,
                       match_one_to_many, match_one_to_one)
from .report import (DatasetEvaluation, EvalReport, FactorCounts,
                     count_factors, evaluate_dataset, evaluate_sample,
                     render_report, report_to_dict)
from .overlay import render_overlay
from .scoring import (CharTally, DatasetScore, PccSet, SampleScore,
                      aggregate_dataset, char_tally, det_precision, gt_recall,
                      pcc, score_sample)

__all__ = [
    "DetInstance", "GtInstance", "ParseError", "Sample", "load_dataset",
    "normalize_vertex_order", "parse_det_line", "parse_gt_line",
    "Point", "PivotPoints", "Quad", "area", "contains_point",
    "intersect_area", "is_multiline", "pair_angle", "pivot_points",
    "IouResult", "aggregate_iou", "iou", "iou_evaluate",
    "MatchMatrix", "MatchRecord", "Thresholds", "area_precision",
    "area_recall", "build_match_matrix", "match_many_to_one",
    "match_one_to_many", "match_one_to_one",
    "DatasetEvaluation", "EvalReport", "FactorCounts", "count_factors",
    "evaluate_dataset", "evaluate_sample", "render_report", "report_to_dict",
    "render_overlay",
    "CharTally", "DatasetScore", "PccSet", "SampleScore",
    "aggregate_dataset", "char_tally", "det_precision", "gt_recall",
    "pcc", "score_sample",
    "__version__",
]
