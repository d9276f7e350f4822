import json

import pytest

from tedeval.matching import build_match_matrix
from tedeval.overlay import render_overlay
from tedeval.report import (count_factors, evaluate_dataset, render_report,
                            report_to_dict)
from tedeval.scoring import char_tally

from conftest import det, gt, scene


def _evaluated(samples):
    matrices = [build_match_matrix(s) for s in samples]
    tallies = [char_tally(s, m) for s, m in zip(samples, matrices)]
    return matrices, tallies


PERFECT = scene([gt(0, 0, 10, 2, "ABCDE")], [det(0, 0, 10, 2)], "perfect")
SPLIT = scene([gt(0, 0, 6, 2, "ABCDEF")],
              [det(0, 0, 3, 2), det(3, 0, 6, 2)], "split")
STACKED = scene([gt(0, 0, 10, 2, "TOP"), gt(0, 4, 10, 6, "BOT")],
                [det(0, 0, 10, 6)], "stacked")
PARTIAL = scene([gt(0, 0, 10, 2, "ABCDEFGHIJ")], [det(0, 0, 7, 2)], "partial")


class TestCountFactors:
    def test_all_perfect_scene(self):
        matrices, tallies = _evaluated([PERFECT])
        factors = count_factors([PERFECT], matrices, tallies)
        assert factors.granularity == 0
        assert factors.completeness == 0
        assert factors.multiline_rejections == 0
        assert factors.successful_detections == 1

    def test_split_counts_each_prediction(self):
        matrices, tallies = _evaluated([SPLIT])
        factors = count_factors([SPLIT], matrices, tallies)
        assert factors.granularity == 2
        assert factors.successful_detections == 2

    def test_multiline_rejection_counted(self):
        matrices, tallies = _evaluated([STACKED])
        factors = count_factors([STACKED], matrices, tallies)
        assert factors.multiline_rejections == 1
        assert factors.successful_detections == 0

    def test_incomplete_match_counts_completeness(self):
        matrices, tallies = _evaluated([PARTIAL])
        factors = count_factors([PARTIAL], matrices, tallies)
        assert factors.completeness == 1

    def test_proportions_in_unit_range(self):
        samples = [PERFECT, SPLIT, STACKED, PARTIAL]
        matrices, tallies = _evaluated(samples)
        factors = count_factors(samples, matrices, tallies)
        for value in factors.proportions().values():
            assert 0.0 <= value <= 1.0
        assert factors.proportions()["granularity"] == (
            factors.granularity / factors.successful_detections)


class TestEvaluateDataset:
    def test_matches_manual_pipeline(self):
        evaluation = evaluate_dataset([PERFECT, SPLIT], jobs=1)
        report = evaluation.report
        assert report.dataset.recall == 1.0
        assert report.dataset.precision == pytest.approx(2.0 / 3.0)
        assert len(report.sample_scores) == 2

    def test_jobs_do_not_change_results(self):
        samples = [PERFECT, SPLIT, STACKED, PARTIAL]
        one = evaluate_dataset(samples, jobs=1)
        many = evaluate_dataset(samples, jobs=4)
        assert report_to_dict(one.report) == report_to_dict(many.report)

    def test_iou_metric(self):
        evaluation = evaluate_dataset([PERFECT, SPLIT], metric="iou", jobs=1)
        report = evaluation.report
        assert report.factors is None
        assert report.iou_threshold == 0.5
        assert report.dataset.recall == pytest.approx(0.5)

    def test_unknown_metric(self):
        with pytest.raises(ValueError):
            evaluate_dataset([PERFECT], metric="deteval")

    def test_empty_dataset(self):
        with pytest.raises(ValueError):
            evaluate_dataset([])


class TestRenderReport:
    def test_deterministic_bytes(self, tmp_path):
        evaluation = evaluate_dataset([PERFECT, SPLIT], jobs=1)
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        render_report(evaluation.report, first)
        render_report(evaluation.report, second)
        assert first.read_bytes() == second.read_bytes()

    def test_round_trip_parse(self, tmp_path):
        evaluation = evaluate_dataset([PERFECT, SPLIT, STACKED], jobs=1)
        path = tmp_path / "report.json"
        render_report(evaluation.report, path)
        data = json.loads(path.read_text())
        assert data == report_to_dict(evaluation.report)
        assert data["schema_version"] == 1
        assert data["metric"] == "tedeval"

    def test_dataset_equals_per_sample_recomputation(self, tmp_path):
        evaluation = evaluate_dataset([PERFECT, SPLIT, PARTIAL], jobs=1)
        data = report_to_dict(evaluation.report)
        recall_sum = sum(
            r for s in data["samples"] for r in s["per_gt_recall"] if r is not None)
        num_gts = sum(s["num_gts"] for s in data["samples"])
        assert data["dataset"]["recall"] == recall_sum / num_gts
        precision_sum = sum(
            p for s in data["samples"] for p in s["per_det_precision"] if p is not None)
        num_dets = sum(s["num_dets"] for s in data["samples"])
        assert data["dataset"]["precision"] == precision_sum / num_dets


class TestRenderOverlay:
    def test_empty_scene_is_valid_svg(self, tmp_path):
        path = tmp_path / "empty.svg"
        render_overlay(scene([], [], "empty"), None, None, path)
        text = path.read_text()
        assert text.startswith("<?xml")
        assert "<svg" in text and "</svg>" in text
        assert "<circle" not in text

    def test_dot_count_equals_total_text_length(self, tmp_path):
        sample = scene([gt(0, 0, 10, 2, "ABCDE"), gt(12, 0, 22, 2, "XYZ")],
                       [det(0, 0, 10, 2), det(12, 0, 22, 2)], "full")
        matrix = build_match_matrix(sample)
        tally = char_tally(sample, matrix)
        path = tmp_path / "full.svg"
        render_overlay(sample, matrix, tally, path)
        assert path.read_text().count("<circle") == 5 + 3

    def test_dont_care_rendered_distinctly(self, tmp_path):
        sample = scene([gt(0, 0, 10, 2, "###"), gt(12, 0, 22, 2, "AB")], [], "dc")
        path = tmp_path / "dc.svg"
        render_overlay(sample, None, None, path)
        text = path.read_text()
        assert "stroke-dasharray" in text
        assert text.count("<circle") == 2

    def test_deterministic(self, tmp_path):
        sample = SPLIT
        matrix = build_match_matrix(sample)
        tally = char_tally(sample, matrix)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        render_overlay(sample, matrix, tally, a)
        render_overlay(sample, matrix, tally, b)
        assert a.read_bytes() == b.read_bytes()
