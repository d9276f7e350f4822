"""SVG overlays of a scored sample.

Ground truths draw in red (don't-care in dashed gray), detections in
blue, and estimated character centers as red dots; a dot covered by the
wrong number of detections (missed or overlapping) renders hollow.
Output is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from pathlib import Path

from .annotations import Sample
from .matching import MatchMatrix
from .scoring import CharTally, pcc

GT_COLOR = "#d62728"
DET_COLOR = "#1f77b4"
DONT_CARE_COLOR = "#7f7f7f"


def _fmt(value: float) -> str:
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"


def _polygon(quad, color: str, dashed: bool = False, width: float = 1.0) -> str:
    points = " ".join(f"{_fmt(p.x)},{_fmt(p.y)}" for p in quad.vertices)
    dash = ' stroke-dasharray="4 3"' if dashed else ""
    return (f'  <polygon points="{points}" fill="none" stroke="{color}"'
            f' stroke-width="{_fmt(width)}"{dash}/>')


def render_overlay(sample: Sample, matrix: MatchMatrix | None,
                   tally: CharTally | None, path: str | Path) -> None:
    """Write one sample's boxes and character centers to an SVG file."""
    quads = [g.quad for g in sample.gts] + [d.quad for d in sample.dets]
    if quads:
        xs = [p.x for q in quads for p in q.vertices]
        ys = [p.y for q in quads for p in q.vertices]
        margin = 0.05 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        x0, y0 = min(xs) - margin, min(ys) - margin
        w, h = max(xs) - min(xs) + 2 * margin, max(ys) - min(ys) + 2 * margin
    else:
        x0, y0, w, h = 0.0, 0.0, 100.0, 100.0
    stroke = max(w, h) / 400.0

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox='
        f'"{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
    ]
    for j, det in enumerate(sample.dets):
        excluded = matrix is not None and j in matrix.excluded_dets
        lines.append(_polygon(det.quad, DET_COLOR, dashed=excluded, width=stroke))
    for i, gt in enumerate(sample.gts):
        if gt.dont_care:
            lines.append(_polygon(gt.quad, DONT_CARE_COLOR, dashed=True, width=stroke))
            continue
        lines.append(_polygon(gt.quad, GT_COLOR, width=stroke))
        v = gt.quad.vertices
        height = min(
            math.hypot(v[3].x - v[0].x, v[3].y - v[0].y),
            math.hypot(v[2].x - v[1].x, v[2].y - v[1].y),
        )
        radius = max(height / 8.0, stroke)
        for k, center in enumerate(pcc(gt).centers):
            once = tally is None or int(tally.s[i][k]) == 1
            fill = GT_COLOR if once else "none"
            lines.append(
                f'  <circle cx="{_fmt(center.x)}" cy="{_fmt(center.y)}"'
                f' r="{_fmt(radius)}" fill="{fill}" stroke="{GT_COLOR}"'
                f' stroke-width="{_fmt(stroke / 2)}"/>'
            )
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
