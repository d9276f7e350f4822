"""ICDAR-style annotation parsing and vertex-order normalization.

Supported line formats, one box per line, comma separated:

* ``icdar13`` ground truth: ``x1,y1,x2,y2,"transcription"`` where the four
  numbers are opposite corners of an axis-aligned rectangle.
* ``icdar15`` ground truth: ``x1,y1,x2,y2,x3,y3,x4,y4,transcription`` with
  the four vertices of a quadrilateral.
* detections: 4 or 8 coordinates in the shapes above, optionally followed
  by a confidence in [0, 1].

A transcription equal to ``###`` marks a don't-care box. Files are decoded
as UTF-8 with BOM tolerance; both LF and CRLF line endings are accepted.
"""

from __future__ import annotations

import logging
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .geometry import Point, Quad, _shoelace

log = logging.getLogger(__name__)

DONT_CARE = "###"

GT_FORMATS = ("icdar13", "icdar15")


class ParseError(ValueError):
    """Malformed annotation content, located by file and line when known."""

    def __init__(self, message: str, *, path: str | None = None,
                 line_number: int | None = None, field_count: bool = False):
        self.path = path
        self.line_number = line_number
        self.field_count = field_count
        where = ""
        if path is not None:
            where += f"{path}:"
        if line_number is not None:
            where += f"line {line_number}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class GtInstance:
    """Ground-truth word box with its transcription."""

    quad: Quad
    transcription: str
    length: int = field(init=False)
    dont_care: bool = field(init=False)

    def __post_init__(self) -> None:
        trimmed = self.transcription.strip()
        object.__setattr__(self, "length", len(trimmed))
        object.__setattr__(self, "dont_care", trimmed == DONT_CARE)
        if not self.dont_care and self.length == 0:
            raise ValueError("empty transcription on a box that is not don't-care")


@dataclass(frozen=True)
class DetInstance:
    """Detected box, optionally with a confidence score."""

    quad: Quad
    confidence: float | None = None

    def __post_init__(self) -> None:
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Sample:
    """All ground truths and detections for one image."""

    id: str
    gts: tuple[GtInstance, ...]
    dets: tuple[DetInstance, ...]


def normalize_vertex_order(vertices: Quad | Sequence[Sequence[float]]) -> Quad:
    """Reorder four vertices to clockwise-in-image starting at the top-left.

    Orientation is fixed by reversing counter-clockwise input. The starting
    vertex is the endpoint of the left edge (the cheaper of the two opposite
    short-edge pairs, the word baseline being assumed to run along the longer
    axis) with the smaller x+y. Ties fall back to smaller x, then smaller y,
    so the result depends only on the vertex geometry. Idempotent.
    """
    if isinstance(vertices, Quad):
        pts = list(vertices.vertices)
    else:
        pts = [Point(float(p[0]), float(p[1])) for p in vertices]
    if len(pts) != 4:
        raise ValueError(f"expected 4 vertices, got {len(pts)}")

    signed = _shoelace(pts)
    if abs(signed) <= 1e-12:
        raise ValueError(f"collinear or degenerate vertices: {pts}")
    if signed < 0:
        pts.reverse()

    def edge(i: int) -> tuple[Point, Point]:
        return pts[i], pts[(i + 1) % 4]

    def length(e: tuple[Point, Point]) -> float:
        return ((e[0].x - e[1].x) ** 2 + (e[0].y - e[1].y) ** 2) ** 0.5

    def midpoint_key(e: tuple[Point, Point]) -> tuple[float, float, float]:
        mx = (e[0].x + e[1].x) / 2.0
        my = (e[0].y + e[1].y) / 2.0
        return (mx + my, mx, my)

    pair_a = [edge(0), edge(2)]
    pair_b = [edge(1), edge(3)]
    len_a = length(pair_a[0]) + length(pair_a[1])
    len_b = length(pair_b[0]) + length(pair_b[1])
    if len_a < len_b:
        short = pair_a
    elif len_b < len_a:
        short = pair_b
    else:
        # Square-like tie: take the pair holding the leftmost-topmost edge.
        best = min((edge(i) for i in range(4)), key=midpoint_key)
        short = pair_a if best in pair_a else pair_b

    left = min(short, key=midpoint_key)
    start = min(left, key=lambda p: (p.x + p.y, p.x, p.y))
    k = pts.index(start)
    rotated = pts[k:] + pts[:k]
    return Quad(tuple(rotated))  # type: ignore[arg-type]


def _parse_floats(fields: Sequence[str], *, path: str | None,
                  line_number: int | None) -> list[float]:
    values = []
    for raw in fields:
        try:
            values.append(float(raw))
        except ValueError:
            raise ParseError(f"non-numeric coordinate {raw!r}",
                             path=path, line_number=line_number) from None
    return values


def _strip_quotes(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1]
    return text


def parse_gt_line(line: str, fmt: str, *, path: str | None = None,
                  line_number: int | None = None) -> GtInstance:
    """Parse one ground-truth line in the given format."""
    if fmt not in GT_FORMATS:
        raise ValueError(f"unknown ground-truth format {fmt!r}")
    line = line.lstrip("﻿").strip()
    if not line:
        raise ParseError("empty line", path=path, line_number=line_number)
    fields = line.split(",")
    n_coords = 4 if fmt == "icdar13" else 8
    if len(fields) < n_coords + 1:
        raise ParseError(
            f"{fmt} ground truth needs {n_coords} coordinates plus a "
            f"transcription, got {len(fields)} fields",
            path=path, line_number=line_number, field_count=True)
    coords = _parse_floats(fields[:n_coords], path=path, line_number=line_number)
    transcription = _strip_quotes(",".join(fields[n_coords:]))
    try:
        if fmt == "icdar13":
            quad = Quad.from_rect(*coords)
        else:
            quad = normalize_vertex_order(
                [(coords[i], coords[i + 1]) for i in range(0, 8, 2)])
        return GtInstance(quad=quad, transcription=transcription)
    except ValueError as exc:
        raise ParseError(str(exc), path=path, line_number=line_number) from None


def parse_det_line(line: str, *, path: str | None = None,
                   line_number: int | None = None) -> DetInstance:
    """Parse one detection line: 4 or 8 coordinates, optional confidence."""
    line = line.lstrip("﻿").strip()
    if not line:
        raise ParseError("empty line", path=path, line_number=line_number)
    fields = line.split(",")
    if len(fields) not in (4, 5, 8, 9):
        raise ParseError(
            f"detection needs 4 or 8 coordinates with optional confidence, "
            f"got {len(fields)} fields",
            path=path, line_number=line_number, field_count=True)
    values = _parse_floats(fields, path=path, line_number=line_number)
    confidence = None
    if len(values) in (5, 9):
        confidence = values.pop()
    try:
        if len(values) == 4:
            quad = Quad.from_rect(*values)
        else:
            quad = normalize_vertex_order(
                [(values[i], values[i + 1]) for i in range(0, 8, 2)])
        return DetInstance(quad=quad, confidence=confidence)
    except ValueError as exc:
        raise ParseError(str(exc), path=path, line_number=line_number) from None


def _fmt_coord(c: float) -> str:
    return str(int(c)) if c == int(c) else repr(c)


def format_gt_line(inst: GtInstance, fmt: str) -> str:
    """Serialize a ground truth back to its line format."""
    v = inst.quad.vertices
    if fmt == "icdar13":
        if not (v[0].y == v[1].y and v[1].x == v[2].x and v[2].y == v[3].y and v[3].x == v[0].x):
            raise ValueError("icdar13 serialization needs an axis-aligned rectangle")
        coords = [v[0].x, v[0].y, v[2].x, v[2].y]
        return ",".join(_fmt_coord(c) for c in coords) + f',"{inst.transcription}"'
    if fmt == "icdar15":
        coords = [c for p in v for c in p]
        return ",".join(_fmt_coord(c) for c in coords) + f",{inst.transcription}"
    raise ValueError(f"unknown ground-truth format {fmt!r}")


def format_det_line(inst: DetInstance) -> str:
    """Serialize a detection as 8 coordinates plus optional confidence."""
    coords = [c for p in inst.quad.vertices for c in p]
    line = ",".join(_fmt_coord(c) for c in coords)
    if inst.confidence is not None:
        line += f",{_fmt_coord(inst.confidence)}"
    return line


def _split_lines(content: str) -> list[str]:
    return [ln for ln in content.lstrip("﻿").splitlines() if ln.strip()]


def _stem_to_id(stem: str) -> str:
    for prefix in ("gt_", "res_"):
        if stem.startswith(prefix):
            return stem[len(prefix):]
    return stem


def _read_source(source: str | Path) -> dict[str, str]:
    """Map sample id -> text content for a directory or zip of .txt files."""
    source = Path(source)
    contents: dict[str, str] = {}
    if source.is_dir():
        for path in sorted(source.glob("*.txt")):
            contents[_stem_to_id(path.stem)] = path.read_text(encoding="utf-8-sig")
    elif source.is_file():
        try:
            with zipfile.ZipFile(source) as archive:
                for name in sorted(archive.namelist()):
                    if not name.endswith(".txt") or name.endswith("/"):
                        continue
                    stem = Path(name).stem
                    contents[_stem_to_id(stem)] = archive.read(name).decode("utf-8-sig")
        except zipfile.BadZipFile as exc:
            raise OSError(f"unreadable archive {source}: {exc}") from exc
    else:
        raise OSError(f"annotation source not found: {source}")
    return contents


def load_dataset(gt_source: str | Path, det_source: str | Path | None,
                 fmt: str = "icdar15") -> list[Sample]:
    """Load per-image GT and detection files into Samples, keyed by file stem.

    One Sample per ground-truth file. Detection files without a matching
    ground truth are skipped with a warning; ground truths without a
    detection file get an empty detection list.
    """
    gt_files = _read_source(gt_source)
    det_files = _read_source(det_source) if det_source is not None else {}

    for extra in sorted(set(det_files) - set(gt_files)):
        log.warning("detection file %s has no matching ground truth; skipped", extra)

    samples = []
    for sample_id in sorted(gt_files):
        gts = tuple(
            parse_gt_line(line, fmt, path=f"{gt_source}/{sample_id}", line_number=i + 1)
            for i, line in enumerate(_split_lines(gt_files[sample_id]))
        )
        dets = tuple(
            parse_det_line(line, path=f"{det_source}/{sample_id}", line_number=i + 1)
            for i, line in enumerate(_split_lines(det_files.get(sample_id, "")))
        )
        samples.append(Sample(id=sample_id, gts=gts, dets=dets))
    return samples
