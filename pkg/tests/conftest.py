import numpy as np
import pytest

from tedeval.annotations import DetInstance, GtInstance, Sample, normalize_vertex_order
from tedeval.geometry import Quad


def rect(x1, y1, x2, y2) -> Quad:
    return Quad.from_rect(x1, y1, x2, y2)


def gt(x1, y1, x2, y2, text="WORD") -> GtInstance:
    return GtInstance(rect(x1, y1, x2, y2), text)


def det(x1, y1, x2, y2, confidence=None) -> DetInstance:
    return DetInstance(rect(x1, y1, x2, y2), confidence)


def scene(gts, dets, sample_id="img_1") -> Sample:
    return Sample(sample_id, tuple(gts), tuple(dets))


def random_convex_quad(rng: np.random.Generator, cx=0.0, cy=0.0, scale=10.0) -> Quad:
    """Four points on a random ellipse, ordered by parameter, hence convex."""
    while True:
        angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, 4))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
        if gaps.min() < 0.35:
            continue
        rx, ry = rng.uniform(0.3, 1.0, 2) * scale
        rot = rng.uniform(0.0, np.pi)
        cos_r, sin_r = np.cos(rot), np.sin(rot)
        pts = [
            (
                cx + rx * np.cos(t) * cos_r - ry * np.sin(t) * sin_r,
                cy + rx * np.cos(t) * sin_r + ry * np.sin(t) * cos_r,
            )
            for t in angles
        ]
        try:
            return normalize_vertex_order(pts)
        except ValueError:
            continue


def overlapping_convex_pair(rng: np.random.Generator, scale=10.0) -> tuple[Quad, Quad]:
    """Two convex quads with a guaranteed substantial intersection."""
    a = random_convex_quad(rng, scale=scale)
    centroid = np.mean(np.asarray(a.vertices), axis=0)
    spin = float(rng.uniform(-25.0, 25.0))
    dx, dy = rng.uniform(-0.15, 0.15, 2) * scale
    b = a.rotated(spin, float(centroid[0]), float(centroid[1])).translated(float(dx), float(dy))
    return a, b


def write_dataset(root, gt_lines: dict[str, list[str]], det_lines: dict[str, list[str]]):
    """Lay out gt/ and det/ directories of per-image annotation files."""
    gt_dir = root / "gt"
    det_dir = root / "det"
    gt_dir.mkdir(parents=True, exist_ok=True)
    det_dir.mkdir(parents=True, exist_ok=True)
    for sample_id, lines in gt_lines.items():
        (gt_dir / f"gt_{sample_id}.txt").write_text("\n".join(lines) + "\n")
    for sample_id, lines in det_lines.items():
        (det_dir / f"res_{sample_id}.txt").write_text("\n".join(lines) + "\n")
    return gt_dir, det_dir


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(seed=7)
