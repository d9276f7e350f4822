"""Independent reference implementations the main code is tested against.

Nothing here calls into the library's geometry or scoring paths: areas come
from Monte Carlo hit counting, containment from rasterization or exact
rational arithmetic, and scores from a naive transcription of the metric's
defining sums.
"""

from fractions import Fraction

import numpy as np
from PIL import Image, ImageDraw
from shapely.geometry import Point as ShapelyPoint
from shapely.geometry import Polygon as ShapelyPolygon

CONTAINS_EPS = 1e-6


def _convex_inside(quad, xs, ys):
    """Vectorized half-plane test for a positively-oriented convex quad."""
    inside = np.ones(xs.shape, dtype=bool)
    v = quad.vertices
    for i in range(4):
        a, b = v[i], v[(i + 1) % 4]
        cross = (b.x - a.x) * (ys - a.y) - (b.y - a.y) * (xs - a.x)
        inside &= cross >= 0.0
    return inside


def mc_area(quad, n, rng) -> float:
    """Monte Carlo area of a convex quad by bounding-box hit counting."""
    xs_v = [p.x for p in quad.vertices]
    ys_v = [p.y for p in quad.vertices]
    x0, x1, y0, y1 = min(xs_v), max(xs_v), min(ys_v), max(ys_v)
    xs = rng.uniform(x0, x1, n)
    ys = rng.uniform(y0, y1, n)
    return _convex_inside(quad, xs, ys).mean() * (x1 - x0) * (y1 - y0)


def mc_intersect_area(a, b, n, rng) -> float:
    """Monte Carlo intersection area of two convex quads."""
    x0 = max(min(p.x for p in a.vertices), min(p.x for p in b.vertices))
    x1 = min(max(p.x for p in a.vertices), max(p.x for p in b.vertices))
    y0 = max(min(p.y for p in a.vertices), min(p.y for p in b.vertices))
    y1 = min(max(p.y for p in a.vertices), max(p.y for p in b.vertices))
    if x1 <= x0 or y1 <= y0:
        return 0.0
    xs = rng.uniform(x0, x1, n)
    ys = rng.uniform(y0, y1, n)
    hits = _convex_inside(a, xs, ys) & _convex_inside(b, xs, ys)
    return hits.mean() * (x1 - x0) * (y1 - y0)


class RasterOracle:
    """Point containment by looking up a filled high-resolution raster."""

    def __init__(self, quad, scale=250, pad=1.0):
        xs = [p.x for p in quad.vertices]
        ys = [p.y for p in quad.vertices]
        self.scale = scale
        self.x0 = min(xs) - pad
        self.y0 = min(ys) - pad
        width = int(np.ceil((max(xs) - self.x0 + pad) * scale)) + 1
        height = int(np.ceil((max(ys) - self.y0 + pad) * scale)) + 1
        image = Image.new("1", (width, height), 0)
        draw = ImageDraw.Draw(image)
        draw.polygon(
            [((p.x - self.x0) * scale, (p.y - self.y0) * scale) for p in quad.vertices],
            fill=1,
        )
        self.mask = np.asarray(image, dtype=bool)
        # The raster cannot adjudicate points closer to the boundary than
        # about one cell; callers must skip those.
        self.resolution = 1.5 / scale

    def contains(self, x, y) -> bool:
        col = int(round((x - self.x0) * self.scale))
        row = int(round((y - self.y0) * self.scale))
        if not (0 <= row < self.mask.shape[0] and 0 <= col < self.mask.shape[1]):
            return False
        return bool(self.mask[row, col])


def boundary_distance(quad, x, y) -> float:
    """Distance from a point to the closest quad edge."""
    best = np.inf
    v = quad.vertices
    for i in range(4):
        a, b = v[i], v[(i + 1) % 4]
        ex, ey = b.x - a.x, b.y - a.y
        px, py = x - a.x, y - a.y
        denom = ex * ex + ey * ey
        t = 0.0 if denom == 0.0 else min(1.0, max(0.0, (px * ex + py * ey) / denom))
        best = min(best, np.hypot(px - t * ex, py - t * ey))
    return float(best)


def exact_contains_convex(quad, x, y) -> bool:
    """Inside-or-on-boundary test in exact rational arithmetic."""
    fx, fy = Fraction(x), Fraction(y)
    v = quad.vertices
    for i in range(4):
        a, b = v[i], v[(i + 1) % 4]
        cross = ((Fraction(b.x) - Fraction(a.x)) * (fy - Fraction(a.y))
                 - (Fraction(b.y) - Fraction(a.y)) * (fx - Fraction(a.x)))
        if cross < 0:
            return False
    return True


def _naive_centers(gt):
    length = len(gt.transcription.strip())
    v = gt.quad.vertices
    x = (v[0].x + v[3].x) / 2.0
    y = (v[0].y + v[3].y) / 2.0
    ox = (v[1].x + v[2].x) / 2.0
    oy = (v[1].y + v[2].y) / 2.0
    w, h = ox - x, oy - y
    return [
        (x + w / length * (k - 0.5), y + h / length * (k - 0.5))
        for k in range(1, length + 1)
    ], length


def _naive_contains(polygon: ShapelyPolygon, x, y) -> bool:
    return polygon.distance(ShapelyPoint(x, y)) <= CONTAINS_EPS


def naive_dataset_scores(samples, matrices) -> tuple[float, float, float]:
    """Recall/precision/H straight from the metric's defining sums.

    Plain loops and dicts; containment via shapely distances. Takes the
    binary match tables as given and recomputes everything downstream.
    """
    recall_sum = 0.0
    precision_sum = 0.0
    n_gts = 0
    n_dets = 0
    for sample, matrix in zip(samples, matrices):
        det_polys = [ShapelyPolygon(d.quad.vertices) for d in sample.dets]
        centers = {}
        for i, g in enumerate(sample.gts):
            if g.dont_care:
                continue
            centers[i], _ = _naive_centers(g)

        for i, g in enumerate(sample.gts):
            if g.dont_care:
                continue
            length = len(g.transcription.strip())
            correct = 0
            for k in range(length):
                s = 0
                for j in range(len(sample.dets)):
                    if matrix.entries[i][j] == 1 and _naive_contains(
                            det_polys[j], *centers[i][k]):
                        s += 1
                if s == 1:
                    correct += 1
            recall_sum += correct / length
            n_gts += 1

        for j in range(len(sample.dets)):
            if j in matrix.excluded_dets:
                continue
            numerator = 0
            denominator = 0
            for i, g in enumerate(sample.gts):
                if g.dont_care or matrix.entries[i][j] != 1:
                    continue
                length = len(g.transcription.strip())
                denominator += length
                for k in range(length):
                    if _naive_contains(det_polys[j], *centers[i][k]):
                        numerator += 1
            precision_sum += numerator / denominator if denominator else 0.0
            n_dets += 1

    recall = recall_sum / n_gts if n_gts else 1.0
    precision = precision_sum / n_dets if n_dets else 1.0
    h = 0.0 if recall + precision == 0 else 2 * recall * precision / (recall + precision)
    return recall, precision, h
