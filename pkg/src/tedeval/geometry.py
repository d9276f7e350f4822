"""Quadrilateral primitives for box-level evaluation.

Everything here operates on oriented quadrilaterals: four vertices in
clockwise order (image coordinates, y grows downward) starting at the
top-left corner of the word. Under that convention the shoelace sum is
positive, the left edge runs from the last vertex back to the first,
and the reading direction points from the left edge toward the right.

All functions are pure; quads are immutable and hashable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from shapely.geometry import Polygon

# Boundary tolerance for point containment: a point within this distance
# of a quad edge counts as contained.
CONTAINS_EPS = 1e-6

# Pairs whose turning angle (folded into [0, 90]) reaches this many degrees
# are considered to sit on different text lines.
MULTILINE_ANGLE_DEG = 45.0

_DEGENERATE_AREA = 1e-12


class Point(NamedTuple):
    x: float
    y: float


class PivotPoints(NamedTuple):
    """Left-edge midpoint and centroid of a quad."""

    p1: Point
    p2: Point


def _shoelace(vertices: Sequence[Point]) -> float:
    total = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def _segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when segment ab meets segment cd anywhere (touching counts)."""

    def orient(p: Point, q: Point, r: Point) -> float:
        return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)

    def on_segment(p: Point, q: Point, r: Point) -> bool:
        return (
            min(p.x, r.x) <= q.x <= max(p.x, r.x)
            and min(p.y, r.y) <= q.y <= max(p.y, r.y)
        )

    o1 = orient(a, b, c)
    o2 = orient(a, b, d)
    o3 = orient(c, d, a)
    o4 = orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    if o1 == 0 and on_segment(a, c, b):
        return True
    if o2 == 0 and on_segment(a, d, b):
        return True
    if o3 == 0 and on_segment(c, a, d):
        return True
    if o4 == 0 and on_segment(c, b, d):
        return True
    return False


@dataclass(frozen=True)
class Quad:
    """Simple quadrilateral, clockwise in image coordinates from top-left."""

    vertices: tuple[Point, Point, Point, Point]

    def __post_init__(self) -> None:
        if len(self.vertices) != 4:
            raise ValueError(f"quad needs exactly 4 vertices, got {len(self.vertices)}")
        pts = tuple(Point(float(p[0]), float(p[1])) for p in self.vertices)
        object.__setattr__(self, "vertices", pts)
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError(f"non-finite vertex {p}")
        if len(set(pts)) != 4:
            raise ValueError(f"repeated vertex in {pts}")
        signed = _shoelace(pts)
        if signed <= _DEGENERATE_AREA:
            raise ValueError(
                f"degenerate or counter-clockwise quad (signed area {signed:g}): {pts}"
            )
        # Simple polygon: the two pairs of opposite edges must not meet.
        v = pts
        if _segments_cross(v[0], v[1], v[2], v[3]) or _segments_cross(v[1], v[2], v[3], v[0]):
            raise ValueError(f"self-intersecting quad: {pts}")

    @classmethod
    def from_coords(cls, coords: Iterable[float]) -> "Quad":
        """Build a quad from a flat x1,y1,...,x4,y4 sequence."""
        flat = [float(c) for c in coords]
        if len(flat) != 8:
            raise ValueError(f"expected 8 coordinates, got {len(flat)}")
        pts = tuple(Point(flat[i], flat[i + 1]) for i in range(0, 8, 2))
        return cls(pts)  # type: ignore[arg-type]

    @classmethod
    def from_rect(cls, x1: float, y1: float, x2: float, y2: float) -> "Quad":
        """Axis-aligned rectangle from two opposite corners."""
        xmin, xmax = min(x1, x2), max(x1, x2)
        ymin, ymax = min(y1, y2), max(y1, y2)
        return cls((Point(xmin, ymin), Point(xmax, ymin), Point(xmax, ymax), Point(xmin, ymax)))

    @cached_property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def is_convex(self) -> bool:
        v = self.vertices
        for i in range(4):
            a, b, c = v[i], v[(i + 1) % 4], v[(i + 2) % 4]
            if (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) < 0:
                return False
        return True

    def translated(self, dx: float, dy: float) -> "Quad":
        return Quad(tuple(Point(p.x + dx, p.y + dy) for p in self.vertices))  # type: ignore[arg-type]

    def rotated(self, degrees: float, cx: float = 0.0, cy: float = 0.0) -> "Quad":
        rad = math.radians(degrees)
        cos, sin = math.cos(rad), math.sin(rad)
        pts = tuple(
            Point(cx + (p.x - cx) * cos - (p.y - cy) * sin, cy + (p.x - cx) * sin + (p.y - cy) * cos)
            for p in self.vertices
        )
        return Quad(pts)  # type: ignore[arg-type]


def area(q: Quad) -> float:
    """Shoelace area of a quad, always positive."""
    value = _shoelace(q.vertices)
    if value <= _DEGENERATE_AREA:
        raise ValueError(f"degenerate quad has no area: {q.vertices}")
    return value


def intersect_area(a: Quad, b: Quad) -> float:
    """Area of the polygon intersection of two quads; 0 when disjoint.

    Clamped into [0, min(area(a), area(b))] so that the mathematical
    bounds hold exactly despite floating-point clipping.
    """
    if a.vertices == b.vertices:
        return area(a)
    raw = a.polygon.intersection(b.polygon).area
    return max(0.0, min(raw, area(a), area(b)))


def _point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = b.x - a.x, b.y - a.y
    px, py = p.x - a.x, p.y - a.y
    denom = ax * ax + ay * ay
    t = 0.0 if denom == 0.0 else max(0.0, min(1.0, (px * ax + py * ay) / denom))
    dx, dy = px - t * ax, py - t * ay
    return math.hypot(dx, dy)


def contains_point(q: Quad, p: Point, eps: float = CONTAINS_EPS) -> bool:
    """True when p lies inside q or within eps of its boundary."""
    v = q.vertices
    for i in range(4):
        if _point_segment_distance(p, v[i], v[(i + 1) % 4]) <= eps:
            return True
    # Even-odd ray cast; p is now strictly off every edge.
    inside = False
    for i in range(4):
        a, b = v[i], v[(i + 1) % 4]
        if (a.y <= p.y) != (b.y <= p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def pivot_points(q: Quad) -> PivotPoints:
    """Left-edge midpoint and vertex centroid."""
    v = q.vertices
    p1 = Point((v[0].x + v[3].x) / 2.0, (v[0].y + v[3].y) / 2.0)
    p2 = Point(
        (v[0].x + v[1].x + v[2].x + v[3].x) / 4.0,
        (v[0].y + v[1].y + v[2].y + v[3].y) / 4.0,
    )
    return PivotPoints(p1, p2)


def pair_angle(a: Quad, b: Quad) -> float:
    """Turning angle, in degrees, between a's pivot points seen from b's centroid.

    Measures the angle at b's centroid between the rays toward a's
    left-edge midpoint and a's centroid. Degenerate geometry (a ray of
    zero length) yields 0 so that near-identical boxes never register
    as separate lines.
    """
    pa = pivot_points(a)
    pivot = pivot_points(b).p2
    ux, uy = pa.p1.x - pivot.x, pa.p1.y - pivot.y
    vx, vy = pa.p2.x - pivot.x, pa.p2.y - pivot.y
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu < 1e-12 or nv < 1e-12:
        return 0.0
    cos = (ux * vx + uy * vy) / (nu * nv)
    return math.degrees(math.acos(max(-1.0, min(1.0, cos))))


def is_multiline(boxes: Sequence[Quad], angle_min: float = MULTILINE_ANGLE_DEG) -> bool:
    """True when any ordered pair of boxes turns by at least angle_min degrees.

    Angles are folded into [0, 90] before comparison, so the test does
    not depend on which of the two supplementary angles is measured.
    """
    boxes = list(boxes)
    if len(boxes) < 2:
        raise ValueError(f"multiline test needs at least 2 boxes, got {len(boxes)}")
    for a in boxes:
        for b in boxes:
            if a is b:
                continue
            theta = pair_angle(a, b)
            if min(theta, 180.0 - theta) >= angle_min:
                return True
    return False
