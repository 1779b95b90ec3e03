"""Planar geometric-median (Fermat point) solvers.

The quantity minimized throughout is the total path length from a source
through a candidate relay point to every destination:

    f(p) = |source - p| + sum_k |destination_k - p|

Three independent locators are provided: an exhaustive grid scan
(``minima_fermat_point``), the iteratively reweighted centroid method
(``weiszfeld_fermat_point``) and the classical triangle construction
(``torricelli_triangle``). Each can serve as an oracle for the others; the
test suite cross-validates all three.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

# Below this separation a candidate point is treated as sitting on an anchor.
COINCIDENT_EPS = 1e-9
# Nudge used to step off an anchor that is not the optimum.
_ANCHOR_ESCAPE = 1e-6
# Slack for the vertex-optimality certificate (pure float comparison).
_CERT_SLACK = 1e-12


class CoincidentAnchorError(ValueError):
    """Candidate point coincides with an anchor; the gradient is undefined there."""


class EmptyGridError(ValueError):
    """Degenerate search bounds produced no grid points to scan."""


class NoConvergenceError(RuntimeError):
    """Iteration budget exhausted before the movement criterion was met."""

    def __init__(self, iterations: int, movement: float):
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(last movement {movement:.3e} m)"
        )
        self.iterations = iterations
        self.movement = movement


class FermatMethod(Enum):
    """Which solver produced a result."""

    GRID_MINIMA = "GridMinima"
    WEISZFELD = "Weiszfeld"
    TORRICELLI = "Torricelli"


@dataclass(frozen=True)
class Point2D:
    """A planar position in meters. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x}, {self.y})")

    def distance_to(self, other: Point2D) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class AnchorSet:
    """The source position plus one or more destination positions."""

    source: Point2D
    destinations: tuple[Point2D, ...]

    def __post_init__(self):
        object.__setattr__(self, "destinations", tuple(self.destinations))
        if len(self.destinations) < 1:
            raise ValueError("an anchor set needs at least one destination")

    @property
    def anchors(self) -> tuple[Point2D, ...]:
        """All n+1 anchors, source first, destinations in declaration order."""
        return (self.source,) + self.destinations


@dataclass(frozen=True)
class SearchBounds:
    """Axis-aligned scan window with a fixed grid resolution.

    Ordering of min/max and enclosure of the anchors are contracts checked
    where the bounds are consumed: reversed bounds surface as
    ``EmptyGridError`` from the grid scan, non-enclosing bounds as
    ``ValueError``.
    """

    min_x: float
    max_x: float
    min_y: float
    max_y: float
    step: float = 1.0

    def __post_init__(self):
        for name in ("min_x", "max_x", "min_y", "max_y", "step"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.step <= 0:
            raise ValueError(f"step must be > 0, got {self.step}")

    @classmethod
    def from_anchors(cls, anchors: AnchorSet, step: float = 1.0) -> SearchBounds:
        """Tightest bounds around the anchors (the scan window of the grid solver)."""
        xs = [p.x for p in anchors.anchors]
        ys = [p.y for p in anchors.anchors]
        return cls(min(xs), max(xs), min(ys), max(ys), step)

    def encloses(self, anchors: AnchorSet) -> bool:
        return all(
            self.min_x <= p.x <= self.max_x and self.min_y <= p.y <= self.max_y
            for p in anchors.anchors
        )


@dataclass(frozen=True)
class FermatResult:
    """A located Fermat point with its objective value and solver provenance.

    ``degenerate`` marks the collinear-triangle fallback of the Torricelli
    construction (the middle point is returned instead of an intersection).
    """

    point: Point2D
    total_distance: float
    method: FermatMethod
    degenerate: bool = False


def total_path_distance(anchors: AnchorSet, candidate: Point2D) -> float:
    """Total source-to-destinations path length routed via ``candidate``."""
    total = candidate.distance_to(anchors.source)
    for dest in anchors.destinations:
        total += candidate.distance_to(dest)
    return total


def gradient_terms(
    anchors: AnchorSet, candidate: Point2D, include_source: bool = True
) -> tuple[float, float]:
    """Partial derivatives (d/dx, d/dy) of the total path length at ``candidate``.

    Each anchor contributes the unit-vector component (c - a) / |c - a|, so
    both terms vanish at an interior Fermat point. ``include_source=False``
    restricts the sums to the destinations only; it exists purely as a
    comparison switch and is not used by any solver here.

    Raises CoincidentAnchorError when the candidate sits within
    ``COINCIDENT_EPS`` of an included anchor (the term would divide by zero;
    the anchor itself is then a candidate optimum).
    """
    points = anchors.anchors if include_source else anchors.destinations
    dx = 0.0
    dy = 0.0
    for a in points:
        d = candidate.distance_to(a)
        if d < COINCIDENT_EPS:
            raise CoincidentAnchorError(
                f"candidate ({candidate.x}, {candidate.y}) coincides with anchor "
                f"({a.x}, {a.y})"
            )
        dx += (candidate.x - a.x) / d
        dy += (candidate.y - a.y) / d
    return dx, dy


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    if hi < lo:
        return np.empty(0)
    # Closed interval [lo, hi]; the relative slack keeps hi on the grid when
    # (hi - lo) is an exact multiple of step despite float division error.
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def minima_fermat_point(anchors: AnchorSet, bounds: SearchBounds) -> FermatResult:
    """Exhaustive grid scan for the Fermat point.

    Evaluates the total path length at every grid point of
    [min_x, max_x] x [min_y, max_y] stepped by ``bounds.step`` and returns the
    argmin. Ties resolve to the first minimum in row-major order (x outer,
    y inner), which makes the scan fully deterministic.
    """
    xs = _grid_axis(bounds.min_x, bounds.max_x, bounds.step)
    ys = _grid_axis(bounds.min_y, bounds.max_y, bounds.step)
    if xs.size == 0 or ys.size == 0:
        raise EmptyGridError(
            f"bounds [{bounds.min_x}, {bounds.max_x}] x "
            f"[{bounds.min_y}, {bounds.max_y}] contain no grid points"
        )
    if not bounds.encloses(anchors):
        raise ValueError("search bounds must enclose every anchor")
    col_x = xs[:, None]
    row_y = ys[None, :]
    total = np.zeros((xs.size, ys.size))
    for a in anchors.anchors:
        total += np.hypot(col_x - a.x, row_y - a.y)
    flat = int(np.argmin(total))  # first occurrence wins: row-major tie-break
    i, j = divmod(flat, ys.size)
    point = Point2D(float(xs[i]), float(ys[j]))
    return FermatResult(
        point=point,
        total_distance=total_path_distance(anchors, point),
        method=FermatMethod.GRID_MINIMA,
    )


def _anchor_pull(points: tuple[Point2D, ...], a: Point2D) -> tuple[float, float, int]:
    """Sum of unit vectors from the other anchors toward ``a``.

    Returns (rx, ry, multiplicity) where multiplicity counts ``a`` itself plus
    any coincident duplicates.
    """
    rx = 0.0
    ry = 0.0
    multiplicity = 0
    for b in points:
        d = a.distance_to(b)
        if d < COINCIDENT_EPS:
            multiplicity += 1
            continue
        rx += (a.x - b.x) / d
        ry += (a.y - b.y) / d
    return rx, ry, multiplicity


def _anchor_is_optimal(points: tuple[Point2D, ...], a: Point2D) -> bool:
    # Subgradient certificate: an anchor of multiplicity k minimizes the
    # distance sum iff the net pull of the remaining anchors has norm <= k.
    rx, ry, k = _anchor_pull(points, a)
    return math.hypot(rx, ry) <= k + _CERT_SLACK


def weiszfeld_fermat_point(
    anchors: AnchorSet, tolerance: float = 1e-6, max_iterations: int = 1000
) -> FermatResult:
    """Iteratively reweighted centroid solver for the Fermat point.

    Starts from the anchor centroid and repeats
    x <- (sum a / |x - a|) / (sum 1 / |x - a|) until successive iterates move
    less than ``tolerance``. Anchors are screened with the subgradient
    certificate up front, so vertex optima (any anchor subtending >= 120
    degrees in the triangle case) return exactly, without the slow crawl the
    plain iteration exhibits near a vertex. An iterate that still lands on a
    non-optimal anchor is nudged off along the steepest-descent direction.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be > 0, got {tolerance}")
    if max_iterations < 1:
        raise ValueError(f"max_iterations must be >= 1, got {max_iterations}")

    points = anchors.anchors
    for a in points:
        if _anchor_is_optimal(points, a):
            return FermatResult(
                point=a,
                total_distance=total_path_distance(anchors, a),
                method=FermatMethod.WEISZFELD,
            )

    x = sum(p.x for p in points) / len(points)
    y = sum(p.y for p in points) / len(points)
    movement = math.inf
    for _ in range(max_iterations):
        on_anchor = None
        for a in points:
            if math.hypot(x - a.x, y - a.y) < COINCIDENT_EPS:
                on_anchor = a
                break
        if on_anchor is not None:
            # Certificate already ruled this anchor out; step off downhill.
            rx, ry, _ = _anchor_pull(points, on_anchor)
            norm = math.hypot(rx, ry)
            x = on_anchor.x - _ANCHOR_ESCAPE * rx / norm
            y = on_anchor.y - _ANCHOR_ESCAPE * ry / norm
            continue
        num_x = 0.0
        num_y = 0.0
        den = 0.0
        for a in points:
            w = 1.0 / math.hypot(x - a.x, y - a.y)
            num_x += a.x * w
            num_y += a.y * w
            den += w
        new_x = num_x / den
        new_y = num_y / den
        movement = math.hypot(new_x - x, new_y - y)
        x, y = new_x, new_y
        if movement < tolerance:
            point = Point2D(x, y)
            return FermatResult(
                point=point,
                total_distance=total_path_distance(anchors, point),
                method=FermatMethod.WEISZFELD,
            )
    raise NoConvergenceError(max_iterations, movement)


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _outward_apex(p: Point2D, q: Point2D, opposite: Point2D) -> Point2D:
    """Apex of the equilateral triangle erected on pq, away from ``opposite``."""
    vx = q.x - p.x
    vy = q.y - p.y
    cos60 = 0.5
    sin60 = math.sqrt(3.0) / 2.0
    for s in (sin60, -sin60):
        apex = Point2D(p.x + vx * cos60 - vy * s, p.y + vx * s + vy * cos60)
        side_apex = _cross(p.x, p.y, q.x, q.y, apex.x, apex.y)
        side_opp = _cross(p.x, p.y, q.x, q.y, opposite.x, opposite.y)
        if side_apex * side_opp < 0:
            return apex
    raise RuntimeError("degenerate triangle reached apex construction")


def _line_intersection(p1: Point2D, p2: Point2D, p3: Point2D, p4: Point2D) -> Point2D:
    d1x = p2.x - p1.x
    d1y = p2.y - p1.y
    d2x = p4.x - p3.x
    d2y = p4.y - p3.y
    denom = d1x * d2y - d1y * d2x
    if denom == 0.0:
        raise RuntimeError("cevian lines are parallel; triangle is degenerate")
    t = ((p3.x - p1.x) * d2y - (p3.y - p1.y) * d2x) / denom
    return Point2D(p1.x + t * d1x, p1.y + t * d1y)


def torricelli_triangle(a: Point2D, b: Point2D, c: Point2D) -> FermatResult:
    """Fermat point of a triangle by geometric construction.

    A vertex subtending an angle of at least 120 degrees is itself the
    optimum and is returned directly. Otherwise the point is the intersection
    of the two lines joining vertices to the apexes of equilateral triangles
    erected outward on the opposite sides. Collinear input degenerates to the
    middle point, flagged on the result.
    """
    vertices = (a, b, c)
    for i, p in enumerate(vertices):
        for q in vertices[i + 1 :]:
            if p.distance_to(q) < COINCIDENT_EPS:
                raise ValueError("triangle vertices must be pairwise distinct")

    def objective(p: Point2D) -> float:
        return p.distance_to(a) + p.distance_to(b) + p.distance_to(c)

    area2 = _cross(a.x, a.y, b.x, b.y, c.x, c.y)
    longest = max(a.distance_to(b), b.distance_to(c), a.distance_to(c))
    if abs(area2) <= 1e-12 * longest * longest:
        # Collinear: the middle point minimizes the distance sum.
        middle = min(vertices, key=objective)
        return FermatResult(
            point=middle,
            total_distance=objective(middle),
            method=FermatMethod.TORRICELLI,
            degenerate=True,
        )

    for vertex, (p, q) in ((a, (b, c)), (b, (a, c)), (c, (a, b))):
        ux = p.x - vertex.x
        uy = p.y - vertex.y
        wx = q.x - vertex.x
        wy = q.y - vertex.y
        cos_angle = (ux * wx + uy * wy) / (math.hypot(ux, uy) * math.hypot(wx, wy))
        if cos_angle <= -0.5:  # angle >= 120 degrees
            return FermatResult(
                point=vertex,
                total_distance=objective(vertex),
                method=FermatMethod.TORRICELLI,
            )

    apex_a = _outward_apex(b, c, a)
    apex_b = _outward_apex(a, c, b)
    point = _line_intersection(a, apex_a, b, apex_b)
    return FermatResult(
        point=point,
        total_distance=objective(point),
        method=FermatMethod.TORRICELLI,
    )
