"""Floating-point primitives for disks, tangency and outcircle placement."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class Tolerance:
    """Relative and absolute slack shared by all geometric predicates."""

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self) -> None:
        if not (self.rel > 0 and self.abs > 0):
            raise ValueError("tolerances must be positive")

    def scale(self, magnitude: float) -> float:
        return self.abs + self.rel * abs(magnitude)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def distance(self, other: Point2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Disk:
    """Closed disk. Boundary points count as contained."""

    center: Point2
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"disk radius must be positive, got {self.radius}")

    @classmethod
    def at(cls, x: float, y: float, r: float) -> Disk:
        return cls(Point2(x, y), r)


@dataclass(frozen=True)
class CoverPair:
    """An indisk nested inside its outcircle, with radius ratio gamma."""

    indisk: Disk
    outcircle: Disk
    gamma: float

    def __post_init__(self) -> None:
        if self.gamma < 1:
            raise ValueError(f"gamma must be >= 1, got {self.gamma}")
        tol = DEFAULT_TOL
        want = self.gamma * self.indisk.radius
        if abs(self.outcircle.radius - want) > tol.scale(want):
            raise ValueError("outcircle radius must equal gamma * indisk radius")
        gap = self.indisk.center.distance(self.outcircle.center)
        if gap > self.outcircle.radius - self.indisk.radius + tol.scale(self.outcircle.radius):
            raise ValueError("indisk is not contained in its outcircle")


def circle_circle_intersection(a: Disk, b: Disk) -> Tuple[Point2, ...]:
    """Intersection points of the two boundary circles.

    Tangent circles (within tolerance) give one point. Two points come back
    ordered by y, then x.
    """
    ax, ay, ra = a.center.x, a.center.y, a.radius
    bx, by, rb = b.center.x, b.center.y, b.radius
    dx, dy = bx - ax, by - ay
    d = math.hypot(dx, dy)
    if d == 0.0:
        if ra == rb:
            raise ValueError("degenerate: coincident circles")
        return ()
    tol = DEFAULT_TOL.scale(max(ra, rb))
    if d > ra + rb + tol or d < abs(ra - rb) - tol:
        return ()
    along = (ra * ra - rb * rb + d * d) / (2.0 * d)
    ux, uy = dx / d, dy / d
    foot_x, foot_y = ax + along * ux, ay + along * uy
    if abs(d - (ra + rb)) <= tol or abs(d - abs(ra - rb)) <= tol:
        return (Point2(foot_x, foot_y),)
    h = math.sqrt(max(ra * ra - along * along, 0.0))
    p = Point2(foot_x - h * uy, foot_y + h * ux)
    q = Point2(foot_x + h * uy, foot_y - h * ux)
    return tuple(sorted((p, q), key=lambda t: (t.y, t.x)))


def is_externally_tangent(a: Disk, b: Disk, tol: Tolerance = DEFAULT_TOL) -> bool:
    reach = a.radius + b.radius
    return abs(a.center.distance(b.center) - reach) <= tol.scale(reach)


def gap_outcircle(indisk: Disk, gamma: float) -> Disk:
    """Outcircle of a disk resting on the x-axis, shifted down so the tops meet.

    The chord it cuts on the x-axis has half-width 2 r sqrt(gamma - 1).
    """
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    r = indisk.radius
    return Disk(Point2(indisk.center.x, 2.0 * r - gamma * r), gamma * r)


def disk_contains(d: Disk, p: Point2, tol: Tolerance = DEFAULT_TOL) -> bool:
    return d.center.distance(p) <= d.radius + tol.scale(d.radius)


def x_axis_chord(d: Disk) -> Tuple[float, float] | None:
    """Endpoints of the disk's chord on y = 0, or None if it misses the axis."""
    h2 = (d.radius - abs(d.center.y)) * (d.radius + abs(d.center.y))
    if h2 < 0:
        return None
    h = math.sqrt(h2)
    return d.center.x - h, d.center.x + h


@dataclass(frozen=True)
class Isometry:
    """Planar rigid motion p -> M p + t, possibly orientation reversing."""

    m: Tuple[float, float, float, float]
    t: Tuple[float, float]

    @classmethod
    def identity(cls) -> Isometry:
        return cls((1.0, 0.0, 0.0, 1.0), (0.0, 0.0))

    @classmethod
    def rotation(cls, angle: float, about: Tuple[float, float] = (0.0, 0.0)) -> Isometry:
        c, s = math.cos(angle), math.sin(angle)
        px, py = about
        return cls((c, -s, s, c), (px - c * px + s * py, py - s * px - c * py))

    @classmethod
    def reflection_x(cls, x0: float) -> Isometry:
        """Mirror across the vertical line x = x0."""
        return cls((-1.0, 0.0, 0.0, 1.0), (2.0 * x0, 0.0))

    def compose(self, other: Isometry) -> Isometry:
        """self after other."""
        a, b, c, d = self.m
        e, f, g, h = other.m
        tx, ty = other.t
        return Isometry(
            (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h),
            (a * tx + b * ty + self.t[0], c * tx + d * ty + self.t[1]),
        )

    def inverse(self) -> Isometry:
        a, b, c, d = self.m
        det = a * d - b * c
        ia, ib, ic, id_ = d / det, -b / det, -c / det, a / det
        tx, ty = self.t
        return Isometry((ia, ib, ic, id_), (-(ia * tx + ib * ty), -(ic * tx + id_ * ty)))

    def apply(self, x, y):
        """Map coordinates; works on floats or numpy arrays."""
        a, b, c, d = self.m
        return a * x + b * y + self.t[0], c * x + d * y + self.t[1]

    def apply_point(self, p: Point2) -> Point2:
        return Point2(*self.apply(p.x, p.y))

    def apply_disk(self, disk: Disk) -> Disk:
        return Disk(self.apply_point(disk.center), disk.radius)

    def apply_pair(self, pair: CoverPair) -> CoverPair:
        return CoverPair(self.apply_disk(pair.indisk), self.apply_disk(pair.outcircle), pair.gamma)

    def as_matrix(self) -> np.ndarray:
        a, b, c, d = self.m
        return np.array([[a, b, self.t[0]], [c, d, self.t[1]], [0.0, 0.0, 1.0]])
