"""Partitions of regular k-gons: central disk, corner disks, and gap coverings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .bounds import gamma_one, gamma_theta_kgon
from .edgecover import (EdgeCoverInput, EdgeCovering, F, F_prime, cover_edge)
from .geom import (DEFAULT_TOL, CoverPair, Disk, Isometry, Point2,
                   circle_circle_intersection)

BRACKET_INSET = 1e-12
GAMMA_XTOL = 1e-7


@dataclass(frozen=True)
class KgonFrame:
    """Regular k-gon with unit inradius.

    Edge 0 lies on the x-axis from the origin to (2 cot theta, 0), so the
    center is (cot theta, 1). theta is half the interior angle.
    """

    k: int

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 3:
            raise ValueError(f"k must be an integer >= 3, got {self.k}")

    @property
    def theta(self) -> float:
        return math.pi / 2 - math.pi / self.k

    @property
    def inradius(self) -> float:
        return 1.0

    @property
    def cot(self) -> float:
        return math.tan(math.pi / self.k)

    @property
    def center(self) -> Point2:
        return Point2(self.cot, 1.0)

    @property
    def circumradius(self) -> float:
        return 1.0 / math.cos(math.pi / self.k)

    @property
    def edge_frame(self) -> Isometry:
        return Isometry.identity()

    def rotation(self, j: int) -> Isometry:
        """Rotation about the center carrying corner 0 to corner j."""
        return Isometry.rotation(2.0 * math.pi * j / self.k, (self.cot, 1.0))

    @property
    def mirror(self) -> Isometry:
        """Reflection across the perpendicular bisector of edge 0."""
        return Isometry.reflection_x(self.cot)

    @property
    def vertices(self) -> Tuple[Point2, ...]:
        c, R = self.center, self.circumradius
        base = -math.pi / 2 - math.pi / self.k
        out = []
        for j in range(self.k):
            a = base + 2.0 * math.pi * j / self.k
            out.append(Point2(c.x + R * math.cos(a), c.y + R * math.sin(a)))
        # pin the first edge exactly onto the axis
        out[0] = Point2(0.0, 0.0)
        out[1] = Point2(2.0 * self.cot, 0.0)
        return tuple(out)

    def vertex_array(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.vertices])

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Points inside the closed polygon."""
        cx, cy = self.cot, 1.0
        inside = np.ones(np.shape(x), dtype=bool)
        for j in range(self.k):
            # outward normal of edge j
            a = -math.pi / 2 + 2.0 * math.pi * j / self.k
            inside &= (x - cx) * math.cos(a) + (y - cy) * math.sin(a) <= 1.0 + 1e-15
        return inside


@dataclass(frozen=True)
class CornerGeometry:
    r1: float
    a1: float
    b1: float
    outcircle: Disk


def _corner_geometry(frame: KgonFrame, gamma: float) -> CornerGeometry:
    th = frame.theta
    sn = math.sin(th)
    r1 = (1.0 - sn) / (1.0 + sn)
    a1 = r1 * frame.cot
    rho = gamma * r1
    out = Disk.at(rho * math.cos(th), rho * sn, rho)
    return CornerGeometry(r1, a1, 2.0 * rho * math.cos(th), out)


def central_pair(frame: KgonFrame, gamma: float) -> Tuple[CoverPair, float]:
    """Inscribed disk with a concentric outcircle, and where that outcircle cuts edge 0."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    b0 = frame.cot - math.sqrt(gamma * gamma - 1.0)
    if b0 <= 0:
        raise ValueError("central outcircle swallows corner")
    c = frame.center
    return CoverPair(Disk(c, 1.0), Disk(c, gamma), gamma), b0


def corner_pair(frame: KgonFrame, gamma: float) -> Tuple[CoverPair, float, float]:
    """Corner-0 disk tangent to both edges; outcircle on the bisector through the vertex.

    Returns the pair, the indisk's tangency x on edge 0, and the outcircle's
    far cut on edge 0.
    """
    bound = gamma_theta_kgon(frame.k)
    if gamma < bound - DEFAULT_TOL.rel * bound:
        raise ValueError(f"corner not capturable: gamma {gamma} below corner bound {bound}")
    geo = _corner_geometry(frame, gamma)
    indisk = Disk.at(geo.a1, geo.r1, geo.r1)
    pair = CoverPair(indisk, geo.outcircle, gamma)
    if geo.b1 < geo.a1:
        raise ValueError("corner outcircle leaves the corner edge stretch uncovered")
    return pair, geo.a1, geo.b1


def scaled_initial_gap(frame: KgonFrame, gamma: float) -> float:
    """Distance from the central cut to the corner tangency, in corner radii."""
    sn = math.sin(frame.theta)
    c = frame.cot
    return (1.0 + sn) / (1.0 - sn) * (c - math.sqrt(gamma * gamma - 1.0)) - c


class Partition:
    """Full k-gon partition.

    Only one gap covering is computed; the other 2k - 1 gaps are its images
    under the polygon symmetries and share its node arrays. Piece ids run:
    0 central, 1..k corners, then each gap copy in turn.
    """

    def __init__(self, frame: KgonFrame, gamma: float, central: CoverPair,
                 corners: Sequence[CoverPair], canonical_gap: EdgeCovering,
                 gap_transforms: Sequence[Isometry], gap_corner: Sequence[int]):
        self.frame = frame
        self.k = frame.k
        self.gamma = gamma
        self.central = central
        self.corners = tuple(corners)
        self.canonical_gap = canonical_gap
        self.gap_transforms = tuple(gap_transforms)
        self.gap_corner = tuple(gap_corner)

    @property
    def gap_covers(self) -> Tuple[EdgeCovering, ...]:
        return tuple(self.canonical_gap.transformed(t) for t in self.gap_transforms)

    @property
    def gap_disks_per_gap(self) -> int:
        return self.canonical_gap.n_gap_disks

    @property
    def depth(self) -> int:
        return self.canonical_gap.depth

    @property
    def steps(self) -> int:
        """Iteration count with the corner disk counted as the first step."""
        return self.depth + 1

    @property
    def piece_count(self) -> int:
        return 1 + self.k + 2 * self.k * self.gap_disks_per_gap

    @property
    def achieved_ratio(self) -> float:
        return self.gamma

    @property
    def terminated(self) -> bool:
        return self.canonical_gap.terminated

    def is_uniform(self) -> bool:
        counts = self.canonical_gap.level_counts()
        return bool(np.all(counts == 2 ** np.arange(counts.size)))

    def families(self) -> List["DiskFamily"]:
        g = self.gamma
        c = self.central
        cp = self.corners[0]
        gap = self.canonical_gap
        (ix, iy, ir), (ox, oy, orad) = gap.local_arrays()
        return [
            DiskFamily.single(c, (Isometry.identity(),), 0, "central"),
            DiskFamily.single(cp, tuple(self.frame.rotation(j) for j in range(self.k)), 1, "corner"),
            DiskFamily(ix, iy, ir, ox, oy, orad,
                       tuple(t.compose(gap.frame) for t in self.gap_transforms),
                       1 + self.k, "gap", line_tangent=True),
        ][: 3 if gap.n_gap_disks else 2]

    def flat(self) -> "FlatDisks":
        """Every piece in world coordinates. Memory grows with piece_count."""
        fams = self.families()
        parts = [f.world_arrays() for f in fams]
        roles = ["central"] + ["corner"] * self.k
        parent = [-1] * (1 + self.k)
        arrays = [np.concatenate([p[i] for p in parts]) for i in range(6)]
        parent_arr = np.array(parent, dtype=np.int64)
        role_arr = np.array(roles)
        if self.gap_disks_per_gap:
            n = self.gap_disks_per_gap
            local_parent = self.canonical_gap.parent
            chunks, rchunks = [], []
            for copy, corner in enumerate(self.gap_corner):
                base = 1 + self.k + copy * n
                chunks.append(np.where(local_parent >= 0, local_parent + base, 1 + corner))
                rchunks.append(np.full(n, "gap"))
            parent_arr = np.concatenate([parent_arr] + chunks)
            role_arr = np.concatenate([role_arr] + rchunks)
        return FlatDisks(*arrays, roles=role_arr, parent=parent_arr)


@dataclass
class DiskFamily:
    """Indisk/outcircle arrays in a local frame, placed by one or more motions."""

    in_x: np.ndarray
    in_y: np.ndarray
    in_r: np.ndarray
    out_x: np.ndarray
    out_y: np.ndarray
    out_r: np.ndarray
    transforms: Tuple[Isometry, ...]
    id_offset: int
    role: str
    line_tangent: bool = False

    @classmethod
    def single(cls, pair: CoverPair, transforms, id_offset: int, role: str) -> DiskFamily:
        i, o = pair.indisk, pair.outcircle
        arr = lambda v: np.array([v], dtype=float)
        return cls(arr(i.center.x), arr(i.center.y), arr(i.radius), arr(o.center.x),
                   arr(o.center.y), arr(o.radius), tuple(transforms), id_offset, role)

    @property
    def size(self) -> int:
        return int(self.in_r.size)

    def world_arrays(self):
        out = [[] for _ in range(6)]
        for t in self.transforms:
            ix, iy = t.apply(self.in_x, self.in_y)
            ox, oy = t.apply(self.out_x, self.out_y)
            for slot, v in zip(out, (ix, iy, self.in_r, ox, oy, self.out_r)):
                slot.append(np.asarray(v, dtype=float))
        return tuple(np.concatenate(v) for v in out)


@dataclass
class FlatDisks:
    in_x: np.ndarray
    in_y: np.ndarray
    in_r: np.ndarray
    out_x: np.ndarray
    out_y: np.ndarray
    out_r: np.ndarray
    roles: np.ndarray
    parent: np.ndarray

    def __len__(self) -> int:
        return int(self.in_r.size)


def build_partition(k: int, gamma: float, max_steps: int = 64,
                    max_disks: int = 1 << 23) -> Partition:
    frame = KgonFrame(k)
    central, _ = central_pair(frame, gamma)
    corner0, a1, _ = corner_pair(frame, gamma)
    inp = EdgeCoverInput((Point2(a1, 0.0), Point2(frame.cot, 0.0)), corner0, central,
                         gamma, max_steps, max_disks)
    gap = cover_edge(inp)
    corners = [frame.rotation(j).apply_pair(corner0) for j in range(k)]
    transforms, owner = [], []
    for j in range(k):
        # the gap left of corner j sits on edge j-1, the right one on edge j
        transforms.append(frame.rotation(j - 1).compose(frame.mirror))
        owner.append(j)
        transforms.append(frame.rotation(j))
        owner.append(j)
    return Partition(frame, gamma, central, corners, gap, transforms, owner)


@dataclass(frozen=True)
class KoptTerms:
    """The three conditions tested by kopt_predicate, plus their inputs."""

    gap_open: bool
    scaled_gap: float
    shrinks: bool
    increasing: bool
    apex_covered: bool
    apex: Point2 | None

    @property
    def holds(self) -> bool:
        return (not self.gap_open) or (self.shrinks and self.increasing and self.apex_covered)


def kopt_terms(k: int, gamma: float) -> KoptTerms:
    frame = KgonFrame(k)
    if not gamma > 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    b0 = frame.cot - math.sqrt(gamma * gamma - 1.0)
    if b0 <= 0:
        raise ValueError("central outcircle swallows corner")
    geo = _corner_geometry(frame, gamma)
    a0s = (b0 - geo.a1) / geo.r1
    if geo.b1 >= b0:
        return KoptTerms(False, a0s, True, True, True, None)
    shrinks = bool(F(a0s, gamma) < a0s)
    increasing = bool(F_prime(a0s, gamma) > 0)
    pts = circle_circle_intersection(Disk(frame.center, gamma), geo.outcircle)
    if not pts:
        raise ValueError("central and corner outcircles do not meet")
    t = pts[0]
    a2 = 0.5 * (b0 + geo.b1)
    r2 = min((geo.a1 - a2) ** 2 / (4.0 * geo.r1), (frame.cot - a2) ** 2 / 4.0)
    reach = math.hypot(a2 - t.x, r2 - t.y)
    covered = reach <= r2 + DEFAULT_TOL.scale(r2)
    return KoptTerms(True, a0s, shrinks, increasing, covered, t)


def kopt_predicate(k: int, gamma: float) -> bool:
    """Whether one gap disk after the corner leaves a finite, apex-covering recursion.

    When the corner outcircle already overlaps the central cut there is no gap
    and the predicate holds trivially.
    """
    return kopt_terms(k, gamma).holds


def optimal_gamma(k: int, grid: int = 101, xtol: float = GAMMA_XTOL) -> float:
    """Smallest gamma between the corner bound and the one-piece ratio passing kopt_predicate.

    A coarse scan locates the first passing grid point, so the result is the
    first false-to-true transition even if the predicate were not monotone.
    """
    if int(k) != k or k < 5:
        raise ValueError(f"k must be an integer >= 5, got {k}")
    lo = gamma_theta_kgon(k) + BRACKET_INSET
    hi = gamma_one(k) - BRACKET_INSET
    if kopt_predicate(k, lo):
        return lo
    gs = np.linspace(lo, hi, grid)
    flags = [kopt_predicate(k, float(g)) for g in gs]
    if not any(flags):
        raise ValueError("no covering in bracket")
    first = flags.index(True)
    a, b = float(gs[first - 1]), float(gs[first])
    while b - a > xtol:
        mid = 0.5 * (a + b)
        if kopt_predicate(k, mid):
            b = mid
        else:
            a = mid
    return b


def one_piece_preferable(k: int) -> bool:
    return optimal_gamma(k) >= gamma_one(k) - GAMMA_XTOL
