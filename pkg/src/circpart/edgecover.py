"""Edge Cover: gap-disk recursion along a segment and its termination theory.

A segment lies between two disks tangent to it and to each other. Each
iteration drops the largest disk tangent to the segment at the midpoint of
the uncovered gap, inflates it into a vertically displaced outcircle, and
recurses on what is left on either side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .fixedpoint import GAMMA_STAR, positive_fixed_points
from .geom import DEFAULT_TOL, CoverPair, Disk, Isometry, Point2, Tolerance

BOUNDARY_SLACK = 1e-12
BOUNDARY_BAND = 1e-9
DEFAULT_MAX_STEPS = 64
DEFAULT_MAX_DISKS = 1 << 23

LEFT_BOUND = -1
RIGHT_BOUND = -2


def delta(r: float, gamma: float) -> float:
    """Half-width of a displaced outcircle's chord on the edge."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    return 2.0 * r * math.sqrt(gamma - 1.0)


def F(x, gamma: float):
    """Rescaled gap map: next a'/r given the current a'/r."""
    s = math.sqrt(gamma - 1.0)
    x = np.asarray(x, dtype=float) if not isinstance(x, float) else x
    den = x + 2.0 * s
    if np.any(den == 0):
        raise ValueError("F evaluated at its pole x = -2 sqrt(gamma - 1)")
    return 4.0 * (2.0 * x - 4.0 * s) / (den * den)


def F_prime(x, gamma: float):
    s = math.sqrt(gamma - 1.0)
    x = np.asarray(x, dtype=float) if not isinstance(x, float) else x
    den = x + 2.0 * s
    if np.any(den == 0):
        raise ValueError("F' evaluated at its pole x = -2 sqrt(gamma - 1)")
    return 8.0 * (6.0 * s - x) / (den * den * den)


@dataclass(frozen=True)
class GapState:
    """Tangency coordinate and radius of the disk bounding the open gap."""

    a: float
    r: float
    a_scaled: float
    step: int = 1

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ValueError("gap disk radius must be positive")
        if self.step < 1:
            raise ValueError("step counts from 1")

    @classmethod
    def start(cls, a: float, r: float) -> GapState:
        return cls(a, r, a / r, 1)

    def is_open(self, gamma: float, slack: float = BOUNDARY_SLACK) -> bool:
        return self.a > delta(self.r, gamma) + slack


def next_gap_state(s: GapState, gamma: float) -> GapState:
    if not s.a > delta(s.r, gamma):
        raise ValueError("already terminated: gap is covered")
    a_next = 0.5 * s.a - s.r * math.sqrt(gamma - 1.0)
    r_next = (s.a - a_next) ** 2 / (4.0 * s.r)
    return GapState(a_next, r_next, a_next / r_next, s.step + 1)


@dataclass(frozen=True)
class TerminationClass:
    region: str
    terminates: bool
    fixed_points: Tuple[float, ...] = ()


def classify(a1_scaled: float, gamma: float) -> TerminationClass:
    """Where the scaled gap sits relative to the fixed points of F.

    I   above a1* with F(a1') still at or above a2*: stuck near a1*
    II  between a2* and a1*: climbs to a1*
    III below a2*, or so far above a1* that one step lands below a2*
    IV  gamma beyond gamma*: no positive fixed points, always finishes
    """
    if not gamma > 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    if not a1_scaled > 0:
        raise ValueError("scaled gap must be positive")
    if gamma >= GAMMA_STAR - BOUNDARY_BAND:
        return TerminationClass("IV", True, ())
    roots = positive_fixed_points(gamma)
    hi, lo = roots
    if a1_scaled < lo:
        return TerminationClass("III", True, roots)
    if a1_scaled < hi:
        return TerminationClass("II", False, roots)
    if F(float(a1_scaled), gamma) < lo:
        return TerminationClass("III", True, roots)
    return TerminationClass("I", False, roots)


def steps_to_cover(a1_scaled: float, gamma: float, cap: int = 10_000) -> Optional[int]:
    """Iterations of F until a' <= 2 sqrt(gamma - 1); None if it never gets there."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    finish = 2.0 * math.sqrt(gamma - 1.0) + BOUNDARY_SLACK
    if a1_scaled <= finish:
        return 0
    if not classify(a1_scaled, gamma).terminates:
        return None
    x = float(a1_scaled)
    for n in range(1, cap + 1):
        x = F(x, gamma)
        if x <= finish:
            return n
    return None


def canonical_scaled_gap(gamma: float) -> float:
    """Scaled uncovered gap between two unit disks touching at a point of the edge.

    Both disks carry concentric outcircles of radius gamma, which cut the edge
    sqrt(gamma^2 - 1) from each tangency point, leaving 2 - 2 sqrt(gamma^2 - 1).
    """
    return 2.0 - 2.0 * math.sqrt(gamma * gamma - 1.0)


@dataclass(frozen=True)
class EdgeCoverInput:
    segment: Tuple[Point2, Point2]
    left: CoverPair
    right: CoverPair
    gamma: float
    max_steps: int = DEFAULT_MAX_STEPS
    max_disks: int = DEFAULT_MAX_DISKS

    def __post_init__(self) -> None:
        if not self.gamma > 1:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def canonical_instance(gamma: float) -> EdgeCoverInput:
    """Two unit disks resting on the x-axis at 0 and 2, concentric outcircles."""
    left = CoverPair(Disk.at(0.0, 1.0, 1.0), Disk.at(0.0, 1.0, gamma), gamma)
    right = CoverPair(Disk.at(2.0, 1.0, 1.0), Disk.at(2.0, 1.0, gamma), gamma)
    return EdgeCoverInput((Point2(0.0, 0.0), Point2(2.0, 0.0)), left, right, gamma)


class EdgeCovering:
    """Gap disks covering one segment, stored as flat arrays in a local frame.

    The local frame has its origin where the left outcircle leaves the
    segment, x running toward the right disk and y toward the disk centers.
    Node i sits at tangency x[i] with radius r[i]; its gap was bounded by
    left_bound[i] and right_bound[i] (node ids, or LEFT_BOUND / RIGHT_BOUND
    for the two boundary pairs).
    """

    def __init__(self, *, left: CoverPair, right: CoverPair, gamma: float,
                 frame: Isometry, bounds_local: Tuple[Tuple[float, float], Tuple[float, float]],
                 x: np.ndarray, r: np.ndarray, level: np.ndarray, parent: np.ndarray,
                 left_bound: np.ndarray, right_bound: np.ndarray, depth: int,
                 closed: bool, classification: TerminationClass, residual: float,
                 scaled_gap: float):
        self.left = left
        self.right = right
        self.gamma = gamma
        self.frame = frame
        self.bounds_local = bounds_local
        self.x = x
        self.r = r
        self.level = level
        self.parent = parent
        self.left_bound = left_bound
        self.right_bound = right_bound
        self.depth = depth
        self.closed = closed
        self.classification = classification
        self.residual = residual
        self.scaled_gap = scaled_gap

    @property
    def terminated(self) -> bool:
        # an already covered segment needs no recursion, whatever its region
        return self.closed and (self.n_gap_disks == 0 or self.classification.terminates)

    @property
    def n_gap_disks(self) -> int:
        return int(self.x.size)

    def __len__(self) -> int:
        return self.n_gap_disks + 2

    def level_counts(self) -> np.ndarray:
        return np.bincount(self.level, minlength=self.depth + 1)[1:]

    def children(self) -> Tuple[np.ndarray, np.ndarray]:
        """Left and right child ids per node (-1 where the subgap closed)."""
        n = self.n_gap_disks
        lc = np.full(n, -1, dtype=np.int64)
        rc = np.full(n, -1, dtype=np.int64)
        kids = np.nonzero(self.parent >= 0)[0]
        par = self.parent[kids]
        is_left = self.right_bound[kids] == par
        lc[par[is_left]] = kids[is_left]
        rc[par[~is_left]] = kids[~is_left]
        return lc, rc

    def local_arrays(self):
        """(x, y, r) of indisks and outcircles in the local frame."""
        g = self.gamma
        return (self.x, self.r, self.r), (self.x, (2.0 - g) * self.r, g * self.r)

    def world_arrays(self):
        (ix, iy, ir), (ox, oy, orad) = self.local_arrays()
        wix, wiy = self.frame.apply(ix, iy)
        wox, woy = self.frame.apply(ox, oy)
        return (wix, wiy, ir), (wox, woy, orad)

    def gap_pair(self, i: int) -> CoverPair:
        (ix, iy, ir), (ox, oy, orad) = self.world_arrays_at(i)
        return CoverPair(Disk.at(ix, iy, ir), Disk.at(ox, oy, orad), self.gamma)

    def world_arrays_at(self, i: int):
        x, r, g = float(self.x[i]), float(self.r[i]), self.gamma
        ix, iy = self.frame.apply(x, r)
        ox, oy = self.frame.apply(x, (2.0 - g) * r)
        return (ix, iy, r), (ox, oy, g * r)

    @property
    def pairs(self) -> Tuple[CoverPair, ...]:
        """Boundary pairs first, then gap pairs in node order."""
        return (self.left, self.right) + tuple(self.gap_pair(i) for i in range(self.n_gap_disks))

    @property
    def recursion(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.children()

    def transformed(self, iso: Isometry) -> EdgeCovering:
        """The same covering carried by a rigid motion. Node arrays are shared."""
        return EdgeCovering(
            left=iso.apply_pair(self.left), right=iso.apply_pair(self.right), gamma=self.gamma,
            frame=iso.compose(self.frame), bounds_local=self.bounds_local, x=self.x, r=self.r,
            level=self.level, parent=self.parent, left_bound=self.left_bound,
            right_bound=self.right_bound, depth=self.depth, closed=self.closed,
            classification=self.classification, residual=self.residual,
            scaled_gap=self.scaled_gap)


def _edge_frame(inp: EdgeCoverInput, tol: Tolerance):
    p0, p1 = inp.segment
    length = p0.distance(p1)
    if length == 0:
        raise ValueError("degenerate segment")
    ux, uy = (p1.x - p0.x) / length, (p1.y - p0.y) / length
    lc = inp.left.indisk.center
    side = ux * (lc.y - p0.y) - uy * (lc.x - p0.x)
    nx, ny = (-uy, ux) if side >= 0 else (uy, -ux)

    def local(p: Point2) -> Tuple[float, float]:
        dx, dy = p.x - p0.x, p.y - p0.y
        return dx * ux + dy * uy, dx * nx + dy * ny

    for pair, foot in ((inp.left, 0.0), (inp.right, length)):
        cx, cy = local(pair.indisk.center)
        rad = pair.indisk.radius
        if abs(cx - foot) > tol.scale(length) or abs(cy - rad) > tol.scale(rad):
            raise ValueError("boundary indisk is not tangent to the segment at its endpoint")
    ld, rd = inp.left.indisk, inp.right.indisk
    gap = ld.center.distance(rd.center) - (ld.radius + rd.radius)
    if abs(gap) > tol.scale(ld.radius + rd.radius):
        raise ValueError("boundary indisks are not externally tangent")
    return (ux, uy), (nx, ny), local, length


def _chord(cx: float, cy: float, rad: float) -> Tuple[float, float]:
    h2 = rad * rad - cy * cy
    if h2 < 0:
        raise ValueError("boundary outcircle does not reach the segment")
    h = math.sqrt(h2)
    return cx - h, cx + h


def cover_edge(inp: EdgeCoverInput, tol: Tolerance = DEFAULT_TOL) -> EdgeCovering:
    (ux, uy), (nx, ny), local, length = _edge_frame(inp, tol)
    g = inp.gamma
    s = math.sqrt(g - 1.0)
    # chords of the boundary outcircles, still measured from p0
    l_cut = _chord(*local(inp.left.outcircle.center), inp.left.outcircle.radius)[1]
    r_cut = _chord(*local(inp.right.outcircle.center), inp.right.outcircle.radius)[0]
    p0 = inp.segment[0]
    origin = (p0.x + l_cut * ux, p0.y + l_cut * uy)
    frame = Isometry((ux, nx, uy, ny), origin)

    rl, rr = inp.left.indisk.radius, inp.right.indisk.radius
    xl, xr = -l_cut, length - l_cut
    big_is_left = rl >= rr
    # scaled distance from the big disk's cut to the small disk's tangency
    scaled = xr / rr if big_is_left else r_cut / rl
    if scaled > 0:
        classification = classify(scaled, g)
    else:
        classification = TerminationClass("III", True, ())

    L = np.array([0.0])
    R = np.array([r_cut - l_cut])
    lx, lr_, rx, rr_ = (np.array([v]) for v in (xl, rl, xr, rr))
    lb = np.array([LEFT_BOUND], dtype=np.int64)
    rb = np.array([RIGHT_BOUND], dtype=np.int64)
    par = np.array([-1], dtype=np.int64)
    open_ = (R - L) > BOUNDARY_SLACK
    L, R, lx, lr_, rx, rr_, lb, rb, par = (a[open_] for a in (L, R, lx, lr_, rx, rr_, lb, rb, par))
    residual = float(np.max(R - L)) if L.size else float(r_cut - l_cut)

    chunks = {k: [] for k in ("x", "r", "level", "parent", "lb", "rb")}
    count = 0
    depth = 0
    while L.size and depth < inp.max_steps and count + L.size <= inp.max_disks:
        depth += 1
        ids = np.arange(count, count + L.size, dtype=np.int64)
        m = 0.5 * (L + R)
        r = np.minimum((m - lx) ** 2 / (4.0 * lr_), (m - rx) ** 2 / (4.0 * rr_))
        half = 2.0 * r * s
        for key, val in (("x", m), ("r", r), ("parent", par), ("lb", lb), ("rb", rb)):
            chunks[key].append(val)
        chunks["level"].append(np.full(L.size, depth, dtype=np.int16))
        count += L.size
        left_gap = (m - half) - L
        residual = float(np.max(left_gap))
        keep = left_gap > BOUNDARY_SLACK
        if not np.any(keep):
            L = L[:0]
            break
        L, R, lx, lr_, rx, rr_, lb, rb, m, r, half, ids = (
            a[keep] for a in (L, R, lx, lr_, rx, rr_, lb, rb, m, r, half, ids))
        L, R = np.concatenate([L, m + half]), np.concatenate([m - half, R])
        lx, rx = np.concatenate([lx, m]), np.concatenate([m, rx])
        lr_, rr_ = np.concatenate([lr_, r]), np.concatenate([r, rr_])
        lb, rb = np.concatenate([lb, ids]), np.concatenate([ids, rb])
        par = np.concatenate([ids, ids])

    def cat(key, dtype):
        return np.concatenate(chunks[key]).astype(dtype, copy=False) if chunks[key] else np.zeros(0, dtype)

    return EdgeCovering(
        left=inp.left, right=inp.right, gamma=g, frame=frame,
        bounds_local=((xl, rl), (xr, rr)),
        x=cat("x", float), r=cat("r", float), level=cat("level", np.int16),
        parent=cat("parent", np.int64), left_bound=cat("lb", np.int64),
        right_bound=cat("rb", np.int64), depth=depth, closed=(L.size == 0),
        classification=classification, residual=residual, scaled_gap=scaled)
