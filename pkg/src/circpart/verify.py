"""Independent checks on partitions: sampled coverage, indisk disjointness,
apex coverage inside gap recursions, and piece growth on a grid."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.stats import qmc

from .construct import DiskFamily
from .edgecover import LEFT_BOUND, RIGHT_BOUND, EdgeCovering
from .geom import DEFAULT_TOL, CoverPair, Isometry, Point2, Tolerance, circle_circle_intersection
from .parallel import ordered_map

BUCKET_RATIO = 16.0
PAIR_CHUNK = 4_000_000
WORST_POINT_LIMIT = 256
GROW_PIECE_LIMIT = 250_000


@dataclass
class CoverageReport:
    samples_total: int
    samples_uncovered: int
    worst_point: Optional[Point2]
    disjointness_violations: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.samples_uncovered == 0 and not self.disjointness_violations


@dataclass
class PieceGrid:
    resolution: float
    labels: np.ndarray
    bounds: Tuple[float, float, float, float]
    rounds: int = 0

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        x0, y0, _, _ = self.bounds
        ny, nx = self.labels.shape
        xs = x0 + (np.arange(nx) + 0.5) * self.resolution
        ys = y0 + (np.arange(ny) + 0.5) * self.resolution
        return np.meshgrid(xs, ys)

    def cell_of(self, x: float, y: float) -> Tuple[int, int]:
        x0, y0, _, _ = self.bounds
        return int((y - y0) // self.resolution), int((x - x0) // self.resolution)

    def piece_ids(self) -> np.ndarray:
        ids = np.unique(self.labels)
        return ids[ids >= 0]

    def components(self) -> Dict[int, int]:
        """Number of 4-connected components per piece id."""
        out: Dict[int, int] = {}
        objs = ndimage.find_objects(self.labels + 1)
        for pid, sl in enumerate(objs):
            if sl is None:
                continue
            _, n = ndimage.label(self.labels[sl] == pid)
            out[pid] = n
        return out

    @property
    def unlabeled_inside(self) -> int:
        return int(np.sum(self.labels == UNASSIGNED))


UNASSIGNED = -2


# ---------------------------------------------------------------- indexing

class _Buckets:
    """Disks grouped by radius scale, each group sorted by x."""

    def __init__(self, x: np.ndarray, y: np.ndarray, r: np.ndarray):
        key = np.floor(np.log(r) / math.log(BUCKET_RATIO)).astype(np.int64)
        self.groups = []
        for b in np.unique(key)[::-1]:
            sel = np.nonzero(key == b)[0]
            order = sel[np.argsort(x[sel], kind="stable")]
            self.groups.append((order, x[order], y[order], r[order], float(r[order].max())))


def _window_pairs(xs: np.ndarray, qx: np.ndarray, half: np.ndarray):
    """Yield (query index, member index) chunks with |xs[m] - qx[q]| <= half[q]."""
    lo = np.searchsorted(xs, qx - half, "left")
    hi = np.searchsorted(xs, qx + half, "right")
    cnt = hi - lo
    csum = np.cumsum(cnt)
    start = 0
    while start < qx.size:
        base = csum[start - 1] if start else 0
        stop = int(np.searchsorted(csum, base + PAIR_CHUNK, "right"))
        stop = max(stop, start + 1)
        c = cnt[start:stop]
        total = int(c.sum())
        if total:
            q = np.repeat(np.arange(start, stop), c)
            offs = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            yield q, np.repeat(lo[start:stop], c) + offs
        start = stop


def _bbox(x, y, r) -> Tuple[float, float, float, float]:
    return float(np.min(x - r)), float(np.min(y - r)), float(np.max(x + r)), float(np.max(y + r))


def _world_bbox(box, t: Isometry):
    x0, y0, x1, y1 = box
    xs, ys = t.apply(np.array([x0, x1, x0, x1]), np.array([y0, y0, y1, y1]))
    return xs.min(), ys.min(), xs.max(), ys.max()


def _boxes_meet(a, b) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


class _FamilyIndex:
    def __init__(self, fam: DiskFamily):
        self.fam = fam
        self.inner = _Buckets(fam.in_x, fam.in_y, fam.in_r)
        self.outer = _Buckets(fam.out_x, fam.out_y, fam.out_r)
        self.in_box = _bbox(fam.in_x, fam.in_y, fam.in_r)
        self.out_box = _bbox(fam.out_x, fam.out_y, fam.out_r)
        self.inv = [t.inverse() for t in fam.transforms]

    def gid(self, copy: int, i: np.ndarray) -> np.ndarray:
        return self.fam.id_offset + copy * self.fam.size + i


# ---------------------------------------------------------------- coverage

def _covered_by(index: _FamilyIndex, px: np.ndarray, py: np.ndarray, tol: Tolerance) -> np.ndarray:
    hit = np.zeros(px.size, dtype=bool)
    for order, xs, ys, rs, rmax in index.outer.groups:
        todo = np.nonzero(~hit)[0]
        if not todo.size:
            break
        qx, qy = px[todo], py[todo]
        for q, m in _window_pairs(xs, qx, np.full(qx.size, rmax)):
            d2 = (xs[m] - qx[q]) ** 2 + (ys[m] - qy[q]) ** 2
            lim = rs[m] + tol.abs + tol.rel * rs[m]
            ok = d2 <= lim * lim
            hit[todo[q[ok]]] = True
    return hit


def _deficit(index: _FamilyIndex, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    out = np.full(px.size, np.inf)
    for copy, inv in enumerate(index.inv):
        lx, ly = inv.apply(px, py)
        for _, xs, ys, rs, _ in index.outer.groups:
            d = np.sqrt((xs[None, :] - lx[:, None]) ** 2 + (ys[None, :] - ly[:, None]) ** 2) - rs[None, :]
            out = np.minimum(out, d.min(axis=1))
    return out


def sample_polygon(frame, n: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    """n scrambled-Halton points inside the polygon, reproducible from seed."""
    v = frame.vertex_array()
    lo, hi = v.min(axis=0), v.max(axis=0)
    eng = qmc.Halton(d=2, scramble=True, seed=seed)
    xs, ys, have = [], [], 0
    while have < n:
        u = qmc.scale(eng.random(max(2 * (n - have), 1024)), lo, hi)
        keep = frame.contains(u[:, 0], u[:, 1])
        xs.append(u[keep, 0])
        ys.append(u[keep, 1])
        have += int(keep.sum())
    return np.concatenate(xs)[:n], np.concatenate(ys)[:n]


def _uncovered(indexes: Sequence[_FamilyIndex], px, py, tol: Tolerance) -> np.ndarray:
    left = np.ones(px.size, dtype=bool)
    for idx in indexes:
        for copy, inv in enumerate(idx.inv):
            cand = np.nonzero(left)[0]
            if not cand.size:
                return left
            lx, ly = inv.apply(px[cand], py[cand])
            x0, y0, x1, y1 = idx.out_box
            near = (lx >= x0) & (lx <= x1) & (ly >= y0) & (ly <= y1)
            if not near.any():
                continue
            sub = cand[near]
            hit = _covered_by(idx, lx[near], ly[near], tol)
            left[sub[hit]] = False
    return left


# ------------------------------------------------------------ disjointness

def _tangent_line_violations(index: _FamilyIndex, tol: Tolerance) -> List[Tuple[int, int]]:
    """Pairs among disks resting on one line whose interiors meet.

    Two such disks are interior-disjoint iff (x1 - x2)^2 >= 4 r1 r2, which
    avoids the cancellation in the center-distance test at tiny radii.
    """
    bad: List[Tuple[int, int]] = []
    groups = index.inner.groups
    for b, (order_b, xb, _, rb, _) in enumerate(groups):
        for order_a, xa, _, ra, rmax_a in groups[: b + 1]:
            half = 2.0 * np.sqrt(rmax_a * rb)
            for q, m in _window_pairs(xa, xb, half):
                same = order_a[m] == order_b[q]
                dx = xa[m] - xb[q]
                prod = 4.0 * ra[m] * rb[q]
                hit = ~same & (dx * dx < prod * (1.0 - 2.0 * tol.rel))
                if hit.any():
                    i, j = order_a[m[hit]], order_b[q[hit]]
                    bad.extend(zip(np.minimum(i, j).tolist(), np.maximum(i, j).tolist()))
    return sorted(set(bad))


def _general_violations(target: _FamilyIndex, qx, qy, qr, tol: Tolerance) -> List[Tuple[int, int]]:
    """(query index, target index) pairs of overlapping interiors."""
    bad: List[Tuple[int, int]] = []
    for order, xs, ys, rs, rmax in target.inner.groups:
        for q, m in _window_pairs(xs, qx, qr + rmax):
            d2 = (xs[m] - qx[q]) ** 2 + (ys[m] - qy[q]) ** 2
            reach = rs[m] + qr[q]
            lim = reach - (tol.abs + tol.rel * reach)
            hit = d2 < lim * lim
            if hit.any():
                bad.extend(zip(q[hit].tolist(), order[m[hit]].tolist()))
    return bad


def _self_violations(index: _FamilyIndex, tol: Tolerance) -> List[Tuple[int, int]]:
    if index.fam.size < 2:
        return []
    if index.fam.line_tangent:
        return _tangent_line_violations(index, tol)
    f = index.fam
    pairs = _general_violations(index, f.in_x, f.in_y, f.in_r, tol)
    return sorted({(min(i, j), max(i, j)) for i, j in pairs if i != j})


def disjointness_violations(families: Sequence[DiskFamily], tol: Tolerance = DEFAULT_TOL) -> List[Tuple[int, int]]:
    indexes = [_FamilyIndex(f) for f in families]
    bad = set()
    for idx in indexes:
        # rigid copies of a family share its internal geometry
        for i, j in _self_violations(idx, tol):
            for copy in range(len(idx.fam.transforms)):
                bad.add((int(idx.gid(copy, i)), int(idx.gid(copy, j))))
    placed = [(idx, c, _world_bbox(idx.in_box, t))
              for idx in indexes for c, t in enumerate(idx.fam.transforms)]
    for a in range(len(placed)):
        for b in range(a + 1, len(placed)):
            ia, ca, boxa = placed[a]
            ib, cb, boxb = placed[b]
            if not _boxes_meet(boxa, boxb):
                continue
            # carry the smaller family into the larger one's local frame
            if ia.fam.size > ib.fam.size:
                ia, ca, ib, cb = ib, cb, ia, ca
            move = ib.inv[cb].compose(ia.fam.transforms[ca])
            qx, qy = move.apply(ia.fam.in_x, ia.fam.in_y)
            for i, j in _general_violations(ib, np.asarray(qx, float), np.asarray(qy, float), ia.fam.in_r, tol):
                u, v = int(ia.gid(ca, i)), int(ib.gid(cb, j))
                bad.add((min(u, v), max(u, v)))
    return sorted(bad)


# ------------------------------------------------------------ public checks

def check_covering(partition, n_samples: int = 100_000, seed: int = 0,
                   tol: Tolerance = DEFAULT_TOL) -> CoverageReport:
    """Sample the polygon, test every point against the outcircles, and check
    indisk interiors pairwise."""
    if not partition.terminated:
        raise ValueError("partition did not terminate; nothing to verify")
    families = partition.families()
    indexes = [_FamilyIndex(f) for f in families]
    px, py = sample_polygon(partition.frame, n_samples, seed)
    chunks = np.array_split(np.arange(px.size), max(1, min(16, px.size // 4096)))
    masks = ordered_map(lambda ix: _uncovered(indexes, px[ix], py[ix], tol), chunks)
    left = np.concatenate(masks) if masks else np.zeros(0, bool)
    worst = None
    miss = np.nonzero(left)[0]
    if miss.size:
        probe = miss[:WORST_POINT_LIMIT]
        deficit = np.full(probe.size, np.inf)
        for idx in indexes:
            deficit = np.minimum(deficit, _deficit(idx, px[probe], py[probe]))
        w = probe[int(np.argmax(deficit))]
        worst = Point2(float(px[w]), float(py[w]))
    return CoverageReport(int(px.size), int(miss.size), worst, disjointness_violations(families, tol))


def apex_point(left: CoverPair, right: CoverPair,
               line: Tuple[Point2, Point2] = (Point2(0.0, 0.0), Point2(1.0, 0.0))) -> Point2:
    """Meeting point of two outcircles nearer to the line through `line`."""
    pts = circle_circle_intersection(left.outcircle, right.outcircle)
    if not pts:
        raise ValueError("no apex: outcircles disjoint")
    (x0, y0), (x1, y1) = (line[0].x, line[0].y), (line[1].x, line[1].y)
    ln = math.hypot(x1 - x0, y1 - y0)

    def dist(p: Point2) -> float:
        return abs((x1 - x0) * (p.y - y0) - (y1 - y0) * (p.x - x0)) / ln

    return min(pts, key=lambda p: (dist(p), p.y, p.x))


@dataclass
class ApexReport:
    checked: int
    skipped: int
    failures: List[int]


def apex_coverage(cover: EdgeCovering, min_radius: float = 1e-9,
                  tol: Tolerance = DEFAULT_TOL) -> ApexReport:
    """For each gap node, is the lower meeting point of its two bounding
    outcircles inside the node's indisk?

    Nodes with radius below min_radius are skipped: there the meeting point of
    two nearly tangent circles is not resolved in double precision.
    """
    g = cover.gamma
    n = cover.n_gap_disks
    if not n:
        return ApexReport(0, 0, [])
    (_, (xl, rl)), (_, (xr, rr)) = (None, cover.bounds_local[0]), (None, cover.bounds_local[1])
    inv = cover.frame.inverse()

    def boundary_out(pair: CoverPair):
        cx, cy = inv.apply(pair.outcircle.center.x, pair.outcircle.center.y)
        return cx, cy, pair.outcircle.radius

    ox = np.append(cover.x, [0.0, 0.0])
    oy = np.append((2.0 - g) * cover.r, [0.0, 0.0])
    orr = np.append(g * cover.r, [0.0, 0.0])
    for slot, pair in ((LEFT_BOUND, cover.left), (RIGHT_BOUND, cover.right)):
        ox[slot], oy[slot], orr[slot] = boundary_out(pair)
    lb, rb = cover.left_bound, cover.right_bound
    ax, ay, ar = ox[lb], oy[lb], orr[lb]
    bx, by, br = ox[rb], oy[rb], orr[rb]
    dx, dy = bx - ax, by - ay
    d = np.hypot(dx, dy)
    along = (ar * ar - br * br + d * d) / (2.0 * d)
    h = np.sqrt(np.maximum(ar * ar - along * along, 0.0))
    fx, fy = ax + along * dx / d, ay + along * dy / d
    p1 = (fx - h * dy / d, fy + h * dx / d)
    p2 = (fx + h * dy / d, fy - h * dx / d)
    low = np.abs(p1[1]) <= np.abs(p2[1])
    tx, ty = np.where(low, p1[0], p2[0]), np.where(low, p1[1], p2[1])
    excess = np.hypot(tx - cover.x, ty - cover.r) - cover.r
    use = cover.r >= min_radius
    fail = np.nonzero(use & (excess > tol.rel * cover.r))[0]
    return ApexReport(int(use.sum()), int((~use).sum()), fail.tolist())


def grow_pieces(partition, resolution: float = 1.0 / 512, tol: Tolerance = DEFAULT_TOL) -> PieceGrid:
    """Label grid cells by piece: seed with uniquely covered cells, then let
    every piece expand one 4-neighbour ring per round inside its outcircle.
    Ties go to the lowest piece id."""
    if not partition.terminated:
        raise ValueError("partition did not terminate")
    if partition.piece_count > GROW_PIECE_LIMIT:
        raise ValueError(f"too many pieces for grid growth ({partition.piece_count})")
    flat = partition.flat()
    frame = partition.frame
    v = frame.vertex_array()
    x0, y0 = v.min(axis=0)
    x1, y1 = v.max(axis=0)
    nx = int(math.ceil((x1 - x0) / resolution))
    ny = int(math.ceil((y1 - y0) / resolution))
    xs = x0 + (np.arange(nx) + 0.5) * resolution
    ys = y0 + (np.arange(ny) + 0.5) * resolution
    X, Y = np.meshgrid(xs, ys)
    inside = frame.contains(X, Y)

    count = np.zeros((ny, nx), dtype=np.int32)
    owner = np.zeros((ny, nx), dtype=np.int64)
    for pid in range(len(flat)):
        cx, cy, r = flat.out_x[pid], flat.out_y[pid], flat.out_r[pid]
        lim = r + tol.scale(r)
        i0 = max(int((cx - lim - x0) / resolution) - 1, 0)
        i1 = min(int((cx + lim - x0) / resolution) + 2, nx)
        j0 = max(int((cy - lim - y0) / resolution) - 1, 0)
        j1 = min(int((cy + lim - y0) / resolution) + 2, ny)
        if i0 >= i1 or j0 >= j1:
            continue
        sub = (X[j0:j1, i0:i1] - cx) ** 2 + (Y[j0:j1, i0:i1] - cy) ** 2 <= lim * lim
        count[j0:j1, i0:i1] += sub
        owner[j0:j1, i0:i1] += sub * pid

    labels = np.full((ny, nx), -1, dtype=np.int64)
    labels[inside] = UNASSIGNED
    seed = inside & (count == 1)
    labels[seed] = owner[seed]
    ox, oy, orad = flat.out_x, flat.out_y, flat.out_r
    slack = tol.abs + tol.rel * orad
    rounds = _grow(labels, X.ravel(), Y.ravel(), ox, oy, orad + slack)
    grid = PieceGrid(resolution, labels, (float(x0), float(y0), float(x0 + nx * resolution),
                                          float(y0 + ny * resolution)), rounds)
    if grid.unlabeled_inside:
        raise ValueError(f"growth stalled: {grid.unlabeled_inside} cells unlabeled")
    return grid


def _grow(labels: np.ndarray, cx: np.ndarray, cy: np.ndarray, ox, oy, reach) -> int:
    """Synchronous multi-source growth in place; returns the number of rounds."""
    ny, nx = labels.shape
    flat = labels.ravel()
    big = np.iinfo(np.int64).max

    def neighbours(cells: np.ndarray) -> np.ndarray:
        j, i = np.divmod(cells, nx)
        parts = [cells[j > 0] - nx, cells[j < ny - 1] + nx, cells[i > 0] - 1, cells[i < nx - 1] + 1]
        return np.unique(np.concatenate(parts))

    cand = neighbours(np.nonzero(flat >= 0)[0])
    rounds = 0
    while True:
        cand = cand[flat[cand] == UNASSIGNED]
        if not cand.size:
            return rounds
        j, i = np.divmod(cand, nx)
        best = np.full(cand.size, big)
        for ok_dir, step in ((j > 0, -nx), (j < ny - 1, nx), (i > 0, -1), (i < nx - 1, 1)):
            row = np.where(ok_dir, flat[np.where(ok_dir, cand + step, cand)], -1)
            ok = row >= 0
            rid = np.where(ok, row, 0)
            d2 = (cx[cand] - ox[rid]) ** 2 + (cy[cand] - oy[rid]) ** 2
            ok &= d2 <= reach[rid] ** 2
            best = np.where(ok & (row < best), row, best)
        claim = best != big
        if not claim.any():
            return rounds
        flat[cand[claim]] = best[claim]
        rounds += 1
        cand = neighbours(cand[claim])


def indisk_center_cells_ok(partition, grid: PieceGrid) -> List[int]:
    """Piece ids whose indisk center cell carries a different label."""
    flat = partition.flat()
    wrong = []
    for pid in range(len(flat)):
        j, i = grid.cell_of(flat.in_x[pid], flat.in_y[pid])
        if grid.labels[j, i] != pid:
            wrong.append(pid)
    return wrong
