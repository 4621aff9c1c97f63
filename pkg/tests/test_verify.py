import math

import numpy as np
import pytest

from circpart.construct import FlatDisks
from circpart.document import FlatPartition
from circpart.edgecover import canonical_instance, cover_edge
from circpart.geom import CoverPair, Disk, Point2
from circpart.verify import (apex_coverage, apex_point, check_covering, disjointness_violations,
                             grow_pieces, indisk_center_cells_ok, sample_polygon)


def test_apex_point_examples():
    g = 1.2
    left = CoverPair(Disk.at(0, 1, 1), Disk.at(0, 2 - g, g), g)
    right = CoverPair(Disk.at(2, 1, 1), Disk.at(2, 2 - g, g), g)
    p = apex_point(left, right)
    # symmetric instance: apex on the bisector, below the other meeting point
    assert p.x == pytest.approx(1.0)
    assert p.y == pytest.approx((2 - g) - math.sqrt(g * g - 1))
    with pytest.raises(ValueError):
        far = CoverPair(Disk.at(9, 1, 1), Disk.at(9, 2 - g, g), g)
        apex_point(left, far)


def test_apex_covered_on_pentagon(pentagon):
    rep = apex_coverage(pentagon.canonical_gap, min_radius=0.0)
    assert rep.checked == pentagon.canonical_gap.n_gap_disks
    assert rep.failures == []


def test_apex_covered_on_hexagon(hexagon):
    rep = apex_coverage(hexagon.canonical_gap)
    assert rep.checked > 1000
    assert rep.failures == []


def test_apex_covered_on_equal_disks():
    c = cover_edge(canonical_instance(1.12))
    rep = apex_coverage(c, min_radius=0.0)
    assert rep.checked == c.n_gap_disks and rep.failures == []


def test_samples_stay_inside():
    from circpart.construct import KgonFrame
    f = KgonFrame(5)
    x, y = sample_polygon(f, 5000, seed=2)
    assert x.size == 5000
    assert f.contains(x, y).all()
    x2, y2 = sample_polygon(f, 5000, seed=2)
    assert np.array_equal(x, x2) and np.array_equal(y, y2)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_coverage_other_seeds(pentagon, seed):
    rep = check_covering(pentagon, 20_000, seed=seed)
    assert rep.samples_uncovered == 0 and rep.ok


def _scaled(flat: FlatDisks, index: int, factor: float) -> FlatDisks:
    out_r = flat.out_r.copy()
    out_r[index] *= factor
    return FlatDisks(flat.in_x, flat.in_y, flat.in_r, flat.out_x, flat.out_y, out_r,
                     roles=flat.roles, parent=flat.parent)


# triangle outcircles overlap heavily; only a corner one, pinned at its vertex, leaves a hole
@pytest.mark.parametrize("fixture, index", [("triangle", 3), ("square", 0)])
def test_shrunk_outcircle_detected(request, fixture, index):
    p = request.getfixturevalue(fixture)
    broken = FlatPartition(p.k, p.gamma, _scaled(p.flat(), index, 0.95))
    rep = check_covering(broken, 20_000)
    assert rep.samples_uncovered > 0
    assert rep.worst_point is not None
    assert broken.frame.contains(np.array(rep.worst_point.x), np.array(rep.worst_point.y))


def test_overlap_detected(square):
    f = square.flat()
    in_r = f.in_r.copy()
    in_r[0] *= 1.01
    bad = FlatDisks(f.in_x, f.in_y, in_r, f.out_x, f.out_y, f.out_r, roles=f.roles, parent=f.parent)
    part = FlatPartition(4, square.gamma, bad)
    viol = disjointness_violations(part.families())
    assert viol and all(0 in pair for pair in viol)


def test_structured_and_flat_checks_agree(pentagon):
    flat = FlatPartition(5, pentagon.gamma, pentagon.flat())
    assert disjointness_violations(flat.families()) == []
    assert disjointness_violations(pentagon.families()) == []


@pytest.mark.parametrize("fixture, pieces", [("triangle", 4), ("square", 13)])
def test_grown_pieces(request, fixture, pieces):
    p = request.getfixturevalue(fixture)
    grid = grow_pieces(p, 1 / 256)
    assert grid.unlabeled_inside == 0
    comps = grid.components()
    assert len(comps) == pieces
    assert all(n == 1 for n in comps.values())
    assert indisk_center_cells_ok(p, grid) == []
    flat = p.flat()
    X, Y = grid.cell_centers()
    lab = grid.labels
    ok = lab >= 0
    ids = lab[ok]
    d = np.hypot(X[ok] - flat.out_x[ids], Y[ok] - flat.out_y[ids])
    assert np.all(d <= flat.out_r[ids] * (1 + 1e-9) + 1e-12)
    # outside the polygon stays unlabeled
    assert not np.any(ok & ~p.frame.contains(X, Y))


def test_growth_rejects_nonterminated():
    part = FlatPartition(4, 1.3, FlatDisks(*(np.zeros(1) for _ in range(6)),
                                           roles=np.array(["central"]), parent=np.array([-1])),
                         terminated=False)
    with pytest.raises(ValueError, match="terminate"):
        grow_pieces(part)
