import math

import numpy as np
import pytest
from scipy.optimize import brentq

from circpart.bounds import gamma_theta_kgon
from circpart.construct import build_partition
from circpart.edgecover import (LEFT_BOUND, RIGHT_BOUND, EdgeCoverInput, F, F_prime, GapState,
                                canonical_instance, canonical_scaled_gap, classify, cover_edge,
                                delta, next_gap_state, steps_to_cover)
from circpart.fixedpoint import gamma_star, positive_fixed_points
from circpart.geom import CoverPair, Disk, Point2, is_externally_tangent


def test_delta_examples():
    assert delta(1, 1.25) == pytest.approx(1.0)
    assert delta(0.3, 1.0) == 0.0
    assert delta(2, 1.1134) == pytest.approx(4 * math.sqrt(0.1134))
    assert delta(2, 1.1134) == pytest.approx(1.346997, abs=1e-6)
    with pytest.raises(ValueError):
        delta(1, 0.9)


def test_next_state_example():
    nxt = next_gap_state(GapState.start(2.0, 1.0), 1.25)
    assert nxt.a == pytest.approx(0.5)
    assert nxt.r == pytest.approx(0.5625)
    assert nxt.step == 2
    assert nxt.a_scaled == pytest.approx(nxt.a / nxt.r)


def test_closed_gap_rejected():
    g = 1.25
    with pytest.raises(ValueError, match="already terminated"):
        next_gap_state(GapState.start(delta(1.0, g), 1.0), g)


def test_new_gap_disk_touches_old_one():
    rng = np.random.default_rng(3)
    for _ in range(200):
        g = rng.uniform(1.01, 1.4)
        r = rng.uniform(0.05, 2)
        a = delta(r, g) * rng.uniform(1.05, 6)
        s = GapState.start(a, r)
        n = next_gap_state(s, g)
        old, new = Disk.at(s.a, s.r, s.r), Disk.at(n.a, n.r, n.r)
        assert is_externally_tangent(old, new)


def test_map_examples():
    assert F(3.0, 1.25) == pytest.approx(1.0)
    assert F(2.0, 1.0) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        F(-2 * math.sqrt(0.25), 1.25)
    with pytest.raises(ValueError):
        F_prime(-2 * math.sqrt(0.25), 1.25)


def test_map_derivative_against_differences():
    h = 1e-6
    fd = (F(3 + h, 1.25) - F(3 - h, 1.25)) / (2 * h)
    # x = 3 is the peak of F at gamma = 1.25, so the slope there is zero
    assert F_prime(3.0, 1.25) == pytest.approx(fd, rel=1e-6, abs=1e-6)
    for x in (0.5, 1.7, 5.0, 12.0):
        fd = (F(x + h, 1.25) - F(x - h, 1.25)) / (2 * h)
        assert F_prime(x, 1.25) == pytest.approx(fd, rel=1e-6)
    peak = brentq(lambda x: F_prime(x, 1.2), 0.1, 10)
    assert abs(F_prime(peak, 1.2)) < 1e-9
    assert peak == pytest.approx(6 * math.sqrt(0.2), rel=1e-9)
    secant = (F(1.001, 1.2) - F(0.999, 1.2)) / 0.002
    assert np.sign(F_prime(1.0, 1.2)) == np.sign(secant)


def test_scaled_map_matches_unscaled_step():
    rng = np.random.default_rng(11)
    for _ in range(200):
        g = rng.uniform(1.01, 1.4)
        r = rng.uniform(0.01, 3)
        s = GapState.start(delta(r, g) * rng.uniform(1.1, 8), r)
        n = next_gap_state(s, g)
        assert F(s.a_scaled, g) == pytest.approx(n.a / n.r, rel=1e-9)


def iterate(x, g, n):
    for _ in range(n):
        x = F(x, g)
    return x


def test_classify_examples():
    assert classify(5.0, 1.2).region == "IV" and classify(5.0, 1.2).terminates
    a1, a2 = positive_fixed_points(1.05)
    c = classify(a1 + 1, 1.05)
    assert c.region == "I" and not c.terminates
    assert iterate(a1 + 1, 1.05, 10_000) == pytest.approx(a1, abs=1e-9)
    c = classify(a2 / 2, 1.05)
    assert c.region == "III" and c.terminates
    assert steps_to_cover(a2 / 2, 1.05) is not None
    assert classify(0.5 * (a1 + a2), 1.05).region == "II"
    with pytest.raises(ValueError):
        classify(1.0, 1.0)


def test_classify_boundary_band_is_terminating():
    g = gamma_star() - 5e-10
    c = classify(1.0, g)
    assert c.region == "IV" and c.terminates


def test_large_gap_lands_below_lower_fixed_point():
    # F(x) ~ 8/x for large x, so a big enough gap jumps straight under a2*
    g = 1.05
    a1, a2 = positive_fixed_points(g)
    x = 40.0
    assert F(x, g) < a2
    c = classify(x, g)
    assert c.region == "III" and c.terminates
    assert steps_to_cover(x, g) is not None


def test_steps_on_canonical_gap():
    assert steps_to_cover(canonical_scaled_gap(1.13), 1.13) == 1
    assert steps_to_cover(canonical_scaled_gap(1.12), 1.12) == 2
    assert steps_to_cover(2 * math.sqrt(0.2), 1.2) == 0
    assert steps_to_cover(5.0, 1.05) is None
    with pytest.raises(ValueError):
        steps_to_cover(1.0, 1.2, cap=0)


def test_fixed_points_are_fixed():
    for g in np.linspace(1.001, gamma_star() - 1e-6, 200):
        for x in positive_fixed_points(g):
            assert F(x, g) == pytest.approx(x, abs=1e-8)


def test_region_three_progress():
    rng = np.random.default_rng(5)
    cap = 10_000
    done = 0
    while done < 200:
        g = rng.uniform(1.01, gamma_star() - 1e-4)
        a1, a2 = positive_fixed_points(g)
        d = 2 * math.sqrt(g - 1)
        x0 = rng.uniform(d, a2 * (1 - 1e-3))
        steps = steps_to_cover(x0, g, cap)
        assert steps is not None
        xs = [x0]
        while xs[-1] > d + 1e-12:
            xs.append(F(xs[-1], g))
        drops = -np.diff(xs)
        assert len(drops) == steps
        if steps:
            assert drops.min() >= (x0 - d) / cap
        done += 1


# --------------------------------------------------------------- coverings

def pair_on_axis(x, r, g):
    return CoverPair(Disk.at(x, r, r), Disk.at(x, r, g * r), g)


def instance(rho, g, small_left=False, **kw):
    """Unit disk and a disk of radius rho, both on the x-axis and touching."""
    gap = 2 * math.sqrt(rho)
    if small_left:
        left, right = pair_on_axis(0, rho, g), pair_on_axis(gap, 1.0, g)
    else:
        left, right = pair_on_axis(0, 1.0, g), pair_on_axis(gap, rho, g)
    return EdgeCoverInput((Point2(0, 0), Point2(gap, 0)), left, right, g, **kw)


def neighbour_arrays(cov):
    (xl, rl), (xr, rr) = cov.bounds_local
    x = np.append(cov.x, [xr, xl])
    r = np.append(cov.r, [rr, rl])
    return x[cov.left_bound], r[cov.left_bound], x[cov.right_bound], r[cov.right_bound]


def test_square_gap_single_disk(square):
    cov = square.canonical_gap
    assert cov.depth == 1 and cov.n_gap_disks == 1 and cov.terminated


def test_pentagon_gap_depth(pentagon):
    cov = pentagon.canonical_gap
    assert cov.terminated
    assert cov.depth == 11 and pentagon.steps == 12
    assert cov.residual < 0


def test_canonical_instance_at_low_ratio_does_not_terminate():
    inp = canonical_instance(1.05)
    cov = cover_edge(EdgeCoverInput(inp.segment, inp.left, inp.right, 1.05, max_disks=1 << 14))
    assert not cov.terminated
    assert not cov.classification.terminates


def test_malformed_inputs():
    g = 1.2
    a, b = pair_on_axis(0, 1, g), pair_on_axis(3, 1, g)
    with pytest.raises(ValueError, match="externally tangent"):
        cover_edge(EdgeCoverInput((Point2(0, 0), Point2(3, 0)), a, b, g))
    with pytest.raises(ValueError, match="tangent to the segment"):
        cover_edge(EdgeCoverInput((Point2(0, 0), Point2(2.5, 0)), a, pair_on_axis(2, 1, g), g))


def touch_and_far(cov):
    """Tangency ratios (x - x')^2 / (4 r r') to the touched and the other neighbour."""
    xl, rl, xr, rr = neighbour_arrays(cov)
    tl = (cov.x - xl) ** 2 / (4 * cov.r * rl)
    tr = (cov.x - xr) ** 2 / (4 * cov.r * rr)
    touch_left = np.abs(tl - 1) <= np.abs(tr - 1)
    return (np.where(touch_left, tl, tr), np.where(touch_left, tr, tl),
            touch_left, rl <= rr)


def test_gap_disks_touch_one_neighbour_and_miss_the_other():
    rng = np.random.default_rng(2024)
    done = 0
    while done < 1000:
        g = rng.uniform(1.02, 1.4)
        inp = instance(rng.uniform(0.02, 1.0), g, small_left=bool(rng.integers(2)),
                       max_steps=10, max_disks=1 << 10)
        cov = cover_edge(inp)
        if not cov.classification.terminates:
            continue
        done += 1
        if cov.n_gap_disks:
            touch, far, _, _ = touch_and_far(cov)
            assert np.allclose(touch, 1.0, atol=1e-8)
            assert np.all(far >= 1.0 - 1e-8)


def test_polygon_gap_disks_touch_the_smaller_neighbour():
    from circpart.bounds import gamma_one
    from circpart.construct import optimal_gamma
    rng = np.random.default_rng(77)
    # From k = 9 on the larger neighbour is sometimes reached first, so the
    # claim is checked where it holds; the cover itself takes the minimum.
    lows = {k: (gamma_theta_kgon(k) if k <= 5 else optimal_gamma(k)) for k in range(4, 9)}
    done = 0
    while done < 1000:
        k = int(rng.integers(4, 9))
        g = rng.uniform(lows[k], gamma_one(k) - 1e-6)
        p = build_partition(k, g, max_disks=1 << 9)
        cov = p.canonical_gap
        if not cov.n_gap_disks:
            continue
        done += 1
        touch, far, touch_left, small_left = touch_and_far(cov)
        assert np.allclose(touch, 1.0, atol=1e-8)
        assert np.all(far >= 1.0 - 1e-8)
        assert np.array_equal(touch_left, small_left)


def test_larger_neighbour_can_win_for_many_sided_polygons():
    from circpart.construct import optimal_gamma
    cov = build_partition(10, optimal_gamma(10) + 1e-4, max_disks=1 << 9).canonical_gap
    touch, far, touch_left, small_left = touch_and_far(cov)
    assert np.allclose(touch, 1.0, atol=1e-8) and np.all(far >= 1 - 1e-8)
    assert not np.array_equal(touch_left, small_left)


def test_scaled_and_unscaled_trajectories_agree():
    rng = np.random.default_rng(9)
    for _ in range(100):
        g = rng.uniform(1.01, 1.1)
        a1, a2 = positive_fixed_points(g)
        r = rng.uniform(0.1, 2)
        s = GapState.start(r * rng.uniform(a2 * 1.001, a1), r)
        x = s.a_scaled
        for _ in range(50):
            s = next_gap_state(s, g)
            x = F(x, g)
            assert s.a_scaled == pytest.approx(s.a / s.r, rel=1e-12)
            assert x == pytest.approx(s.a / s.r, rel=1e-9)


def chord_cover(cov, samples):
    (ix, iy, ir), (ox, oy, orad) = cov.local_arrays()
    h = np.sqrt(orad ** 2 - oy ** 2)
    lo, hi = ox - h, ox + h
    inv = cov.frame.inverse()
    for pair in (cov.left, cov.right):
        cx, cy = inv.apply(pair.outcircle.center.x, pair.outcircle.center.y)
        hh = math.sqrt(pair.outcircle.radius ** 2 - cy ** 2)
        lo, hi = np.append(lo, cx - hh), np.append(hi, cx + hh)
    order = np.argsort(lo)
    lo, reach = lo[order], np.maximum.accumulate(hi[order])
    k = np.searchsorted(lo, samples, "right") - 1
    return (k >= 0) & (reach[np.maximum(k, 0)] >= samples - 1e-12)


@pytest.mark.parametrize("k", [4, 5])
def test_terminated_cover_covers_segment(k):
    from circpart.verify import _FamilyIndex, _tangent_line_violations
    p = build_partition(k, gamma_theta_kgon(k))
    cov = p.canonical_gap
    (xl, _), (xr, _) = cov.bounds_local
    pts = np.linspace(xl, xr, 10_000)
    assert chord_cover(cov, pts).all()
    fam = p.families()[2]
    assert _tangent_line_violations(_FamilyIndex(fam), p.canonical_gap and __import__(
        "circpart.geom", fromlist=["DEFAULT_TOL"]).DEFAULT_TOL) == []
    xl_, rl, xr_, rr = neighbour_arrays(cov)
    assert np.all((cov.x - xl_) ** 2 >= 4 * cov.r * rl * (1 - 1e-9))
    assert np.all((cov.x - xr_) ** 2 >= 4 * cov.r * rr * (1 - 1e-9))


def test_subtrees_have_equal_shape(pentagon):
    cov = pentagon.canonical_gap
    lc, rc = cov.children()

    def height(i):
        if i < 0:
            return 0
        return 1 + max(height(lc[i]), height(rc[i]))

    for node in range(min(cov.n_gap_disks, 63)):
        if lc[node] >= 0 or rc[node] >= 0:
            assert height(lc[node]) == height(rc[node])


def test_equal_disks_give_mirror_image_subtrees():
    g = 1.16
    cov = cover_edge(canonical_instance(g))
    assert cov.terminated and cov.depth >= 2
    (xl, _), (xr, _) = cov.bounds_local
    mid = 0.5 * (xl + xr)
    lc, rc = cov.children()
    left_x = np.sort(cov.x[cov.x < mid - 1e-12])
    right_x = np.sort(cov.x[cov.x > mid + 1e-12])
    assert np.allclose(left_x, np.sort(2 * mid - right_x), atol=1e-12)
    left_r = np.sort(cov.r[cov.x < mid - 1e-12])
    right_r = np.sort(cov.r[cov.x > mid + 1e-12])
    assert np.allclose(left_r, right_r, rtol=1e-9)
