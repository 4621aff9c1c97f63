import math

import numpy as np
import pytest
from scipy.optimize import brentq

from circpart.edgecover import F
from circpart.fixedpoint import (GAMMA_STAR_OUTER, cubic_residual, discriminant, fixed_points,
                                 gamma_star, positive_fixed_points)


def numpy_roots(g):
    s = math.sqrt(g - 1)
    r = np.roots([1, 4 * s, 4 * (g - 3), 16 * s])
    return np.sort(r[np.abs(r.imag) < 1e-7].real)[::-1]


def test_discriminant_values():
    assert discriminant(1.0) == pytest.approx(-512 / 27)
    assert discriminant(2.0) == pytest.approx(64 * 59 / 27)
    assert discriminant(2.0) == pytest.approx(139.85, abs=5e-3)
    assert discriminant(gamma_star()) == pytest.approx(0, abs=1e-9)


def test_discriminant_matches_depressed_cubic():
    # q^2/4 + p^3/27 of the depressed form should equal the closed form
    for g in np.linspace(1, 3, 21):
        s = math.sqrt(g - 1)
        b, c, d = 4 * s, 4 * (g - 3), 16 * s
        p = c - b * b / 3
        q = 2 * b ** 3 / 27 - b * c / 3 + d
        assert q * q / 4 + p ** 3 / 27 == pytest.approx(discriminant(g), rel=1e-9, abs=1e-9)


def test_gamma_star_closed_form_and_bisection():
    assert round(gamma_star(), 5) == 1.1134
    root = brentq(discriminant, 1.0, 1.5, xtol=1e-15)
    assert abs(root - gamma_star()) < 1e-10
    assert GAMMA_STAR_OUTER == pytest.approx(18.6, abs=0.1)
    assert discriminant(GAMMA_STAR_OUTER) == pytest.approx(0, abs=1e-8)


def test_three_roots_at_low_ratio():
    g = 1.05
    roots = fixed_points(g).roots
    assert len(roots) == 3
    assert np.allclose(roots, numpy_roots(g), atol=1e-10)
    for x in positive_fixed_points(g):
        assert F(x, g) == pytest.approx(x, abs=1e-10)


def test_double_root_at_critical_ratio():
    a1, a2 = positive_fixed_points(gamma_star())
    assert abs(a1 - a2) < 1e-5


def test_single_root_above_critical_ratio():
    r = fixed_points(1.3)
    assert len(r.roots) == 1 and r.roots[0] < 0
    assert r.roots[0] == pytest.approx(numpy_roots(1.3)[0], abs=1e-10)


def test_domain():
    for bad in (1.0, 0.5):
        with pytest.raises(ValueError):
            fixed_points(bad)


def test_residuals_on_random_ratios():
    rng = np.random.default_rng(7)
    for g in rng.uniform(1 + 1e-9, 1.5, 1000):
        for x in fixed_points(g).roots:
            assert abs(cubic_residual(x, g)) <= 1e-8 * max(1.0, abs(x) ** 3)


def test_root_count_switches_at_critical_ratio():
    grid = np.linspace(1.0005, 1.3, 10_000)
    counts = np.array([len(fixed_points(g).roots) for g in grid])
    switch = int(np.argmax(counts == 1))
    assert np.all(counts[:switch] == 3) and np.all(counts[switch:] == 1)
    assert grid[switch - 1] <= gamma_star() <= grid[switch]


def test_root_ordering_and_finish_line():
    for g in np.linspace(1.0005, gamma_star() - 1e-6, 2000):
        a1, a2 = positive_fixed_points(g)
        assert a1 > a2 > 2 * math.sqrt(g - 1)


def test_loci_monotone_and_meeting():
    grid = np.linspace(1.001, gamma_star() - 1e-9, 500)
    a1 = np.array([positive_fixed_points(g)[0] for g in grid])
    a2 = np.array([positive_fixed_points(g)[1] for g in grid])
    assert np.all(np.diff(a1) < 0) and np.all(np.diff(a2) > 0)
    assert a1[-1] - a2[-1] < 1e-3
