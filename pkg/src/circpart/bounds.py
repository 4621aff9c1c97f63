"""Closed-form aspect-ratio bounds for regular polygons and single corners."""
from __future__ import annotations

import math


def gamma_one(k: int) -> float:
    """Aspect ratio of the regular k-gon taken as one piece: 1/cos(pi/k)."""
    if int(k) != k or k < 3:
        raise ValueError(f"k must be an integer >= 3, got {k}")
    return 1.0 / math.cos(math.pi / k)


def gamma_theta(theta: float) -> float:
    """Lower bound (1 + csc(theta/2))/2 forced by a convex corner of angle theta."""
    if not 0.0 < theta < math.pi:
        raise ValueError(f"corner angle must lie in (0, pi), got {theta}")
    return 0.5 * (1.0 + 1.0 / math.sin(0.5 * theta))


def interior_angle(k: int) -> float:
    if int(k) != k or k < 3:
        raise ValueError(f"k must be an integer >= 3, got {k}")
    return (k - 2) * math.pi / k


def gamma_theta_kgon(k: int) -> float:
    """gamma_theta at the interior angle of the regular k-gon."""
    # csc of half the interior angle is 1/cos(pi/k); this form avoids
    # the rounding in (k-2)pi/k for large k.
    if int(k) != k or k < 3:
        raise ValueError(f"k must be an integer >= 3, got {k}")
    return 0.5 * (1.0 + 1.0 / math.cos(math.pi / k))
