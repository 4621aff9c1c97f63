"""Fixed points of the rescaled gap map: the cubic, its discriminant and gamma*."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

SQRT17 = math.sqrt(17.0)
GAMMA_STAR = (79.0 - 17.0 * SQRT17) / 8.0
# Other root of the discriminant quadratic; far outside the useful range.
GAMMA_STAR_OUTER = (79.0 + 17.0 * SQRT17) / 8.0

# Discriminant values this close to zero are treated as a double root.
_DOUBLE_ROOT_BAND = 1e-12


@dataclass(frozen=True)
class CubicRoots:
    roots: Tuple[float, ...]
    discriminant: float

    @property
    def positive(self) -> Tuple[float, ...]:
        return tuple(x for x in self.roots if x > 0)


def cubic_coefficients(gamma: float) -> Tuple[float, float, float]:
    """(b, c, d) of the monic cubic x^3 + b x^2 + c x + d whose roots solve F(x) = x."""
    s = math.sqrt(gamma - 1.0)
    return 4.0 * s, 4.0 * (gamma - 3.0), 16.0 * s


def cubic_residual(x: float, gamma: float) -> float:
    b, c, d = cubic_coefficients(gamma)
    return ((x + b) * x + c) * x + d


def discriminant(gamma: float) -> float:
    """-(64/27)(4 g^2 - 79 g + 83); negative means three real fixed points."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    return -(64.0 / 27.0) * (4.0 * gamma * gamma - 79.0 * gamma + 83.0)


def gamma_star() -> float:
    """Largest ratio at which the gap map still has positive fixed points."""
    return GAMMA_STAR


def _polish(x: float, b: float, c: float, d: float, steps: int = 2) -> float:
    for _ in range(steps):
        f = ((x + b) * x + c) * x + d
        fp = (3.0 * x + 2.0 * b) * x + c
        if fp == 0.0:
            break
        y = x - f / fp
        if abs(((y + b) * y + c) * y + d) >= abs(f):
            break
        x = y
    return x


def fixed_points(gamma: float) -> CubicRoots:
    """All real roots of the fixed-point cubic, in descending order."""
    if not gamma > 1:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    b, c, d = cubic_coefficients(gamma)
    # depressed cubic t^3 + p t + q with x = t - b/3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = discriminant(gamma)
    shift = b / 3.0
    if disc <= _DOUBLE_ROOT_BAND:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        phi = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        ts = [m * math.cos(phi - 2.0 * math.pi * j / 3.0) for j in range(3)]
    else:
        root = math.sqrt(disc)
        ts = [float(np.cbrt(-q / 2.0 + root) + np.cbrt(-q / 2.0 - root))]
    xs = sorted((_polish(t - shift, b, c, d) for t in ts), reverse=True)
    return CubicRoots(tuple(xs), disc)


def positive_fixed_points(gamma: float) -> Tuple[float, ...]:
    """(a1*, a2*) with a1* >= a2* when gamma <= gamma*, else ()."""
    pos = fixed_points(gamma).positive
    return pos if len(pos) == 2 else ()
