"""Nonconvex circular partitions of regular polygons with bounded aspect ratio."""
from __future__ import annotations

__version__ = "0.1.0"

from .bounds import gamma_one, gamma_theta, gamma_theta_kgon
from .construct import (KgonFrame, Partition, build_partition, central_pair, corner_pair,
                        kopt_predicate, optimal_gamma, scaled_initial_gap)
from .edgecover import (EdgeCoverInput, EdgeCovering, F, F_prime, GapState, TerminationClass,
                        canonical_instance, canonical_scaled_gap, classify, cover_edge, delta,
                        next_gap_state, steps_to_cover)
from .fixedpoint import CubicRoots, discriminant, fixed_points, gamma_star
from .geom import (CoverPair, Disk, Point2, Tolerance, circle_circle_intersection,
                   disk_contains, gap_outcircle, is_externally_tangent)
from .verify import CoverageReport, PieceGrid, apex_point, check_covering, grow_pieces

__all__ = [name for name in dir() if not name.startswith("_")]
