"""Snapping conical bar-joint structures: anti-frustum towers and spiral-motion cones."""
from __future__ import annotations

from .antifrustum import AntiFrustumDesign, build_snap_pair, build_tower
from .crease import CreasePattern, develop, refold
from .crosssection import cross_section, cross_section_at_height
from .geometry import ConeSpec
from .mesh import Mesh
from .selfintersect import classify_pair, self_intersection_free_interval, verify_theorem
from .snappability import StrainModel, antifrustum_snappability, spiral_snappability
from .spiral import SolverConfig, SpiralRealization, find_shaky, solve_point, trace_curve, tristable_search

__all__ = [
    "AntiFrustumDesign",
    "ConeSpec",
    "CreasePattern",
    "Mesh",
    "SolverConfig",
    "SpiralRealization",
    "StrainModel",
    "antifrustum_snappability",
    "build_snap_pair",
    "build_tower",
    "classify_pair",
    "cross_section",
    "cross_section_at_height",
    "develop",
    "find_shaky",
    "refold",
    "self_intersection_free_interval",
    "solve_point",
    "spiral_snappability",
    "trace_curve",
    "tristable_search",
    "verify_theorem",
]
