"""Anti-frustum snap pairs and their stacked cone towers.

The lower regular n-gon ``A_1..A_n`` has radius 1 in the plane ``z = 0``;
the upper n-gon ``B_1..B_n`` has radius ``r`` at height ``h``. Triangle
``A_1A_2B_1`` is rotated about ``A_1A_2`` so that ``B_1`` moves from the
``lambda_-`` cone to the ``lambda_+`` cone; all edge lengths are kept.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .geometry import ConeSpec, pluecker_rank, rotation_z
from .mesh import Mesh

Sign = Literal["plus", "minus"]
SQRT_CLAMP = 1e-12


def _clamped_sqrt(x: float) -> float:
    if x < 0:
        if x < -SQRT_CLAMP:
            raise ValueError(f"negative radicand {x!r}")
        return 0.0
    return math.sqrt(x)


def _check_gamma(n: int, gamma: float) -> None:
    if n < 3:
        raise ValueError("n must be at least 3")
    if not (math.pi / 2 - 1e-15 <= gamma <= math.pi - math.pi / n + 1e-12):
        raise ValueError(f"gamma must lie in [pi/2, pi - pi/n], got {gamma!r}")


def solve_radius(n: int, lambda_plus: ConeSpec, lambda_minus: ConeSpec, gamma: float) -> float:
    """Radius ``r`` of the upper n-gon for which both realizations exist.

    Uses the closed form for a general ``lambda_-`` and the flat-foldable
    form when ``lambda_- = pi/2``. The alternative sign of the square root
    gives ``1/r``, which is never in ``(0, 1)``.
    """
    _check_gamma(n, gamma)
    if lambda_minus.lam <= lambda_plus.lam:
        raise ValueError("need lambda_minus > lambda_plus")
    big_c = math.cos(math.pi / n) * math.cos(gamma)
    if abs(big_c) < 1e-15:
        return 1.0
    a = lambda_plus.l
    if lambda_minus.is_flat:
        return 1.0 - 2.0 * a * (a * big_c + _clamped_sqrt(big_c * (a * a * big_c - 1.0)))
    b = lambda_minus.l
    a2, b2 = a * a, b * b
    root = _clamped_sqrt(big_c * (a2 * b2 * big_c + a2 - b2))
    return (2.0 * a2 * b2 * big_c + 2.0 * a * b * root + a2 - b2) / (a2 - b2)


@dataclass(frozen=True)
class AntiFrustumDesign:
    n: int
    gamma: float
    lambda_plus: ConeSpec
    lambda_minus: ConeSpec
    mirror: bool = False
    r: float = field(init=False)
    h_minus: float = field(init=False)
    h_plus: float = field(init=False)

    def __post_init__(self):
        r = solve_radius(self.n, self.lambda_plus, self.lambda_minus, self.gamma)
        h_minus = 0.0 if self.lambda_minus.is_flat else (1.0 - r) / self.lambda_minus.l
        radicand = h_minus**2 - 4.0 * r * math.cos(self.gamma) * math.cos(math.pi / self.n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "h_minus", h_minus)
        object.__setattr__(self, "h_plus", _clamped_sqrt(radicand))

    @classmethod
    def from_degrees(cls, n: int, gamma_deg: float, lambda_plus_deg: float, lambda_minus_deg: float, mirror: bool = False):
        return cls(n, math.radians(gamma_deg), ConeSpec.from_degrees(lambda_plus_deg), ConeSpec.from_degrees(lambda_minus_deg), mirror)

    @property
    def degenerate(self) -> bool:
        """``gamma = pi/2``: both realizations coincide and are shaky."""
        return abs(self.gamma - math.pi / 2) < 1e-12

    def height(self, sign: Sign) -> float:
        return self.h_plus if sign == "plus" else self.h_minus


@dataclass(frozen=True)
class AntiFrustumRealization:
    sign: Sign
    n: int
    a: np.ndarray  # (n, 3) lower ring
    b: np.ndarray  # (n, 3) upper ring
    apex: np.ndarray

    def lateral_edges(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """The 2n edges ``A_kB_k`` and ``A_{k+1}B_k``."""
        n = self.n
        out = []
        for k in range(n):
            out.append((self.a[k], self.b[k]))
            out.append((self.a[(k + 1) % n], self.b[k]))
        return out

    def edge_lengths(self) -> np.ndarray:
        """Ring edges of both n-gons followed by the lateral edges."""
        n = self.n
        rings = [np.linalg.norm(ring[(k + 1) % n] - ring[k]) for ring in (self.a, self.b) for k in range(n)]
        lateral = [np.linalg.norm(q - p) for p, q in self.lateral_edges()]
        return np.array(rings + lateral)

    def pluecker_rank(self) -> int:
        return pluecker_rank(self.lateral_edges())

    def to_mesh(self) -> Mesh:
        verts = np.vstack([self.a, self.b])
        return Mesh(verts, _band_triangles(self.n, 0, self.n), {"construction": "antifrustum", "sign": self.sign})


def _band_triangles(n: int, lo: int, hi: int) -> np.ndarray:
    tris = []
    for k in range(n):
        k1 = (k + 1) % n
        tris.append((lo + k, lo + k1, hi + k))
        tris.append((lo + k1, hi + k1, hi + k))
    return np.array(tris, dtype=int)


def _ring(first: np.ndarray, n: int) -> np.ndarray:
    return np.array([rotation_z(2.0 * math.pi * k / n) @ first for k in range(n)])


def _realization(design: AntiFrustumDesign, sign: Sign) -> AntiFrustumRealization:
    n, r, g = design.n, design.r, design.gamma
    h = design.height(sign)
    a1 = np.array([math.cos(math.pi / n), -math.sin(math.pi / n), 0.0])
    x = -r * math.cos(g) if sign == "plus" else r * math.cos(g)
    b1 = np.array([x, r * math.sin(g), h])
    a, b = _ring(a1, n), _ring(b1, n)
    if design.mirror:
        flip = np.diag([1.0, -1.0, 1.0])
        a, b = a @ flip, b @ flip
    apex_z = h / (1.0 - r) if r < 1.0 else 0.0
    return AntiFrustumRealization(sign, n, a, b, np.array([0.0, 0.0, apex_z]))


def build_snap_pair(design: AntiFrustumDesign) -> tuple[AntiFrustumRealization, AntiFrustumRealization]:
    """``(R_-, R_+)``; corresponding edge lengths agree."""
    return _realization(design, "minus"), _realization(design, "plus")


def spiral_displacement(design: AntiFrustumDesign, sign: Sign) -> tuple[np.ndarray, np.ndarray, float]:
    """``(apex, rotation, scale)`` of the displacement taking the A-ring to the B-ring."""
    real = _realization(design, sign)
    ang_a = math.atan2(real.a[0, 1], real.a[0, 0])
    ang_b = math.atan2(real.b[0, 1], real.b[0, 0])
    return real.apex, rotation_z(ang_b - ang_a), design.r


def build_tower(design: AntiFrustumDesign, sign: Sign, levels: int) -> Mesh:
    """Stack ``levels`` anti-frusta, each the previous one displaced along the cone."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if design.r >= 1.0:
        raise ValueError("degenerate design (r = 1) has no tower")
    real = _realization(design, sign)
    apex, rot, scale = spiral_displacement(design, sign)
    rings = [real.a]
    for _ in range(levels):
        rings.append(apex + scale * (rings[-1] - apex) @ rot.T)
    verts = np.vstack(rings)
    n = design.n
    tris = np.vstack([_band_triangles(n, j * n, (j + 1) * n) for j in range(levels)])
    meta = {
        "construction": "antifrustum-tower",
        "sign": sign,
        "n": n,
        "gamma": design.gamma,
        "lambda_plus": design.lambda_plus.lam,
        "lambda_minus": design.lambda_minus.lam,
        "levels": levels,
    }
    return Mesh(verts, tris, meta)
