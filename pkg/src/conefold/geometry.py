"""Numeric primitives shared by every construction.

Chebyshev evaluation, points on cones and spirals, regular polygon cosines
and Pluecker line coordinates. Everything here is pure and works on numpy
arrays (including complex ones, which the solvers use for complex-step
derivatives).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PLUECKER_RANK_RTOL = 1e-9


@dataclass(frozen=True)
class ConeSpec:
    """Cone of revolution with apex at the origin, opening downwards.

    ``lam`` is the half apex angle. ``l = tan(lam)`` and ``q = cot(lam)``;
    the flat case ``lam = pi/2`` has ``q = 0`` and ``l = inf``.
    """

    lam: float
    l: float = field(init=False)
    q: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.lam <= math.pi / 2 + 1e-15):
            raise ValueError(f"half apex angle must lie in (0, pi/2], got {self.lam!r}")
        if abs(self.lam - math.pi / 2) <= 1e-15:
            object.__setattr__(self, "lam", math.pi / 2)
            object.__setattr__(self, "l", math.inf)
            object.__setattr__(self, "q", 0.0)
        else:
            object.__setattr__(self, "l", math.tan(self.lam))
            object.__setattr__(self, "q", 1.0 / math.tan(self.lam))

    @classmethod
    def from_degrees(cls, deg: float) -> "ConeSpec":
        return cls(math.radians(deg))

    @classmethod
    def from_q(cls, q: float) -> "ConeSpec":
        if q < 0:
            raise ValueError("q = cot(lambda) must be non-negative")
        return cls(math.pi / 2 if q == 0 else math.atan2(1.0, q))

    @property
    def is_flat(self) -> bool:
        return self.q == 0.0


def cheb_t(i: int, x):
    """Chebyshev polynomial of the first kind, ``T_i(x)``, by the three-term recurrence."""
    if i < 0:
        raise ValueError("Chebyshev index must be non-negative")
    t_prev = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    if i == 0:
        return t_prev
    t = x
    for _ in range(i - 1):
        t_prev, t = t, 2 * x * t - t_prev
    return t


def cheb_u(i: int, x):
    """Chebyshev polynomial of the second kind, ``U_i(x)``.

    ``U_{-1} = 0`` is accepted as a convenience for the coplanarity factorisations.
    """
    if i == -1:
        return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0 * x
    if i < 0:
        raise ValueError("Chebyshev index must be >= -1")
    u_prev = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    if i == 0:
        return u_prev
    u = 2 * x
    for _ in range(i - 1):
        u_prev, u = u, 2 * x * u - u_prev
    return u


def cheb_t_divided(i: int, x, y):
    """Divided difference ``(T_i(x) - T_i(y)) / (x - y)``, exact on the diagonal.

    Uses ``D_{k+1} = 2x D_k + 2 T_k(y) - D_{k-1}`` with ``D_0 = 0, D_1 = 1``;
    at ``x == y`` this equals ``T_i'(x)``.
    """
    if i < 0:
        raise ValueError("Chebyshev index must be non-negative")
    zero = 0 * (x + y)
    if i == 0:
        return zero
    d_prev, d = zero, zero + 1
    t_prev, t = zero + 1, y + zero
    for _ in range(i - 1):
        d_prev, d = d, 2 * x * d + 2 * t - d_prev
        t_prev, t = t, 2 * y * t - t_prev
    return d


def spiral_vertex(r: float, p: float, c: float, q: float, i: int) -> np.ndarray:
    """Vertex ``V_i = r p^i (cos(i phi), sin(i phi), -q)`` with ``phi = arccos(c)``."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"spiral ratio p must satisfy 0 < p < 1, got {p!r}")
    if r <= 0:
        raise ValueError("scale r must be positive")
    if not (-1.0 < c < 1.0):
        raise ValueError("c = cos(phi) must lie in (-1, 1)")
    return spiral_vertices(r, p, c, q, [i])[0]


def spiral_vertices(r: float, p: float, c: float, q: float, indices) -> np.ndarray:
    """Vectorised :func:`spiral_vertex` for an index sequence (negative indices allowed)."""
    idx = np.asarray(indices, dtype=float)
    phi = math.acos(c)
    s = r * p ** idx
    return np.column_stack([s * np.cos(idx * phi), s * np.sin(idx * phi), -q * s])


def spiral_point(r: float, m: float, lam: float, phi):
    """Point of the concho-spiral ``r e^{m phi} (cos phi, sin phi, -cot lam)``."""
    phi = np.asarray(phi, dtype=float)
    s = r * np.exp(m * phi)
    return np.stack([s * np.cos(phi), s * np.sin(phi), -s / math.tan(lam)], axis=-1)


def spiral_slope(lam: float, delta: float) -> float:
    """``m = sin(lam) cot(delta)``; negative for ``delta`` in (pi/2, pi)."""
    return math.sin(lam) / math.tan(delta)


def spiral_ratio(phi: float, lam: float, delta: float) -> float:
    """The scale ratio ``p = exp(phi sin(lam) cot(delta))`` between consecutive vertices."""
    return math.exp(phi * spiral_slope(lam, delta))


def tangent_angle(p: float, phi: float, lam: float) -> float:
    """Inverse of :func:`spiral_ratio`: the angle ``delta`` in (pi/2, pi) for given ``p``."""
    cot_delta = math.log(p) / (phi * math.sin(lam))
    return math.atan2(1.0, cot_delta)


@dataclass(frozen=True)
class PolygonCosine:
    n: int
    d: int
    value: float


def polygon_cosine(n: int, d: int = 1) -> PolygonCosine:
    """``cos(2 d pi / n)``: the spiral angle that puts a realization on a regular {n/d} pyramid."""
    if n < 3 or d < 1 or 2 * d >= n:
        raise ValueError(f"need n >= 3 and 1 <= d < n/2, got n={n}, d={d}")
    return PolygonCosine(n, d, math.cos(2.0 * d * math.pi / n))


def pluecker_coordinates(a, b) -> np.ndarray:
    """Normalised Pluecker coordinates (direction, moment) of the line through ``a`` and ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    norm = np.linalg.norm(d)
    if norm == 0.0:
        raise ValueError("line endpoints coincide")
    d = d / norm
    return np.concatenate([d, np.cross(a, d)])


def pluecker_rank(lines, rtol: float = PLUECKER_RANK_RTOL) -> int:
    """Rank of the stacked Pluecker coordinate matrix.

    Rank below 6 means the lines belong to a linear line complex. The rank
    decision is relative to the largest singular value.
    """
    rows = np.array([pluecker_coordinates(a, b) for a, b in lines])
    if rows.size == 0:
        raise ValueError("need at least one line")
    sv = np.linalg.svd(rows, compute_uv=False)
    return int(np.sum(sv > rtol * sv[0]))


def coplanarity_det(p0, p1, p2, p3) -> float:
    """``det [[1,1,1,1],[p0,p1,p2,p3]]``: six times the signed volume of the tetrahedron."""
    m = np.ones((4, 4))
    m[1:, 0], m[1:, 1], m[1:, 2], m[1:, 3] = p0, p1, p2, p3
    return float(np.linalg.det(m))


def rotation_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
