"""Cross sections of spiral-motion cones by planes orthogonal to the axis.

Heights are positive distances below the apex (vertices have ``z < 0``).
A cut meeting segment ``V_nV_{n+1}`` crosses the 2n edges
``V_nV_{n+1}, V_1V_{n+1}, V_2V_{n+1}, V_2V_{n+2}, ..., V_nV_{2n}``. Any other
height is moved into that window by an index shift, which is a spiral
displacement of the whole structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spiral import SpiralRealization


@dataclass(frozen=True)
class CrossSection:
    alpha: float
    h: float
    polygon: np.ndarray  # (2n, 2)
    area: float


def section_edges(n: int) -> list[tuple[int, int]]:
    """Crossed edges in polygon order for a cut through ``V_nV_{n+1}``."""
    edges = [(n, n + 1)]
    for j in range(1, n):
        edges += [(j, n + j), (j + 1, n + j)]
    edges.append((n, 2 * n))
    return edges


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _require_cone(realization: SpiralRealization) -> None:
    if realization.q <= 0:
        raise ValueError("cross sections need q > 0 (a flat realization has no orthogonal cut)")


def _cut(realization: SpiralRealization, h: float, shift: int) -> np.ndarray:
    n = realization.n
    pts = []
    for a, b in section_edges(n):
        va, vb = realization.vertices([a + shift, b + shift])
        t = (-h - va[2]) / (vb[2] - va[2])
        pts.append((va + t * (vb - va))[:2])
    return np.array(pts)


def cross_section(realization: SpiralRealization, alpha: float) -> CrossSection:
    """Cut through ``E_1 = V_n + alpha (V_{n+1} - V_n)``."""
    _require_cone(realization)
    n, p, q, r = realization.n, realization.p, realization.q, realization.r_scale
    h = r * p**n * q * (alpha * p - alpha + 1)
    poly = _cut(realization, h, 0)
    return CrossSection(float(alpha), h, poly, shoelace(poly))


def cross_section_at_height(realization: SpiralRealization, h: float) -> CrossSection:
    """Cut at distance ``h`` below the apex."""
    _require_cone(realization)
    if h <= 0:
        raise ValueError("height must be positive")
    n, p, q, r = realization.n, realization.p, realization.q, realization.r_scale
    t = math.log(h / (r * q)) / math.log(p)
    shift = math.floor(t) - n
    top = r * p ** (n + shift) * q
    alpha = (1 - h / top) / (1 - p)
    poly = _cut(realization, h, shift)
    return CrossSection(alpha, h, poly, shoelace(poly))


def area_ratio(realization: SpiralRealization, alpha: float = 0.5) -> float:
    """``A / h^2``, the same for every cut height."""
    cs = cross_section(realization, alpha)
    return cs.area / cs.h**2


def area_ratio_closed_form(realization: SpiralRealization) -> float:
    """Closed form of ``A / h^2`` for ``n = 3..6`` with ``K = sin(phi) (c-1)(2cp - p^2 - 1)``."""
    n, c, p, q = realization.n, realization.c, realization.p, realization.q
    _require_cone(realization)
    k = math.sin(realization.phi) * (c - 1) * (2 * c * p - p * p - 1)
    q2 = q * q
    if n == 3:
        return k / ((p * p + p + 1) * q2)
    if n == 4:
        num = (c + 1) * p**2 + (2 * c + 1) * p + c + 1
        return 2 * k * num / ((p * p + p + 1) * (p * p + 1) * q2)
    if n == 5:
        a, b, m = 2 * c * c + 2 * c + 1, 4 * c * c + 5 * c + 1, 8 * c * c + 6 * c + 1
        num = a * p**4 + b * p**3 + m * p**2 + b * p + a
        return 2 * k * num / ((p * p + 1) * (p**4 + p**3 + p * p + p + 1) * q2)
    if n == 6:
        a = 8 * c**3 + 8 * c * c + 2 * c + 2
        b = 16 * c**3 + 20 * c * c + 8 * c + 1
        m = 32 * c**3 + 40 * c * c + 8 * c
        d = 48 * c**3 + 44 * c * c + 4 * c - 1
        num = a * p**6 + b * p**5 + m * p**4 + d * p**3 + m * p**2 + b * p + a
        den = (p**4 + p**3 + p * p + p + 1) * (p * p + p + 1) * (p * p - p + 1) * q2
        return k * num / den
    raise ValueError("closed form available for n = 3..6 only")


def equivalent_cone_angle(realization: SpiralRealization) -> float:
    """Half apex angle of the round cone with the same cross-sectional area at every height."""
    return math.atan(math.sqrt(area_ratio(realization) / math.pi))


def cone_volume(realization: SpiralRealization, h: float) -> float:
    """Volume between the apex and the cut at height ``h``."""
    return cross_section_at_height(realization, h).area * h / 3.0
