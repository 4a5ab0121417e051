"""Snappability index of conical bar-joint structures.

The energy of a bar deformed from length ``L`` to ``L'`` is
``E A / (8 L^3) (L'^2 - L^2)^2``. Both constructions are periodic under a
spiral displacement, so three representative bars suffice and the totals
over the infinite structure are geometric series. The snappability is the
energy density at the shaky configuration divided by Young's modulus.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .antifrustum import AntiFrustumDesign, build_snap_pair
from .geometry import ConeSpec, tangent_angle
from .newton import COMPLEX_STEP
from .selfintersect import continue_branch, self_intersection_free_interval
from .spiral import CurvePoint, ShakySolution, SpiralRealization, find_shaky, solve_point, unit_gap

Mode = Literal["rough", "improved"]
GRAD_TOL = 1e-10
FD_STEP = 1e-6
ROUNDOFF = 1e-14


@dataclass(frozen=True)
class StrainModel:
    young_modulus: float = 1.0
    bar_cross_section: float = 1.0

    def __post_init__(self):
        if self.young_modulus <= 0 or self.bar_cross_section <= 0:
            raise ValueError("Young modulus and cross-sectional area must be positive")


def bar_energy(length, length_deformed, model: StrainModel = StrainModel()):
    """Green-Lagrange strain energy of one bar."""
    if np.any(np.asarray(length) <= 0):
        raise ValueError("undeformed length must be positive")
    return model.young_modulus * model.bar_cross_section / (8 * length**3) * (length_deformed**2 - length**2) ** 2


def _bar_energy_sq(length, length_deformed_sq):
    """:func:`bar_energy` per unit ``E A`` from a squared deformed length (complex-safe)."""
    return (length_deformed_sq - length**2) ** 2 / (8 * length**3)


def gradient(func, x) -> np.ndarray:
    """Complex-step gradient of a real-analytic scalar function."""
    x = np.asarray(x, dtype=float)
    out = np.empty(len(x))
    for j in range(len(x)):
        z = x.astype(complex)
        z[j] += 1j * COMPLEX_STEP
        out[j] = np.imag(func(z)) / COMPLEX_STEP
    return out


def critical_point(func, x0, rtol: float = 1e-13, atol: float = 0.0, max_iter: int = 100, step: float = FD_STEP):
    """Newton on the complex-step gradient of ``func`` with a central-difference Hessian.

    Returns ``(x, grad, converged)``; converged means ``|grad| <= GRAD_TOL |func| + atol``,
    where ``atol`` is a roundoff floor for critical values near zero.
    Steps are halved while they fail to reduce the gradient norm.
    """
    x = np.array(x0, dtype=float)
    g = gradient(func, x)

    def small(x, g):
        return np.linalg.norm(g) <= rtol * abs(float(np.real(func(x)))) + atol

    for _ in range(max_iter):
        if small(x, g):
            break
        hess = np.empty((len(x), len(x)))
        for j in range(len(x)):
            h = step * max(1.0, abs(x[j]))
            e = np.zeros_like(x)
            e[j] = h
            hess[:, j] = (gradient(func, x + e) - gradient(func, x - e)) / (2 * h)
        try:
            dx = np.linalg.solve(hess, -g)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-6:
            x_new = x + t * dx
            g_new = gradient(func, x_new)
            if np.all(np.isfinite(g_new)) and np.linalg.norm(g_new) < np.linalg.norm(g):
                break
            t /= 2
        if t <= 1e-6:
            break
        x, g = x_new, g_new
    ok = np.linalg.norm(g) <= GRAD_TOL * abs(float(np.real(func(x)))) + atol
    return x, g, bool(ok)


# -- anti-frustum ---------------------------------------------------------------


@dataclass
class AntiFrustumShaky:
    n: int
    lambda_plus: float
    gamma: float
    mode: Mode
    rho: float
    h_s: float
    u_total: float
    vol_total: float
    sigma: float
    gradient_norm: float
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class _FrustumBars:
    n: int
    r: float
    lengths: np.ndarray  # ring, A1B1, A2B1
    x_lateral: np.ndarray  # squared horizontal distances A_js to B_1s at rho = 1

    def u_total(self, rho, h_s, scale: float = 1.0):
        """Energy per unit ``E A`` of the whole tower for shaky parameters ``(rho, h_s)``."""
        L = self.lengths * scale
        ring = _bar_energy_sq(L[0], (rho * L[0]) ** 2)
        lat = sum(_bar_energy_sq(L[j + 1], (rho * scale) ** 2 * (self.x_lateral[j] + h_s**2)) for j in range(2))
        return self.n * (ring + lat) / (1 - self.r)

    def vol_total(self, scale: float = 1.0) -> float:
        return self.n * float(np.sum(self.lengths * scale)) / (1 - self.r)


def _frustum_bars(design: AntiFrustumDesign) -> _FrustumBars:
    n, r = design.n, design.r
    r_minus, _ = build_snap_pair(design)
    a1, a2, b1 = r_minus.a[0], r_minus.a[1], r_minus.b[0]
    lengths = np.array([np.linalg.norm(a2 - a1), np.linalg.norm(b1 - a1), np.linalg.norm(b1 - a2)])
    cn, sn = math.cos(math.pi / n), math.sin(math.pi / n)
    x = np.array([cn * cn + (sn + r) ** 2, cn * cn + (sn - r) ** 2])
    return _FrustumBars(n, r, lengths, x)


def rough_height(bars: _FrustumBars) -> float:
    """Unique ``h_s > 0`` with ``dU/dh_s = 0`` at ``rho = 1``, by bracketing."""
    L = bars.lengths[1:]

    def g(h):  # dU/dh divided by h/2
        return float(np.sum((bars.x_lateral + h * h - L**2) / L**3))

    lo, hi = 0.0, float(np.max(L)) + 1.0
    if g(lo) >= 0:
        return 0.0
    while g(hi) <= 0:
        hi *= 2
    return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def antifrustum_snappability(
    n: int,
    lambda_plus: float,
    gamma: float,
    mode: Mode = "rough",
    lambda_minus: float = math.pi / 2,
    model: StrainModel = StrainModel(),
    scale: float = 1.0,
) -> AntiFrustumShaky:
    """Snappability of the anti-frustum tower with flat-foldable ``R_-``.

    ``scale`` multiplies the base radius (the index is scale-free).
    """
    if mode not in ("rough", "improved"):
        raise ValueError("mode must be 'rough' or 'improved'")
    design = AntiFrustumDesign(n, gamma, ConeSpec(lambda_plus), ConeSpec(lambda_minus))
    if design.degenerate:
        # r = 1: the pair coincides and is already shaky
        return AntiFrustumShaky(n, lambda_plus, gamma, mode, 1.0, design.h_plus, 0.0, math.inf, 0.0, 0.0, True)
    bars = _frustum_bars(design)
    h0 = rough_height(bars)
    ea = model.young_modulus * model.bar_cross_section

    def energy(x):
        return bars.u_total(x[0], x[1] / scale, scale)  # h in scaled units

    if mode == "rough":
        x = np.array([1.0, h0 * scale])
        grad = gradient(energy, x) * np.array([0.0, 1.0])  # rho is held fixed
        converged = True
    else:
        x, grad, converged = critical_point(energy, [1.0, h0 * scale], atol=ROUNDOFF * bars.vol_total(scale))
    u = ea * float(np.real(energy(x)))
    vol = model.bar_cross_section * bars.vol_total(scale)
    gnorm = float(np.linalg.norm(grad)) * ea
    return AntiFrustumShaky(
        n, lambda_plus, gamma, mode, float(x[0]), float(x[1]), u, vol, u / (model.young_modulus * vol), gnorm, bool(converged)
    )


# -- spiral --------------------------------------------------------------------------


@dataclass
class SpiralShaky:
    n: int
    mode: Mode
    lambda_s: float
    p_s: float
    c_s: float
    r_s: float
    sigma: float
    u_total: float
    vol_total: float
    series_ratios: tuple[float, float]
    diverges: bool
    gradient_norm: float
    converged: bool
    alternatives: list[tuple[float, float, float, float]] = field(default_factory=list)

    @property
    def phi_s(self) -> float:
        return math.acos(self.c_s)

    @property
    def delta_s(self) -> float:
        return tangent_angle(self.p_s, self.phi_s, self.lambda_s)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(phi_s=self.phi_s, delta_s=self.delta_s)
        return d


def family_energy(length, length_s_sq, p, p_s):
    """Closed form of ``sum_k U(p^k L, p_s^k L_s)`` per unit ``E A`` (complex-safe).

    Written in differences so that it vanishes exactly when ``L_s = L`` and ``p_s = p``.
    """
    s = length_s_sq / length**2
    d = p_s**2 - p**2
    a, b = p_s**2 / p, p_s**4 / p**3
    body = (s - 1) ** 2 / (1 - b) + 2 * s * p_s**2 * d / (p**3 * (1 - a) * (1 - b)) - d * (p_s**2 + p**2) / (p**3 * (1 - b) * (1 - p))
    return length * body / 8


def family_energy_truncated(length, length_s_sq, p, p_s, terms: int = 200) -> float:
    """Direct partial sum of the series in :func:`family_energy`."""
    k = np.arange(terms)
    ratio = length_s_sq / length**2 * (p_s / p) ** (2 * k)
    return float(np.sum(length * p**k * (ratio - 1) ** 2)) / 8


@dataclass(frozen=True)
class _SpiralBars:
    n: int
    p: float
    lengths: np.ndarray  # V0V1, V0V_{n-1}, V0V_n

    @property
    def steps(self) -> tuple[int, int, int]:
        return (1, self.n - 1, self.n)

    def shaky_sq(self, lam_s, p_s, c_s, r_s):
        q_s = 1 / np.tan(lam_s)
        return [r_s**2 * unit_gap(t, p_s, c_s, q_s) for t in self.steps]

    def u_total(self, lam_s, p_s, c_s, r_s):
        sq = self.shaky_sq(lam_s, p_s, c_s, r_s)
        return sum(family_energy(L, s, self.p, p_s) for L, s in zip(self.lengths, sq))

    def vol_total(self) -> float:
        return float(np.sum(self.lengths)) / (1 - self.p)


def _shaky_for_pair(r_plus: SpiralRealization, r_minus: SpiralRealization) -> ShakySolution:
    free = [s for s in find_shaky(r_plus.n, r_plus.q, r_plus.q) if not s.self_intersecting]
    if not free:
        raise RuntimeError("no self-intersection free shaky realization on this cone")
    lo, hi = sorted((r_plus.c, r_minus.c))
    between = [s for s in free if lo - 1e-12 <= s.c_s <= hi + 1e-12]
    pool = between or free
    return min(pool, key=lambda s: abs(s.c_s - 0.5 * (lo + hi)))


def spiral_snappability(
    pair: tuple[SpiralRealization, SpiralRealization],
    mode: Mode = "rough",
    shaky: ShakySolution | None = None,
    model: StrainModel = StrainModel(),
    extra_starts: int = 0,
) -> SpiralShaky:
    """Snappability of a same-cone spiral pair.

    The pair shares edge lengths; those of the first member are used.
    """
    if mode not in ("rough", "improved"):
        raise ValueError("mode must be 'rough' or 'improved'")
    r_plus, r_minus = pair
    if abs(r_plus.q - r_minus.q) > 1e-12 or abs(r_plus.p - r_minus.p) > 1e-12 or r_plus.n != r_minus.n:
        raise ValueError("pair must share n, p and the cone")
    if r_plus.q <= 0:
        raise ValueError("flat pairs have no cone to snap on")
    shaky = shaky or _shaky_for_pair(r_plus, r_minus)
    bars = _SpiralBars(r_plus.n, r_plus.p, np.array(r_plus.edge_lengths()))
    lam = r_plus.cone.lam
    ea = model.young_modulus * model.bar_cross_section

    # rough: cone and spiral angle of the shaky realization, scale from dU/dr_s = 0
    sq1 = bars.shaky_sq(lam, shaky.p_s, shaky.c_s, 1.0)
    a = sum(s / L / (1 - shaky.p_s**2 / bars.p) for L, s in zip(bars.lengths, sq1))
    b = sum(s * s / L**3 / (1 - shaky.p_s**4 / bars.p**3) for L, s in zip(bars.lengths, sq1))
    x = np.array([lam, shaky.p_s, shaky.c_s, math.sqrt(a / b)])
    energy = lambda z: bars.u_total(*z)  # noqa: E731
    alternatives: list[tuple[float, float, float, float]] = []
    if mode == "rough":
        converged = True
        grad = gradient(energy, x) * np.array([0.0, 0.0, 0.0, 1.0])
    else:
        atol = ROUNDOFF * bars.vol_total()
        x, grad, converged = critical_point(energy, x, atol=atol)
        for k in range(extra_starts):
            seed = x * (1 + 0.01 * (k + 1) * np.array([1, -1, 1, -1]))
            y, _, ok = critical_point(energy, seed, atol=atol)
            if ok and np.max(np.abs(y - x)) > 1e-7 and not any(np.max(np.abs(y - np.array(a_))) < 1e-7 for a_ in alternatives):
                alternatives.append(tuple(float(v) for v in y))
    lam_s, p_s, c_s, r_s = (float(v) for v in x)
    ratios = (p_s**2 / bars.p, p_s**4 / bars.p**3)
    diverges = ratios[0] >= 1 or ratios[1] >= 1
    vol = model.bar_cross_section * bars.vol_total()
    if diverges:
        u = math.inf
    else:
        u = ea * float(np.real(energy(x)))
    sigma = u / (model.young_modulus * vol)
    return SpiralShaky(
        r_plus.n, mode, lam_s, p_s, c_s, r_s, sigma, u, vol, ratios, diverges, float(np.linalg.norm(grad)) * ea, bool(converged), alternatives
    )


# -- sweeps --------------------------------------------------------------------------


@dataclass
class SnapPathPoint:
    c_minus: float
    c_plus: float
    p: float
    rough: SpiralShaky
    improved: SpiralShaky


def _branch_start(n: int, q: float):
    iv = self_intersection_free_interval(n, q)
    if not iv.complete:
        raise ValueError(f"no complete self-intersection free interval for n={n}, q={q}")
    ends = {b.kind.split()[0]: b for b in (iv.lower, iv.upper)}
    start, stop = ends["pyramid"], ends["shaky"]
    pt = min(solve_point(n, q, q, start.c_minus), key=lambda c: abs(c.c_plus - start.point[0]) + abs(c.p - start.point[1]))
    shaky = min(find_shaky(n, q, q), key=lambda s: abs(s.c_s - stop.c_minus))
    return iv, pt, shaky


def snap_branch_point(n: int, q: float, c_minus: float, steps: int = 20) -> tuple[CurvePoint, ShakySolution]:
    """The pair at ``c_minus`` on the self-intersection free branch, with its shaky realization."""
    iv, pt, shaky = _branch_start(n, q)
    if not iv.contains(c_minus):
        raise ValueError(f"c_minus={c_minus} is outside the free interval [{iv.lower.c_minus}, {iv.upper.c_minus}]")
    path = continue_branch(pt, np.linspace(pt.c_minus, c_minus, steps + 1)[1:])
    if len(path) < steps:
        raise RuntimeError("continuation along the free branch failed")
    return path[-1], shaky


def spiral_snap_path(n: int, q: float, samples: int = 11, modes: tuple[Mode, ...] = ("rough", "improved")) -> list[SnapPathPoint]:
    """Snappability along the self-intersection free branch, pyramid end to shaky end."""
    _, pt, shaky = _branch_start(n, q)
    path = [pt] + continue_branch(pt, np.linspace(pt.c_minus, shaky.c_s, samples)[1:])
    out = []
    for c in path:
        res = {m: spiral_snappability(c.realizations(), m, shaky) if m in modes else None for m in ("rough", "improved")}
        out.append(SnapPathPoint(c.c_minus, c.c_plus, c.p, res["rough"], res["improved"]))
    return out


def antifrustum_sweep(
    n_values, gammas=None, lambda_plus: float = 1e-3, modes: tuple[Mode, ...] = ("rough", "improved")
) -> list[AntiFrustumShaky]:
    """Snappability over ``n`` and ``gamma``; ``gamma`` defaults to ``pi - pi/n``."""
    out = []
    for n in n_values:
        gs = [math.pi - math.pi / n] if gammas is None else gammas
        for g in gs:
            if g > math.pi - math.pi / n + 1e-12:
                continue
            out.extend(antifrustum_snappability(n, lambda_plus, g, m) for m in modes)
    return out
