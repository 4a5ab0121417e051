"""Coplanarity boundaries of local self-intersection and pyramid theorems.

Around each vertex the upper three triangles of the star can only start to
penetrate each other after two adjacent ones become coplanar with a zero
dihedral angle. That happens along ``V_kV_{k+n-1}`` (the f-quad
``V_0V_1V_nV_{n+1}``) or along ``V_kV_{k+n}`` (the g-quad
``V_0V_1V_{n-1}V_n``). The theorem checks below construct the partner of a
realization on a regular pyramid and test the matching quad numerically.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .geometry import cheb_u, coplanarity_det
from .intersect import realization_self_intersects
from .newton import batch_newton, dedupe, grid_starts
from .spiral import (
    DEFAULT_CONFIG,
    CurvePoint,
    PyramidBase,
    SolverConfig,
    SpiralRealization,
    _curve_points,
    _design_system,
    _newton,
    find_pyramid_realization,
    find_shaky,
    same_cone_residual,
)

Quad = Literal["f_quad", "g_quad"]
BOUNDARY_TOL = 1e-8

# vertex indices of each quad: (shared edge, apex of first face, apex of second face)
_QUADS = {
    "f_quad": lambda n: ((1, n), 0, n + 1),
    "g_quad": lambda n: ((0, n), 1, n - 1),
}


@dataclass
class CoplanarityReport:
    which: Quad
    value: float
    normalized: float
    is_boundary: bool
    folded: bool  # apexes on the same side of the shared edge (zero dihedral when coplanar)

    @property
    def on_self_intersection_boundary(self) -> bool:
        return self.is_boundary and self.folded


def _coplanarity(realization: SpiralRealization, which: Quad, tol: float) -> CoplanarityReport:
    n = realization.n
    (e0, e1), a0, a1 = _QUADS[which](n)
    idx = sorted({e0, e1, a0, a1})
    v = dict(zip(idx, realization.vertices(idx)))
    value = coplanarity_det(*(v[i] for i in idx))
    scale = np.prod([np.linalg.norm(v[i] - v[idx[0]]) for i in idx[1:]])
    normalized = value / scale
    base, edge = v[e0], v[e1] - v[e0]
    nrm = np.cross(edge, v[a0] - base)
    side0 = np.dot(np.cross(edge, v[a0] - base), nrm)
    side1 = np.dot(np.cross(edge, v[a1] - base), nrm)
    return CoplanarityReport(which, float(value), float(normalized), abs(normalized) < tol, bool(side0 * side1 > 0))


def coplanarity_f(realization: SpiralRealization, tol: float = BOUNDARY_TOL) -> CoplanarityReport:
    """Coplanarity of ``V_0, V_1, V_n, V_{n+1}``."""
    return _coplanarity(realization, "f_quad", tol)


def coplanarity_g(realization: SpiralRealization, tol: float = BOUNDARY_TOL) -> CoplanarityReport:
    """Coplanarity of ``V_0, V_1, V_{n-1}, V_n``."""
    return _coplanarity(realization, "g_quad", tol)


def f_factored(realization: SpiralRealization) -> float:
    """The f determinant through its Chebyshev-U factorisation."""
    n, c, p, q, r = realization.n, realization.c, realization.p, realization.q, realization.r_scale
    u = lambda i: cheb_u(i, c)  # noqa: E731
    star = (
        (p ** (2 * n + 2) - p ** (n + 1)) * (u(n - 2) - u(n - 1) + 1)
        + (u(n) - u(n - 1) - 1) * p ** (2 * n + 1)
        + (u(n - 1) - u(n) + 1) * p ** (n + 2)
    )
    return -(r**3) * q * math.sin(realization.phi) * star


def g_factored(realization: SpiralRealization) -> float:
    """The g determinant through the analogous factorisation (indices shifted by one)."""
    n, c, p, q, r = realization.n, realization.c, realization.p, realization.q, realization.r_scale
    u = lambda i: cheb_u(i, c)  # noqa: E731
    star = (
        (p ** (2 * n) - p**n) * (u(n - 3) - u(n - 2) + 1)
        + (u(n - 1) - u(n - 2) - 1) * p ** (2 * n - 1)
        + (u(n - 2) - u(n - 1) + 1) * p ** (n + 1)
    )
    return -(r**3) * q * math.sin(realization.phi) * star


# -- theorem harness --------------------------------------------------------------

THEOREM_RANGE = {1: (4, 9), 2: (6, 9), 3: (4, 9), 4: (5, 9), 5: (4, 9), 6: (4, 9)}


def theorem_bases(theorem_id: int, n: int) -> list[PyramidBase]:
    """Pyramid bases of ``R_-`` covered by a theorem for this ``n``."""
    lo, hi = THEOREM_RANGE[theorem_id]
    if not (lo <= n <= hi):
        return []
    k = n - 1 if theorem_id in (1, 2, 5) else n
    if theorem_id in (2, 4):
        return [PyramidBase.star(k, d) for d in range(2, (k + 1) // 2) if 2 * d < k]
    return [PyramidBase.k_gon(k)]


def _excluded_partner_bases(theorem_id: int, n: int) -> list[PyramidBase]:
    """Pyramids that the partner of a T5/T6 realization would have to sit on to be flat rather than folded."""
    k = n if theorem_id == 5 else n - 1
    out = [PyramidBase.k_gon(k)]
    out += [PyramidBase.star(k, d) for d in range(2, (k + 1) // 2) if 2 * d < k]
    return out


@dataclass
class TheoremCase:
    base: str
    c_minus: float
    c_plus: float
    p: float
    quad: str
    value: float
    normalized: float
    folded: bool
    passed: bool


@dataclass
class VerificationRecord:
    theorem_id: int
    n: int
    q: float
    status: Literal["pass", "fail", "no-partner", "out-of-range"]
    cases: list[TheoremCase] = field(default_factory=list)
    exclusion_roots: list[tuple[str, float, float]] = field(default_factory=list)  # (base pair, q, p)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "no-partner")

    def to_dict(self) -> dict:
        return asdict(self)


def pyramid_pair_roots(n: int, c_minus: float, c_plus: float, cfg: SolverConfig = DEFAULT_CONFIG) -> list[tuple[float, float]]:
    """All ``(q, p)`` with ``q >= 0, 0 < p < 1`` where fixed ``c_-`` and ``c_+`` admit a same-cone pair."""

    def func(x):
        q, p = x[:, 0], x[:, 1]
        return np.column_stack([same_cone_residual(k, p, c_plus, c_minus, q) for k in (n - 1, n)])

    starts = grid_starts(np.linspace(0.0, 4.0, cfg.grid_c), np.linspace(0.02, 0.98, cfg.grid_p))
    with np.errstate(all="ignore"):
        res = batch_newton(func, starts, tol=cfg.newton_tol, max_iter=cfg.max_iter)
    ok = res.converged | (res.residual < cfg.accept_tol)
    xs = dedupe(res.x[ok], cfg.dedupe_tol) if ok.any() else np.empty((0, 2))
    # q enters only through q^2, so -q is the same root
    return [(abs(float(q)), float(p)) for q, p in xs if cfg.p_min < p < cfg.p_max]


def verify_theorem(theorem_id: int, n: int, q: float, cfg: SolverConfig = DEFAULT_CONFIG, tol: float = BOUNDARY_TOL) -> VerificationRecord:
    if theorem_id not in THEOREM_RANGE:
        raise ValueError("theorem_id must be 1..6")
    bases = theorem_bases(theorem_id, n)
    if not bases:
        return VerificationRecord(theorem_id, n, q, "out-of-range")
    quad: Quad = "f_quad" if theorem_id in (1, 2, 5) else "g_quad"
    rec = VerificationRecord(theorem_id, n, q, "pass")
    for base in bases:
        for pt in find_pyramid_realization(n, q, base, cfg):
            r_plus, _ = pt.realizations()
            rep = _coplanarity(r_plus, quad, tol)
            ok = rep.is_boundary and (rep.folded if theorem_id in (5, 6) else True)
            rec.cases.append(TheoremCase(base.label, pt.c_minus, pt.c_plus, pt.p, quad, rep.value, rep.normalized, rep.folded, ok))
    if theorem_id in (5, 6):
        c_minus = bases[0].cosine
        for other in _excluded_partner_bases(theorem_id, n):
            for qq, pp in pyramid_pair_roots(n, c_minus, other.cosine, cfg):
                rec.exclusion_roots.append((f"{bases[0].label}|{other.label}", qq, pp))
    if not rec.cases and not rec.exclusion_roots:
        rec.status = "no-partner"
    elif not all(c.passed for c in rec.cases) or rec.exclusion_roots:
        rec.status = "fail"
    return rec


# -- self-intersection free interval -------------------------------------------------


@dataclass
class IntervalBound:
    c_minus: float
    kind: str  # "shaky" or "pyramid <k>-gon"
    point: tuple[float, float]  # (c_+, p)


@dataclass
class FreeInterval:
    n: int
    q: float
    lower: IntervalBound | None
    upper: IntervalBound | None

    @property
    def complete(self) -> bool:
        return self.lower is not None and self.upper is not None

    def contains(self, c_minus: float) -> bool:
        return self.complete and self.lower.c_minus <= c_minus <= self.upper.c_minus


def continue_branch(pt: CurvePoint, targets, cfg: SolverConfig = DEFAULT_CONFIG) -> list[CurvePoint]:
    """Follow the same-cone branch through ``pt`` along the given ``c_minus`` values."""
    path, cur = [], pt
    for cm in targets:
        func = _design_system(cur.n, cur.q_plus, cur.q_minus, cm)
        res = _newton(func, np.array([[cur.c_plus, cur.p]]), cfg)
        if not (res.converged[0] or res.residual[0] < cfg.accept_tol):
            break
        found = _curve_points(cur.n, cur.q_plus, cur.q_minus, cm, res.x, func, cfg)
        if not found:
            break
        cur = found[0]
        path.append(cur)
    return path


def self_intersection_free_interval(n: int, q: float, steps: int = 40, cfg: SolverConfig = DEFAULT_CONFIG) -> FreeInterval:
    """The ``c_minus`` interval between the free shaky point and the pyramid point on its branch.

    A pyramid point (``R_-`` on an (n-1)- or n-gon pyramid) bounds the
    interval when continuation along ``c_minus`` from it ends at the
    self-intersection free shaky realization.
    """
    shaky = [s for s in find_shaky(n, q, q, cfg) if not s.self_intersecting]
    best: tuple[float, IntervalBound, IntervalBound] | None = None
    for s in shaky:
        s_bound = IntervalBound(s.c_s, "shaky", (s.c_s, s.p_s))
        for base in (PyramidBase.k_gon(n - 1), PyramidBase.k_gon(n)):
            for pt in find_pyramid_realization(n, q, base, cfg):
                path = continue_branch(pt, np.linspace(pt.c_minus, s.c_s, steps + 1)[1:], cfg)
                if len(path) < steps:
                    continue
                end = path[-1]
                if abs(end.c_plus - s.c_s) > 1e-6 or abs(end.p - s.p_s) > 1e-6:
                    continue
                width = abs(pt.c_minus - s.c_s)
                p_bound = IntervalBound(pt.c_minus, f"pyramid {base.label}-gon", (pt.c_plus, pt.p))
                if best is None or width < best[0]:
                    best = (width, s_bound, p_bound)
    if best is None:
        return FreeInterval(n, q, None, None) if not shaky else FreeInterval(n, q, IntervalBound(shaky[0].c_s, "shaky", (shaky[0].c_s, shaky[0].p_s)), None)
    _, a, b = best
    lo, hi = (a, b) if a.c_minus <= b.c_minus else (b, a)
    return FreeInterval(n, q, lo, hi)


def classify_pair(pt: CurvePoint) -> dict:
    """Self-intersection and boundary flags for both members of a solved pair."""
    r_plus, r_minus = pt.realizations()
    out = {}
    for name, real in (("plus", r_plus), ("minus", r_minus)):
        f, g = coplanarity_f(real), coplanarity_g(real)
        out[name] = {
            "self_intersecting": realization_self_intersects(real),
            "f": f.value,
            "g": g.value,
            "boundary": f.on_self_intersection_boundary or g.on_self_intersection_boundary,
        }
    return out
