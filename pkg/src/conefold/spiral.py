"""Spiral-motion triangulations on cones and the design problem for snap pairs.

A realization is generated by a spiral displacement (rotation by ``phi``
about the cone axis composed with scaling by ``p`` towards the apex) acting
on one vertex. Two realizations share all edge lengths exactly when the
three edge families ``V_0V_1``, ``V_0V_{n-1}`` and ``V_0V_n`` agree. With the
first realization scaled to ``r = 1``, the second scale ``r_-`` is eliminated
from the ``V_0V_1`` condition; the remaining two equations in ``(c_+, p)``
are solved by multi-start Newton.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
import numpy as np

from .geometry import ConeSpec, cheb_t, cheb_t_divided, polygon_cosine, spiral_vertices
from .mesh import Mesh
from .newton import batch_newton, complex_step_jacobian, dedupe, grid_starts


@dataclass(frozen=True)
class SolverConfig:
    grid_c: int = 41
    grid_p: int = 41
    newton_tol: float = 1e-12
    accept_tol: float = 1e-10
    max_iter: int = 100
    dedupe_tol: float = 1e-7
    spurious_tol: float = 1e-9
    near_singular_cond: float = 1e6
    # p -> 0 and (p, c) -> (1, 1) are degenerate limits where every residual
    # vanishes to rounding; roots closer than this to them are discarded
    p_min: float = 1e-3
    p_max: float = 1 - 1e-4
    c_margin: float = 1e-6

    def in_domain(self, p: float, *cs: float) -> bool:
        return self.p_min < p < self.p_max and all(abs(c) < 1 - self.c_margin for c in cs)


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class SpiralRealization:
    n: int
    c: float
    p: float
    q: float
    r_scale: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be at least 3")
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"spiral ratio p must satisfy 0 < p < 1, got {self.p!r}")
        if not (-1.0 < self.c < 1.0):
            raise ValueError("c = cos(phi) must lie in (-1, 1)")
        if self.q < 0 or self.r_scale <= 0:
            raise ValueError("need q >= 0 and r_scale > 0")

    @property
    def phi(self) -> float:
        return math.acos(self.c)

    @property
    def cone(self) -> ConeSpec:
        return ConeSpec.from_q(self.q)

    def vertices(self, indices) -> np.ndarray:
        return spiral_vertices(self.r_scale, self.p, self.c, self.q, indices)

    def vertex(self, i: int) -> np.ndarray:
        return self.vertices([i])[0]

    def edge_lengths(self) -> tuple[float, float, float]:
        """Lengths of ``V_0V_1``, ``V_0V_{n-1}``, ``V_0V_n``."""
        v = self.vertices([0, 1, self.n - 1, self.n])
        return tuple(float(np.linalg.norm(v[k] - v[0])) for k in (1, 2, 3))

    def scaled(self, t: float) -> "SpiralRealization":
        return SpiralRealization(self.n, self.c, self.p, self.q, self.r_scale * t)


@dataclass
class CurvePoint:
    n: int
    q_plus: float
    q_minus: float
    c_minus: float
    c_plus: float
    p: float
    r_minus: float
    residuals: tuple[float, float, float]
    branch_id: int = -1
    planar: bool = False
    jacobian_cond: float = float("nan")
    near_singular: bool = False

    def realizations(self) -> tuple[SpiralRealization, SpiralRealization]:
        """``(R_+, R_-)`` with ``R_+`` at unit scale."""
        return (
            SpiralRealization(self.n, self.c_plus, self.p, self.q_plus, 1.0),
            SpiralRealization(self.n, self.c_minus, self.p, self.q_minus, self.r_minus),
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ShakySolution:
    n: int
    q: float
    c_s: float
    p_s: float
    self_intersecting: bool
    planar: bool = False

    def realization(self) -> SpiralRealization:
        return SpiralRealization(self.n, self.c_s, self.p_s, self.q, 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TriStableSolution:
    n: int
    p: float
    c_plus: float
    c_circ: float
    c_minus: float
    q_plus: float
    q_circ: float
    q_minus: float
    r_circ: float
    r_minus: float
    max_residual: float

    def realizations(self) -> tuple[SpiralRealization, SpiralRealization, SpiralRealization]:
        return (
            SpiralRealization(self.n, self.c_plus, self.p, self.q_plus, 1.0),
            SpiralRealization(self.n, self.c_circ, self.p, self.q_circ, self.r_circ),
            SpiralRealization(self.n, self.c_minus, self.p, self.q_minus, self.r_minus),
        )

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PyramidBase:
    """Base polygon ``{k/d}`` of a regular pyramid; ``d = 1`` is the convex k-gon."""

    k: int
    d: int = 1

    @classmethod
    def k_gon(cls, k: int) -> "PyramidBase":
        return cls(k, 1)

    @classmethod
    def star(cls, k: int, d: int) -> "PyramidBase":
        if not (1 < d < k / 2):
            raise ValueError("star polygon needs 1 < d < k/2")
        return cls(k, d)

    @property
    def cosine(self) -> float:
        return polygon_cosine(self.k, self.d).value

    @property
    def label(self) -> str:
        return str(self.k) if self.d == 1 else f"{self.k}/{self.d}"


# -- residuals ---------------------------------------------------------------


def unit_gap(k: int, p, c, q):
    """Squared length of ``V_0V_k`` for unit scale; polynomial in ``p`` and ``c``."""
    pk = p**k
    return pk * pk * (q * q + 1) - 2 * pk * q * q - 2 * cheb_t(k, c) * pk + q * q + 1


def edge_gap(k: int, p, c_plus, c_minus, q_plus, q_minus, r_minus):
    """``d(0,k)``: squared ``V_0V_k`` length in ``R_+`` (unit scale) minus that in ``R_-``."""
    return unit_gap(k, p, c_plus, q_plus) - unit_gap(k, p, c_minus, q_minus) * r_minus**2


def r_minus_squared(p, c_plus, c_minus, q_plus, q_minus):
    return unit_gap(1, p, c_plus, q_plus) / unit_gap(1, p, c_minus, q_minus)


def pair_residual(k: int, p, c_a, c_b, q_a, q_b):
    """Cross-multiplied gap with ``r`` eliminated, divided by the trivial factor ``p``."""
    return (unit_gap(k, p, c_a, q_a) * unit_gap(1, p, c_b, q_b) - unit_gap(k, p, c_b, q_b) * unit_gap(1, p, c_a, q_a)) / p


def _gap_step(n: int, p, c, q):
    """``(unit_gap(n) - unit_gap(n-1)) / p^(n-1)`` as a polynomial."""
    q2 = q * q
    return (q2 + 1) * (p ** (n + 1) - p ** (n - 1)) - 2 * p * (q2 + cheb_t(n, c)) + 2 * (q2 + cheb_t(n - 1, c))


def pair_system(n: int, p, c_a, c_b, q_a, q_b):
    """Well-conditioned form of the ``k = n-1, n`` pair residuals.

    As ``p -> 0`` both residuals tend to the same nonzero expression, which
    makes the plain pair nearly dependent and lets Newton stall on fake
    roots. The second equation is replaced by the exact quotient
    ``(pair_residual(n) - pair_residual(n-1)) / p^(n-2)``; for ``p > 0`` the
    zero set is unchanged.
    """
    e1 = pair_residual(n - 1, p, c_a, c_b, q_a, q_b)
    e2 = _gap_step(n, p, c_a, q_a) * unit_gap(1, p, c_b, q_b) - _gap_step(n, p, c_b, q_b) * unit_gap(1, p, c_a, q_a)
    return e1, e2


def same_cone_residual(k: int, p, c_plus, c_minus, q):
    """:func:`pair_residual` for ``q_+ = q_-`` with the factor ``c_- - c_+`` divided out.

    Exact on the diagonal, where it defines the shaky realizations.
    """
    def a(j):
        pj = p**j
        return pj * pj * (1 + q * q) - 2 * pj * q * q + 1 + q * q

    d = cheb_t_divided(k, c_plus, c_minus)
    return -2 * a(k) + 2 * p ** (k - 1) * a(1) * d + 4 * p**k * (cheb_t(k, c_minus) - c_minus * d)


def _is_same_cone(q_plus: float, q_minus: float) -> bool:
    return abs(q_plus - q_minus) <= 1e-14 * max(1.0, abs(q_plus))


def _design_system(n: int, q_plus: float, q_minus: float, c_minus: float):
    same = _is_same_cone(q_plus, q_minus)

    def func(x):
        c_plus, p = x[:, 0], x[:, 1]
        if same:
            rows = [same_cone_residual(k, p, c_plus, c_minus, q_plus) for k in (n - 1, n)]
        else:
            rows = list(pair_system(n, p, c_plus, c_minus, q_plus, q_minus))
        return np.column_stack(rows)

    return func


def _newton(func, starts, cfg: SolverConfig):
    with np.errstate(all="ignore"):
        return batch_newton(func, starts, tol=cfg.newton_tol, max_iter=cfg.max_iter)


def _default_starts(cfg: SolverConfig) -> np.ndarray:
    return grid_starts(np.linspace(-0.99, 0.99, cfg.grid_c), np.linspace(0.02, 0.98, cfg.grid_p))


def _curve_points(n, q_plus, q_minus, c_minus, xs, func, cfg: SolverConfig) -> list[CurvePoint]:
    out = []
    for c_plus, p in xs:
        if not cfg.in_domain(p, c_plus):
            continue
        if q_plus == 0 and abs(2 * c_plus * p - p * p - 1) < cfg.spurious_tol:
            continue
        if q_minus == 0 and abs(2 * c_minus * p - p * p - 1) < cfg.spurious_tol:
            continue
        g_plus, g_minus = unit_gap(1, p, c_plus, q_plus), unit_gap(1, p, c_minus, q_minus)
        if g_minus <= cfg.spurious_tol or g_plus <= cfg.spurious_tol:
            continue
        r_minus = math.sqrt(g_plus / g_minus)
        resid = tuple(float(edge_gap(k, p, c_plus, c_minus, q_plus, q_minus, r_minus)) for k in (1, n - 1, n))
        _, jac = complex_step_jacobian(func, np.array([[c_plus, p]]))
        cond = float(np.linalg.cond(jac[0]))
        out.append(
            CurvePoint(
                n=n, q_plus=q_plus, q_minus=q_minus, c_minus=float(c_minus), c_plus=float(c_plus), p=float(p),
                r_minus=r_minus, residuals=resid, planar=(q_plus == 0 and q_minus == 0),
                jacobian_cond=cond, near_singular=cond > cfg.near_singular_cond,
            )
        )
    return out


def solve_point(
    n: int, q_plus: float, q_minus: float, c_minus: float, cfg: SolverConfig = DEFAULT_CONFIG, seeds=None
) -> list[CurvePoint]:
    """All partners ``(c_+, p, r_-)`` of a realization with ``cos(phi_-) = c_minus``.

    ``R_+`` sits on the cone with ``q_plus`` at unit scale. Only ``p < 1`` is
    returned; the reciprocal ``1/p`` also solves the system. ``seeds``
    (rows of ``(c_+, p)``) are used in addition to the default grid, or
    instead of it when ``cfg`` has a zero-sized grid.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if not (-1.0 < c_minus < 1.0):
        raise ValueError("c_minus must lie in (-1, 1)")
    if q_plus < 0 or q_minus < 0:
        raise ValueError("q must be non-negative")
    func = _design_system(n, q_plus, q_minus, c_minus)
    starts = [_default_starts(cfg)] if cfg.grid_c and cfg.grid_p else []
    if seeds is not None and len(seeds):
        starts.append(np.asarray(seeds, dtype=float).reshape(-1, 2))
    if not starts:
        return []
    res = _newton(func, np.vstack(starts), cfg)
    ok = res.converged | (res.residual < cfg.accept_tol)
    xs = dedupe(res.x[ok], cfg.dedupe_tol) if ok.any() else np.empty((0, 2))
    pts = _curve_points(n, q_plus, q_minus, c_minus, xs, func, cfg)
    return sorted(pts, key=lambda cp: (cp.c_plus, cp.p))


@dataclass
class TraceResult:
    points: list[CurvePoint]
    lost_branches: list[tuple[int, float]] = field(default_factory=list)  # (branch_id, c_minus where lost)

    @property
    def branch_ids(self) -> list[int]:
        return sorted({pt.branch_id for pt in self.points})

    def branch(self, bid: int) -> list[CurvePoint]:
        return [pt for pt in self.points if pt.branch_id == bid]


def trace_curve(
    n: int, q_plus: float, q_minus: float, c_minus_samples, cfg: SolverConfig = DEFAULT_CONFIG, regrid: bool = True
) -> TraceResult:
    """Sweep ``c_minus`` and follow every solution branch by continuation.

    Each tracked branch is continued by Newton from its previous point. Grid
    solutions that no continuation reached open new branches. A branch whose
    continuation fails (leaves the domain or merges into another branch) is
    closed and reported in ``lost_branches``.
    """
    samples = [float(c) for c in c_minus_samples]
    if any(not (-1.0 < c < 1.0) for c in samples):
        raise ValueError("c_minus samples must lie in (-1, 1)")
    active: dict[int, CurvePoint] = {}
    points: list[CurvePoint] = []
    lost: list[tuple[int, float]] = []
    next_id = 0
    for i, cm in enumerate(samples):
        continued: dict[int, CurvePoint] = {}
        if active:
            seeds = np.array([[pt.c_plus, pt.p] for pt in active.values()])
            func = _design_system(n, q_plus, q_minus, cm)
            res = _newton(func, seeds, cfg)
            for (bid, prev), x, conv, r in zip(active.items(), res.x, res.converged, res.residual):
                found = _curve_points(n, q_plus, q_minus, cm, x[None, :], func, cfg) if (conv or r < cfg.accept_tol) else []
                if found:
                    continued[bid] = found[0]
            # branches that collapsed onto the same point: keep the one that moved least
            by_key: dict[tuple[float, float], int] = {}
            for bid, pt in list(continued.items()):
                key = next((k for k in by_key if abs(k[0] - pt.c_plus) < cfg.dedupe_tol and abs(k[1] - pt.p) < cfg.dedupe_tol), None)
                if key is None:
                    by_key[(pt.c_plus, pt.p)] = bid
                    continue
                other = by_key[key]
                d_new = _dist(active[bid], pt)
                d_old = _dist(active[other], continued[other])
                loser = bid if d_new >= d_old else other
                if loser == other:
                    by_key[key] = bid
                del continued[loser]
            for bid in active:
                if bid not in continued:
                    lost.append((bid, cm))
        fresh = solve_point(n, q_plus, q_minus, cm, cfg) if (regrid or i == 0) else []
        for pt in fresh:
            if any(_dist(pt, other) < 1e-6 for other in continued.values()):
                continue
            continued[next_id] = pt
            next_id += 1
        for bid, pt in continued.items():
            pt.branch_id = bid
            points.append(pt)
        active = continued
    points.sort(key=lambda pt: (pt.branch_id, pt.c_minus))
    return TraceResult(points, lost)


def _dist(a: CurvePoint, b: CurvePoint) -> float:
    return max(abs(a.c_plus - b.c_plus), abs(a.p - b.p))


# -- shaky, pyramid and tri-stable searches ---------------------------------


def find_shaky(
    n: int, q_plus: float, q_minus: float | None = None, cfg: SolverConfig = DEFAULT_CONFIG, check_intersections: bool = True
) -> list[ShakySolution]:
    """Realizations where the two partners coincide (``c_- = c_+``).

    Only same-cone designs can coincide; for ``q_plus != q_minus`` the list
    is empty.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    q_minus = q_plus if q_minus is None else q_minus
    if not _is_same_cone(q_plus, q_minus):
        return []
    q = q_plus

    def func(x):
        c, p = x[:, 0], x[:, 1]
        return np.column_stack([same_cone_residual(k, p, c, c, q) for k in (n - 1, n)])

    res = _newton(func, _default_starts(cfg), cfg)
    ok = res.converged | (res.residual < cfg.accept_tol)
    xs = dedupe(res.x[ok], cfg.dedupe_tol) if ok.any() else np.empty((0, 2))
    out = []
    for c, p in xs:
        if not cfg.in_domain(p, c):
            continue
        if q == 0 and abs(2 * c * p - p * p - 1) < cfg.spurious_tol:
            continue
        sol = ShakySolution(n, q, float(c), float(p), False, planar=(q == 0))
        if check_intersections:
            from .intersect import realization_self_intersects

            sol.self_intersecting = realization_self_intersects(sol.realization())
        out.append(sol)
    return sorted(out, key=lambda s: -s.c_s)


def find_pyramid_realization(n: int, q: float, base: PyramidBase, cfg: SolverConfig = DEFAULT_CONFIG) -> list[CurvePoint]:
    """Partners of the realization whose vertices ``V_i`` lie on a regular ``{k/d}`` pyramid.

    Such a realization has ``phi_- = 2 d pi / k``; ``k`` must be ``n - 1`` or ``n``.
    """
    if base.k not in (n - 1, n):
        raise ValueError(f"pyramid base must have n-1 or n corners, got {base.k}")
    return solve_point(n, q, q, base.cosine, cfg)


def tristable_search(
    n: int, q_plus: float, q_circ: float, q_minus: float, p_grid: int = 6, c_grid: int = 7, cfg: SolverConfig = DEFAULT_CONFIG
) -> list[TriStableSolution]:
    """Triples of realizations on three different cones sharing all edge lengths.

    Multi-start Newton on ``(p, c_+, c_o, c_-)`` for the ``(+,-)`` and
    ``(+,o)`` pair systems; the ``(o,-)`` pair then holds automatically.
    This replaces a scan over ``p`` followed by curve intersection: the joint
    system is square, so starting Newton directly on it is simpler.
    """
    if n < 4:
        raise ValueError("tri-stable designs need n >= 4")
    qs = (q_plus, q_circ, q_minus)
    if any(_is_same_cone(a, b) for a, b in ((q_plus, q_circ), (q_plus, q_minus), (q_circ, q_minus))):
        raise ValueError("the three cones must be distinct")

    def func(x):
        p, cp, co, cm = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
        rows = [*pair_system(n, p, cp, cm, q_plus, q_minus), *pair_system(n, p, cp, co, q_plus, q_circ)]
        return np.column_stack(rows)

    cs = np.linspace(-0.9, 0.9, c_grid)
    starts = grid_starts(np.linspace(0.1, 0.95, p_grid), cs, cs, cs)
    res = _newton(func, starts, cfg)
    ok = res.converged | (res.residual < cfg.accept_tol)
    xs = dedupe(res.x[ok], cfg.dedupe_tol) if ok.any() else np.empty((0, 4))
    out = []
    for p, cp, co, cm in xs:
        if not cfg.in_domain(p, cp, co, cm):
            continue
        # roots on the degenerate locus c_+ = c_o = c_- = 1 are not isolated
        _, jac = complex_step_jacobian(func, np.array([[p, cp, co, cm]]))
        if np.linalg.cond(jac[0]) > cfg.near_singular_cond:
            continue
        g = [unit_gap(1, p, c, q) for c, q in zip((cp, co, cm), qs)]
        if min(g) <= cfg.spurious_tol:
            continue
        r_circ, r_minus = math.sqrt(g[0] / g[1]), math.sqrt(g[0] / g[2])
        worst = 0.0
        for k in (1, n - 1, n):
            a = unit_gap(k, p, cp, q_plus)
            b = unit_gap(k, p, co, q_circ) * r_circ**2
            c = unit_gap(k, p, cm, q_minus) * r_minus**2
            worst = max(worst, abs(a - b), abs(a - c), abs(b - c))
        out.append(TriStableSolution(n, float(p), float(cp), float(co), float(cm), *qs, r_circ, r_minus, worst))
    return sorted(out, key=lambda s: (s.p, s.c_plus))


# -- meshes -------------------------------------------------------------------


def spiral_triangles(n: int, num_vertices: int) -> np.ndarray:
    """Faces ``(V_i, V_{i+1}, V_{i+n})`` and ``(V_i, V_{i+n-1}, V_{i+n})`` of the strip."""
    tris = []
    for i in range(num_vertices - n):
        tris.append((i, i + 1, i + n))
        tris.append((i, i + n - 1, i + n))
    return np.array(tris, dtype=int)


def build_spiral_mesh(realization: SpiralRealization, num_vertices: int | None = None) -> Mesh:
    n = realization.n
    if num_vertices is None:
        num_vertices = 5 * n + 2
    if num_vertices < 2 * n + 1:
        raise ValueError("need at least 2n+1 vertices")
    verts = realization.vertices(np.arange(num_vertices))
    meta = {"construction": "spiral", "n": n, "c": realization.c, "p": realization.p, "q": realization.q, "r": realization.r_scale}
    return Mesh(verts, spiral_triangles(n, num_vertices), meta)

