"""Acceptance criteria; each test prints one PASS/FAIL line (run with ``-s`` to see them)."""
from __future__ import annotations

import math
import time

import numpy as np

from conefold.antifrustum import AntiFrustumDesign, build_tower
from conefold.crease import develop, svg_text
from conefold.crosssection import area_ratio_closed_form, cross_section, cross_section_at_height, equivalent_cone_angle
from conefold.geometry import ConeSpec, cheb_t, cheb_t_divided, cheb_u, spiral_vertices
from conefold.intersect import realization_self_intersects
from conefold.io import curve_csv, json_text
from conefold.mesh import obj_text
from conefold.selfintersect import THEOREM_RANGE, classify_pair, coplanarity_f, self_intersection_free_interval, verify_theorem
from conefold.snappability import (
    StrainModel,
    antifrustum_snappability,
    family_energy,
    family_energy_truncated,
    snap_branch_point,
    spiral_snap_path,
    spiral_snappability,
)
from conefold.spiral import (
    PyramidBase,
    SpiralRealization,
    build_spiral_mesh,
    edge_gap,
    find_pyramid_realization,
    find_shaky,
    pair_residual,
    solve_point,
    tristable_search,
)

SQRT3 = math.sqrt(3)
Q60, Q45, Q30 = ConeSpec(math.pi / 3).q, ConeSpec(math.pi / 4).q, ConeSpec(math.pi / 6).q


def report(number: int, checks: dict[str, bool], detail: str = "") -> None:
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    tail = f" failed: {', '.join(failed)}" if failed else ""
    print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'}{tail} {detail}".rstrip())
    assert ok, f"criterion {number} failed: {failed} {detail}"


def _nearest(points, c_plus, p):
    return min(points, key=lambda c: abs(c.c_plus - c_plus) + abs(c.p - p))


def test_criterion_1_example1():
    t0 = time.perf_counter()
    pts = solve_point(4, Q60, Q30, -0.55)
    elapsed = time.perf_counter() - t0
    c = _nearest(pts, -0.620223, 0.914773)
    checks = {
        "c_plus": abs(c.c_plus + 0.620223) < 1e-5,
        "p": abs(c.p - 0.914773) < 1e-5,
        "runtime": elapsed < 1.0,
    }
    report(1, checks, f"(c+={c.c_plus:.6f}, p={c.p:.6f}, {elapsed:.2f}s)")


def test_criterion_2_example3():
    table = [(-0.55, -0.615158, 0.733163), (-0.50, -0.661566, 0.735983), (-0.45, -0.705150, 0.741100)]
    checks, hs = {}, []
    for i, (cm, cp, p) in enumerate(table, 1):
        h = _nearest(solve_point(4, SQRT3, SQRT3, cm), cp, p)
        hs.append(h)
        checks[f"H{i}"] = abs(h.c_plus - cp) < 1e-5 and abs(h.p - p) < 1e-5
    cls = [classify_pair(h) for h in hs]
    checks["R- free"] = all(not c["minus"]["self_intersecting"] for c in cls)
    checks["R+1 free"] = not cls[0]["plus"]["self_intersecting"]
    checks["R+3 intersecting"] = cls[2]["plus"]["self_intersecting"]
    checks["R+2 boundary"] = abs(coplanarity_f(hs[1].realizations()[0]).value) < 1e-4
    report(2, checks)


def test_criterion_3_shaky_table():
    s4 = find_shaky(4, SQRT3)
    s6 = find_shaky(6, SQRT3)
    checks = {
        "n4": len(s4) == 1 and abs(s4[0].c_s + 0.582928) < 1e-5 and abs(s4[0].p_s - 0.732619) < 1e-5,
        "n6 count": len(s6) == 2,
    }
    a = _nearest_shaky(s6, 0.192041)
    b = _nearest_shaky(s6, -0.833611)
    checks["n6 first"] = abs(a.c_s - 0.192041) < 1e-5 and abs(a.p_s - 0.810448) < 1e-5
    checks["n6 second"] = abs(b.c_s + 0.833611) < 1e-5 and abs(b.p_s - 0.773273) < 1e-5
    checks["second intersecting"] = b.self_intersecting and not a.self_intersecting
    report(3, checks)


def _nearest_shaky(sols, c):
    return min(sols, key=lambda s: abs(s.c_s - c))


def test_criterion_4_pyramid_points():
    c5 = (math.sqrt(5) - 1) / 4
    table = [
        ("H5,1", PyramidBase.k_gon(5), c5, 0.065071, 0.819582),
        ("H5,2", PyramidBase.k_gon(5), c5, -0.858230, 0.966477),
        ("H6", PyramidBase.k_gon(6), 0.5, -0.248762, 0.905087),
        ("H5/2", PyramidBase.star(5, 2), -(1 + math.sqrt(5)) / 4, -0.856766, 0.774327),
    ]
    checks = {}
    for name, base, cm, cp, p in table:
        h = _nearest(find_pyramid_realization(6, SQRT3, base), cp, p)
        checks[name] = abs(h.c_minus - cm) < 1e-5 and abs(h.c_plus - cp) < 1e-5 and abs(h.p - p) < 1e-5
    iv = self_intersection_free_interval(6, SQRT3)
    checks["interval"] = (
        iv.complete
        and abs(iv.upper.c_minus - c5) < 1e-5
        and abs(iv.upper.point[0] - 0.065071) < 1e-5
        and iv.lower.kind == "shaky"
        and abs(iv.lower.c_minus - 0.192041) < 1e-5
    )
    report(4, checks)


def test_criterion_5_tristable():
    t0 = time.perf_counter()
    sols = tristable_search(7, Q60, Q45, Q30)
    elapsed = time.perf_counter() - t0
    s = min(sols, key=lambda t: abs(t.p - 0.872272) + abs(t.c_plus - 0.642073) + abs(t.c_circ + 0.015748) + abs(t.c_minus + 0.140929))
    r_plus, r_circ, r_minus = s.realizations()
    checks = {
        "values": abs(s.p - 0.872272) < 1e-5
        and abs(s.c_plus - 0.642073) < 1e-5
        and abs(s.c_circ + 0.015748) < 1e-5
        and abs(s.c_minus + 0.140929) < 1e-5,
        "only R+ free": not realization_self_intersects(r_plus)
        and realization_self_intersects(r_circ)
        and realization_self_intersects(r_minus),
        "runtime": elapsed < 60,
    }
    report(5, checks, f"({elapsed:.1f}s)")


def test_criterion_6_cross_section():
    h1 = _nearest(solve_point(4, SQRT3, SQRT3, -0.55), -0.615158, 0.733163)
    r_plus, r_minus = h1.realizations()
    a_minus = cross_section_at_height(r_minus, 0.45).area
    a_plus = cross_section_at_height(r_plus, 0.45).area
    mu_minus = math.degrees(equivalent_cone_angle(r_minus))
    mu_plus = math.degrees(equivalent_cone_angle(r_plus))
    checks = {
        "A-": abs(a_minus - 0.072578) < 1e-5,
        "A+": abs(a_plus - 0.050793) < 1e-5,
        "mu-": abs(mu_minus - 18.663188) < 1e-4,
        "mu+": abs(mu_plus - 15.778341) < 1e-4,
    }
    inv_ok, closed_ok = True, True
    for n in range(3, 7):
        for c in (-0.7, -0.2, 0.3, 0.8):
            for p in (0.4, 0.75, 0.93):
                for q in (0.5, SQRT3):
                    real = SpiralRealization(n, c, p, q, 1.3)
                    ratios = [cross_section(real, a).area / cross_section(real, a).h ** 2 for a in (0, 0.25, 0.5, 0.75, 1)]
                    inv_ok &= (max(ratios) - min(ratios)) < 1e-10 * max(ratios)
                    closed_ok &= abs(ratios[2] - area_ratio_closed_form(real)) < 1e-10 * ratios[2]
    checks["A/h^2 invariant"] = inv_ok
    checks["closed forms"] = closed_ok
    report(6, checks, f"(A-={a_minus:.6f}, A+={a_plus:.6f}, mu-={mu_minus:.6f}, mu+={mu_plus:.6f})")


def test_criterion_7_theorems():
    t0 = time.perf_counter()
    checks = {}
    for q in (1 / SQRT3, 1.0, SQRT3, 3.0):
        for tid, (lo, hi) in THEOREM_RANGE.items():
            for n in range(lo, hi + 1):
                rec = verify_theorem(tid, n, q)
                checks[f"T{tid} n={n} q={q:.3f}"] = rec.passed
    elapsed = time.perf_counter() - t0
    checks["runtime"] = elapsed < 300
    report(7, checks, f"({elapsed:.1f}s)")


def _widened(lo, hi, frac=0.1):
    w = frac * (hi - lo)
    return lo - w, hi + w


def test_criterion_8_snappability():
    checks = {}
    # anti-frustum sweeps
    af_order = True
    for n in range(3, 10):
        for lam in (1e-3, math.pi / 6, math.pi / 4):
            for g in np.linspace(math.pi / 2 + 0.02, math.pi - math.pi / n, 6):
                r, i = antifrustum_snappability(n, lam, g, "rough"), antifrustum_snappability(n, lam, g, "improved")
                af_order &= r.sigma >= i.sigma
    checks["antifrustum rough >= improved"] = af_order
    for mode in ("rough", "improved"):
        sig = {n: antifrustum_snappability(n, 1e-3, math.pi - math.pi / n, mode).sigma for n in range(3, 16)}
        checks[f"antifrustum peak n=6 ({mode})"] = max(sig, key=sig.get) == 6
    rho_lo, rho_hi = _widened(0.99, 1.0)
    rhos = [
        antifrustum_snappability(n, math.pi / 4, g, "improved").rho
        for n in range(3, 7)
        for g in np.linspace(math.pi / 2 + 1e-3, math.pi - math.pi / n, 25)
    ]
    checks["rho band"] = rho_lo <= min(rhos) and max(rhos) <= rho_hi
    # spiral dataset
    path = spiral_snap_path(6, SQRT3, 21)
    checks["spiral rough >= improved"] = all(pt.rough.sigma >= pt.improved.sigma for pt in path)
    imp = [pt.improved for pt in path]
    lam = [math.degrees(s.lambda_s) for s in imp]
    delta = [math.degrees(s.delta_s) for s in imp]
    phi = [math.degrees(s.phi_s) for s in imp]
    for name, vals, band in (("lambda_s", lam, (29.4, 30.0)), ("delta_s", delta, (106.4, 107.0)), ("phi_s", phi, (79.12, 79.15))):
        lo, hi = _widened(*band)
        checks[f"{name} band"] = lo <= min(vals) and max(vals) <= hi
    checks["series ratios < 1"] = all(max(pt.rough.series_ratios + pt.improved.series_ratios) < 1 for pt in path)
    # invariances
    base = antifrustum_snappability(6, 0.4, 2.2, "improved")
    inv = abs(antifrustum_snappability(6, 0.4, 2.2, "improved", model=StrainModel(7.0, 0.3)).sigma - base.sigma) < 1e-12
    inv &= all(abs(antifrustum_snappability(6, 0.4, 2.2, "improved", scale=t).sigma - base.sigma) < 1e-12 for t in (0.5, 2.0))
    pt, shaky = snap_branch_point(6, SQRT3, 0.26)
    pair = pt.realizations()
    sb = spiral_snappability(pair, "improved", shaky)
    inv &= abs(spiral_snappability(pair, "improved", shaky, StrainModel(7.0, 0.3)).sigma - sb.sigma) < 1e-12
    inv &= all(abs(spiral_snappability(tuple(r.scaled(t) for r in pair), "improved", shaky).sigma - sb.sigma) < 1e-12 for t in (0.5, 2.0))
    checks["invariance"] = inv
    detail = (
        f"(rho [{min(rhos):.4f}, {max(rhos):.4f}], lambda_s [{min(lam):.3f}, {max(lam):.3f}], "
        f"delta_s [{min(delta):.3f}, {max(delta):.3f}], phi_s [{min(phi):.3f}, {max(phi):.3f}])"
    )
    report(8, checks, detail)


def test_criterion_9_property_suites():
    checks = {}
    thetas = np.linspace(0.01, math.pi - 0.01, 37)
    x = np.cos(thetas)
    cheb = True
    for k in range(0, 16):
        cheb &= np.max(np.abs(cheb_t(k, x) - np.cos(k * thetas))) < 1e-10
        cheb &= np.max(np.abs(cheb_u(k, x) - np.sin((k + 1) * thetas) / np.sin(thetas))) < 1e-10 * max(1, k + 1) ** 1
        if k:
            cheb &= np.max(np.abs(cheb_t_divided(k, x, x) - k * cheb_u(k - 1, x))) < 1e-10 * k * k
    checks["chebyshev"] = bool(cheb)
    gap = True
    for n in (4, 6, 9):
        for k in (1, n - 1, n):
            for p, cp, cm, qp, qm, rm in [(0.3, 0.5, -0.2, 1.2, 0.4, 0.8), (0.9, -0.7, 0.6, 0.0, 2.5, 1.7), (0.6, 0.1, 0.1, 1.0, 1.0, 1.0)]:
                vp = spiral_vertices(1.0, p, cp, qp, [0, k])
                vm = spiral_vertices(rm, p, cm, qm, [0, k])
                brute = np.sum((vp[1] - vp[0]) ** 2) - np.sum((vm[1] - vm[0]) ** 2)
                gap &= abs(edge_gap(k, p, cp, cm, qp, qm, rm) - brute) < 1e-12
    checks["edge gap oracle"] = bool(gap)
    sym = True
    for c in solve_point(5, SQRT3, SQRT3, -0.3):
        partner = _nearest(solve_point(5, SQRT3, SQRT3, c.c_plus), c.c_minus, c.p)
        sym &= abs(partner.c_plus - c.c_minus) < 1e-8 and abs(partner.p - c.p) < 1e-8
        for k in (4, 5):
            sym &= abs(pair_residual(k, 1 / c.p, c.c_plus, c.c_minus, SQRT3, SQRT3) * c.p ** (2 * k + 1)) < 1e-9
    checks["symmetry and p-reciprocity"] = bool(sym)
    checks["n=3 empty"] = all(not solve_point(3, q1, q2, cm) for cm in np.linspace(-0.9, 0.9, 7) for q1, q2 in ((SQRT3, SQRT3), (Q60, Q30)))
    dev = True
    for mesh in (
        build_tower(AntiFrustumDesign.from_degrees(6, 140, 30, 90), "plus", 2),
        build_spiral_mesh(SpiralRealization(6, 0.3, 0.8, SQRT3)),
    ):
        sums = develop(mesh).angle_sums(mesh)
        dev &= bool(sums) and max(abs(v - 2 * math.pi) for v in sums.values()) < 1e-9
    checks["developability"] = dev
    series = True
    for length, ls, p, ps in [(1.3, 1.5, 0.8, 0.79), (0.7, 0.4, 0.6, 0.55), (2.0, 4.5, 0.85, 0.84)]:
        closed = family_energy(length, ls, p, ps)
        series &= abs(closed - family_energy_truncated(length, ls, p, ps, 200)) < 1e-10 * closed
    checks["series closed form"] = series
    mesh = build_tower(AntiFrustumDesign.from_degrees(5, 120, 30, 90), "minus", 3)
    pts = solve_point(4, Q60, Q30, -0.55)
    checks["deterministic output"] = (
        obj_text(mesh) == obj_text(build_tower(AntiFrustumDesign.from_degrees(5, 120, 30, 90), "minus", 3))
        and curve_csv(pts) == curve_csv(solve_point(4, Q60, Q30, -0.55))
        and json_text([c.to_dict() for c in pts]) == json_text([c.to_dict() for c in solve_point(4, Q60, Q30, -0.55)])
        and svg_text(develop(mesh)) == svg_text(develop(mesh))
    )
    report(9, checks)
