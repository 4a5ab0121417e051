from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conefold.antifrustum import AntiFrustumDesign, build_snap_pair, build_tower, solve_radius
from conefold.geometry import ConeSpec, coplanarity_det


@st.composite
def designs(draw, flat=None):
    n = draw(st.integers(3, 10))
    frac = draw(st.floats(0.02, 1.0))
    gamma = math.pi / 2 + frac * (math.pi / 2 - math.pi / n)
    lp = draw(st.floats(0.05, 1.3))
    is_flat = draw(st.booleans()) if flat is None else flat
    lm = math.pi / 2 if is_flat else draw(st.floats(lp + 0.05, math.pi / 2 - 0.01))
    return AntiFrustumDesign(n, gamma, ConeSpec(lp), ConeSpec(lm))


@settings(max_examples=80)
@given(designs())
def test_snap_pair_shares_edge_lengths(d):
    r_minus, r_plus = build_snap_pair(d)
    assert np.max(np.abs(r_minus.edge_lengths() - r_plus.edge_lengths())) < 1e-12
    assert 0 < d.r <= 1
    assert d.h_plus >= d.h_minus - 1e-15 >= -1e-15


@settings(max_examples=60)
@given(designs())
def test_rings_lie_on_their_cones(d):
    for real, cone in zip(build_snap_pair(d), (d.lambda_minus, d.lambda_plus)):
        assert np.allclose(np.linalg.norm(real.a[:, :2], axis=1), 1.0)
        assert np.allclose(np.linalg.norm(real.b[:, :2], axis=1), d.r)
        if not cone.is_flat:
            rel = real.b - real.apex
            assert np.max(np.abs(-rel[:, 2] * cone.l - np.hypot(rel[:, 0], rel[:, 1]))) < 1e-10


def _geometric_h_plus(n, r, gamma, h_minus):
    """Rotate B_-1 about A_1A_2 and intersect its circle with the cylinder of radius r."""
    a1 = np.array([math.cos(math.pi / n), -math.sin(math.pi / n), 0.0])
    a2 = np.array([math.cos(math.pi / n), math.sin(math.pi / n), 0.0])
    b = np.array([r * math.cos(gamma), r * math.sin(gamma), h_minus])
    axis = (a2 - a1) / np.linalg.norm(a2 - a1)
    centre = a1 + np.dot(b - a1, axis) * axis
    u = b - centre
    w = np.cross(axis, u)
    ts = np.linspace(0, 2 * math.pi, 20001)
    pts = centre + np.outer(np.cos(ts), u) + np.outer(np.sin(ts), w)
    f = np.hypot(pts[:, 0], pts[:, 1]) - r
    sols = []
    for i in np.flatnonzero(np.sign(f[:-1]) != np.sign(f[1:])):
        lo, hi = ts[i], ts[i + 1]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            pm = centre + math.cos(mid) * u + math.sin(mid) * w
            if np.sign(math.hypot(pm[0], pm[1]) - r) == np.sign(f[i]):
                lo = mid
            else:
                hi = mid
        sols.append(centre + math.cos(lo) * u + math.sin(lo) * w)
    return sols


def test_radius_against_circle_cylinder_oracle():
    d = AntiFrustumDesign(4, 3 * math.pi / 4, ConeSpec(math.pi / 3), ConeSpec(math.pi / 2))
    sols = _geometric_h_plus(4, d.r, d.gamma, d.h_minus)
    _, r_plus = build_snap_pair(d)
    # the circle starts on the cylinder at B_-1; the other crossing must be B_+1
    assert min(np.linalg.norm(s - r_plus.b[0]) for s in sols) < 1e-9


def test_radius_branch_is_reciprocal_pair():
    # a r^2 + (4C - 2a) r + a = 0 for the flat case has roots r and 1/r
    n, lp, g = 5, ConeSpec(math.pi / 5), 2.2
    r = solve_radius(n, lp, ConeSpec(math.pi / 2), g)
    a = lp.q**2
    big_c = math.cos(math.pi / n) * math.cos(g)
    assert abs(a * r * r + (4 * big_c - 2 * a) * r + a) < 1e-12
    assert 0 < r < 1


def test_radius_monotone_in_gamma():
    gammas = np.linspace(math.pi / 2 + 1e-3, math.pi - math.pi / 4, 60)
    rs = [solve_radius(4, ConeSpec(math.pi / 6), ConeSpec(math.pi / 2), g) for g in gammas]
    assert all(b < a for a, b in zip(rs, rs[1:]))


def test_gamma_boundaries():
    d = AntiFrustumDesign(6, math.pi / 2, ConeSpec(0.4), ConeSpec(1.0))
    assert d.degenerate and d.r == 1.0
    r_minus, r_plus = build_snap_pair(d)
    assert np.allclose(r_minus.b, r_plus.b)
    assert r_plus.pluecker_rank() < 6
    n = 6
    d = AntiFrustumDesign(n, math.pi - math.pi / n, ConeSpec(0.4), ConeSpec(1.0))
    _, r_plus = build_snap_pair(d)
    # frustum: B_1 lies above A_2 and B_n above A_1, so A_1A_2B_1B_n is planar
    quad = [r_plus.a[0], r_plus.a[1], r_plus.b[0], r_plus.b[-1]]
    assert abs(coplanarity_det(*quad)) < 1e-12
    d = AntiFrustumDesign(n, 2.3, ConeSpec(0.4), ConeSpec(1.0))
    assert all(real.pluecker_rank() == 6 for real in build_snap_pair(d))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        AntiFrustumDesign(6, 3.0, ConeSpec(0.4), ConeSpec(1.0))
    with pytest.raises(ValueError):
        AntiFrustumDesign(6, 2.0, ConeSpec(1.0), ConeSpec(0.4))
    with pytest.raises(ValueError):
        AntiFrustumDesign(2, 2.0, ConeSpec(0.4), ConeSpec(1.0))


def test_tower_properties():
    d = AntiFrustumDesign.from_degrees(5, 120, 30, 90)
    one = build_tower(d, "plus", 1)
    assert one.n_triangles == 10 and one.n_vertices == 10
    mesh = build_tower(d, "plus", 3)
    assert mesh.n_vertices == 5 * 4
    _, r_plus = build_snap_pair(d)
    rel = mesh.vertices - r_plus.apex
    assert np.max(np.abs(-rel[:, 2] * d.lambda_plus.l - np.hypot(rel[:, 0], rel[:, 1]))) < 1e-10
    lengths = [np.linalg.norm(mesh.vertices[5 * j + 1] - mesh.vertices[5 * j]) for j in range(4)]
    assert np.allclose(np.diff(np.log(lengths)), math.log(d.r))
    with pytest.raises(ValueError):
        build_tower(d, "plus", 0)


def test_mirror_reflects():
    d = AntiFrustumDesign(5, 2.0, ConeSpec(0.5), ConeSpec(1.2))
    m = AntiFrustumDesign(5, 2.0, ConeSpec(0.5), ConeSpec(1.2), mirror=True)
    for a, b in zip(build_snap_pair(d), build_snap_pair(m)):
        assert np.allclose(a.b * [1, -1, 1], b.b)
        assert np.allclose(a.edge_lengths(), b.edge_lengths())
