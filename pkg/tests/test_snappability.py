from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conefold.antifrustum import AntiFrustumDesign
from conefold.geometry import ConeSpec
from conefold.snappability import (
    StrainModel,
    _frustum_bars,
    antifrustum_snappability,
    bar_energy,
    family_energy,
    family_energy_truncated,
    gradient,
    rough_height,
    snap_branch_point,
    spiral_snap_path,
    spiral_snappability,
)
from conefold.spiral import find_shaky

SQRT3 = math.sqrt(3)


@pytest.fixture(scope="module")
def snap_path():
    return spiral_snap_path(6, SQRT3, 9)


def test_bar_energy():
    assert bar_energy(1.3, 1.3) == 0.0
    assert abs(bar_energy(1.0, 1.1) - 0.0055125) < 1e-15
    assert math.isclose(bar_energy(2.0, math.sqrt(4 + 0.3)), bar_energy(2.0, math.sqrt(4 - 0.3)))
    assert math.isclose(bar_energy(1.0, 1.1, StrainModel(3.0, 2.0)), 6 * bar_energy(1.0, 1.1))
    with pytest.raises(ValueError):
        bar_energy(0.0, 1.0)
    with pytest.raises(ValueError):
        StrainModel(0.0, 1.0)


@settings(max_examples=80)
@given(st.floats(0.2, 3.0), st.floats(0.2, 9.0), st.floats(0.3, 0.9), st.floats(0.05, 1.0))
def test_series_closed_form_matches_truncation(length, ls_sq, p, frac):
    p_s = p * (0.2 + 0.6 * frac) ** 0.25
    if p_s**4 / p**3 > 0.85:
        return
    # enough terms that the slowest geometric ratio leaves a tail below 1e-16
    slowest = max(p, p_s**2 / p, p_s**4 / p**3)
    terms = int(math.ceil(math.log(1e-16) / math.log(slowest)))
    closed = family_energy(length, ls_sq, p, p_s)
    assert abs(closed - family_energy_truncated(length, ls_sq, p, p_s, terms)) <= 1e-10 * max(abs(closed), 1e-300)


def test_rough_height_matches_closed_form():
    for n in range(3, 10):
        for g in (1.8, math.pi - math.pi / n):
            d = AntiFrustumDesign(n, g, ConeSpec(0.2), ConeSpec(math.pi / 2))
            bars = _frustum_bars(d)
            lat = bars.lengths[1:]
            h2 = np.sum((lat**2 - bars.x_lateral) / lat**3) / np.sum(1 / lat**3)
            assert abs(rough_height(bars) - math.sqrt(h2)) < 1e-12


@pytest.mark.parametrize("n", [3, 4, 6, 9])
@pytest.mark.parametrize("lam", [1e-3, math.pi / 6, math.pi / 4])
def test_antifrustum_modes(n, lam):
    for g in np.linspace(math.pi / 2 + 0.05, math.pi - math.pi / n, 4):
        rough = antifrustum_snappability(n, lam, g, "rough")
        imp = antifrustum_snappability(n, lam, g, "improved")
        assert rough.sigma >= imp.sigma >= 0
        assert imp.converged and imp.gradient_norm <= 1e-10 * imp.u_total + 1e-14 * imp.vol_total
        assert imp.rho > 0 and imp.h_s > 0


def test_antifrustum_invariances():
    base = antifrustum_snappability(6, 0.4, 2.2, "improved")
    other = antifrustum_snappability(6, 0.4, 2.2, "improved", model=StrainModel(7.0, 0.3))
    assert abs(base.sigma - other.sigma) < 1e-14
    for t in (0.5, 2.0):
        scaled = antifrustum_snappability(6, 0.4, 2.2, "improved", scale=t)
        assert abs(scaled.sigma - base.sigma) < 1e-12
        assert math.isclose(scaled.h_s, t * base.h_s, rel_tol=1e-9)


def test_antifrustum_degenerate_gamma():
    s = antifrustum_snappability(6, 0.4, math.pi / 2, "improved")
    assert s.sigma == 0.0


def test_antifrustum_rejects_bad_mode():
    with pytest.raises(ValueError):
        antifrustum_snappability(6, 0.4, 2.2, "exact")


def test_gradient_helper():
    g = gradient(lambda z: z[0] ** 2 * z[1] + np.sin(z[1]), np.array([0.7, 0.2]))
    assert np.allclose(g, [2 * 0.7 * 0.2, 0.49 + math.cos(0.2)], atol=1e-15)


def test_spiral_path_properties(snap_path):
    for pt in snap_path:
        assert pt.rough.sigma >= pt.improved.sigma >= 0
        for s in (pt.rough, pt.improved):
            assert not s.diverges and max(s.series_ratios) < 1
            assert 0 < s.p_s < 1 and -1 < s.c_s < 1 and s.r_s > 0
        assert pt.improved.converged
    # the shaky end is already shaky: zero energy
    assert snap_path[-1].rough.sigma < 1e-25 and snap_path[-1].improved.sigma < 1e-25
    assert snap_path[0].rough.sigma > 1e-3


def test_spiral_energy_matches_direct_sum(snap_path):
    pt = snap_branch_point(6, SQRT3, 0.25)[0]
    s = spiral_snappability(pt.realizations(), "rough")
    r_plus = pt.realizations()[0]
    ls = [s.r_s**2 * x for x in _shaky_sq(6, s)]
    direct = sum(family_energy_truncated(L, x, pt.p, s.p_s, 200) for L, x in zip(r_plus.edge_lengths(), ls))
    assert abs(direct - s.u_total) < 1e-10 * s.u_total


def _shaky_sq(n, s):
    from conefold.spiral import unit_gap

    return [unit_gap(t, s.p_s, s.c_s, 1 / math.tan(s.lambda_s)) for t in (1, n - 1, n)]


def test_spiral_invariances():
    pt, shaky = snap_branch_point(6, SQRT3, 0.26)
    pair = pt.realizations()
    base = spiral_snappability(pair, "improved", shaky)
    other = spiral_snappability(pair, "improved", shaky, StrainModel(7.0, 0.3))
    assert abs(base.sigma - other.sigma) < 1e-14
    for t in (0.5, 2.0):
        scaled = spiral_snappability(tuple(r.scaled(t) for r in pair), "improved", shaky)
        assert abs(scaled.sigma - base.sigma) < 1e-12
        assert math.isclose(scaled.r_s, t * base.r_s, rel_tol=1e-9)


def test_spiral_shaky_pair_has_zero_snappability():
    s = [x for x in find_shaky(6, SQRT3) if not x.self_intersecting][0]
    real = s.realization()
    assert spiral_snappability((real, real), "rough", s).sigma < 1e-25
    assert spiral_snappability((real, real), "improved", s).sigma < 1e-25


def test_spiral_divergence_flag():
    pt, shaky = snap_branch_point(6, SQRT3, 0.26)
    fake = type(shaky)(shaky.n, shaky.q, shaky.c_s, 0.999, False)
    s = spiral_snappability(pt.realizations(), "rough", fake)
    assert s.diverges and math.isinf(s.sigma)


def test_spiral_input_checks():
    pt, _ = snap_branch_point(6, SQRT3, 0.26)
    r_plus, r_minus = pt.realizations()
    with pytest.raises(ValueError):
        spiral_snappability((r_plus, type(r_minus)(6, r_minus.c, r_minus.p, 1.0, r_minus.r_scale)))
    with pytest.raises(ValueError):
        snap_branch_point(6, SQRT3, 0.5)
