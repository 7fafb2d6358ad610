import math

import mpmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsforge import euler, localization as loc
from gsforge.stream import Grid2D, build_phi


@pytest.fixture(scope="module")
def template(geometry, params):
    return loc.Template(geometry, params)


@pytest.fixture(scope="module")
def family(template):
    return loc.Multiscale(template, loc.helical_placements(20, 1 / 3, bounding_radius=template.bounding_radius))


def test_smooth_step_limits():
    t = np.array([-1.0, 0.0, 0.5, 1.0, 2.0])
    assert np.array_equal(loc._smooth_step(t), [0.0, 0.0, 0.5, 1.0, 1.0])


def _mp_bump(t, lo, hi, ramp):
    def step(u):
        if u <= 0:
            return mpmath.mpf(0)
        if u >= 1:
            return mpmath.mpf(1)
        a, b = mpmath.exp(-1 / u), mpmath.exp(-1 / (1 - u))
        return a / (a + b)
    w = (hi - lo) * ramp
    return step((t - lo) / w) * step((hi - t) / w)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.05, 0.95), st.sampled_from([1, 2]))
def test_antiderivative_matches_high_precision(lo, frac, power):
    c = loc.CutoffSpec(lo, lo + 1.0, "bump")
    p = lo + frac
    with mpmath.workdps(20):
        mid = lo + 0.5  # the bump is not analytic at its midpoint when ramp = 1/2
        pts = [p, mid, lo + 1.0] if p < mid else [p, lo + 1.0]
        ref = -mpmath.quad(lambda t: _mp_bump(t, lo, lo + 1.0, 0.5) ** power, pts)
    assert c.antiderivative(p, power) == pytest.approx(float(ref), abs=1e-14)


def test_cutoff_kinds():
    b = loc.CutoffSpec(1.0, 2.0)
    assert b(0.5) == 0 and b(2.5) == 0 and b(1.5) == pytest.approx(1.0)
    lp = loc.CutoffSpec(1.0, 2.0, "lowpass")
    assert lp(0.5) == 1 and lp(2.5) == 0
    assert lp.antiderivative(0.0, 1) == pytest.approx(-1.0 - lp.total(1))
    ident = loc.CutoffSpec.identity()
    assert ident.antiderivative(3.0) == 3.0 and math.isinf(ident.total())
    with pytest.raises(ValueError):
        loc.CutoffSpec(2.0, 1.0)
    with pytest.raises(ValueError):
        loc.CutoffSpec(1.0, 2.0, "smoothstep")


def test_antiderivative_constant_outside_window():
    c = loc.CutoffSpec(1.0, 2.0)
    assert c.antiderivative(5.0) == 0.0
    assert c.antiderivative(-5.0) == pytest.approx(-c.total(2))


def test_apply_cutoff_support_and_window(geometry, params):
    f = euler.assemble_velocity(build_phi(Grid2D.square(0.1, 101), geometry), geometry, params)
    cut = loc.annulus_thresholds(geometry, params)
    c = loc.apply_cutoff(f, cut)
    X, Y = f.grid.mesh()
    out = ~loc.annulus_mask(X, Y, geometry.epsilon)
    assert np.all(c.u_r[out] == 0) and np.all(c.u_phi[out] == 0) and np.all(c.u_z[out] == 0)
    assert c.meta["localized"]
    with pytest.raises(ValueError):
        loc.apply_cutoff(f, loc.CutoffSpec(10.0, 20.0))
    same = loc.apply_cutoff(f, loc.CutoffSpec.identity())
    assert np.array_equal(same.u_r, f.u_r)


def test_template_geometry(template):
    assert template.major_radius == pytest.approx(20.0)
    assert template.bounding_radius == pytest.approx(21.0)
    u, p = template(np.array([[0.0, 0.0, 0.0], [20.0, 0.0, 0.0], [20.0, 0.0, 1.5]]))
    assert np.all(u == 0)
    assert p[1] == pytest.approx(template.hole_pressure) and p[2] == 0.0


def test_template_is_axisymmetric(template):
    pts = np.array([[20.8, 0.0, 0.2]])
    th = 0.7
    Rz = np.array([[math.cos(th), -math.sin(th), 0], [math.sin(th), math.cos(th), 0], [0, 0, 1]])
    u1, p1 = template(pts)
    u2, p2 = template(pts @ Rz.T)
    assert np.allclose(u2, u1 @ Rz.T, atol=1e-15)
    assert p1 == pytest.approx(p2)


def test_placements_disjoint_and_json(template):
    pl = loc.helical_placements(12, 1 / 3, bounding_radius=template.bounding_radius)
    back = loc.placements_from_json(loc.placements_to_json(pl))
    for a, b in zip(pl, back):
        assert np.array_equal(a.center, b.center) and a.scale == b.scale
    bad = [pl[0], loc.ShellPlacement(pl[0].center, pl[0].rotation, pl[0].scale, 1.0)]
    with pytest.raises(ValueError):
        loc.check_disjoint(bad, template.bounding_radius)
    with pytest.raises(ValueError):
        loc.ShellPlacement(np.zeros(3), np.ones((3, 3)), 1.0, 1.0)


def test_norm_proxies(family):
    pl = family.placements
    assert loc.norm_estimate(pl, 0.0, 2).converged
    assert loc.norm_estimate(pl, 1 / 3, math.inf).converged
    assert not loc.norm_estimate(pl, 0.4, math.inf).converged


def test_multiscale_zero_off_shells_and_thread_invariance(family, monkeypatch):
    rng = np.random.default_rng(5)
    P = family.placements[3]
    X = P.center + P.scale * rng.uniform(-21, 21, (5000, 3))
    u1, p1 = family(X, threads=1)
    monkeypatch.setenv("GSFORGE_THREADS", "4")
    u4, p4 = family(X, threads=4)
    assert np.array_equal(u1, u4) and np.array_equal(p1, p4)
    far = np.array([[5.0, 5.0, 5.0]])
    assert np.all(family(far)[0] == 0)


def test_scaling_law(family):
    """u at homologous points of shells n and n+1 differs by ratio**alpha."""
    a, b = family.placements[4], family.placements[5]
    X = np.array([20.8, 0.0, 0.2])
    ua, _ = family(a.center + a.scale * (a.rotation @ X))
    ub, _ = family(b.center + b.scale * (b.rotation @ X))
    assert np.linalg.norm(ub) / np.linalg.norm(ua) == pytest.approx(0.05 ** (1 / 3), rel=1e-12)
