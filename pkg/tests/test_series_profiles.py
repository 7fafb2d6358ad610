from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsforge.profiles import (EulerProfiles, euler_profiles, ode_residual, recurrence_defect,
                              singular_term, solve_z_zeta)
from gsforge.series import TruncatedSeries, ratio_radius


def test_first_coefficients_exact():
    z, zeta = solve_z_zeta(6, exact=True)
    assert z[1] == Fraction(15, 4)
    assert zeta[0] == Fraction(3, 2)
    assert zeta[1] == Fraction(-9, 16)
    assert z[0] == 0


def test_float_matches_rational():
    zf, qf = solve_z_zeta(12)
    ze, qe = solve_z_zeta(12, exact=True)
    for a, b in ((zf, ze), (qf, qe)):
        exact = np.array([float(c) for c in b.coeffs])
        scale = np.maximum(np.abs(exact), 1e-300)
        assert np.max(np.abs(a.as_float() - exact) / scale) < 1e-13


def test_recurrence_defect_zero_for_exact_series():
    z, zeta = solve_z_zeta(10, exact=True)
    assert recurrence_defect(z, zeta) == 0


def test_order_validation():
    with pytest.raises(ValueError):
        solve_z_zeta(1)
    with pytest.raises(ValueError):
        solve_z_zeta(3.5)


def test_profile_values_at_origin():
    pr = euler_profiles(12, exact=True)
    assert pr.a[0] == Fraction(1, 3)
    assert pr.b[0] == 1
    assert pr.epsilon == 0.05


def test_profiles_solve_their_odes(geometry):
    phi = np.linspace(-0.04, 0.04, 81)
    ra, rb = ode_residual(geometry.profiles, phi)
    assert ra < 1e-9 and rb < 1e-9


def test_singular_term_regular_at_zero(geometry):
    v = singular_term(geometry.profiles, np.array([0.0, 1e-8, -1e-8]))
    assert np.all(np.isfinite(v))
    assert abs(v[1] - v[0]) < 1e-6


def test_profile_normalisation_checked():
    pr = euler_profiles(8)
    with pytest.raises(ValueError):
        EulerProfiles(pr.a, pr.b + 1e-3, pr.epsilon)
    EulerProfiles(pr.a, pr.b + 1e-3, pr.epsilon, validate=False)


def test_series_json_round_trip_exact():
    z, _ = solve_z_zeta(5, exact=True)
    back = TruncatedSeries.loads(z.dumps())
    assert back.coeffs == z.coeffs


def test_series_radius_and_domain():
    s = TruncatedSeries((1.0, 0.5, 0.25, 0.125, 0.0625))
    assert ratio_radius(s.coeffs) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        s(3.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=8), st.floats(-0.3, 0.3))
def test_reciprocal_property(coeffs, t):
    coeffs = [1.5] + coeffs
    s = TruncatedSeries(tuple(coeffs), radius_estimate=1.0)
    prod = s * s.reciprocal()
    c = prod.as_float()
    assert c[0] == pytest.approx(1.0)
    assert np.max(np.abs(c[1:])) < 1e-9 * max(1.0, np.max(np.abs(coeffs)) ** len(coeffs))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6), st.floats(-0.5, 0.5))
def test_derivative_matches_numpy(coeffs, t):
    s = TruncatedSeries(tuple(coeffs), radius_estimate=1.0)
    ref = np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(coeffs))
    assert s.eval_deriv(t) == pytest.approx(ref, abs=1e-12)
