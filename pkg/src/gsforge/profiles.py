"""Analytic profiles a(phi), b(phi) for the localizable Euler construction.

In rescaled variables (m = 1, alpha_0 = 1/3, beta_0 = 1) the profile ODEs

    a' = 2/(a - b) + (b - 3a)/(3 phi),   a(0) = 1/3
    b' = 1/(a - b),                       b(0) = 1

are regular in the variables z = b - 3a and zeta = 1/(b - a):

    z'    = -z/t + 5 zeta
    zeta' = z zeta**2/(3t) - zeta**3

whose power series coefficients follow from an explicit recurrence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .series import TruncatedSeries, cauchy

DEFAULT_ORDER = 12
EPSILON_CAP = 0.05


def solve_z_zeta(order: int = DEFAULT_ORDER, exact: bool = False):
    """Power series of z and zeta to ``order``.

    Uses z_j = 5 zeta_{j-1}/(j+1) and
    j zeta_j = (z zeta^2)_j / 3 - (zeta^3)_{j-1}, with zeta_0 = 3/2.
    With ``exact=True`` the coefficients are Fractions.
    """
    if int(order) != order or order < 2:
        raise ValueError(f"order must be an integer >= 2, got {order!r}")
    N = int(order)
    one = Fraction(1) if exact else 1.0
    z = [0 * one] * (N + 1)
    zeta = [0 * one] * (N + 1)
    zeta[0] = 3 * one / 2
    zeta2 = [zeta[0] * zeta[0]] + [0 * one] * N
    for j in range(1, N + 1):
        z[j] = 5 * zeta[j - 1] / (j + 1)
        # zeta2[0..j-1] are final; z_0 = 0 so zeta2[j] is not needed here
        zz = sum(z[i] * zeta2[j - i] for i in range(1, j + 1))
        zeta3 = cauchy(zeta2, zeta, j - 1)
        zeta[j] = (zz / 3 - zeta3) / j
        zeta2[j] = cauchy(zeta, zeta, j)
    return TruncatedSeries(tuple(z)), TruncatedSeries(tuple(zeta))


def recurrence_defect(z: TruncatedSeries, zeta: TruncatedSeries) -> float:
    """Max |defect| of both recurrences over 1 <= j <= N (0 for exact input)."""
    N = min(z.order, zeta.order)
    zeta2 = [cauchy(zeta.coeffs, zeta.coeffs, j) for j in range(N + 1)]
    worst = 0
    for j in range(1, N + 1):
        d1 = z[j] - 5 * zeta[j - 1] / (j + 1)
        zz = cauchy(z.coeffs, zeta2, j)
        d2 = j * zeta[j] - (zz / 3 - cauchy(zeta2, zeta.coeffs, j - 1))
        worst = max(worst, abs(d1), abs(d2))
    return worst


@dataclass(frozen=True)
class EulerProfiles:
    a: TruncatedSeries
    b: TruncatedSeries
    epsilon: float
    validate: bool = True  # False admits perturbed profiles for controlled experiments

    def __post_init__(self):
        if not self.validate:
            return
        if self.a[0] != Fraction(1, 3) and abs(float(self.a[0]) - 1 / 3) > 1e-15:
            raise ValueError(f"a(0) must be 1/3, got {self.a[0]}")
        if float(self.b[0]) != 1.0:
            raise ValueError(f"b(0) must be 1, got {self.b[0]}")
        phi = np.linspace(-self.epsilon, self.epsilon, 201)
        gap = self.b(phi) - self.a(phi)
        if np.min(gap) < 0.5 * (2 / 3):
            raise ValueError("b - a degenerates on the interval; shrink epsilon")

    @property
    def order(self) -> int:
        return min(self.a.order, self.b.order)

    @property
    def radius(self) -> float:
        return min(self.a.radius_estimate, self.b.radius_estimate)


def choose_epsilon(radius: float) -> float:
    return min(radius / 2, EPSILON_CAP)


def profiles_from_z_zeta(z: TruncatedSeries, zeta: TruncatedSeries) -> EulerProfiles:
    """a = (1/zeta - z)/2 and b = a + 1/zeta, truncated at the common order."""
    if zeta[0] == 0:
        raise ValueError("zeta has zero constant term; 1/zeta undefined")
    inv = zeta.reciprocal()
    half = Fraction(1, 2) if (inv.exact and z.exact) else 0.5
    a = (inv - z).scale(half)
    b = a + inv
    rad = min(a.radius_estimate, b.radius_estimate)
    a = TruncatedSeries(a.coeffs, radius_estimate=rad)
    b = TruncatedSeries(b.coeffs, radius_estimate=rad)
    return EulerProfiles(a, b, choose_epsilon(rad))


def euler_profiles(order: int = DEFAULT_ORDER, exact: bool = False) -> EulerProfiles:
    return profiles_from_z_zeta(*solve_z_zeta(order, exact=exact))


def singular_term(profiles: EulerProfiles, phi):
    """(b - 3a)/(3 phi) evaluated through the shifted series (regular at 0)."""
    c = (profiles.b - profiles.a.scale(3)).as_float()
    if abs(c[0]) > 1e-12:
        raise ValueError("b - 3a does not vanish at phi = 0; (b-3a)/(3 phi) is singular")
    if len(c) == 1:
        return np.zeros_like(np.asarray(phi, dtype=float))
    return np.polynomial.polynomial.polyval(phi, c[1:]) / 3


def ode_residual(profiles: EulerProfiles, phi) -> tuple[float, float]:
    """Max-abs residuals of the a- and b-equations at the sample points."""
    phi = np.asarray(phi, dtype=float)
    a, b = profiles.a(phi), profiles.b(phi)
    gap = a - b
    if np.any(np.abs(gap) < 1e-12):
        raise ValueError("degenerate profiles: a == b at a sample point")
    da, db = profiles.a.eval_deriv(phi), profiles.b.eval_deriv(phi)
    res_a = np.max(np.abs(da - 2 / gap - singular_term(profiles, phi)))
    res_b = np.max(np.abs(db - 1 / gap))
    return float(res_a), float(res_b)
