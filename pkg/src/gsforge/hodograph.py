"""Rescaled hodograph polynomials and the geometry they induce near (0, 0).

With X = 1 + x,

    P3(x, phi) = X (X**2 - b(phi))
    P2(x, phi) = 6 phi (X**2 - a(phi))
    P6(x, phi) = P2 - P3**2

The domain D = {P6 > 0} is locally the supergraph of the characteristic
curve phi = delta(x), and the axis profile phi(0, y) comes from inverting
Y(phi) = int_0^phi dt / sqrt(P6(0, t)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import CubicHermiteSpline

from .profiles import EulerProfiles, euler_profiles
from .series import TruncatedSeries

LABELS = ("P2", "P3", "P6")
_GL_X, _GL_W = legendre.leggauss(32)


@dataclass(frozen=True)
class PolyField:
    """Polynomial in x whose x**i coefficient is a polynomial in phi.

    ``coeffs[i, j]`` multiplies x**i phi**j. Products are kept untruncated so
    pointwise values agree with direct evaluation from a(phi), b(phi).
    """

    coeffs: np.ndarray
    label: str
    epsilon: float

    @property
    def degree_x(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def coeff_series(self) -> tuple[TruncatedSeries, ...]:
        return tuple(TruncatedSeries(tuple(row), radius_estimate=self.epsilon) for row in self.coeffs)

    def __call__(self, x, phi, dx: int = 0, dphi: int = 0):
        phi = np.asarray(phi, dtype=float)
        if np.max(np.abs(phi), initial=0.0) > self.epsilon * (1 + 1e-12):
            raise ValueError(f"{self.label}: |phi| exceeds epsilon={self.epsilon:g}")
        c = self.coeffs
        if dx:
            c = npoly.polyder(c, dx, axis=0)
        if dphi:
            c = npoly.polyder(c, dphi, axis=1)
        return npoly.polyval2d(x, phi, c)


def _mul2d(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    out = np.zeros((p.shape[0] + q.shape[0] - 1, p.shape[1] + q.shape[1] - 1))
    for i in range(p.shape[0]):
        for j in range(q.shape[0]):
            out[i + j] += _pad(npoly.polymul(p[i], q[j]), out.shape[1])
    return out


def _pad(c, n):
    c = np.asarray(c, dtype=float)
    return np.concatenate([c, np.zeros(n - len(c))]) if len(c) < n else c[:n]


def build_polyfields(profiles: EulerProfiles) -> dict[str, PolyField]:
    a = profiles.a.as_float()
    b = profiles.b.as_float()
    n = max(len(a), len(b)) + 1
    one = _pad([1.0], n)
    phi = _pad([0.0, 1.0], n)
    A, B = _pad(a, n), _pad(b, n)
    # P3 = (1-b) + (3-b) x + 3 x^2 + x^3
    p3 = np.array([one - B, 3 * one - B, 3 * one, one])
    # P2 = 6 phi (1-a) + 12 phi x + 6 phi x^2
    p2 = np.array([6 * npoly.polymul(phi, one - A)[:n], 12 * phi, 6 * phi])
    sq = _mul2d(p3, p3)
    p6 = -sq
    p6[: p2.shape[0], :n] += p2
    eps = profiles.epsilon
    return {"P2": PolyField(p2, "P2", eps), "P3": PolyField(p3, "P3", eps), "P6": PolyField(p6, "P6", eps)}


def compatibility_residual(fields: dict, x, phi) -> float:
    """max |d_x P6 + P3 d_phi P6 - 2 (d_phi P3) P6| on the x-phi lattice.

    Takes the raw polynomial fields so perturbed profiles can be probed too.
    """
    X, PHI = np.meshgrid(np.asarray(x, float), np.asarray(phi, float), indexing="ij")
    P3, P6 = fields["P3"], fields["P6"]
    r = P6(X, PHI, dx=1) + P3(X, PHI) * P6(X, PHI, dphi=1) - 2 * P3(X, PHI, dphi=1) * P6(X, PHI)
    return float(np.max(np.abs(r)))


@dataclass(frozen=True)
class BoundaryCurve:
    x_nodes: np.ndarray
    delta_values: np.ndarray
    slopes: np.ndarray
    p6_residual: float
    step: float

    @cached_property
    def spline(self) -> CubicHermiteSpline:
        return CubicHermiteSpline(self.x_nodes, self.delta_values, self.slopes)

    def __call__(self, x):
        return self.spline(x)

    def second_difference_at_zero(self) -> float:
        i = int(np.argmin(np.abs(self.x_nodes)))
        h = self.step
        d = self.delta_values
        return float((d[i + 1] - 2 * d[i] + d[i - 1]) / h**2)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "delta"])
            for x, d in zip(self.x_nodes, self.delta_values):
                w.writerow([repr(float(x)), repr(float(d))])


@dataclass(frozen=True)
class AxisProfile:
    y: np.ndarray
    phi: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["y", "phi"])
            for y, p in zip(self.y, self.phi):
                w.writerow([repr(float(y)), repr(float(p))])


def rk4_march(rhs, x0: float, x_targets, y0, substeps: int = 4):
    """March y' = rhs(x, y) from x0 through monotone ``x_targets``.

    ``y0`` may be an array (independent trajectories). Returns an array of
    shape ``(len(x_targets),) + y0.shape``.
    """
    y = np.array(y0, dtype=float, copy=True)
    out = np.empty((len(x_targets),) + y.shape)
    x = x0
    for k, xt in enumerate(x_targets):
        h = (xt - x) / substeps
        for _ in range(substeps):
            k1 = rhs(x, y)
            k2 = rhs(x + h / 2, y + h / 2 * k1)
            k3 = rhs(x + h / 2, y + h / 2 * k2)
            k4 = rhs(x + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            x = x + h
        x = xt
        out[k] = y
    return out


class Geometry:
    """P2/P3/P6 for a fixed pair of profiles plus the curves they define."""

    def __init__(self, profiles: EulerProfiles | None = None):
        self.profiles = profiles if profiles is not None else euler_profiles()
        self.epsilon = self.profiles.epsilon
        self.fields = build_polyfields(self.profiles)
        self._a = self.profiles.a.as_float()
        self._b = self.profiles.b.as_float()
        self._db = npoly.polyder(self._b)
        # pi(t) = P6(0, t) = t q(t); q is a polynomial with q(0) = 4
        pi = self.fields["P6"].coeffs[0]
        self._q = np.trim_zeros(pi[1:], "b") if abs(pi[0]) < 1e-14 else None
        if self._q is None:
            raise ValueError("P6(0, 0) does not vanish")

    # fast pointwise forms
    def _check(self, phi):
        if np.max(np.abs(phi), initial=0.0) > self.epsilon * (1 + 1e-12):
            raise ValueError(f"phi left the interval |phi| <= {self.epsilon:g} (max {np.max(np.abs(phi)):g})")

    def a(self, phi):
        return npoly.polyval(phi, self._a)

    def b(self, phi):
        return npoly.polyval(phi, self._b)

    def db(self, phi):
        return npoly.polyval(phi, self._db)

    def p3(self, x, phi):
        X = 1.0 + x
        return X * (X * X - npoly.polyval(phi, self._b))

    def p6(self, x, phi):
        X = 1.0 + x
        p3 = X * (X * X - npoly.polyval(phi, self._b))
        return 6.0 * phi * (X * X - npoly.polyval(phi, self._a)) - p3 * p3

    def eval_P(self, label: str, x, phi, dx: int = 0, dphi: int = 0):
        if label not in LABELS:
            raise ValueError(f"unknown polynomial {label!r}; expected one of {LABELS}")
        return self.fields[label](x, phi, dx=dx, dphi=dphi)

    def compatibility_residual(self, x, phi) -> float:
        return compatibility_residual(self.fields, x, phi)

    def in_domain(self, x, phi):
        self._check(phi)
        return self.p6(x, phi) > 0

    def pi(self, phi):
        return self.p6(0.0, phi)

    def boundary_delta(self, half_width: float | None = None, h: float = 1e-3) -> BoundaryCurve:
        """Integrate d delta/dx = P3(x, delta), delta(0) = 0, by RK4 both ways."""
        half_width = self.epsilon if half_width is None else half_width
        n = int(round(half_width / h))
        if n < 4 or abs(n * h - half_width) > 1e-9 * half_width:
            raise ValueError("need half_width an integer multiple (>= 4) of h")
        right = np.arange(1, n + 1) * h

        def rhs(x, d):
            self._check(d)
            return self.p3(x, d)

        dr = rk4_march(rhs, 0.0, right, 0.0, substeps=1)
        dl = rk4_march(rhs, 0.0, -right, 0.0, substeps=1)
        xs = np.concatenate([-right[::-1], [0.0], right])
        ds = np.concatenate([dl[::-1], [0.0], dr])
        self._check(ds)
        return BoundaryCurve(xs, ds, self.p3(xs, ds), float(np.max(np.abs(self.p6(xs, ds)))), h)

    # axis profile: Y(u) = int_0^u 2/sqrt(q(v^2)) dv with phi = u^2
    def _q_of(self, t):
        q = npoly.polyval(t, self._q)
        if np.any(q <= 0):
            raise ValueError("pi(phi) <= 0 inside the range; Y is not monotone")
        return q

    def Y_of_u(self, u):
        u = np.asarray(u, dtype=float)
        v = 0.5 * (u[..., None] * (_GL_X + 1.0))
        g = 2.0 / np.sqrt(self._q_of(v * v))
        return 0.5 * u * (g @ _GL_W)

    def dY_du(self, u):
        u = np.asarray(u, dtype=float)
        return 2.0 / np.sqrt(self._q_of(u * u))

    def Y(self, phi):
        return self.Y_of_u(np.sqrt(np.asarray(phi, dtype=float)))

    def Y_inverse(self, y, tol: float = 1e-12, max_iter: int = 200):
        """phi with Y(phi) = |y|.

        Works in u = sqrt(phi), where Y is smooth with Y'(0) = 1. Newton steps
        are accepted only while they stay inside the current bracket,
        otherwise the bracket is bisected; two plain Newton steps polish.
        """
        y = np.abs(np.asarray(y, dtype=float))
        umax = np.sqrt(self.epsilon)
        if np.any(self.Y_of_u(umax) < y):
            raise ValueError("y beyond the axis range covered by |phi| <= epsilon")
        lo = np.zeros_like(y)
        hi = np.full_like(y, umax)
        u = np.minimum(y, umax)
        for _ in range(max_iter):
            f = self.Y_of_u(u) - y
            above = f > 0
            hi = np.where(above, u, hi)
            lo = np.where(above, lo, u)
            newton = u - f / self.dY_du(u)
            inside = (newton >= lo) & (newton <= hi)
            u_new = np.where(inside, newton, 0.5 * (lo + hi))
            done = np.max(np.abs(u_new - u), initial=0.0) < tol or np.max(hi - lo, initial=0.0) < tol
            u = u_new
            if done:
                break
        else:
            raise RuntimeError("Y inversion did not converge")
        for _ in range(2):
            u = u - (self.Y_of_u(u) - y) / self.dY_du(u)
        return u * u

    def axis_profile(self, y_max: float, n_points: int) -> AxisProfile:
        y = np.linspace(0.0, y_max, n_points)
        phi = self.Y_inverse(y)
        if np.any(np.diff(phi) <= 0):
            raise ValueError("axis profile is not monotone")
        return AxisProfile(y, phi)
