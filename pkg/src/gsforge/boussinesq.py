"""Steady 2D Boussinesq fields from the hodograph profiles gamma, alpha, beta.

With q = p'(psi) = psi**s and d/dtau = q d/dpsi,

    gamma - (k**2/2) log(gamma + k**2/2) = tau + C,   gamma(0) = 1
    d alpha/dtau = 1 + k**2/gamma,   d beta/dtau = -k/(2 gamma)

and tau = psi**(1-s)/(1-s). The stream function solves

    d2 psi = psi**s (x2 - beta),   d1 psi = +-psi**s sqrt(B),
    B = -x2**2 + 2 x2 (k + beta) + 2 alpha - beta**2.

Both equations are regular in w = psi**(1-s) = (1-s) tau:
d2 w = (1-s)(x2 - beta) and d1 w = +-(1-s) sqrt(B). The construction fixes
psi on the line x1 = x1_0 first (w = 0 at x2_0 = beta(0)), then marches each
row in x1 with the sign of x1 - x1_0.

Because |d1 w| = (1-s) sqrt(B) stays near (1-s) sqrt(2) at x0, any C1 stream
function has d1 psi = 0 only where psi = 0, so psi vanishes on a whole curve
through x0. Two branches are therefore offered:

- ``"minimum"`` (default): rows marched with the sign of x1 - x1_0. psi and p
  have a strict minimum at x0, the two halves are smooth solutions, and the
  line x1 = x1_0 carries a jump of the tangential velocity.
- ``"smooth"``: rows marched with d1 w > 0 everywhere, so w changes sign on a
  curve through x0 and q = sign(w) psi**s. Every field is smooth for s = 1/2,
  but p = sign(w) psi**(1+s)/(1+s) has no minimum at x0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev, legendre
from scipy.optimize import brentq

from . import verify
from .hodograph import rk4_march
from .stream import Grid2D

_GL_X, _GL_W = legendre.leggauss(32)


def _gamma_equation(k: float):
    h = 0.5 * k * k
    C = 1.0 - h * math.log(1.0 + h)
    f = lambda g, t: g - h * np.log(g + h) - t - C
    df = lambda g: g / (g + h)
    return f, df


def tau_floor(k: float) -> float:
    """Smallest tau with a positive gamma: the left side is increasing in gamma > 0."""
    h = 0.5 * k * k
    return -h * math.log(h) - 1.0 + h * math.log(1.0 + h)


def solve_gamma(tau, k: float, tol: float = 1e-13, max_iter: int = 50):
    """gamma(tau) by Newton on the implicit relation; brentq where Newton fails."""
    tau = np.asarray(tau, dtype=float)
    f, df = _gamma_equation(k)
    g = np.maximum(1.0 + tau * (1.0 + 0.5 * k * k), 1e-3)
    ok = np.zeros(tau.shape, dtype=bool)
    for _ in range(max_iter):
        with np.errstate(invalid="ignore", divide="ignore"):
            step = f(g, tau) / df(g)
        g_new = g - step
        bad = ~np.isfinite(g_new) | (g_new <= 0)
        g = np.where(bad, g, g_new)
        ok = ~bad & (np.abs(step) <= tol * np.maximum(1.0, np.abs(g)))
        if np.all(ok):
            break
    if not np.all(ok):
        flat_g, flat_t = g.reshape(-1), tau.reshape(-1)
        for i in np.flatnonzero(~ok.reshape(-1)):
            t = flat_t[i]
            try:
                flat_g[i] = brentq(lambda x: f(x, t), 1e-12, 10.0 + 10 * abs(t), xtol=1e-15)
            except ValueError as err:
                raise RuntimeError(f"gamma: Newton failed and no bracket at tau={t:g}") from err
        g = flat_g.reshape(tau.shape)
    res = np.max(np.abs(f(g, tau)), initial=0.0)
    if res > 1e-12:
        raise RuntimeError(f"gamma residual {res:.2e} exceeds 1e-12")
    return g


def _quad_from_zero(fun, tau):
    """int_0^tau fun(t) dt for an array of upper limits (32-point Gauss-Legendre)."""
    tau = np.asarray(tau, dtype=float)
    nodes = 0.5 * tau[..., None] * (_GL_X + 1.0)
    return 0.5 * tau * (fun(nodes) @ _GL_W)


@dataclass(frozen=True)
class BoussinesqProfiles:
    k: float
    s: float = 0.5
    alpha0: float | None = None
    beta0: float | None = None
    tau_max: float = 0.25
    cheb_degree: int = 48
    tables: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.k == 0:
            raise ValueError("k must be nonzero")
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if self.s != 0.5:
            warnings.warn("s != 1/2: the hodograph fields are only Holder continuous in psi", stacklevel=2)
        a0 = 0.5 if self.alpha0 is None else self.alpha0
        b0 = (1.0 - a0) / self.k if self.beta0 is None else self.beta0
        if abs(a0 + self.k * b0 - 1.0) > 1e-14:
            raise ValueError("alpha(0) + k beta(0) must equal 1")
        if -self.tau_max <= tau_floor(self.k):
            raise ValueError(f"gamma has no positive root below tau = {tau_floor(self.k):.4g}; "
                             f"reduce tau_max below {-tau_floor(self.k):.4g}")
        object.__setattr__(self, "alpha0", a0)
        object.__setattr__(self, "beta0", b0)
        tau = np.linspace(-self.tau_max, self.tau_max, 401)
        g, a, b = self._tables(tau)
        if np.min(g) <= 0.1:
            raise ValueError("gamma approaches zero on the table; reduce tau_max")
        self.tables.update(tau=tau, gamma=g, alpha=a, beta=b)
        # Chebyshev interpolants of (v - v(0)) / tau, so the values at tau = 0
        # are exact; the node count is even, so no node sits at tau = 0
        xs = np.cos(np.pi * (np.arange(4 * self.cheb_degree) + 0.5) / (4 * self.cheb_degree))
        gg, aa, bb = self._tables(self.tau_max * xs)
        self.tables["origin"] = {"gamma": 1.0, "alpha": a0, "beta": b0}
        for name, v in (("gamma", gg), ("alpha", aa), ("beta", bb)):
            slope = (v - self.tables["origin"][name]) / (self.tau_max * xs)
            self.tables["cheb_" + name] = chebyshev.chebfit(xs, slope, self.cheb_degree)

    def _tables(self, tau):
        k = self.k
        g = solve_gamma(tau, k)
        a = self.alpha0 + _quad_from_zero(lambda t: 1.0 + k * k / solve_gamma(t, k), tau)
        b = self.beta0 + _quad_from_zero(lambda t: -k / (2.0 * solve_gamma(t, k)), tau)
        return g, a, b

    def _cheb(self, name, tau):
        tau = np.asarray(tau, dtype=float)
        if np.max(np.abs(tau), initial=0.0) > self.tau_max * (1 + 1e-12):
            raise ValueError(f"tau outside the tabulated interval |tau| <= {self.tau_max:g}")
        return self.tables["origin"][name] + tau * chebyshev.chebval(tau / self.tau_max, self.tables["cheb_" + name])

    def gamma(self, tau):
        return self._cheb("gamma", tau)

    def alpha(self, tau):
        return self._cheb("alpha", tau)

    def beta(self, tau):
        return self._cheb("beta", tau)

    def identity_defect(self) -> float:
        """max |alpha + k beta - gamma| on the table."""
        t = self.tables
        return float(np.max(np.abs(t["alpha"] + self.k * t["beta"] - t["gamma"])))

    def bracket(self, x2, tau):
        b = self.beta(tau)
        return -np.asarray(x2) ** 2 + 2 * np.asarray(x2) * (self.k + b) + 2 * self.alpha(tau) - b**2

    def default_center(self) -> tuple[float, float]:
        return (0.0, float(self.beta0))


def solve_alpha_beta(tau, k: float, alpha0: float, beta0: float):
    """alpha, beta on ``tau`` by quadrature of their tau-derivatives."""
    if abs(alpha0 + k * beta0 - 1.0) > 1e-14:
        raise ValueError("alpha(0) + k beta(0) must equal 1")
    a = alpha0 + _quad_from_zero(lambda t: 1.0 + k * k / solve_gamma(t, k), tau)
    b = beta0 + _quad_from_zero(lambda t: -k / (2.0 * solve_gamma(t, k)), tau)
    return a, b


@dataclass(frozen=True)
class BoussinesqField:
    grid: Grid2D
    profiles: BoussinesqProfiles
    center: tuple
    w: np.ndarray
    psi: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    theta: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def h1(self):
        return self.grid.hx

    @property
    def h2(self):
        return self.grid.hy


def _node_index(nodes, value, h, label):
    i = int(np.argmin(np.abs(nodes - value)))
    if abs(nodes[i] - value) > 1e-9 * h:
        raise ValueError(f"grid needs a node on {label} = {value:g}")
    return i


BRANCHES = ("minimum", "smooth")


def build_psi(grid: Grid2D, profiles: BoussinesqProfiles, center=None, substeps: int = 4,
              branch: str = "minimum"):
    """w on ``grid``: the line x1 = x1_0 first, then rows in x1.

    On the minimum branch w = psi**(1-s) >= 0; on the smooth branch w is signed.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    s, k = profiles.s, profiles.k
    x10, x20 = center if center is not None else profiles.default_center()
    x1, x2 = grid.x, grid.y
    i0 = _node_index(x1, x10, grid.hx, "x1")
    j0 = _node_index(x2, x20, grid.hy, "x2")
    c = 1.0 - s

    def tau_of(w):
        return w / c

    def axis_rhs(x, w):
        return c * (x - profiles.beta(tau_of(w)))

    w_axis = np.empty(grid.ny)
    w_axis[j0] = 0.0
    if j0 + 1 < grid.ny:
        w_axis[j0 + 1:] = rk4_march(axis_rhs, x20, x2[j0 + 1:], 0.0, substeps)
    if j0 > 0:
        w_axis[:j0] = rk4_march(axis_rhs, x20, x2[:j0][::-1], 0.0, substeps)[::-1]
    if np.min(w_axis) < 0:
        raise ValueError("w < 0 on the axis line; the grid extends beyond the local construction")

    def row_rhs(sign):
        def rhs(x, w):
            B = profiles.bracket(x2, tau_of(w))
            if np.min(B) < 0:
                raise ValueError(f"negative discriminant B = {np.min(B):.3e} near x1 = {x:g}")
            return sign * c * np.sqrt(B)
        return rhs

    W = np.empty((grid.nx, grid.ny))
    W[i0] = w_axis
    if i0 + 1 < grid.nx:
        W[i0 + 1:] = rk4_march(row_rhs(1.0), x10, x1[i0 + 1:], w_axis, substeps)
    if i0 > 0:
        left = -1.0 if branch == "minimum" else 1.0
        W[:i0] = rk4_march(row_rhs(left), x10, x1[:i0][::-1], w_axis, substeps)[::-1]
    return W, (x10, x20)


def assemble_boussinesq(grid: Grid2D, profiles: BoussinesqProfiles, center=None, substeps: int = 4,
                        branch: str = "minimum") -> BoussinesqField:
    """u = (-d2 psi, d1 psi) from the hodograph forms, theta = k psi**(2s), p = int q**2 dtau.

    On the minimum branch the sign of d1 psi on the line x1 = x1_0 is taken as 0
    (the mean of the two one-sided values).
    """
    s, k = profiles.s, profiles.k
    W, ctr = build_psi(grid, profiles, center, substeps, branch)
    psi = np.abs(W) ** (1.0 / (1.0 - s))
    X1, X2 = grid.mesh()
    tau = W / (1.0 - s)
    q = psi**s if branch == "minimum" else np.sign(W) * psi**s
    d2 = q * (X2 - profiles.beta(tau))
    root_b = np.sqrt(np.maximum(profiles.bracket(X2, tau), 0.0))
    d1 = np.sign(X1 - ctr[0]) * q * root_b if branch == "minimum" else q * root_b
    theta = k * psi ** (2 * s)
    p = psi ** (1 + s) / (1 + s)
    if branch == "smooth":
        p = np.sign(W) * p
    return BoussinesqField(grid, profiles, ctr, W, psi, -d2, d1, theta, p, {"localized": False, "branch": branch})


def localize(field: BoussinesqField, cutoff, theta_power: int = 2) -> BoussinesqField:
    """u~ = phi(p) u, theta~ = phi(p)**theta_power theta, grad p~ = phi(p)**2 grad p.

    Only ``theta_power=2`` keeps the buoyancy balanced: the momentum residual
    of the first-power rule is (phi**2 - phi) theta e2.
    """
    w = cutoff(field.p)
    return BoussinesqField(field.grid, field.profiles, field.center, field.w, field.psi,
                           w * field.u1, w * field.u2, w**theta_power * field.theta,
                           cutoff.antiderivative(field.p, 2),
                           dict(field.meta, localized=True, theta_power=theta_power, cutoff=cutoff.to_dict()))


def boussinesq_residual(field: BoussinesqField, mask=None):
    """Max-abs (momentum, transport, divergence) over ``mask`` (default: interior nodes)."""
    m1, m2, tr, dv = verify.boussinesq_residual_arrays(field.u1, field.u2, field.theta, field.p, field.h1, field.h2)
    if mask is None:
        mask = ~verify.boundary_mask(field.psi.shape)
    mom = np.hypot(m1, m2)
    return {"momentum": verify.norms(mom, mask)[0], "transport": verify.norms(tr, mask)[0],
            "divergence": verify.norms(dv, mask)[0]}


def half_mask(field: BoussinesqField, side: int = 1, gap: int = 2):
    """Interior nodes with sign(x1 - x1_0) = side, at least ``gap`` nodes off the line."""
    X1, _ = field.grid.mesh()
    m = side * (X1 - field.center[0]) > gap * field.grid.hx * (1 - 1e-9)
    return m & ~verify.boundary_mask(m.shape)


def strict_argmin(values, grid: Grid2D, center) -> bool:
    i = np.unravel_index(np.argmin(values), values.shape)
    x1, x2 = grid.x[i[0]], grid.y[i[1]]
    unique = np.sum(values <= values[i]) == 1
    return bool(unique and abs(x1 - center[0]) < 1e-9 * grid.hx + 1e-15 and abs(x2 - center[1]) < 1e-9 * grid.hy + 1e-15)
