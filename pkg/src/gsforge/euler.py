"""Dimensional axisymmetric Euler fields from the rescaled stream function.

Rescaling: r = ell (1 + x), z = ell y, psi = m ell**4 phi with m = 1/(2 ell tau).
With X = 1 + x and velocity scale c = m ell**2:

    u_r   =  c V / X          (V = d phi/dy)
    u_z   = -c P3 / X         (P3 = d phi/dx)
    u_phi =  c sqrt(6 phi a(phi)) / X

so |u|**2 / 2 = 3 m psi exactly, p = 2 m psi, and the plasma pressure has
P' = -5 m. Swirl enters only through F**2; the positive root is used unless
``swirl_sign=-1`` is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.interpolate import RegularGridInterpolator

from . import verify
from .hodograph import Geometry
from .stream import Grid2D, GridField, compute_UV, evaluate_phi

SQRT6 = np.sqrt(6.0)


@dataclass(frozen=True)
class DimensionalParams:
    ell: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if not (self.ell > 0 and self.tau > 0):
            raise ValueError("ell and tau must be positive")

    @property
    def m(self) -> float:
        return 1.0 / (2.0 * self.ell * self.tau)

    @property
    def beta0(self) -> float:
        return self.ell**2

    @property
    def velocity_scale(self) -> float:
        return self.m * self.ell**2

    @property
    def p_prime_plasma(self) -> float:
        return -5.0 * self.m

    def psi(self, phi):
        return self.m * self.ell**4 * np.asarray(phi)

    def physical(self, x, y):
        return self.ell * (1.0 + np.asarray(x)), self.ell * np.asarray(y)


def point_velocity(geometry: Geometry, params: DimensionalParams, x, y, phi,
                   swirl: bool = True, swirl_sign: int = 1, tol: float = 1e-10, V=None):
    """(u_r, u_phi, u_z, p, psi) at rescaled points with known phi (and optionally V)."""
    x, y, phi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, phi)))
    X = 1.0 + x
    U = geometry.p3(x, phi)
    P6 = geometry.p6(x, phi)
    if np.min(P6, initial=0.0) < -tol:
        raise ValueError(f"P6 = {np.min(P6):.3e} < 0: point outside the hodograph domain")
    if V is None:
        V = np.sign(y) * np.sqrt(np.maximum(P6, 0.0))
    fa = phi * geometry.a(phi)
    if np.min(fa, initial=0.0) < -1e-12:
        raise ValueError("phi a(phi) < 0: swirl would be imaginary")
    c = params.velocity_scale
    u_r = c * V / X
    u_z = -c * U / X
    u_phi = swirl_sign * c * SQRT6 * np.sqrt(np.maximum(fa, 0.0)) / X if swirl else np.zeros_like(x)
    psi = params.psi(phi)
    return u_r, u_phi, u_z, 2.0 * params.m * psi, psi


@dataclass(frozen=True)
class CylField:
    """Axisymmetric field on an (r, z) grid; arrays have shape (nr, nz)."""

    grid: Grid2D
    params: DimensionalParams
    phi: np.ndarray
    psi: np.ndarray
    u_r: np.ndarray
    u_phi: np.ndarray
    u_z: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("phi", "psi", "u_r", "u_phi", "u_z", "p"):
            v = getattr(self, name)
            if v.shape != (self.grid.nx, self.grid.ny):
                raise ValueError(f"{name} has shape {v.shape}, grid is ({self.grid.nx}, {self.grid.ny})")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"{name}: non-finite values")

    @property
    def r(self) -> np.ndarray:
        return self.params.ell * (1.0 + self.grid.x)

    @property
    def z(self) -> np.ndarray:
        return self.params.ell * self.grid.y

    @property
    def hr(self) -> float:
        return self.params.ell * self.grid.hx

    @property
    def hz(self) -> float:
        return self.params.ell * self.grid.hy

    def mesh(self):
        return np.meshgrid(self.r, self.z, indexing="ij")

    def speed_squared(self):
        return self.u_r**2 + self.u_phi**2 + self.u_z**2

    def replace(self, **changes) -> "CylField":
        d = {k: getattr(self, k) for k in ("grid", "params", "phi", "psi", "u_r", "u_phi", "u_z", "p")}
        d["meta"] = dict(self.meta)
        d.update(changes)
        return CylField(**d)


def assemble_velocity(phi_field: GridField, geometry: Geometry, params: DimensionalParams | None = None,
                      swirl: bool = True, swirl_sign: int = 1) -> CylField:
    params = params or DimensionalParams()
    if swirl_sign not in (1, -1):
        raise ValueError("swirl_sign must be +1 or -1")
    X, Y = phi_field.grid.mesh()
    _, V = compute_UV(phi_field, geometry)  # also the domain check
    u_r, u_phi, u_z, p, psi = point_velocity(geometry, params, X, Y, phi_field.values, swirl, swirl_sign,
                                             V=V.values)
    meta = {"swirl_sign": swirl_sign if swirl else 0, "ell": params.ell, "tau": params.tau, "m": params.m}
    return CylField(phi_field.grid, params, phi_field.values, psi, u_r, u_phi, u_z, p, meta)


def assemble_pressure(phi_field: GridField, params: DimensionalParams | None = None) -> GridField:
    params = params or DimensionalParams()
    p = 2.0 * params.m * params.psi(phi_field.values)
    return GridField(phi_field.grid, p, "p")


@dataclass(frozen=True)
class Vorticity:
    w_r: np.ndarray
    w_phi: np.ndarray
    w_z: np.ndarray

    def magnitude(self):
        return np.sqrt(self.w_r**2 + self.w_phi**2 + self.w_z**2)


def ff_prime(geometry: Geometry, params: DimensionalParams, phi):
    """F F'(psi) = 3 m ell**2 (a + phi a')."""
    phi = np.asarray(phi, dtype=float)
    da = npoly.polyval(phi, npoly.polyder(geometry._a))
    return 3.0 * params.m * params.ell**2 * (geometry.a(phi) + phi * da)


def swirl_log_derivative_factor(geometry: Geometry, params: DimensionalParams, phi):
    """F'(psi) written as g / sqrt(phi) with g smooth; returns F' (0 where phi = 0).

    F' = sqrt(6) (a + phi a') / (2 ell sqrt(phi a)). It is only ever multiplied by
    velocity components that vanish at least like sqrt(phi).
    """
    phi = np.asarray(phi, dtype=float)
    fa = phi * geometry.a(phi)
    num = SQRT6 * (geometry.a(phi) + phi * npoly.polyval(phi, npoly.polyder(geometry._a)))
    out = np.zeros_like(phi)
    pos = fa > 0
    out[pos] = num[pos] / (2.0 * params.ell * np.sqrt(fa[pos]))
    return out


def assemble_vorticity(field: CylField, geometry: Geometry) -> Vorticity:
    """Vorticity from the closed form -F'u + (1/r)(Delta* psi + FF') e_phi.

    Delta* psi is replaced by -(FF' + r**2 P') so no derivatives are taken.
    F'u is set to 0 where phi = 0 (the limit of the product).
    """
    P = field.params
    sign = field.meta.get("swirl_sign", 1)
    R, _ = field.mesh()
    if sign == 0:
        Fp, FFp = np.zeros_like(field.phi), 0.0
    else:
        Fp = sign * swirl_log_derivative_factor(geometry, P, field.phi)
        FFp = ff_prime(geometry, P, field.phi)
    w_r = -Fp * field.u_r
    w_z = -Fp * field.u_z
    w_phi = (-FFp - R**2 * P.p_prime_plasma) / R
    return Vorticity(w_r, w_phi, w_z)


def bernoulli_residual(field: CylField, source: str = "fd", mask=None) -> float:
    """max | |u|**2/2 - 3 m psi | in units of (m ell**2)**2.

    ``source="fd"`` rebuilds the poloidal velocity from centred differences of
    psi (a genuine check of the stream function); ``"assembled"`` uses the
    stored components (an algebraic identity up to rounding).
    """
    P = field.params
    if source == "fd":
        R, _ = field.mesh()
        u_r = verify.d1(field.psi, field.hz, 1) / R
        u_z = -verify.d1(field.psi, field.hr, 0) / R
        q = u_r**2 + u_z**2 + field.u_phi**2
    elif source == "assembled":
        q = field.speed_squared()
    else:
        raise ValueError("source must be 'fd' or 'assembled'")
    res = np.abs(0.5 * q - 3.0 * P.m * field.psi) / P.velocity_scale**2
    if mask is not None:
        res = res[mask]
    return float(np.max(res))


def gs_residual(field: CylField, geometry: Geometry, mask=None, tol=None) -> verify.ResidualReport:
    FFp = ff_prime(geometry, field.params, field.phi) if field.meta.get("swirl_sign", 1) != 0 else 0.0
    return verify.gs_equation_residual(field.psi, field.r, field.hr, field.hz, FFp,
                                       field.params.p_prime_plasma, mask, tol)


def distance_mask(field: CylField, inner: float = 0.0, outer: float = np.inf, interior: bool = True):
    """Nodes with inner < |(r, z) - (ell, 0)| / ell < outer (optionally dropping the edge ring)."""
    X, Y = field.grid.mesh()
    d = np.hypot(X, Y)
    m = (d > inner) & (d < outer)
    if interior:
        m &= ~verify.boundary_mask(m.shape)
    return m


class CartesianSampler:
    """(x, y, z) -> (u1, u2, u3, p) by bilinear interpolation in (r, z).

    Queries outside the (r, z) box raise unless ``zero_outside`` (set for
    localized fields whose support lies strictly inside the box).
    """

    def __init__(self, field: CylField, zero_outside: bool = False):
        self.field = field
        self.zero_outside = zero_outside
        pts = (field.r, field.z)
        self._interp = [RegularGridInterpolator(pts, a, method="linear", bounds_error=False, fill_value=np.nan)
                        for a in (field.u_r, field.u_phi, field.u_z, field.p)]

    def __call__(self, x, y, z):
        x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
        r = np.hypot(x, y)
        pts = np.stack([r.ravel(), z.ravel()], axis=-1)
        ur, uph, uz, p = (f(pts).reshape(r.shape) for f in self._interp)
        outside = np.isnan(ur)
        if np.any(outside):
            if not self.zero_outside:
                raise ValueError("query outside the sampled (r, z) region of an unlocalized field")
            ur, uph, uz, p = (np.where(outside, 0.0, v) for v in (ur, uph, uz, p))
        with np.errstate(invalid="ignore", divide="ignore"):
            c = np.where(r > 0, x / np.where(r > 0, r, 1.0), 1.0)
            s = np.where(r > 0, y / np.where(r > 0, r, 1.0), 0.0)
        return ur * c - uph * s, ur * s + uph * c, uz, p


def to_cartesian_sampler(field: CylField, zero_outside: bool | None = None) -> CartesianSampler:
    if zero_outside is None:
        zero_outside = bool(field.meta.get("localized", False))
    return CartesianSampler(field, zero_outside)


def euler_point_field(geometry: Geometry, params: DimensionalParams, x, y, swirl: bool = True):
    """Pointwise (u_r, u_phi, u_z, p, psi) at rescaled (x, y) without a grid."""
    phi = evaluate_phi(geometry, x, y)
    return point_velocity(geometry, params, x, y, phi, swirl)
