"""Finite-difference verification engine.

Stencils are second order everywhere: centred in the interior, one-sided
(three points for first derivatives, four points for second derivatives) on
the outermost nodes. Residual reports carry max-abs and grid-L2 norms and,
when at least three refinement levels are supplied, an observed order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np


# ---------------------------------------------------------------- stencils
def d1(f, h: float, axis: int):
    """First derivative, second order, one-sided on the two end nodes."""
    return np.gradient(np.asarray(f, dtype=float), h, axis=axis, edge_order=2)


def d2(f, h: float, axis: int):
    """Second derivative; four-point one-sided formulas at the ends."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    if f.shape[0] < 4:
        raise ValueError("need at least 4 nodes along the differentiated axis")
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    out[0] = (2 * f[0] - 5 * f[1] + 4 * f[2] - f[3]) / h**2
    out[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return np.moveaxis(out, 0, axis)


def boundary_mask(shape) -> np.ndarray:
    """True on the outermost ring of nodes (where one-sided stencils act)."""
    m = np.zeros(shape, dtype=bool)
    m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
    return m


def gs_operator(psi, r, hr: float, hz: float):
    """Delta* psi = psi_rr - psi_r / r + psi_zz on an (r, z) grid (axis 0 = r)."""
    r = np.asarray(r, dtype=float)
    if np.min(r) <= 0:
        raise ValueError("Grad-Shafranov operator needs r > 0 on the whole grid")
    R = r[:, None] if r.ndim == 1 else r
    return d2(psi, hr, 0) - d1(psi, hr, 0) / R + d2(psi, hz, 1)


# ------------------------------------------------------------------ reports
@dataclass(frozen=True)
class ResidualReport:
    equation: str
    h: float | list
    max_res: float | list
    l2_res: float | list
    order: float | None = None
    passed: bool = True

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ResidualReport":
        d = dict(d)
        d["passed"] = d.pop("pass")
        return cls(**d)


def norms(res, mask=None) -> tuple[float, float]:
    """(max-abs, root-mean-square) over the nodes selected by ``mask``."""
    res = np.abs(np.asarray(res, dtype=float))
    if mask is not None:
        res = res[mask]
    if res.size == 0:
        raise ValueError("empty residual selection")
    return float(np.max(res)), float(np.sqrt(np.mean(res**2)))


def single_report(equation: str, h: float, res, mask=None, tol: float | None = None) -> ResidualReport:
    mx, l2 = norms(res, mask)
    return ResidualReport(equation, float(h), mx, l2, None, True if tol is None else mx <= tol)


@dataclass(frozen=True)
class ConvergenceResult:
    order: float
    monotone: bool
    h: tuple
    residuals: tuple


def convergence_study(hs, residuals) -> ConvergenceResult:
    """Least-squares slope of log(residual) against log(h).

    Needs at least three levels. Non-monotone data are flagged (not fixed).
    """
    hs = np.asarray(hs, dtype=float)
    res = np.asarray(residuals, dtype=float)
    if hs.size < 3 or hs.size != res.size:
        raise ValueError("convergence study needs >= 3 matching (h, residual) pairs")
    if np.any(res <= 0) or np.any(hs <= 0):
        raise ValueError("residuals and spacings must be positive for a log-log fit")
    order = float(np.polyfit(np.log(hs), np.log(res), 1)[0])
    idx = np.argsort(hs)
    monotone = bool(np.all(np.diff(res[idx]) > 0))
    return ConvergenceResult(order, monotone, tuple(hs.tolist()), tuple(res.tolist()))


def convergence_report(equation: str, hs, residuals, l2=None, target: float = 2.0, band: float = 0.3) -> ResidualReport:
    cs = convergence_study(hs, residuals)
    ok = cs.monotone and abs(cs.order - target) <= band
    return ResidualReport(equation, list(cs.h), list(cs.residuals),
                          list(l2) if l2 is not None else list(cs.residuals), cs.order, ok)


# ---------------------------------------------------- axisymmetric residuals
def cyl_divergence(u_r, u_z, r, hr, hz):
    R = np.asarray(r, float)[:, None]
    return d1(R * u_r, hr, 0) / R + d1(u_z, hz, 1)


def cyl_curl(u_r, u_phi, u_z, r, hr, hz):
    """Curl of an axisymmetric field, components (r, phi, z)."""
    R = np.asarray(r, float)[:, None]
    w_r = -d1(u_phi, hz, 1)
    w_phi = d1(u_r, hz, 1) - d1(u_z, hr, 0)
    w_z = d1(R * u_phi, hr, 0) / R
    return w_r, w_phi, w_z


def cross(a, b):
    """Cross product of (r, phi, z) component triples (right-handed order)."""
    ar, ap, az = a
    br, bp, bz = b
    return ap * bz - az * bp, az * br - ar * bz, ar * bp - ap * br


def euler_steady_residual_arrays(u_r, u_phi, u_z, p, r, hr, hz):
    """Components of omega x u + grad(|u|^2/2 + p); omega by FD curl."""
    w = cyl_curl(u_r, u_phi, u_z, r, hr, hz)
    c = cross(w, (u_r, u_phi, u_z))
    head = 0.5 * (u_r**2 + u_phi**2 + u_z**2) + p
    return c[0] + d1(head, hr, 0), c[1], c[2] + d1(head, hz, 1)


def euler_steady_residual(field, mask=None, tol: float | None = None) -> ResidualReport:
    """Report for any object exposing r, hr, hz and u_r, u_phi, u_z, p arrays."""
    rr, rp, rz = euler_steady_residual_arrays(field.u_r, field.u_phi, field.u_z, field.p, field.r, field.hr, field.hz)
    mag = np.sqrt(rr**2 + rp**2 + rz**2)
    return single_report("euler_steady", max(field.hr, field.hz), mag, mask, tol)


def divergence_residual(field, mask=None, tol: float | None = None) -> ResidualReport:
    div = cyl_divergence(field.u_r, field.u_z, field.r, field.hr, field.hz)
    return single_report("divergence", max(field.hr, field.hz), div, mask, tol)


def gs_equation_residual(psi, r, hr, hz, FFprime, Pprime, mask=None, tol: float | None = None,
                         equation: str = "grad_shafranov") -> ResidualReport:
    """-Delta* psi - FF'(psi) - r^2 P'(psi), with FF' and P' given as arrays or constants."""
    R = np.asarray(r, float)[:, None]
    res = -gs_operator(psi, r, hr, hz) - FFprime - R**2 * Pprime
    return single_report(equation, max(hr, hz), res, mask, tol)


# ------------------------------------------------------- planar residuals
def planar_divergence(u1, u2, h1, h2):
    return d1(u1, h1, 0) + d1(u2, h2, 1)


def advect(u1, u2, f, h1, h2):
    return u1 * d1(f, h1, 0) + u2 * d1(f, h2, 1)


def boussinesq_residual_arrays(u1, u2, theta, p, h1, h2):
    """(momentum x, momentum y, transport, divergence) residual arrays."""
    m1 = advect(u1, u2, u1, h1, h2) + d1(p, h1, 0)
    m2 = advect(u1, u2, u2, h1, h2) + d1(p, h2, 1) - theta
    return m1, m2, advect(u1, u2, theta, h1, h2), planar_divergence(u1, u2, h1, h2)


def ipm_residual_arrays(u1, u2, theta, p, h1, h2):
    """(transport, divergence, Darcy x, Darcy y) for u = theta e2 + grad p."""
    tr = advect(u1, u2, theta, h1, h2)
    dv = planar_divergence(u1, u2, h1, h2)
    return tr, dv, u1 - d1(p, h1, 0), u2 - theta - d1(p, h2, 1)
