"""Explicit steady solutions of the incompressible porous medium equation.

u = theta e2 + grad p, div u = 0, u . grad theta = 0 with u = grad-perp psi.
Taking p = k psi and theta = psi**s forces psi to depend on z = x - x0 - k (y - y0)
alone, with f' = f**s / (1 + k**2), hence

    psi = ((1 - s) z / (1 + k**2))**(1 / (1 - s))   for z >= 0, and 0 for z < 0.

Localization multiplies by a pressure cutoff phi(p): u~ = phi u, theta~ = phi theta,
grad p~ = phi grad p (the Darcy law is linear, so the first power is the right one).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import verify
from .localization import CutoffSpec


@dataclass(frozen=True)
class IpmSolution:
    k: float
    s: float = 0.5
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")

    def z(self, x, y):
        return np.asarray(x, float) - self.x0 - self.k * (np.asarray(y, float) - self.y0)

    def f(self, z):
        z = np.asarray(z, dtype=float)
        return np.where(z > 0, ((1 - self.s) * np.maximum(z, 0.0) / (1 + self.k**2)) ** (1 / (1 - self.s)), 0.0)

    def f_prime(self, z):
        return self.f(z) ** self.s / (1 + self.k**2)

    def psi(self, x, y):
        return self.f(self.z(x, y))

    def p(self, x, y):
        return self.k * self.psi(x, y)

    def theta(self, x, y):
        return self.psi(x, y) ** self.s

    def u(self, x, y):
        """grad-perp psi = (-d_y psi, d_x psi) = f'(z) (k, 1)."""
        fp = self.f_prime(self.z(x, y))
        return self.k * fp, fp

    def fields(self, x, y):
        u1, u2 = self.u(x, y)
        return u1, u2, self.theta(x, y), self.p(x, y)

    def z_profile_csv(self, path, z) -> None:
        z = np.asarray(z, dtype=float)
        f = self.f(z)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["z", "psi", "p", "theta"])
            for row in zip(z, f, self.k * f, f**self.s):
                w.writerow([repr(float(v)) for v in row])


def build_ipm(k: float, s: float = 0.5, x0: float = 0.0, y0: float = 0.0) -> IpmSolution:
    return IpmSolution(k, s, x0, y0)


def ode_defect(sol: IpmSolution, z) -> float:
    """max |f' - f**s / (1 + k**2)| using the analytic derivative of the power law."""
    z = np.asarray(z, dtype=float)
    e = 1 / (1 - sol.s)
    c = (1 - sol.s) / (1 + sol.k**2)
    fp = e * c * (c * z) ** (e - 1)
    return float(np.max(np.abs(fp - sol.f(z) ** sol.s / (1 + sol.k**2))))


@dataclass(frozen=True)
class LocalizedIpm:
    solution: IpmSolution
    cutoff: CutoffSpec
    z_center: float
    half_width: float

    def fields(self, x, y):
        u1, u2, th, p = self.solution.fields(x, y)
        w = self.cutoff(p)
        return w * u1, w * u2, w * th, self.cutoff.antiderivative(p, 1)

    def in_strip(self, x, y):
        return np.abs(self.solution.z(x, y) - self.z_center) <= self.half_width


def localize_strip(sol: IpmSolution, half_width: float, z_center: float | None = None,
                   ramp: float = 0.5) -> LocalizedIpm:
    """Cutoff whose pressure window is p(z_c - w) .. p(z_c + w).

    The strip {|z - z_c| <= w} runs along (k, 1); k = 0 would make it parallel
    to gravity and is rejected. The default centre keeps the strip inside z > 0.
    """
    if sol.k == 0:
        raise ValueError("k = 0 gives a strip parallel to gravity e2; choose k != 0")
    if half_width <= 0:
        raise ValueError("strip half-width must be positive")
    zc = 2.0 * half_width if z_center is None else z_center
    if zc - half_width <= 0:
        raise ValueError("strip must lie in z > 0 where psi is positive")
    pa, pb = sorted(float(sol.k * sol.f(v)) for v in (zc - half_width, zc + half_width))
    return LocalizedIpm(sol, CutoffSpec(pa, pb, "bump", ramp), zc, half_width)


def ipm_residual(u1, u2, theta, p, h1: float, h2: float, mask=None) -> dict:
    """Max-abs FD residuals of transport, divergence and the Darcy law."""
    tr, dv, dx, dy = verify.ipm_residual_arrays(u1, u2, theta, p, h1, h2)
    if mask is None:
        mask = ~verify.boundary_mask(np.shape(u1))
    return {"transport": verify.norms(tr, mask)[0], "divergence": verify.norms(dv, mask)[0],
            "darcy": verify.norms(np.hypot(dx, dy), mask)[0]}


def sample_grid(fields_fn, grid):
    X, Y = grid.mesh()
    return fields_fn(X, Y)
