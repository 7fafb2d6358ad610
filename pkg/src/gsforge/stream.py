"""Stream function phi(x, y) near the degenerate minimum at (0, 0).

The grid construction goes axis first: phi(0, y) = Y^{-1}(|y|), then each
row is marched in x along d phi/dx = P3(x, phi). The row y = 0 starts at
phi = 0 and therefore reproduces the characteristic curve delta(x).
The non-Lipschitz axis ODE d phi/dy = sqrt(P6(0, phi)) is never time-stepped;
it always goes through the inversion of Y, which picks the positive branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from numpy.polynomial import polynomial as npoly

from .hodograph import Geometry, rk4_march

_GL_X, _GL_W = legendre.leggauss(32)


@dataclass(frozen=True)
class Grid2D:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid needs at least 3 nodes per direction")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("empty grid extent")

    @classmethod
    def square(cls, half_width: float, n: int, center=(0.0, 0.0)) -> "Grid2D":
        cx, cy = center
        return cls(cx - half_width, cx + half_width, cy - half_width, cy + half_width, n, n)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def is_symmetric_in_y(self) -> bool:
        return abs(self.y_min + self.y_max) < 1e-14 * max(1.0, self.y_max) and self.ny % 2 == 1


@dataclass(frozen=True)
class GridField:
    grid: Grid2D
    values: np.ndarray
    name: str = "phi"
    kind: str = "scalar"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(f"values shape {v.shape} does not match grid ({self.grid.nx}, {self.grid.ny})")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{self.name}: non-finite values")
        object.__setattr__(self, "values", v)


def _march_rows(geometry: Geometry, x_nodes, phi_axis, substeps: int):
    """phi and log(V / V_axis) at every x node for each starting axis value.

    Along a row d phi/dx = P3 and, since d_x V = d_y P3 = (d_phi P3) V,
    d log V/dx = -(1 + x) b'(phi). The second equation gives V without the
    cancellation in sqrt(P6) next to y = 0.
    """
    x_nodes = np.asarray(x_nodes, dtype=float)
    phi_axis = np.asarray(phi_axis, dtype=float)
    out = np.empty((len(x_nodes), 2) + phi_axis.shape)

    def rhs(x, state):
        phi = state[0]
        geometry._check(phi)
        return np.stack([geometry.p3(x, phi), -(1.0 + x) * geometry.db(phi)])

    start = np.stack([phi_axis, np.zeros_like(phi_axis)])
    right = x_nodes > 0
    left = x_nodes < 0
    if np.any(right):
        out[right] = rk4_march(rhs, 0.0, x_nodes[right], start, substeps)
    if np.any(left):
        idx = np.flatnonzero(left)[::-1]
        out[idx] = rk4_march(rhs, 0.0, x_nodes[idx], start, substeps)
    out[x_nodes == 0] = start
    return out[:, 0], out[:, 1]


def build_phi(grid: Grid2D, geometry: Geometry, substeps: int = 4) -> GridField:
    """Stream function on ``grid`` (axis-first path, mirrored in y).

    ``meta["V"]`` holds d phi/dy from the row-wise log-derivative march.
    """
    if not grid.is_symmetric_in_y():
        raise ValueError("grid must be symmetric about y = 0 with a node row at y = 0")
    y = grid.y
    j0 = grid.ny // 2
    y_up = y[j0:]
    phi_axis = geometry.Y_inverse(y_up)
    try:
        upper, logv = _march_rows(geometry, grid.x, phi_axis, substeps)
    except ValueError as err:
        raise ValueError(f"trajectory left |phi| <= epsilon inside grid {grid}: {err}") from None
    u = np.sqrt(phi_axis)
    v_axis = u * np.sqrt(geometry._q_of(phi_axis))  # sqrt(pi(phi)) = u sqrt(q(u**2))
    v_up = v_axis * np.exp(logv)
    values = np.empty((grid.nx, grid.ny))
    values[:, j0:] = upper
    values[:, :j0] = upper[:, 1:][:, ::-1]
    V = np.empty_like(values)
    V[:, j0:] = v_up
    V[:, :j0] = -v_up[:, 1:][:, ::-1]
    return GridField(grid, values, "phi", meta={"V": V})


def evaluate_phi(geometry: Geometry, x, y, max_step: float = 1e-3) -> np.ndarray:
    """Pointwise stream function (same construction, per point).

    Each point marches from x = 0 to its own x with n equal RK4 steps, n
    chosen from the largest |x| so the value is a smooth function of (x, y).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    phi = geometry.Y_inverse(y.ravel())
    xs = x.ravel()
    n = max(1, int(np.ceil(np.max(np.abs(xs), initial=0.0) / max_step)))
    h = xs / n
    t = np.zeros_like(xs)
    for _ in range(n):
        k1 = geometry.p3(t, phi)
        k2 = geometry.p3(t + h / 2, phi + h / 2 * k1)
        k3 = geometry.p3(t + h / 2, phi + h / 2 * k2)
        k4 = geometry.p3(t + h, phi + h * k3)
        phi = phi + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t + h
    geometry._check(phi)
    return phi.reshape(x.shape)


def compute_UV(phi_field: GridField, geometry: Geometry, tol: float = 1e-10):
    """U = P3(x, phi), V = sgn(y) sqrt(P6(x, phi)) (V = 0 on the row y = 0).

    A marched V stored in ``phi_field.meta`` is preferred; P6 >= 0 is checked either way.
    """
    X, Y = phi_field.grid.mesh()
    phi = phi_field.values
    U = geometry.p3(X, phi)
    P6 = geometry.p6(X, phi)
    if np.min(P6) < -tol:
        i = np.unravel_index(np.argmin(P6), P6.shape)
        raise ValueError(f"P6 = {P6[i]:.3e} < 0 at (x, y) = ({X[i]:g}, {Y[i]:g}); node outside D")
    V = phi_field.meta.get("V")
    if V is None:
        V = np.sign(Y) * np.sqrt(np.maximum(P6, 0.0))
    return (GridField(phi_field.grid, U, "U", "vector-component"),
            GridField(phi_field.grid, V, "V", "vector-component"))


@dataclass(frozen=True)
class GradientResidual:
    res_x: float
    res_y: float
    hx: float
    hy: float


def gradient_consistency(phi_field: GridField, U: GridField, V: GridField) -> GradientResidual:
    """Centered differences of phi against U and V on interior nodes."""
    g = phi_field.grid
    dphix, dphiy = np.gradient(phi_field.values, g.hx, g.hy, edge_order=2)
    inner = (slice(1, -1), slice(1, -1))
    rx = np.max(np.abs(dphix - U.values)[inner])
    ry = np.max(np.abs(dphiy - V.values)[inner])
    return GradientResidual(float(rx), float(ry), g.hx, g.hy)


def phi_boundary_first(grid: Grid2D, geometry: Geometry, delta_step: float | None = None) -> GridField:
    """Independent route: boundary curve first, then vertical integration.

    For each column, phi(x, y) = delta(x) + s where s solves
    Y_x(sqrt(s)) = |y| with Y_x(u) = int_0^u 2 / sqrt(q_x(v^2)) dv and
    q_x(s) = P6(x, delta(x) + s) / s. Only the boundary curve uses x-marching.
    """
    xs = grid.x
    h = delta_step if delta_step is not None else grid.hx / 4
    half = np.max(np.abs(xs))
    n = int(np.ceil(half / h))
    bc = geometry.boundary_delta(n * h, h)
    delta = bc(xs)
    C = geometry.fields["P6"].coeffs
    yabs = np.abs(grid.y)
    values = np.empty((grid.nx, grid.ny))
    for i, (x, d) in enumerate(zip(xs, delta)):
        c = np.array([npoly.polyval(x, C[:, j]) for j in range(C.shape[1])])
        shifted = np.polynomial.Polynomial(c)(np.polynomial.Polynomial([d, 1.0])).coef
        q = shifted[1:]
        if q[0] <= 0:
            raise ValueError(f"d_phi P6 <= 0 on the boundary at x = {x:g}")
        values[i] = _invert_column(q, yabs) + d
    return GridField(grid, values, "phi_boundary_first")


def _invert_column(q: np.ndarray, y: np.ndarray) -> np.ndarray:
    def Yx(u):
        v = 0.5 * (u[..., None] * (_GL_X + 1.0))
        return 0.5 * u * ((2.0 / np.sqrt(npoly.polyval(v * v, q))) @ _GL_W)

    def dYx(u):
        return 2.0 / np.sqrt(npoly.polyval(u * u, q))

    u = y * 0.5 * np.sqrt(q[0])
    for _ in range(30):
        step = (Yx(u) - y) / dYx(u)
        u = u - step
        if np.max(np.abs(step), initial=0.0) < 1e-15:
            break
    return u * u
