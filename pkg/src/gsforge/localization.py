"""Pressure cutoffs, the localized template and multiscale superpositions.

A steady solution (u, p) with u . grad p = 0 stays steady after
u -> phi_c(p) u provided the pressure is rebuilt from grad p~ = phi_c(p)**2 grad p.
Choosing phi_c supported in a pressure window that avoids the degenerate
minimum gives a field supported in an annulus around (ell, 0).

The template used for superposition is that localized field, rotated about
the symmetry axis into a torus. In template units the torus has major
radius 1/rho and the support sits in the shell 1/2 < |r - 1/rho|**2 + z**2 < 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy.spatial import cKDTree

from .euler import CylField, DimensionalParams, point_velocity
from .hodograph import Geometry
from .parallel import chunked_map
from .stream import evaluate_phi

_GL_X, _GL_W = legendre.leggauss(16)


def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f0 = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        f1 = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f0 / (f0 + f1)


@dataclass(frozen=True)
class CutoffSpec:
    """Smooth profile phi_c of the pressure.

    kind ``"bump"``: zero outside (p_lo, p_hi), rising over ``ramp`` times the
    window width on each side (ramp = 0.5 leaves no plateau).
    kind ``"lowpass"``: 1 for p <= p_lo, 0 for p >= p_hi.
    kind ``"identity"``: phi_c = 1 (thresholds ignored).
    Antiderivatives of phi_c**k are anchored at ``anchor`` (default p_hi for
    bump and lowpass, so the rebuilt pressure is 0 beyond the upper threshold).
    """

    p_lo: float = -math.inf
    p_hi: float = math.inf
    kind: str = "bump"
    ramp: float = 0.5
    panels: int = 64

    def __post_init__(self):
        if self.kind not in ("bump", "lowpass", "identity"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")
        if self.kind != "identity":
            if not (math.isfinite(self.p_lo) and math.isfinite(self.p_hi) and self.p_lo < self.p_hi):
                raise ValueError("cutoff needs finite thresholds p_lo < p_hi")
            if not 0 < self.ramp <= 0.5:
                raise ValueError("ramp must lie in (0, 1/2]")

    @classmethod
    def identity(cls) -> "CutoffSpec":
        return cls(kind="identity")

    @property
    def anchor(self) -> float:
        return 0.0 if self.kind == "identity" else self.p_hi

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "identity":
            return np.ones_like(p)
        w = (self.p_hi - self.p_lo) * (self.ramp if self.kind == "bump" else 1.0)
        down = _smooth_step((self.p_hi - p) / w)
        if self.kind == "lowpass":
            return down
        return _smooth_step((p - self.p_lo) / w) * down

    # antiderivative of phi_c**power by composite Gauss-Legendre
    def _panel_table(self, power: int):
        edges = np.linspace(self.p_lo, self.p_hi, self.panels + 1)
        a, b = edges[:-1], edges[1:]
        nodes = 0.5 * (b - a)[:, None] * (_GL_X + 1.0) + a[:, None]
        vals = (self(nodes) ** power) @ _GL_W * 0.5 * (b - a)
        return edges, np.concatenate([[0.0], np.cumsum(vals)])

    def antiderivative(self, p, power: int = 2):
        """Phi(p) = int_anchor^p phi_c(t)**power dt."""
        p = np.asarray(p, dtype=float)
        if self.kind == "identity":
            return p - self.anchor
        edges, cum = self._panel_table(power)
        q = np.clip(p, self.p_lo, self.p_hi)
        i = np.clip(np.searchsorted(edges, q, side="right") - 1, 0, self.panels - 1)
        a = edges[i]
        half = 0.5 * (q - a)
        nodes = half[..., None] * (_GL_X + 1.0) + a[..., None]
        part = (self(nodes) ** power) @ _GL_W * half
        below = cum[i] + part  # integral from p_lo
        out = below - cum[-1]  # anchor p_hi
        if self.kind == "lowpass":
            out = out + np.where(p < self.p_lo, p - self.p_lo, 0.0)
        return out

    def total(self, power: int = 2) -> float:
        if self.kind == "identity":
            return math.inf
        return float(self._panel_table(power)[1][-1])

    def to_dict(self) -> dict:
        return {"p_lo": self.p_lo, "p_hi": self.p_hi, "kind": self.kind, "ramp": self.ramp}


# ------------------------------------------------------------ Euler cutoff
def apply_cutoff(field: CylField, cutoff: CutoffSpec) -> CylField:
    """u~ = phi_c(p) u and p~ = int phi_c(p)**2 dp (zero beyond p_hi)."""
    if cutoff.kind != "identity":
        pmin, pmax = float(np.min(field.p)), float(np.max(field.p))
        if not (pmin <= cutoff.p_lo and cutoff.p_hi <= pmax):
            raise ValueError(f"cutoff window [{cutoff.p_lo:g}, {cutoff.p_hi:g}] outside attained "
                             f"pressure range [{pmin:g}, {pmax:g}]")
    w = cutoff(field.p)
    meta = dict(field.meta, localized=cutoff.kind != "identity", cutoff=cutoff.to_dict())
    return field.replace(u_r=w * field.u_r, u_phi=w * field.u_phi, u_z=w * field.u_z,
                         p=cutoff.antiderivative(field.p, 2), meta=meta)


def annulus_mask(x, y, rho: float):
    """Open annulus rho**2/2 < x**2 + y**2 < rho**2 in rescaled units."""
    d2 = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return (d2 > 0.5 * rho**2) & (d2 < rho**2)


def annulus_thresholds(geometry: Geometry, params: DimensionalParams, rho: float | None = None,
                       margin: float = 0.02, n: int = 721) -> CutoffSpec:
    """Bump window strictly between the inner and outer annulus circles.

    p_lo exceeds the largest pressure on the inner circle and p_hi is below
    the smallest on the outer circle, each by ``margin`` (relative). The
    outer radius ``rho`` defaults to the profile interval epsilon.
    """
    rho = geometry.epsilon if rho is None else rho
    t = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    p_of = lambda rad: 2 * params.m * params.psi(evaluate_phi(geometry, rad * np.cos(t), rad * np.sin(t)))
    p_in = float(np.max(p_of(rho / math.sqrt(2.0))))
    p_out = float(np.min(p_of(rho)))
    lo, hi = p_in * (1 + margin), p_out * (1 - margin)
    if not lo < hi:
        raise ValueError(f"pressure level sets do not separate the annulus circles (rho={rho:g})")
    return CutoffSpec(lo, hi, "bump")


# ---------------------------------------------------------------- template
class Template:
    """Localized steady field in template coordinates (major radius 1/rho).

    The physical point is ell * rho * X; the velocity is not rescaled, so the
    template solves the steady equations with the same pressure.
    """

    def __init__(self, geometry: Geometry | None = None, params: DimensionalParams | None = None,
                 cutoff: CutoffSpec | None = None, rho: float | None = None):
        self.geometry = geometry or Geometry()
        self.params = params or DimensionalParams(1.0, 1.0)
        self.rho = self.geometry.epsilon if rho is None else rho
        self.cutoff = cutoff or annulus_thresholds(self.geometry, self.params, rho)
        self.hole_pressure = -self.cutoff.total(2)

    @property
    def major_radius(self) -> float:
        return 1.0 / self.rho

    @property
    def bounding_radius(self) -> float:
        """Radius of a ball about the origin containing the support."""
        return 1.0 / self.rho + 1.0

    def in_shell(self, X):
        X = np.asarray(X, dtype=float)
        rT = np.hypot(X[..., 0], X[..., 1])
        return annulus_mask(rT - 1.0 / self.rho, X[..., 2], 1.0)

    def __call__(self, X):
        """Velocity (..., 3) and pressure (...) at template points X (..., 3)."""
        X = np.asarray(X, dtype=float)
        shape = X.shape[:-1]
        pts = X.reshape(-1, 3)
        u = np.zeros_like(pts)
        rT = np.hypot(pts[:, 0], pts[:, 1])
        xs = self.rho * rT - 1.0
        ys = self.rho * pts[:, 2]
        d2 = xs**2 + ys**2
        p = np.where(d2 < 0.5 * self.rho**2, self.hole_pressure, 0.0)
        live = annulus_mask(xs, ys, self.rho * (1 + 1e-12))
        if np.any(live):
            x, y = xs[live], ys[live]
            phi = evaluate_phi(self.geometry, x, y)
            ur, uph, uz, pp, _ = point_velocity(self.geometry, self.params, x, y, phi)
            w = self.cutoff(pp)
            ur, uph, uz = w * ur, w * uph, w * uz
            r = rT[live]
            c = np.where(r > 0, pts[live, 0] / np.where(r > 0, r, 1.0), 1.0)
            s = np.where(r > 0, pts[live, 1] / np.where(r > 0, r, 1.0), 0.0)
            u[live] = np.stack([ur * c - uph * s, ur * s + uph * c, uz], axis=-1)
            p[live] = self.cutoff.antiderivative(pp, 2)
        return u.reshape(shape + (3,)), p.reshape(shape)


def smooth_template(params: DimensionalParams | None = None, cutoff: CutoffSpec | None = None,
                    rho: float | None = None, geometry: Geometry | None = None) -> Template:
    return Template(geometry, params, cutoff, rho)


# -------------------------------------------------------------- placements
@dataclass(frozen=True)
class ShellPlacement:
    center: np.ndarray
    rotation: np.ndarray
    scale: float
    amplitude: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(3)
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "rotation", R)
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-12:
            raise ValueError("rotation is not orthogonal to 1e-12")
        if not (self.scale > 0 and self.amplitude > 0):
            raise ValueError("scale and amplitude must be positive")

    def to_dict(self) -> dict:
        return {"center": [float(v) for v in self.center], "rotation": [[float(v) for v in row] for row in self.rotation],
                "scale": float(self.scale), "amplitude": float(self.amplitude)}

    @classmethod
    def from_dict(cls, d) -> "ShellPlacement":
        return cls(np.array(d["center"]), np.array(d["rotation"]), float(d["scale"]), float(d["amplitude"]))


def placements_to_json(placements) -> str:
    return json.dumps([p.to_dict() for p in placements], sort_keys=True)


def placements_from_json(s: str) -> list[ShellPlacement]:
    return [ShellPlacement.from_dict(d) for d in json.loads(s)]


@dataclass(frozen=True)
class HelixSpec:
    radius: float = 1.0
    pitch: float = 1.0
    scale0: float = 1e-2
    ratio: float = 0.05
    spacing: float = 3.0

    @property
    def c(self) -> float:
        return math.hypot(self.radius, self.pitch)

    def point(self, s):
        """Helix through the origin, arclength s; x written without cancellation."""
        th = np.asarray(s, dtype=float) / self.c
        A = self.radius
        return np.stack([-2 * A * np.sin(th / 2) ** 2, A * np.sin(th), self.pitch * th], axis=-1)

    def frame(self, s) -> np.ndarray:
        """Rotation with columns (normal, binormal, tangent)."""
        th = float(s) / self.c
        A, h, c = self.radius, self.pitch, self.c
        T = np.array([-A * math.sin(th), A * math.cos(th), h]) / c
        N = np.array([-math.cos(th), -math.sin(th), 0.0])
        return np.column_stack([N, np.cross(T, N), T])


def check_disjoint(placements, bounding_radius: float) -> None:
    """Raise if any two bounding balls intersect."""
    C = np.array([p.center for p in placements])
    rad = np.array([p.scale for p in placements]) * bounding_radius
    for i in range(len(placements)):
        d = np.linalg.norm(C[i + 1:] - C[i], axis=1)
        bad = np.flatnonzero(d < rad[i] + rad[i + 1:])
        if bad.size:
            j = i + 1 + bad[0]
            raise ValueError(f"shells {i} and {j} overlap (distance {d[bad[0]]:.3e} < {rad[i] + rad[j]:.3e})")


def helical_placements(n_shells: int, alpha_target: float, helix: HelixSpec | None = None,
                       bounding_radius: float = 21.0) -> list[ShellPlacement]:
    """Shells of scale ell_n = scale0 * ratio**(n-1) along a helix, amplitude ell_n**alpha.

    Centres sit at arclength s_n = sum_{k >= n} gap_k with
    gap_k = spacing (rad_k + rad_{k+1}) / 2, so the (infinite) family
    accumulates at the origin, where floating point resolves every scale.
    """
    if int(n_shells) != n_shells or n_shells < 1:
        raise ValueError("n_shells must be a positive integer")
    helix = helix or HelixSpec()
    if not 0 < helix.ratio < 1:
        raise ValueError("scale ratio must lie in (0, 1)")
    if helix.spacing < 2:
        raise ValueError("spacing factor below 2 cannot separate neighbouring shells")
    n = np.arange(int(n_shells))
    ell = helix.scale0 * helix.ratio**n
    rad = ell * bounding_radius
    s = helix.spacing * rad * (1 + helix.ratio) / (2 * (1 - helix.ratio))
    if s[0] + rad[0] > math.pi * helix.c:
        raise ValueError("infeasible packing: first shells exceed half a helix turn")
    out = [ShellPlacement(helix.point(si), helix.frame(si), float(li), float(li**alpha_target))
           for si, li in zip(s, ell)]
    check_disjoint(out, bounding_radius)
    return out


# ----------------------------------------------------------- superposition
class Multiscale:
    """u(x) = sum_n U_n R_n u_B(R_n^T (x - x_n) / ell_n), pressure U_n**2 p_B."""

    def __init__(self, template, placements, bounding_radius: float | None = None):
        self.template = template
        self.placements = list(placements)
        if not self.placements:
            raise ValueError("need at least one placement")
        self.bounding_radius = bounding_radius if bounding_radius is not None else template.bounding_radius
        check_disjoint(self.placements, self.bounding_radius)
        self._C = np.array([p.center for p in self.placements])
        self._rad = np.array([p.scale for p in self.placements]) * self.bounding_radius
        self._tree = cKDTree(self._C)

    def shell_of(self, x) -> np.ndarray:
        """Index of the bounding ball containing each point, -1 if none."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(len(x), -1)
        cand = self._tree.query_ball_point(x, r=float(np.max(self._rad)))
        for i, lst in enumerate(cand):
            for j in lst:
                if np.linalg.norm(x[i] - self._C[j]) < self._rad[j]:
                    out[i] = j
                    break
        return out

    def _evaluate(self, x):
        idx = self.shell_of(x)
        u = np.zeros_like(x)
        p = np.zeros(len(x))
        for j in np.unique(idx[idx >= 0]):
            sel = idx == j
            P = self.placements[j]
            X = (x[sel] - P.center) @ P.rotation / P.scale  # rows: R^T (x - x_n)
            uB, pB = self.template(X)
            u[sel] = P.amplitude * uB @ P.rotation.T
            p[sel] = P.amplitude**2 * pB
        return u, p

    def __call__(self, x, threads: int | None = None):
        x = np.asarray(x, dtype=float)
        shape = x.shape[:-1]
        flat = x.reshape(-1, 3)
        parts = chunked_map(self._evaluate, flat, threads=threads)
        u = np.concatenate([a for a, _ in parts]) if parts else np.zeros((0, 3))
        p = np.concatenate([b for _, b in parts]) if parts else np.zeros(0)
        return u.reshape(shape + (3,)), p.reshape(shape)


def multiscale_superpose(template, placements, points, threads: int | None = None):
    return Multiscale(template, placements)(points, threads=threads)


# ------------------------------------------------------------------- norms
@dataclass(frozen=True)
class NormEstimate:
    alpha: float
    p: float
    value: float
    partial: float
    tail_bound: float
    converged: bool
    terms: tuple = field(repr=False, default=())


def norm_estimate(placements, alpha: float, p: float) -> NormEstimate:
    """(sum U_n**p ell_n**(3 - p alpha))**(1/p); sup U_n ell_n**(-alpha) for p = inf.

    The tail beyond the built shells is extrapolated geometrically from the
    last two terms: finite when they decrease, infinite otherwise.
    """
    U = np.array([q.amplitude for q in placements])
    ell = np.array([q.scale for q in placements])
    if math.isinf(p):
        t = U * ell ** (-alpha)
        part = float(np.max(t))
        growing = len(t) > 1 and t[-1] > t[-2] * (1 + 1e-12)
        tail = math.inf if growing else part
        return NormEstimate(alpha, p, part, part, tail, not growing, tuple(t.tolist()))
    if p < 1:
        raise ValueError("p must be >= 1")
    t = U**p * ell ** (3 - p * alpha)
    part = float(np.sum(t))
    if len(t) > 1 and t[-1] < t[-2]:
        r = t[-1] / t[-2]
        tail = float(t[-1] * r / (1 - r))
    elif len(t) == 1:
        tail = 0.0
    else:
        tail = math.inf
    value = (part + tail) ** (1 / p) if math.isfinite(tail) else math.inf
    return NormEstimate(alpha, p, value, part ** (1 / p), tail, math.isfinite(tail), tuple(t.tolist()))


@dataclass(frozen=True)
class HolderEstimate:
    alpha: float
    per_shell: np.ndarray
    cross_shell: float
    overall: float


def _template_points(template, n: int, rng):
    """Points uniformly in the template shell's meridian annulus at random angles."""
    pts = []
    while sum(len(a) for a in pts) < n:
        m = 4 * n
        a = rng.uniform(0, 2 * np.pi, m)
        rad = np.sqrt(rng.uniform(0.5, 1.0, m))
        rT = template.major_radius + rad * np.cos(a)
        zT = rad * np.sin(a)
        th = rng.uniform(0, 2 * np.pi, m)
        P = np.stack([rT * np.cos(th), rT * np.sin(th), zT], axis=-1)
        pts.append(P)
    return np.concatenate(pts)[:n]


def empirical_holder(ms: Multiscale, alpha: float, n_points: int = 64,
                     distances=(0.05, 0.1, 0.2), seed: int = 0) -> HolderEstimate:
    """max |u(x) - u(y)| / |x - y|**alpha over within-shell and cross-shell pairs.

    Within shell n the same template-unit pairs are used at every scale, with
    separations ``distances`` (template units). Cross-shell pairs join the
    centre points of consecutive shells.
    """
    rng = np.random.default_rng(seed)
    base = _template_points(ms.template, n_points, rng)
    dirs = rng.normal(size=(n_points, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    per = []
    for P in ms.placements:
        best = 0.0
        X = P.center + (P.scale * base) @ P.rotation.T
        ux, _ = ms(X)
        for d in distances:
            Y = X + P.scale * d * dirs
            uy, _ = ms(Y)
            q = np.linalg.norm(ux - uy, axis=1) / (P.scale * d) ** alpha
            best = max(best, float(np.max(q)))
        per.append(best)
    cross = 0.0
    for P, Q in zip(ms.placements[:-1], ms.placements[1:]):
        X = P.center + (P.scale * base[:8]) @ P.rotation.T
        Y = Q.center + (Q.scale * base[:8]) @ Q.rotation.T
        ux, _ = ms(X)
        uy, _ = ms(Y)
        q = np.linalg.norm(ux - uy, axis=1) / np.linalg.norm(X - Y, axis=1) ** alpha
        cross = max(cross, float(np.max(q)))
    per = np.array(per)
    return HolderEstimate(alpha, per, cross, float(max(np.max(per), cross)))


def shell_dissipation(ms: Multiscale, steps=(0.005, 0.0025, 0.00125), n_points: int = 32, seed: int = 1):
    """Per-shell max |u . grad(|u|**2/2 + p)| by central differences.

    Steps are in template units (scaled by ell_n). Returns an array of shape
    (n_shells, len(steps)) normalised by U_n**3 / ell_n.
    """
    rng = np.random.default_rng(seed)
    base = _template_points(ms.template, n_points, rng)
    E = np.eye(3)
    out = np.zeros((len(ms.placements), len(steps)))
    for k, P in enumerate(ms.placements):
        X = P.center + (P.scale * base) @ P.rotation.T
        for j, hT in enumerate(steps):
            h = hT * P.scale
            stencil = np.concatenate([X] + [X + s * h * E[i] for i in range(3) for s in (1, -1)])
            u, p = ms(stencil)
            H = 0.5 * np.sum(u**2, axis=1) + p
            n = len(X)
            grad = np.stack([(H[(1 + 2 * i) * n:(2 + 2 * i) * n] - H[(2 + 2 * i) * n:(3 + 2 * i) * n]) / (2 * h)
                             for i in range(3)], axis=-1)
            res = np.abs(np.sum(u[:n] * grad, axis=1))
            out[k, j] = np.max(res) * P.scale / P.amplitude**3
    return out
