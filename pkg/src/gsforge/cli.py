"""Command-line driver: ``gsforge --task <name> [options]`` or ``python3 -m gsforge``.

Options may also come from a JSON config (``--config``); flags given on the
command line override it. Every run writes ``config.json`` (the resolved
configuration) and ``report.json`` into ``--out``. Failures exit nonzero and
print a JSON error object on stderr: exit 2 for configuration errors, 1 for
errors raised while computing.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import boussinesq, euler, golden, ipm, localization, verify
from .hodograph import Geometry
from .io import FORMATS, export_grid, write_csv, write_json, write_vtk
from .profiles import euler_profiles
from .stream import Grid2D, build_phi, compute_UV, gradient_consistency

TASKS = ("euler-build", "euler-localize", "multiscale", "boussinesq", "ipm", "verify")

DEFAULTS = {
    "out": "gsforge-out", "grid": [401, 401], "order": 12, "ell": 1.0, "tau": 1.0,
    "k": 1.0, "s": 0.5, "alpha_target": 1 / 3, "shells": 20, "format": "csv",
    "half_width": 0.1, "rho": None, "seed": 0,
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["task"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "out": {"type": "string"},
        "grid": {"type": "array", "items": {"type": "integer", "minimum": 5}, "minItems": 2, "maxItems": 2},
        "order": {"type": "integer", "minimum": 2, "maximum": 40},
        "ell": {"type": "number", "exclusiveMinimum": 0},
        "tau": {"type": "number", "exclusiveMinimum": 0},
        "k": {"type": "number", "not": {"const": 0}},
        "s": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "alpha_target": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "shells": {"type": "integer", "minimum": 1, "maximum": 40},
        "format": {"enum": list(FORMATS) + ["vtk-ascii"]},
        "half_width": {"type": "number", "exclusiveMinimum": 0},
        "rho": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
    },
}


class ConfigError(Exception):
    def __init__(self, keys, messages):
        super().__init__("; ".join(messages))
        self.keys = sorted(set(keys))
        self.messages = messages


def _grid_arg(text: str):
    try:
        nx, ny = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--grid expects nx,ny (two integers)") from None
    return [nx, ny]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gsforge", description=__doc__.splitlines()[0])
    ap.add_argument("--task", choices=TASKS)
    ap.add_argument("--config", type=Path)
    ap.add_argument("--out")
    ap.add_argument("--grid", type=_grid_arg, metavar="NX,NY")
    ap.add_argument("--order", type=int)
    ap.add_argument("--ell", type=float)
    ap.add_argument("--tau", type=float)
    ap.add_argument("--k", type=float)
    ap.add_argument("--s", type=float)
    ap.add_argument("--alpha-target", dest="alpha_target", type=float)
    ap.add_argument("--shells", type=int)
    ap.add_argument("--format", choices=list(FORMATS) + ["vtk-ascii"])
    return ap


def resolve_config(args) -> dict:
    cfg = {}
    if args.config is not None:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(["config"], [f"cannot read config: {err}"]) from None
        if not isinstance(loaded, dict):
            raise ConfigError(["config"], ["config must be a JSON object"])
        cfg.update(loaded)
    for key in ("task", "out", "grid", "order", "ell", "tau", "k", "s", "alpha_target", "shells", "format"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    if isinstance(cfg.get("grid"), str):
        try:
            cfg["grid"] = _grid_arg(cfg["grid"])
        except argparse.ArgumentTypeError as err:
            raise ConfigError(["grid"], [str(err)]) from None
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(e.path))
    if errors:
        keys, msgs = [], []
        for e in errors:
            if e.validator == "additionalProperties":
                extra = sorted(set(e.instance) - set(SCHEMA["properties"]))
                keys += extra
            elif e.validator == "required":
                keys.append("task")
            else:
                keys.append(str(e.path[0]) if e.path else "config")
            msgs.append(e.message)
        raise ConfigError(keys, msgs)
    full = dict(DEFAULTS)
    full.update(cfg)
    full["format"] = {"vtk-ascii": "vtk"}.get(full["format"], full["format"])
    return full


# ------------------------------------------------------------------ tasks
def _euler_field(cfg):
    prof = euler_profiles(cfg["order"])
    geo = Geometry(prof)
    nx, ny = cfg["grid"]
    if ny % 2 == 0:
        raise ConfigError(["grid"], ["ny must be odd (a node row on y = 0 is required)"])
    hw = cfg["half_width"]
    grid = Grid2D(-hw, hw, -hw, hw, nx, ny)
    phi = build_phi(grid, geo)
    params = euler.DimensionalParams(cfg["ell"], cfg["tau"])
    return geo, grid, phi, params, euler.assemble_velocity(phi, geo, params)


def _export_cyl(out: Path, name: str, f: euler.CylField, fmt: str, extra=None):
    w = euler.Vorticity(*(np.zeros_like(f.psi),) * 3) if extra is None else extra
    return export_grid(out / name, fmt, (f.r, f.z), ("r", "z"),
                       {"psi": f.psi, "p": f.p},
                       {"u": np.stack([f.u_r, f.u_phi, f.u_z], axis=-1),
                        "omega": np.stack([w.w_r, w.w_phi, w.w_z], axis=-1)})


def _euler_report(f, ball=0.05):
    out = euler.distance_mask(f, ball)
    inside = euler.distance_mask(f, 0.0, ball)
    return {
        "divergence_outside_ball": verify.divergence_residual(f, out).to_dict(),
        "steady_outside_ball": verify.euler_steady_residual(f, out).to_dict(),
        "steady_inside_ball": verify.euler_steady_residual(f, inside).to_dict() if inside.any() else None,
    }


def task_euler_build(cfg, out: Path) -> dict:
    geo, grid, phi, params, f = _euler_field(cfg)
    U, V = compute_UV(phi, geo)
    gr = gradient_consistency(phi, U, V)
    w = euler.assemble_vorticity(f, geo)
    files = [_export_cyl(out, "euler_field", f, cfg["format"], w)]
    geo.boundary_delta(geo.epsilon, geo.epsilon / 50).to_csv(out / "boundary_curve.csv")
    geo.axis_profile(cfg["half_width"], 101).to_csv(out / "axis_profile.csv")
    rep = _euler_report(f)
    rep.update(bernoulli_fd=euler.bernoulli_residual(f), gradient_residual={"x": gr.res_x, "y": gr.res_y, "hx": gr.hx, "hy": gr.hy},
               sup_vorticity=float(np.max(w.magnitude())), epsilon=geo.epsilon, m=params.m,
               files=[str(p.name) for p in files] + ["boundary_curve.csv", "axis_profile.csv"])
    return rep


def task_euler_localize(cfg, out: Path) -> dict:
    geo, grid, phi, params, f = _euler_field(cfg)
    rho = geo.epsilon if cfg["rho"] is None else cfg["rho"]
    cut = localization.annulus_thresholds(geo, params, rho)
    c = localization.apply_cutoff(f, cut)
    X, Y = grid.mesh()
    outside = ~localization.annulus_mask(X, Y, rho)
    leak = float(np.max(np.abs(np.stack([c.u_r, c.u_phi, c.u_z]))[:, outside], initial=0.0))
    path = _export_cyl(out, "euler_localized", c, cfg["format"])
    rep = _euler_report(c)
    rep.update(cutoff=cut.to_dict(), max_abs_u_outside_annulus=leak, support_ok=leak == 0.0, files=[path.name])
    return rep


def task_multiscale(cfg, out: Path) -> dict:
    params = euler.DimensionalParams(cfg["ell"], cfg["tau"])
    tpl = localization.Template(Geometry(euler_profiles(cfg["order"])), params, rho=cfg["rho"])
    pl = localization.helical_placements(cfg["shells"], cfg["alpha_target"], bounding_radius=tpl.bounding_radius)
    ms = localization.Multiscale(tpl, pl)
    (out / "placements.json").write_text(localization.placements_to_json(pl) + "\n")
    a = cfg["alpha_target"]
    norms = {name: vars(localization.norm_estimate(pl, al, p)) for name, al, p in
             (("L2", 0.0, 2.0), ("C_alpha_target", a, np.inf), ("C_alpha_target_plus_0.1", a + 0.1, np.inf))}
    for v in norms.values():
        v.pop("terms", None)
    hold = {str(al): localization.empirical_holder(ms, al, seed=cfg["seed"]).per_shell for al in (a, a + 0.1)}
    # slice through the first shell: plane spanned by its normal and tangent
    P = pl[0]
    nx, ny = cfg["grid"]
    s1 = np.linspace(-1, 1, nx) * P.scale * tpl.bounding_radius
    s2 = np.linspace(-1, 1, ny) * P.scale * tpl.bounding_radius
    A, B = np.meshgrid(s1, s2, indexing="ij")
    pts = P.center + A[..., None] * P.rotation[:, 0] + B[..., None] * P.rotation[:, 2]
    u, p = ms(pts)
    fmt = cfg["format"]
    if fmt == "vtk":
        write_vtk(out / "multiscale_slice.vtk", pts, {"p": p}, {"u": u})
        name = "multiscale_slice.vtk"
    elif fmt == "csv":
        write_csv(out / "multiscale_slice.csv", {"x": pts[..., 0], "y": pts[..., 1], "z": pts[..., 2],
                                                  "u_1": u[..., 0], "u_2": u[..., 1], "u_3": u[..., 2], "p": p})
        name = "multiscale_slice.csv"
    else:
        write_json(out / "multiscale_slice.json", {"points": pts, "u": u, "p": p})
        name = "multiscale_slice.json"
    write_json(out / "norms.json", norms)
    return {"norms": norms, "holder_per_shell": hold, "n_shells": len(pl), "seed": cfg["seed"],
            "files": ["placements.json", "norms.json", name]}


def task_boussinesq(cfg, out: Path) -> dict:
    prof = boussinesq.BoussinesqProfiles(cfg["k"], cfg["s"])
    nx, ny = cfg["grid"]
    if nx % 2 == 0 or ny % 2 == 0:
        raise ConfigError(["grid"], ["grid counts must be odd so x0 is a node"])
    hw = cfg["half_width"]
    c = prof.default_center()
    grid = Grid2D(c[0] - hw, c[0] + hw, c[1] - hw, c[1] + hw, nx, ny)
    f = boussinesq.assemble_boussinesq(grid, prof)
    sm = boussinesq.assemble_boussinesq(grid, prof, branch="smooth")
    path = export_grid(out / "boussinesq_field", cfg["format"], (grid.x, grid.y), ("x1", "x2"),
                       {"psi": f.psi, "theta": f.theta, "p": f.p}, {"u": np.stack([f.u1, f.u2], axis=-1)})
    return {
        "center": list(c), "identity_defect": prof.identity_defect(), "gamma_at_0": float(prof.gamma(0.0)),
        "residual_full": boussinesq.boussinesq_residual(f),
        "residual_right_half": boussinesq.boussinesq_residual(f, boussinesq.half_mask(f, 1)),
        "residual_left_half": boussinesq.boussinesq_residual(f, boussinesq.half_mask(f, -1)),
        "p_strict_argmin_at_center": boussinesq.strict_argmin(f.p, grid, c),
        "smooth_branch": {"residual_full": boussinesq.boussinesq_residual(sm),
                          "p_strict_argmin_at_center": boussinesq.strict_argmin(sm.p, grid, c)},
        "files": [path.name],
    }


def task_ipm(cfg, out: Path) -> dict:
    sol = ipm.build_ipm(cfg["k"], cfg["s"])
    nx, ny = cfg["grid"]
    hw = cfg["half_width"]
    loc = ipm.localize_strip(sol, hw)
    span = 4 * hw
    grid = Grid2D(-span, span, -span, span, nx, ny)
    X, Y = grid.mesh()
    u1, u2, th, p = sol.fields(X, Y)
    f1 = export_grid(out / "ipm_field", cfg["format"], (grid.x, grid.y), ("x", "y"),
                     {"psi": sol.psi(X, Y), "p": p, "theta": th}, {"u": np.stack([u1, u2], axis=-1)})
    lu1, lu2, lth, lp = loc.fields(X, Y)
    f2 = export_grid(out / "ipm_localized", cfg["format"], (grid.x, grid.y), ("x", "y"),
                     {"p": lp, "theta": lth}, {"u": np.stack([lu1, lu2], axis=-1)})
    sol.z_profile_csv(out / "ipm_z_profile.csv", np.linspace(-span, span, 201))
    outside = ~loc.in_strip(X, Y)
    leak = float(max(np.max(np.abs(a[outside]), initial=0.0) for a in (lu1, lu2, lth)))
    positive = sol.z(X, Y) > 2 * max(grid.hx, grid.hy)
    inner = positive & ~verify.boundary_mask(positive.shape)
    return {
        "residual_unlocalized_z_positive": ipm.ipm_residual(u1, u2, th, p, grid.hx, grid.hy, inner),
        "residual_localized": ipm.ipm_residual(lu1, lu2, lth, lp, grid.hx, grid.hy),
        "strip": {"z_center": loc.z_center, "half_width": loc.half_width},
        "max_abs_outside_strip": leak, "files": [f1.name, f2.name, "ipm_z_profile.csv"],
    }


def task_verify(cfg, out: Path) -> dict:
    reports = golden.compare(golden.compute_golden(), golden.load_golden())
    write_json(out / "verify_reports.json", [r.to_dict() for r in reports])
    return {"all_pass": all(r.passed for r in reports), "n_checks": len(reports),
            "failed": [r.equation for r in reports if not r.passed]}


RUNNERS = {"euler-build": task_euler_build, "euler-localize": task_euler_localize, "multiscale": task_multiscale,
           "boussinesq": task_boussinesq, "ipm": task_ipm, "verify": task_verify}


def _fail(code: int, payload: dict) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except ConfigError as err:
        return _fail(2, {"error": "config", "offending_keys": err.keys, "messages": err.messages})
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "config.json", cfg)
    try:
        report = RUNNERS[cfg["task"]](cfg, out)
    except ConfigError as err:
        return _fail(2, {"error": "config", "offending_keys": err.keys, "messages": err.messages})
    except (ValueError, RuntimeError, ArithmeticError) as err:
        payload = {"error": type(err).__name__, "task": cfg["task"], "message": str(err)}
        write_json(out / "error.json", payload)
        return _fail(1, payload)
    report["task"] = cfg["task"]
    write_json(out / "report.json", report)
    if cfg["task"] == "verify" and not report["all_pass"]:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
