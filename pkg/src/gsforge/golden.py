"""Reference quantities shipped with the package and checked by the ``verify`` task.

``python3 -m gsforge.golden`` regenerates ``data/golden.json``.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from . import boussinesq, euler, ipm, localization, verify
from .hodograph import Geometry
from .io import dumps, read_json
from .profiles import euler_profiles, solve_z_zeta
from .stream import Grid2D, build_phi, compute_UV, gradient_consistency

# quantities that are zero up to rounding are compared absolutely
ABS_TOL = 1e-12
REL_TOL = 1e-8


def compute_golden() -> dict:
    z, zeta = solve_z_zeta(12)
    prof = euler_profiles(12)
    g = Geometry(prof)
    out = {
        "z1": z[1], "zeta1": zeta[1], "a1": prof.a[1], "b1": prof.b[1], "epsilon": prof.epsilon,
        "dphi_P6_at_origin": float(g.eval_P("P6", 0.0, 0.0, dphi=1)),
        "delta_second_difference_h0.01": g.boundary_delta(0.04, 0.01).second_difference_at_zero(),
        "compatibility_residual_N12": g.compatibility_residual(np.linspace(-0.025, 0.025, 21),
                                                               np.linspace(-0.025, 0.025, 21)),
        "axis_phi_at_y0.05": float(g.Y_inverse(np.array([0.05]))[0]),
    }
    grid = Grid2D.square(0.1, 101)
    phi = build_phi(grid, g)
    U, V = compute_UV(phi, g)
    gr = gradient_consistency(phi, U, V)
    out["gradient_residual_x_n101"] = gr.res_x
    out["gradient_residual_y_n101"] = gr.res_y
    P = euler.DimensionalParams()
    f = euler.assemble_velocity(phi, g, P)
    out["bernoulli_fd_n101"] = euler.bernoulli_residual(f)
    out["euler_steady_outside_ball_n101"] = verify.euler_steady_residual(f, euler.distance_mask(f, 0.05)).max_res
    cut = localization.annulus_thresholds(g, P)
    out["cutoff_p_lo"], out["cutoff_p_hi"] = cut.p_lo, cut.p_hi
    bp = boussinesq.BoussinesqProfiles(1.0)
    t = np.array([0.1])
    out["boussinesq_gamma_0.1"] = float(bp.gamma(t)[0])
    out["boussinesq_alpha_0.1"] = float(bp.alpha(t)[0])
    out["boussinesq_beta_0.1"] = float(bp.beta(t)[0])
    out["boussinesq_identity_defect"] = bp.identity_defect()
    sol = ipm.build_ipm(1.0, 0.5)
    out["ipm_psi_at_(1,0)"] = float(sol.psi(1.0, 0.0))
    out["ipm_psi_at_(3,1)"] = float(sol.psi(3.0, 1.0))
    pl = localization.helical_placements(20, 1 / 3, bounding_radius=1 / g.epsilon + 1)
    out["l2_proxy_alpha0"] = localization.norm_estimate(pl, 0.0, 2).value
    out["holder_proxy_alpha_1/3"] = localization.norm_estimate(pl, 1 / 3, np.inf).value
    return {k: float(v) for k, v in out.items()}


def load_golden() -> dict:
    with resources.as_file(resources.files("gsforge") / "data" / "golden.json") as p:
        return read_json(p)


def compare(current: dict, golden: dict) -> list[verify.ResidualReport]:
    reports = []
    for key in sorted(golden):
        ref = float(golden[key])
        if key not in current:
            reports.append(verify.ResidualReport(key, 0.0, float("inf"), float("inf"), None, False))
            continue
        diff = abs(float(current[key]) - ref)
        tol = max(ABS_TOL, REL_TOL * abs(ref))
        reports.append(verify.ResidualReport(key, 0.0, diff, diff, None, diff <= tol))
    return reports


if __name__ == "__main__":  # pragma: no cover
    from pathlib import Path

    target = Path(__file__).with_name("data") / "golden.json"
    target.parent.mkdir(exist_ok=True)
    target.write_text(dumps(compute_golden()))
    print(f"wrote {target}")
