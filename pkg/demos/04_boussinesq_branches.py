"""Steady Boussinesq fields and the two ways to continue them across x1 = x1_0.

The hodograph relations fix |d1 psi| = psi**s sqrt(B) with B near 2. A smooth
psi must then vanish on a whole curve, so a strict minimum of the pressure and
a smooth velocity cannot both be had. This script shows both branches.

Run: python3 demos/04_boussinesq_branches.py
"""

from gsforge import boussinesq as bq
from gsforge.stream import Grid2D

prof = bq.BoussinesqProfiles(k=1.0)
print("gamma(0) =", prof.gamma(0.0), " identity defect =", prof.identity_defect())
print("gamma has a positive root only for tau >", round(bq.tau_floor(1.0), 6))

c = prof.default_center()
for branch in bq.BRANCHES:
    print(f"branch {branch!r}:")
    for n in (101, 201):
        grid = Grid2D(c[0] - 0.1, c[0] + 0.1, c[1] - 0.1, c[1] + 0.1, n, n)
        f = bq.assemble_boussinesq(grid, prof, branch=branch)
        r = bq.boussinesq_residual(f)
        print(f"  n={n}: momentum={r['momentum']:.2e} transport={r['transport']:.2e} "
              f"strict min of p at x0: {bq.strict_argmin(f.p, grid, c)}")
