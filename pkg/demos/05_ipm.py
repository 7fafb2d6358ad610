"""A porous-medium flow in closed form, and a strip cut out of it.

Run: python3 demos/05_ipm.py
"""

import numpy as np

from gsforge import ipm
from gsforge.stream import Grid2D

sol = ipm.build_ipm(k=1.0, s=0.5)
for x, y in ((1.0, 0.0), (3.0, 1.0), (0.0, 1.0)):
    print(f"psi({x}, {y}) = {sol.psi(x, y)}   (x - y)^2/16 = {max(x - y, 0) ** 2 / 16}")

strip = ipm.localize_strip(sol, half_width=0.1)
grid = Grid2D(-0.5, 0.5, -0.5, 0.5, 201, 201)
X, Y = grid.mesh()
u1, u2, theta, p = strip.fields(X, Y)
print("nodes carrying flow:", int(np.count_nonzero(u1)), "of", u1.size)
print("all of them inside the strip:", bool(np.all(strip.in_strip(X, Y)[u1 != 0])))
print("residuals:", ipm.ipm_residual(u1, u2, theta, p, grid.hx, grid.hy))
