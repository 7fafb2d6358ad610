"""Where the construction starts: two power series and the curves they define.

Run: python3 demos/01_profiles_and_geometry.py
"""

from fractions import Fraction

import numpy as np

from gsforge.hodograph import Geometry
from gsforge.profiles import euler_profiles, solve_z_zeta

# The recurrences can run in exact arithmetic, which pins down the leading terms.
z, zeta = solve_z_zeta(6, exact=True)
print("first coefficients:", z[1], zeta[1])
assert z[1] == Fraction(15, 4)

# a and b follow from z and zeta. Their constant terms are fixed by the model.
exact = euler_profiles(12, exact=True)
print("a(0) =", exact.a[0], " b(0) =", exact.b[0])

geo = Geometry(euler_profiles(12))
print(f"working interval |phi| <= {geo.epsilon}")

# P6 vanishes at the origin and grows linearly in phi along the axis.
print("d/dphi P6 at the origin:", float(geo.eval_P("P6", 0.0, 0.0, dphi=1)))

# The boundary curve delta(x) solves delta' = P3(x, delta). Its second difference
# at 0 approaches 2, so the pressure has a strict minimum there.
for h in (1e-2, 5e-3, 2.5e-3):
    d2 = geo.boundary_delta(0.04, h).second_difference_at_zero()
    print(f"  h={h:<7g} delta''(0) ~ {d2:.10f}")

# On the axis the stream function is recovered by inverting a quadrature.
y = np.linspace(0, 0.1, 6)
print("axis profile phi(0, y):", np.array2string(geo.Y_inverse(y), precision=6))
