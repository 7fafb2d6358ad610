"""Stacking rescaled copies of one compact flow along a helix.

Each copy is smaller by a fixed ratio and weaker by that ratio to the power
alpha. The sum is Holder continuous with exponent alpha and no better.

Run: python3 demos/03_multiscale.py
"""

import math

from gsforge import localization as loc

template = loc.Template()
family = loc.helical_placements(20, 1 / 3, bounding_radius=template.bounding_radius)
ms = loc.Multiscale(template, family)
print(f"{len(family)} shells, smallest scale {family[-1].scale:.2e}")

for alpha, p in ((0.0, 2), (1 / 3, math.inf), (0.4, math.inf)):
    est = loc.norm_estimate(family, alpha, p)
    print(f"  alpha={alpha:.3f} p={p}: value={est.value:.4g} converged={est.converged}")

for alpha in (1 / 3, 0.4):
    q = loc.empirical_holder(ms, alpha, n_points=32).per_shell
    print(f"  Holder quotient at alpha={alpha:.3f}, last five shells:", [f"{v:.3g}" for v in q[-5:]])
