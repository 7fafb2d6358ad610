"""Compactly supported steady flows from localizable Grad-Shafranov systems.

Submodules:

- ``series``, ``profiles``: truncated power series and the analytic profiles a, b
- ``hodograph``: P2, P3, P6, the boundary curve and the axis profile
- ``stream``: the stream function on a grid and its hodograph velocity
- ``euler``: dimensional axisymmetric Euler fields
- ``localization``: pressure cutoffs, the template and multiscale sums
- ``boussinesq``, ``ipm``: the planar constructions
- ``verify``: finite-difference residuals and convergence studies
- ``io``, ``cli``: export formats and the command-line driver
"""

from .euler import DimensionalParams, assemble_velocity
from .hodograph import Geometry
from .profiles import EulerProfiles, euler_profiles, solve_z_zeta
from .series import TruncatedSeries
from .stream import Grid2D, GridField, build_phi

__all__ = [
    "DimensionalParams", "EulerProfiles", "Geometry", "Grid2D", "GridField", "TruncatedSeries",
    "assemble_velocity", "build_phi", "euler_profiles", "solve_z_zeta",
]
__version__ = "0.1.0"
