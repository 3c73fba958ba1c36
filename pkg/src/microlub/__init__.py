"""Micropolar thin-film lubrication of a slider bearing with a rough wall.

The package solves the effective (lubrication-limit) equations of a
micropolar film between a moving plane wall and a rough inclined surface:
vertical column problems for velocity and microrotation coupled to a
Reynolds equation for the pressure, iterated to a fixed point under a
constant-flux constraint.  Roughness enters through a single coefficient
M computed from the fast-scale surface profile.
"""

from .model import (
    BearingGeometry,
    DerivedParams,
    ModelParams,
    RoughnessProfile,
    compute_roughness_coefficient,
    gap_function,
)
from .fem1d import FemFunction, TridiagonalSystem, VerticalGrid, integrate, vz_norm
from .scheme import (
    HorizontalGrid,
    Potential,
    SchemeState,
    SolveResult,
    StabilityReport,
    StabilityWarning,
    correct_velocity,
    iterate,
    solve,
    solve_potential,
    solve_reynolds,
    solve_u_tilde_column,
    solve_w_column,
    stability_constant,
)
from .metrics import (
    BearingReport,
    compute_friction,
    compute_load,
    compute_relative,
    make_report,
)

__all__ = [
    "BearingGeometry",
    "BearingReport",
    "DerivedParams",
    "FemFunction",
    "HorizontalGrid",
    "ModelParams",
    "Potential",
    "RoughnessProfile",
    "SchemeState",
    "SolveResult",
    "StabilityReport",
    "StabilityWarning",
    "TridiagonalSystem",
    "VerticalGrid",
    "compute_friction",
    "compute_load",
    "compute_relative",
    "compute_roughness_coefficient",
    "correct_velocity",
    "gap_function",
    "integrate",
    "iterate",
    "make_report",
    "solve",
    "solve_potential",
    "solve_reynolds",
    "solve_u_tilde_column",
    "solve_w_column",
    "stability_constant",
    "vz_norm",
]

__version__ = "0.1.0"
