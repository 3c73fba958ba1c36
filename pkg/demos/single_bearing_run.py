"""One complete slider-bearing solve, start to finish.

The bearing: gap h1(x1) = 1 - 0.5 x1, lower wall moving with s1 = 1,
lubricant parameters N = 0.1, R_c = 0.01 expressed via the boundary
viscosity pair (nu_b_bar, delta) = (0.1, 0.01), roughness M = 0.5.

The script shows what the iteration does: the update norms contract
geometrically, the constant-flux constraint is satisfied to solver
precision at every sweep, and the converged state yields the pressure
profile, the load W, the friction force F and the friction coefficient
c_f = F/W.  The sufficient stability bound C (1 + beta) <= 1 fails at
these parameters, which illustrates that it is sufficient only: the
observed contraction factor is about 0.37.

Run:  python3 demos/single_bearing_run.py
"""

import warnings

import numpy as np

from microlub import (
    BearingGeometry,
    HorizontalGrid,
    ModelParams,
    StabilityWarning,
    VerticalGrid,
    make_report,
    solve,
)

warnings.simplefilter("ignore", StabilityWarning)

params = ModelParams.from_boundary_viscosity(
    N=0.1, R_c=0.01, nu_b_bar=0.1, delta=0.01, s1=1.0, M=0.5
)
geometry = BearingGeometry(slope_m=-0.5)
hgrid, vgrid = HorizontalGrid(200), VerticalGrid(400)

print(f"wall coefficients: alpha = {params.alpha:.6g}, beta = {params.beta:.6g}")
result = solve(params, geometry, hgrid, vgrid, tol=1e-10)

stab = result.stability
print(f"stability constant C = {stab.C:.6g}, C(1+beta) = {stab.condition_value:.6g} "
      f"(sufficient condition satisfied: {stab.satisfied})")
print(f"converged = {result.converged} after {result.iterations} sweeps\n")

print(f"{'sweep':>5} {'update norm':>13} {'contraction':>12} {'flux residual':>14}")
for i, (du, fd) in enumerate(zip(result.update_norms, result.flux_div_max)):
    ratio = "" if i == 0 else f"{du / result.update_norms[i - 1]:12.4f}"
    print(f"{i + 1:>5} {du:>13.4e} {ratio:>12} {fd:>14.2e}")

report = make_report(result, params, geometry, hgrid, vgrid)
peak = np.argmax(report.p)
print(f"\npressure peak {report.p[peak]:.6f} at x1 = {report.x1[peak]:.4f}")
print(f"load capacity      W  = {report.W:.8f}")
print(f"friction force     F  = {report.F:.8f}")
print(f"friction number    cf = {report.c_f:.6f}")

wall = result.state.u1[:, 0]
print(f"\nwall slip: velocity at Z=0 ranges {wall.min():.4f} .. {wall.max():.4f} "
      f"(wall speed s1 = {params.s1:g})")
