"""Bearing performance quantities from a converged iteration state.

* load         W   = int p dx1 (trapezoid over the pressure nodes),
* friction     F   = int [ (1/h1) d_Z u1(x1, 0) - 2 N^2 w2(x1, 0) ] dx1
                     (midpoint rule over the column stations; the velocity
                     columns live in the stretched variable Z = Y/h1, so the
                     physical wall shear d_Y u1 picks up the 1/h1 factor),
* coefficient  c_f = F / W,

plus the ratios against a baseline computed with a smooth surface (M = 0).
The wall derivative uses the three-point one-sided stencil, second order,
so the friction ratios are not polluted by first-order bias.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fem1d import VerticalGrid
from .model import BearingGeometry, ModelParams
from .scheme import HorizontalGrid, SchemeState, SolveResult, StabilityReport


@dataclass(frozen=True)
class BearingReport:
    """Performance summary of one bearing configuration."""

    x1: np.ndarray
    p: np.ndarray
    W: float
    F: float
    c_f: float
    stability: StabilityReport
    converged: bool
    iterations: int
    W_rel: float | None = None
    cf_rel: float | None = None

    @property
    def pressure_profile(self) -> np.ndarray:
        """(x1, p) pairs, one row per pressure node."""
        return np.column_stack([self.x1, self.p])


def compute_load(p: np.ndarray, hgrid: HorizontalGrid) -> float:
    """Load carrying capacity: trapezoid integral of the pressure."""
    p = np.asarray(p, dtype=float)
    if p.shape != (hgrid.n_nodes,):
        raise ValueError("pressure must live on the pressure nodes")
    return float(np.trapezoid(p, dx=hgrid.h))


def wall_shear_rate(u_cols: np.ndarray, vgrid: VerticalGrid) -> np.ndarray:
    """Three-point one-sided d_Z u at Z = 0 for a stack of columns."""
    u = np.asarray(u_cols, dtype=float)
    return (-3.0 * u[..., 0] + 4.0 * u[..., 1] - u[..., 2]) / (2.0 * vgrid.h)


def compute_friction(
    state: SchemeState,
    h1_mid: np.ndarray,
    params: ModelParams,
    hgrid: HorizontalGrid,
    vgrid: VerticalGrid,
) -> float:
    """Friction force along the moving wall (midpoint rule in x1)."""
    du0 = wall_shear_rate(state.u1, vgrid)
    integrand = du0 / np.asarray(h1_mid, dtype=float) - 2.0 * params.N**2 * state.w2[:, 0]
    return float(hgrid.h * np.sum(integrand))


def compute_relative(report: BearingReport, baseline: BearingReport) -> tuple[float, float]:
    """Ratios (W/W0, c_f/c_f0) against a baseline report."""
    if baseline.W == 0.0 or baseline.c_f == 0.0 or not np.isfinite(baseline.c_f):
        raise ValueError("degenerate baseline: W0 or c_f0 vanishes")
    return report.W / baseline.W, report.c_f / baseline.c_f


def make_report(
    result: SolveResult,
    params: ModelParams,
    geometry: BearingGeometry,
    hgrid: HorizontalGrid,
    vgrid: VerticalGrid,
    baseline: BearingReport | None = None,
) -> BearingReport:
    """Assemble the performance report of a finished solve."""
    W = compute_load(result.state.p, hgrid)
    h1_mid = np.asarray(geometry.h1(hgrid.midpoints), dtype=float)
    F = compute_friction(result.state, h1_mid, params, hgrid, vgrid)
    c_f = F / W if W != 0.0 else float("nan")
    report = BearingReport(
        x1=hgrid.nodes.copy(),
        p=result.state.p.copy(),
        W=W,
        F=F,
        c_f=c_f,
        stability=result.stability,
        converged=result.converged,
        iterations=result.iterations,
    )
    if baseline is not None:
        W_rel, cf_rel = compute_relative(report, baseline)
        report = replace(report, W_rel=W_rel, cf_rel=cf_rel)
    return report
