"""Fixed-point iteration for the coupled velocity/microrotation film model.

The effective model lives on the unit square (x1, Z): at every horizontal
station the horizontal velocity u1 and the microrotation w2 solve vertical
two-point problems coupled through their Z-derivatives, the film pressure
p obeys a Reynolds equation in x1, and the flux int h1 u1 dZ must be
constant in x1.  One sweep of the iteration is:

1. microrotation columns   : given u1^n, solve for w2^n,
2. unconstrained velocity  : given w2^n, solve for u_tilde^(n+1),
3. Reynolds pressure       : d/dx1(psi_bar h1^3 dp/dx1) = d/dx1 int h1 u_tilde dZ,
4. flux correction         : u1^(n+1) = u_tilde^(n+1) - h1^2 (dp/dx1) psi,

where psi is the vertical potential solving -psi'' + M Z psi' = 1 with
psi'(0) = 0, psi(1) = 0 (computed once per run; it depends only on M).

Discretely, pressure lives on nodes x1_i = i*h_x1 and the columns on the
midpoints x_(i+1/2); diffusive and source fluxes are both evaluated at
midpoints and differenced at nodes, which makes the corrected flux
divergence vanish to solver precision at every interior node.

Boundary terms at Z = 0 follow from integrating the strong Robin
conditions by parts: with test functions xi vanishing at Z = 1,

  w2 problem:  ... = 2 N^2 h1 [ int (d_Z u1) xi dZ + beta (u1(0) - s1) xi(0) ],
  u~ problem:  ... = -2 N^2 h1 int (d_Z w2) xi dZ - (2/alpha) h1 w2(0) xi(0).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fem1d import (
    FemFunction,
    VerticalGrid,
    advection_coefficients,
    apply_derivative_form,
    as_trial_function,
    assemble_advected_laplacian,
    integrate,
    mass_coefficients,
    solve_tridiagonal,
    stiffness_coefficients,
    thomas_factor,
    thomas_solve,
    unit_load_vector,
    vz_norm,
)
from .model import BearingGeometry, ModelParams, check_roughness_coefficient


@dataclass(frozen=True)
class HorizontalGrid:
    """Staggered horizontal layout: pressure nodes x1_i = i*h, i = 0..n1+1,
    and column midpoints x_(i+1/2) = (i+1/2)*h, with h = 1/(n1+1)."""

    n1: int

    def __post_init__(self):
        if self.n1 < 1:
            raise ValueError(f"n1 must be at least 1, got {self.n1}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n1 + 1)

    @property
    def n_nodes(self) -> int:
        return self.n1 + 2

    @property
    def n_midpoints(self) -> int:
        return self.n1 + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_nodes)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_midpoints) + 0.5) * self.h


@dataclass(frozen=True)
class Potential:
    """Vertical potential psi and its average over (0, 1).

    ``psi_bar`` is the exact integral of the discrete interpolant, so the
    flux identity used by the pressure correction holds at the discrete
    level as well.
    """

    psi: FemFunction
    psi_bar: float


@dataclass(frozen=True)
class StabilityReport:
    """Sufficient-condition diagnostic C*(1+beta) <= 1 for the iteration."""

    C: float
    condition_value: float
    satisfied: bool


class StabilityWarning(UserWarning):
    """Raised when the sufficient stability condition fails (the scheme may
    still converge; the condition is not necessary)."""


@dataclass(frozen=True)
class SchemeState:
    """One iterate: velocity/microrotation columns at midpoints, pressure at
    nodes, and the size of the last update in the L2_x1(V_Z) norm."""

    u1: np.ndarray
    w2: np.ndarray
    p: np.ndarray
    iteration: int = 0
    last_update_norm: float = math.inf

    def u1_column(self, i: int, grid: VerticalGrid) -> FemFunction:
        return FemFunction(grid, self.u1[i])

    def w2_column(self, i: int, grid: VerticalGrid) -> FemFunction:
        return FemFunction(grid, self.w2[i])


def solve_potential(M: float, grid: VerticalGrid) -> Potential:
    """Solve -psi'' + M Z psi' = 1, psi'(0) = 0, psi(1) = 0 on the grid."""
    check_roughness_coefficient(M)
    system = assemble_advected_laplacian(M, grid)
    system.rhs[:] = unit_load_vector(grid)
    psi = as_trial_function(solve_tridiagonal(system), grid)
    if np.min(psi.values) < -1e-12 or np.max(np.diff(psi.values)) > 1e-12:
        raise RuntimeError("potential lost positivity/monotonicity; grid too coarse?")
    psi_bar = integrate(psi)
    if psi_bar <= 0.0:
        raise RuntimeError("potential average must be positive")
    return Potential(psi=psi, psi_bar=psi_bar)


def solve_w_column(
    u1_col: FemFunction, h1_val: float, params: ModelParams, grid: VerticalGrid
) -> FemFunction:
    """Microrotation column solve driven by one velocity column.

    Weak form: R_c [int w' xi' + M int Z w' xi] + 4 N^2 h1^2 int w xi
    equals 2 N^2 h1 [int u' xi + beta (u(0) - s1) xi(0)].
    """
    coupling = 2.0 * params.N**2 * h1_val
    reaction = 2.0 * coupling * h1_val / params.R_c
    system = assemble_advected_laplacian(params.M, grid, reaction)
    rhs = coupling * apply_derivative_form(u1_col.values, grid)
    rhs[0] += coupling * params.beta * (u1_col.values[0] - params.s1)
    system.rhs[:] = rhs / params.R_c
    return as_trial_function(solve_tridiagonal(system), grid)


def solve_u_tilde_column(
    w2_col: FemFunction, h1_val: float, params: ModelParams, grid: VerticalGrid
) -> FemFunction:
    """Unconstrained velocity column solve driven by one microrotation column.

    Weak form: int u' xi' + M int Z u' xi
    equals -2 N^2 h1 int w' xi - (2/alpha) h1 w(0) xi(0).
    """
    coupling = 2.0 * params.N**2 * h1_val
    system = assemble_advected_laplacian(params.M, grid)
    rhs = -coupling * apply_derivative_form(w2_col.values, grid)
    rhs[0] -= (2.0 / params.alpha) * h1_val * w2_col.values[0]
    system.rhs[:] = rhs
    return as_trial_function(solve_tridiagonal(system), grid)


def column_fluxes(u_cols: np.ndarray, h1_mid: np.ndarray, vgrid: VerticalGrid) -> np.ndarray:
    """Flux int h1 u dZ at every midpoint (h1 is constant in Z)."""
    u_cols = np.asarray(u_cols, dtype=float)
    return h1_mid * np.trapezoid(u_cols, dx=vgrid.h, axis=-1)


def _reynolds_from_fluxes(
    G: np.ndarray, psi_bar: float, h1_mid: np.ndarray, hgrid: HorizontalGrid
) -> np.ndarray:
    h = hgrid.h
    c = psi_bar * h1_mid**3
    diag = (c[:-1] + c[1:]) / h**2
    sub = np.concatenate([[0.0], -c[1:-1] / h**2])
    sup = np.concatenate([-c[1:-1] / h**2, [0.0]])
    rhs = -np.diff(G) / h
    low, piv = thomas_factor(sub, diag, sup)
    p = np.zeros(hgrid.n_nodes)
    p[1:-1] = thomas_solve(low, piv, sup, rhs)
    return p


def solve_reynolds(
    u_tilde,
    psi_bar: float,
    h1_mid: np.ndarray,
    hgrid: HorizontalGrid,
    vgrid: VerticalGrid,
) -> np.ndarray:
    """Pressure on the nodes from the midpoint columns of u_tilde.

    Solves d/dx1(psi_bar h1^3 dp/dx1) = d/dx1 int h1 u_tilde dZ with
    homogeneous Dirichlet values; fluxes are evaluated at midpoints and
    their divergence at nodes by the centered two-point difference.
    """
    if isinstance(u_tilde, np.ndarray) and u_tilde.ndim == 2:
        cols = u_tilde
    else:
        cols = np.stack([np.asarray(c.values if isinstance(c, FemFunction) else c) for c in u_tilde])
    if cols.shape[0] != hgrid.n_midpoints:
        raise ValueError("one u_tilde column per midpoint is required")
    G = column_fluxes(cols, np.asarray(h1_mid, dtype=float), vgrid)
    return _reynolds_from_fluxes(G, psi_bar, h1_mid, hgrid)


def pressure_gradient_midpoints(p: np.ndarray, hgrid: HorizontalGrid) -> np.ndarray:
    """Centered pressure gradient (p_(i+1) - p_i)/h at every midpoint."""
    return np.diff(np.asarray(p, dtype=float)) / hgrid.h


def correct_velocity(
    u_tilde_col: FemFunction, dp_mid: float, h1_val: float, psi: Potential
) -> FemFunction:
    """Flux correction u1 = u_tilde - h1^2 dp psi of one column."""
    return FemFunction(
        u_tilde_col.grid, u_tilde_col.values - h1_val**2 * dp_mid * psi.psi.values
    )


def update_norm(u_new: np.ndarray, u_old: np.ndarray, hgrid: HorizontalGrid, vgrid: VerticalGrid) -> float:
    """Discrete L2_x1(V_Z) norm of the difference of two column stacks."""
    d = np.diff(u_new - u_old, axis=-1)
    return float(np.sqrt(hgrid.h * np.sum(d * d) / vgrid.h))


def stability_constant_from_values(
    N: float,
    alpha: float,
    beta: float,
    M: float,
    h1_sup: float,
    h1_inf: float,
    psi_norm: float,
    psi_bar: float,
) -> StabilityReport:
    """Stability constant C(alpha, M, h1) and the check C*(1+beta) <= 1."""
    gain = 2.0 * N**2 * (2.0 * N**2 + 2.0 / alpha) / (1.0 - M / 2.0) ** 2
    C = (
        math.sqrt(2.0)
        * gain
        * h1_sup**2
        * (1.0 + math.sqrt(2.0) * (psi_norm / psi_bar) * (h1_sup / h1_inf) ** 3)
    )
    condition_value = C * (1.0 + beta)
    return StabilityReport(C=C, condition_value=condition_value, satisfied=condition_value <= 1.0)


def stability_constant(
    params: ModelParams,
    geometry: BearingGeometry,
    psi: Potential,
    hgrid: HorizontalGrid,
) -> StabilityReport:
    """Evaluate the stability constant with discrete sup/inf of h1 (over the
    pressure nodes and column midpoints) and the discrete norm of psi."""
    pts = np.concatenate([hgrid.nodes, hgrid.midpoints])
    h1 = np.asarray(geometry.h1(pts), dtype=float)
    return stability_constant_from_values(
        params.N,
        params.alpha,
        params.beta,
        params.M,
        float(h1.max()),
        float(h1.min()),
        vz_norm(psi.psi),
        psi.psi_bar,
    )


class _IterationKernel:
    """Factorized column and pressure systems for one solver setup.

    All matrices are iteration-independent, so they are factorized once:
    the u~ operator is shared by every column, the w operator differs per
    column only through the reaction coefficient 4 N^2 h1^2 / R_c, and the
    Reynolds matrix depends on psi_bar and h1^3 alone.  Each sweep then
    costs two batched substitution passes plus one small pressure solve.
    """

    def __init__(
        self,
        params: ModelParams,
        geometry: BearingGeometry,
        hgrid: HorizontalGrid,
        vgrid: VerticalGrid,
        psi: Potential,
    ):
        self.params = params
        self.hgrid = hgrid
        self.vgrid = vgrid
        self.psi = psi
        self.h1_mid = np.asarray(geometry.h1(hgrid.midpoints), dtype=float)
        self.coupling = 2.0 * params.N**2 * self.h1_mid

        ksub, kdiag, ksup = stiffness_coefficients(vgrid)
        bsub, bdiag, bsup = advection_coefficients(vgrid)
        msub, mdiag, msup = mass_coefficients(vgrid)
        asub = ksub + params.M * bsub
        adiag = kdiag + params.M * bdiag
        asup = ksup + params.M * bsup

        self._ut_sup = asup
        self._ut_factors = thomas_factor(asub, adiag, asup)

        react = (2.0 * self.coupling * self.h1_mid / params.R_c)[:, None]
        self._w_sup = asup[None, :] + react * msup[None, :]
        self._w_factors = thomas_factor(
            asub[None, :] + react * msub[None, :],
            adiag[None, :] + react * mdiag[None, :],
            self._w_sup,
        )

        c = psi.psi_bar * self.h1_mid**3
        h = hgrid.h
        rsub = np.concatenate([[0.0], -c[1:-1] / h**2])
        rsup = np.concatenate([-c[1:-1] / h**2, [0.0]])
        rdiag = (c[:-1] + c[1:]) / h**2
        self._rey_sup = rsup
        self._rey_factors = thomas_factor(rsub, rdiag, rsup)

    def initial_state(self, init) -> SchemeState:
        n_mid, n_nodes = self.hgrid.n_midpoints, self.vgrid.n_nodes
        if isinstance(init, str):
            if init == "zero":
                u1 = np.zeros((n_mid, n_nodes))
            elif init == "couette":
                # wall-driven profile s1*(1 - Z): lies in the trial space and
                # seeds the first microrotation solve with the wall data
                u1 = np.broadcast_to(
                    self.params.s1 * (1.0 - self.vgrid.nodes), (n_mid, n_nodes)
                ).copy()
            else:
                raise ValueError(f"unknown initializer {init!r}")
        else:
            u1 = np.array(init, dtype=float)
            if u1.shape != (n_mid, n_nodes):
                raise ValueError(f"initial u1 must have shape {(n_mid, n_nodes)}")
            if np.any(u1[:, -1] != 0.0):
                raise ValueError("initial columns must vanish at Z = 1")
        return SchemeState(
            u1=u1,
            w2=np.zeros((n_mid, n_nodes)),
            p=np.zeros(self.hgrid.n_nodes),
            iteration=0,
        )

    def step(self, u1: np.ndarray):
        """One sweep; returns (u1, w2, p, max |flux divergence|)."""
        params, vgrid, hgrid = self.params, self.vgrid, self.hgrid
        pad = ((0, 0), (0, 1))

        rhs_w = self.coupling[:, None] * apply_derivative_form(u1, vgrid)
        rhs_w[:, 0] += self.coupling * params.beta * (u1[:, 0] - params.s1)
        rhs_w /= params.R_c
        w2 = np.pad(thomas_solve(*self._w_factors, self._w_sup, rhs_w), pad)

        rhs_u = -self.coupling[:, None] * apply_derivative_form(w2, vgrid)
        rhs_u[:, 0] -= (2.0 / params.alpha) * self.h1_mid * w2[:, 0]
        u_tilde = np.pad(thomas_solve(*self._ut_factors, self._ut_sup, rhs_u), pad)

        G = column_fluxes(u_tilde, self.h1_mid, vgrid)
        p = np.zeros(hgrid.n_nodes)
        p[1:-1] = thomas_solve(
            *self._rey_factors, self._rey_sup, -np.diff(G) / hgrid.h
        )

        dp = np.diff(p) / hgrid.h
        u1_new = u_tilde - (self.h1_mid**2 * dp)[:, None] * self.psi.psi.values[None, :]

        flux = column_fluxes(u1_new, self.h1_mid, vgrid)
        flux_div_max = float(np.max(np.abs(np.diff(flux) / hgrid.h)))
        return u1_new, w2, p, flux_div_max


def iterate(
    state: SchemeState,
    params: ModelParams,
    geometry: BearingGeometry,
    hgrid: HorizontalGrid,
    vgrid: VerticalGrid,
    psi: Potential,
) -> SchemeState:
    """One full sweep of the iteration applied to ``state``."""
    kernel = _IterationKernel(params, geometry, hgrid, vgrid, psi)
    u1, w2, p, _ = kernel.step(state.u1)
    return SchemeState(
        u1=u1,
        w2=w2,
        p=p,
        iteration=state.iteration + 1,
        last_update_norm=update_norm(u1, state.u1, hgrid, vgrid),
    )


@dataclass(frozen=True)
class SolveResult:
    """Converged (or truncated) iteration together with its trace.

    ``update_norms[n]``, ``u_norms[n]`` and ``flux_div_max[n]`` describe the
    state after sweep n+1; ``bound_rhs[n]`` is the a-priori bound
    C[(1+beta) ||u^n|| + beta |s1|] that ``u_norms[n]`` is measured against.
    """

    state: SchemeState
    psi: Potential
    stability: StabilityReport
    update_norms: np.ndarray
    u_norms: np.ndarray
    bound_rhs: np.ndarray
    flux_div_max: np.ndarray
    converged: bool
    iterations: int


def solve(
    params: ModelParams,
    geometry: BearingGeometry,
    hgrid: HorizontalGrid,
    vgrid: VerticalGrid,
    init="couette",
    tol: float = 1e-8,
    max_iter: int = 500,
) -> SolveResult:
    """Iterate until the relative update norm drops below ``tol``.

    Stops when ||u^(n+1) - u^n|| <= tol * (1 + ||u^n||) in the discrete
    L2_x1(V_Z) norm, or after ``max_iter`` sweeps (reported through
    ``converged``, never raised).  A failed sufficient stability condition
    emits a :class:`StabilityWarning` but does not stop the solver.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")

    psi = solve_potential(params.M, vgrid)
    stability = stability_constant(params, geometry, psi, hgrid)
    if not stability.satisfied:
        warnings.warn(
            f"sufficient stability condition failed: C={stability.C:.6g}, "
            f"C(1+beta)={stability.condition_value:.6g} > 1; iterating anyway",
            StabilityWarning,
            stacklevel=2,
        )

    kernel = _IterationKernel(params, geometry, hgrid, vgrid, psi)
    state = kernel.initial_state(init)

    def col_norm(u):
        d = np.diff(u, axis=-1)
        return float(np.sqrt(hgrid.h * np.sum(d * d) / vgrid.h))

    updates, u_norms, bounds, flux_divs = [], [], [], []
    converged = False
    u_norm_prev = col_norm(state.u1)
    for _ in range(max_iter):
        u1, w2, p, flux_div = kernel.step(state.u1)
        delta = update_norm(u1, state.u1, hgrid, vgrid)
        state = SchemeState(
            u1=u1, w2=w2, p=p,
            iteration=state.iteration + 1,
            last_update_norm=delta,
        )
        updates.append(delta)
        u_norms.append(col_norm(u1))
        bounds.append(
            stability.C
            * ((1.0 + params.beta) * u_norm_prev + params.beta * abs(params.s1))
        )
        flux_divs.append(flux_div)
        if delta <= tol * (1.0 + u_norm_prev):
            converged = True
            break
        u_norm_prev = u_norms[-1]

    return SolveResult(
        state=state,
        psi=psi,
        stability=stability,
        update_norms=np.asarray(updates),
        u_norms=np.asarray(u_norms),
        bound_rhs=np.asarray(bounds),
        flux_div_max=np.asarray(flux_divs),
        converged=converged,
        iterations=state.iteration,
    )
