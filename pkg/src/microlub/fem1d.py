"""Piecewise-linear finite elements on the vertical segment [0, 1].

The trial space is the set of continuous piecewise-affine functions on the
uniform grid Z_k = k*h_Z, h_Z = 1/(nZ+1), that vanish at Z = 1.  Unknowns
live at nodes k = 0..nZ; node nZ+1 carries the homogeneous Dirichlet value.

The assembled bilinear form is

    a(u, v) = int u'v' dZ + M * int Z u'v dZ + reaction * int u v dZ,

with every element integral evaluated in closed form (each integrand is a
polynomial of degree <= 2 on each element), so no quadrature error enters
the stability checks.  The Z = 0 end is natural: Neumann/Robin data appear
only through the right-hand side entry of the wall node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import check_roughness_coefficient

_PIVOT_RTOL = 1e-14


@dataclass(frozen=True)
class VerticalGrid:
    """Uniform vertical grid with nodes Z_k = k*h_Z, k = 0..nZ+1."""

    nZ: int

    def __post_init__(self):
        if self.nZ < 1:
            raise ValueError(f"nZ must be at least 1, got {self.nZ}")

    @property
    def h(self) -> float:
        return 1.0 / (self.nZ + 1)

    @property
    def n_nodes(self) -> int:
        return self.nZ + 2

    @property
    def n_unknowns(self) -> int:
        # nodes 0..nZ; the node at Z = 1 is eliminated by the Dirichlet condition
        return self.nZ + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_nodes)


@dataclass(frozen=True)
class FemFunction:
    """Nodal values of a continuous piecewise-affine function on a grid."""

    grid: VerticalGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_nodes,):
            raise ValueError(
                f"expected {self.grid.n_nodes} nodal values, got shape {values.shape}"
            )
        object.__setattr__(self, "values", values)

    @property
    def in_trial_space(self) -> bool:
        """True when the function vanishes at Z = 1 exactly."""
        return self.values[-1] == 0.0

    @property
    def wall_value(self) -> float:
        return float(self.values[0])


@dataclass
class TridiagonalSystem:
    """Tridiagonal matrix (sub/diag/sup) and right-hand side.

    ``sub[0]`` and ``sup[-1]`` are ignored.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray = field(default=None)

    def __post_init__(self):
        self.sub = np.asarray(self.sub, dtype=float)
        self.diag = np.asarray(self.diag, dtype=float)
        self.sup = np.asarray(self.sup, dtype=float)
        n = self.diag.shape[-1]
        if self.sub.shape[-1] != n or self.sup.shape[-1] != n:
            raise ValueError("sub/diag/sup must have equal length")
        if self.rhs is None:
            self.rhs = np.zeros(n)
        else:
            self.rhs = np.asarray(self.rhs, dtype=float)
            if self.rhs.shape[-1] != n:
                raise ValueError("rhs length does not match the matrix")

    @property
    def n(self) -> int:
        return self.diag.shape[-1]


def stiffness_coefficients(grid: VerticalGrid):
    """Diagonals of int u'v' dZ on the trial space."""
    n, h = grid.n_unknowns, grid.h
    diag = np.full(n, 2.0 / h)
    diag[0] = 1.0 / h
    sub = np.full(n, -1.0 / h)
    sup = np.full(n, -1.0 / h)
    sub[0] = sup[-1] = 0.0
    return sub, diag, sup


def mass_coefficients(grid: VerticalGrid):
    """Diagonals of int u v dZ on the trial space."""
    n, h = grid.n_unknowns, grid.h
    diag = np.full(n, 2.0 * h / 3.0)
    diag[0] = h / 3.0
    sub = np.full(n, h / 6.0)
    sup = np.full(n, h / 6.0)
    sub[0] = sup[-1] = 0.0
    return sub, diag, sup


def advection_coefficients(grid: VerticalGrid):
    """Diagonals of int Z u'(Z) v(Z) dZ on the trial space (exact integrals).

    The symmetric part of this matrix equals minus one half of the mass
    matrix, the discrete image of int Z (u v)' dZ = -int u v dZ for
    functions vanishing at Z = 1.
    """
    n, h = grid.n_unknowns, grid.h
    Z = grid.nodes[:n]
    diag = np.full(n, -h / 3.0)
    diag[0] = -h / 6.0
    sup = Z / 2.0 + h / 6.0          # couples test k to trial k+1, element k
    sub = -(Z / 2.0 + h / 3.0)       # row k uses sub[k] = -(Z_{k-1}/2 + h/3)
    sub = np.roll(sub, 1)
    sub[0] = 0.0
    sup[-1] = 0.0
    return sub, diag, sup


def assemble_advected_laplacian(
    M: float, grid: VerticalGrid, reaction: float = 0.0
) -> TridiagonalSystem:
    """Assemble a(u, v) = int u'v' + M int Z u'v + reaction int u v.

    The right-hand side is initialized to zero; callers fill it with their
    load and natural boundary contributions.
    """
    M = check_roughness_coefficient(M)
    if reaction < 0.0:
        raise ValueError(f"reaction coefficient must be nonnegative, got {reaction}")
    ksub, kdiag, ksup = stiffness_coefficients(grid)
    bsub, bdiag, bsup = advection_coefficients(grid)
    msub, mdiag, msup = mass_coefficients(grid)
    return TridiagonalSystem(
        sub=ksub + M * bsub + reaction * msub,
        diag=kdiag + M * bdiag + reaction * mdiag,
        sup=ksup + M * bsup + reaction * msup,
    )


def unit_load_vector(grid: VerticalGrid) -> np.ndarray:
    """Load vector int phi_k dZ for the constant source f = 1."""
    load = np.full(grid.n_unknowns, grid.h)
    load[0] = grid.h / 2.0
    return load


def apply_derivative_form(values: np.ndarray, grid: VerticalGrid) -> np.ndarray:
    """Vector L_k = int v'(Z) phi_k(Z) dZ for nodal values of v.

    ``values`` must include all nZ+2 nodes; the result has one entry per
    trial-space node.  Supports stacked inputs with the node axis last.
    """
    v = np.asarray(values, dtype=float)
    if v.shape[-1] != grid.n_nodes:
        raise ValueError("values must cover all grid nodes")
    out = np.empty(v.shape[:-1] + (grid.n_unknowns,))
    out[..., 0] = 0.5 * (v[..., 1] - v[..., 0])
    out[..., 1:] = 0.5 * (v[..., 2:] - v[..., :-2])
    return out


def thomas_factor(sub, diag, sup):
    """LU factorization of a tridiagonal matrix without pivoting.

    Accepts stacked systems (node axis last).  The assembled forms are
    strongly diagonally dominant for M < 2, so plain elimination is stable;
    a vanishing pivot is reported rather than silently propagated.

    Returns
    -------
    (low, piv) : pair of ndarray
        Elimination multipliers and pivots, for :func:`thomas_solve`.
    """
    sub, diag, sup = np.broadcast_arrays(
        np.asarray(sub, dtype=float),
        np.asarray(diag, dtype=float),
        np.asarray(sup, dtype=float),
    )
    n = diag.shape[-1]
    low = np.zeros(diag.shape)
    piv = np.empty(diag.shape)
    piv[..., 0] = diag[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(1, n):
            low[..., k] = sub[..., k] / piv[..., k - 1]
            piv[..., k] = diag[..., k] - low[..., k] * sup[..., k - 1]
    scale = np.max(np.abs(diag))
    if not np.all(np.isfinite(piv)) or np.min(np.abs(piv)) <= _PIVOT_RTOL * scale:
        raise ValueError("singular or ill-conditioned tridiagonal system")
    return low, piv


def thomas_solve(low, piv, sup, rhs):
    """Back/forward substitution for a factorization from :func:`thomas_factor`.

    Broadcasts over stacked systems and stacked right-hand sides.
    """
    sup = np.asarray(sup, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    shape = np.broadcast_shapes(piv.shape, rhs.shape)
    n = shape[-1]
    y = np.empty(shape)
    y[...] = rhs
    for k in range(1, n):
        y[..., k] -= low[..., k] * y[..., k - 1]
    x = np.empty(shape)
    x[..., n - 1] = y[..., n - 1] / piv[..., n - 1]
    for k in range(n - 2, -1, -1):
        x[..., k] = (y[..., k] - sup[..., k] * x[..., k + 1]) / piv[..., k]
    return x


def solve_tridiagonal(system: TridiagonalSystem) -> np.ndarray:
    """Solve one tridiagonal system by elimination (Thomas algorithm)."""
    low, piv = thomas_factor(system.sub, system.diag, system.sup)
    return thomas_solve(low, piv, system.sup, system.rhs)


def as_trial_function(solution: np.ndarray, grid: VerticalGrid) -> FemFunction:
    """Extend a trial-space solution vector by the zero value at Z = 1."""
    solution = np.asarray(solution, dtype=float)
    if solution.shape != (grid.n_unknowns,):
        raise ValueError("solution length does not match the trial space")
    return FemFunction(grid, np.append(solution, 0.0))


def _nodal_values(f, grid):
    if isinstance(f, FemFunction):
        return f.values, f.grid
    if grid is None:
        raise ValueError("grid is required when passing raw nodal values")
    v = np.asarray(f, dtype=float)
    if v.shape[-1] != grid.n_nodes:
        raise ValueError("values must cover all grid nodes")
    return v, grid


def integrate(f, grid: VerticalGrid | None = None) -> float:
    """Exact integral of the piecewise-affine interpolant (trapezoid rule)."""
    v, grid = _nodal_values(f, grid)
    return float(np.trapezoid(v, dx=grid.h))


def vz_norm(f, grid: VerticalGrid | None = None) -> float:
    """Trial-space norm (int (v')^2 dZ)^(1/2) of the interpolant."""
    v, grid = _nodal_values(f, grid)
    d = np.diff(v, axis=-1)
    return float(np.sqrt(np.sum(d * d) / grid.h))


def l2_norm(f, grid: VerticalGrid | None = None) -> float:
    """Exact L2 norm of the piecewise-affine interpolant."""
    v, grid = _nodal_values(f, grid)
    a, b = v[..., :-1], v[..., 1:]
    return float(np.sqrt(grid.h / 3.0 * np.sum(a * a + a * b + b * b)))
