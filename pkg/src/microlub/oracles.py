"""Independent brute-force references used by the test suite and `verify`.

Nothing here shares numerics with the production path: dense systems go
through LAPACK's partial-pivoting elimination, element integrals are
redone by Gauss quadrature, the vertical potential is integrated as an ODE
with classical fourth-order stepping, and the roughness-free reference
solves the coupled column problems directly (no fixed-point iteration) by
finite differences in the physical vertical variable Y in (0, h1(x1)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.linalg import solve_banded

from .fem1d import TridiagonalSystem, VerticalGrid
from .model import BearingGeometry, ModelParams
from .scheme import HorizontalGrid

_RESIDUAL_RTOL = 1e-12


@dataclass
class DenseSystem:
    """Full matrix and right-hand side mirroring a tridiagonal system."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or self.rhs.shape != (n,):
            raise ValueError("matrix must be square and match the rhs length")

    @classmethod
    def from_tridiagonal(cls, system: TridiagonalSystem) -> "DenseSystem":
        n = system.n
        matrix = np.diag(system.diag)
        matrix += np.diag(system.sub[1:], k=-1)
        matrix += np.diag(system.sup[:-1], k=1)
        return cls(matrix=matrix, rhs=system.rhs.copy())


def dense_solve(system: DenseSystem) -> np.ndarray:
    """Gaussian elimination with partial pivoting, with a residual guard."""
    try:
        x = np.linalg.solve(system.matrix, system.rhs)
    except np.linalg.LinAlgError as err:
        raise ValueError(f"singular dense system: {err}") from err
    residual = np.max(np.abs(system.matrix @ x - system.rhs))
    scale = max(
        np.max(np.abs(system.rhs), initial=0.0),
        np.max(np.abs(system.matrix)) * np.max(np.abs(x), initial=0.0),
    )
    if residual > _RESIDUAL_RTOL * max(scale, 1e-300):
        raise RuntimeError(
            f"dense solve residual {residual:.3e} exceeds {_RESIDUAL_RTOL:.1e} relative"
        )
    return x


def _hat(k: int, z: np.ndarray, grid: VerticalGrid) -> np.ndarray:
    h = grid.h
    return np.maximum(0.0, 1.0 - np.abs(z - k * h) / h)


def _hat_deriv(k: int, z: np.ndarray, grid: VerticalGrid) -> np.ndarray:
    h = grid.h
    inside = (z > (k - 1) * h) & (z < (k + 1) * h)
    return np.where(inside, np.where(z < k * h, 1.0 / h, -1.0 / h), 0.0)


def _gauss_points(grid: VerticalGrid, n_gauss: int):
    """Gauss-Legendre points/weights on every element, flattened."""
    xg, wg = np.polynomial.legendre.leggauss(n_gauss)
    h = grid.h
    left = grid.nodes[:-1]
    z = (left[:, None] + 0.5 * h * (xg[None, :] + 1.0)).ravel()
    w = np.broadcast_to(0.5 * h * wg, (left.size, n_gauss)).ravel()
    return z, w


def dense_assemble_advected_laplacian(
    M: float, grid: VerticalGrid, reaction: float = 0.0, n_gauss: int = 8
) -> np.ndarray:
    """Quadrature-based dense assembly of the vertical bilinear form.

    Row k / column j hold a(phi_j, phi_k) for trial-space hat functions;
    element integrals use Gauss-Legendre quadrature instead of the closed
    forms of the production assembly.
    """
    z, w = _gauss_points(grid, n_gauss)
    n = grid.n_unknowns
    matrix = np.zeros((n, n))
    vals = [_hat(k, z, grid) for k in range(n)]
    ders = [_hat_deriv(k, z, grid) for k in range(n)]
    for k in range(n):
        for j in range(max(0, k - 1), min(n, k + 2)):
            integrand = ders[j] * ders[k] + M * z * ders[j] * vals[k]
            integrand = integrand + reaction * vals[j] * vals[k]
            matrix[k, j] = np.sum(w * integrand)
    return matrix


def dense_load_vector(f, grid: VerticalGrid, n_gauss: int = 8) -> np.ndarray:
    """Quadrature-based load vector int f(Z) phi_k dZ."""
    z, w = _gauss_points(grid, n_gauss)
    fz = np.asarray(f(z), dtype=float)
    return np.array(
        [np.sum(w * fz * _hat(k, z, grid)) for k in range(grid.n_unknowns)]
    )


@dataclass(frozen=True)
class PsiOracle:
    """High-accuracy potential profile on a fine uniform grid."""

    z: np.ndarray
    psi: np.ndarray
    psi_bar: float


def psi_ode_oracle(M: float, steps: int = 20000) -> PsiOracle:
    """Integrate the potential problem as a first-order ODE.

    With phi = psi', the problem -psi'' + M Z psi' = 1, psi'(0) = 0,
    psi(1) = 0 becomes phi' = M Z phi - 1 with phi(0) = 0.  The state
    (phi, s, q) with s' = phi and q' = s is advanced by classical RK4, so
    psi(Z) = s(Z) - s(1) and psi_bar = q(1) - s(1) come out of the same
    pass with no separate quadrature.
    """
    if not 0.0 <= M < 2.0:
        raise ValueError(f"M must lie in [0, 2), got {M}")
    if steps < 10**4:
        raise ValueError(f"steps must be at least 1e4, got {steps}")
    h = 1.0 / steps
    s_path = np.empty(steps + 1)
    phi, s, q = 0.0, 0.0, 0.0
    s_path[0] = 0.0

    def rate(z, phi, s):
        return M * z * phi - 1.0, phi, s

    for i in range(steps):
        z = i * h
        k1p, k1s, k1q = rate(z, phi, s)
        k2p, k2s, k2q = rate(z + 0.5 * h, phi + 0.5 * h * k1p, s + 0.5 * h * k1s)
        k3p, k3s, k3q = rate(z + 0.5 * h, phi + 0.5 * h * k2p, s + 0.5 * h * k2s)
        k4p, k4s, k4q = rate(z + h, phi + h * k3p, s + h * k3s)
        phi += h * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        s += h * (k1s + 2.0 * k2s + 2.0 * k3s + k4s) / 6.0
        q += h * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
        s_path[i + 1] = s

    z_grid = np.linspace(0.0, 1.0, steps + 1)
    psi = s_path - s_path[-1]
    return PsiOracle(z=z_grid, psi=psi, psi_bar=q - s_path[-1])


@dataclass(frozen=True)
class M0Reference:
    """Direct (iteration-free) reference solution for the smooth bearing."""

    x: np.ndarray
    p: np.ndarray
    x_fine: np.ndarray
    p_fine: np.ndarray
    W: float
    F: float
    c_f: float
    wall_shear: np.ndarray
    wall_w2: np.ndarray
    flux: float


def _m0_column(params: ModelParams, h1: float, n_y: int):
    """Solve the coupled column pair (zero-gradient and unit-gradient).

    Finite differences on Y_j = j*dY in (0, h1), second order in the
    interior and at the one-sided boundary rows; both right-hand sides
    share the factorization.  Unknowns interleave as (u_0, w_0, u_1, ...).
    """
    N2 = params.N**2
    Rc = params.R_c
    dY = h1 / (n_y + 1)
    n_unk = n_y + 1
    size = 2 * n_unk
    ab = np.zeros((9, size))

    def put(rows, cols, vals):
        ab[4 + rows - cols, cols] = vals

    j = np.arange(1, n_y + 1)
    ju = 2 * j
    jw = 2 * j + 1
    inner = j < n_y  # couplings to node j+1 exist only below the top wall

    put(ju, ju, 2.0 / dY**2)
    put(ju, ju - 2, -1.0 / dY**2)
    put(ju[inner], ju[inner] + 2, -1.0 / dY**2)
    put(ju, jw - 2, -N2 / dY)
    put(ju[inner], jw[inner] + 2, N2 / dY)

    put(jw, jw, 2.0 * Rc / dY**2 + 4.0 * N2)
    put(jw, jw - 2, -Rc / dY**2)
    put(jw[inner], jw[inner] + 2, -Rc / dY**2)
    put(jw, ju - 2, N2 / dY)
    put(jw[inner], ju[inner] + 2, -N2 / dY)

    # wall rows: d_Y u(0) = (2/alpha) w(0); R_c d_Y w(0) = -2 N^2 beta (u(0) - s1)
    half = 1.0 / (2.0 * dY)
    put(np.array([0, 0, 0, 0]), np.array([0, 2, 4, 1]),
        np.array([-3.0 * half, 4.0 * half, -half, -2.0 / params.alpha]))
    put(np.array([1, 1, 1, 1]), np.array([1, 3, 5, 0]),
        np.array([-3.0 * Rc * half, 4.0 * Rc * half, -Rc * half, 2.0 * N2 * params.beta]))

    rhs = np.zeros((size, 2))
    rhs[1, 0] = 2.0 * N2 * params.beta * params.s1  # wall source, zero-gradient problem
    rhs[ju, 1] = -1.0                               # unit pressure gradient problem

    sol = solve_banded((4, 4), ab, rhs)
    u = np.vstack([sol[0::2, :], np.zeros((1, 2))])  # append the top-wall zero
    w = np.vstack([sol[1::2, :], np.zeros((1, 2))])
    return u, w, dY


def m0_reference(
    params: ModelParams,
    geometry: BearingGeometry,
    hgrid: HorizontalGrid,
    n_y: int = 4001,
    refine: int = 8,
) -> M0Reference:
    """Reference pressure and wall traces for the roughness-free bearing.

    For M = 0 the column problems are solved directly: the solution is
    affine in the local pressure gradient, u = u_a + (dp/dx1) u_b, so the
    constant-flux constraint fixes dp/dx1 pointwise once the total flux Q
    is matched to the zero pressure drop over [0, 1].  Everything is
    evaluated on a fine horizontal grid that contains the scheme's
    pressure nodes, with composite Simpson quadrature throughout.
    """
    if params.M != 0.0:
        raise ValueError("the direct reference requires M = 0")
    if refine < 2 or refine % 2:
        raise ValueError("refine must be an even integer >= 2")
    if n_y % 2 == 0:
        n_y += 1  # odd interior count gives an odd Simpson sample count

    x_fine = np.linspace(0.0, 1.0, hgrid.n_midpoints * refine + 1)
    n_x = x_fine.size
    A = np.empty(n_x)
    B = np.empty(n_x)
    shear_a = np.empty(n_x)
    shear_b = np.empty(n_x)
    w0_a = np.empty(n_x)
    w0_b = np.empty(n_x)

    for i, x in enumerate(x_fine):
        h1 = float(geometry.h1(x))
        u, w, dY = _m0_column(params, h1, n_y)
        A[i], B[i] = simpson(u, dx=dY, axis=0)
        shear_a[i], shear_b[i] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dY)
        w0_a[i], w0_b[i] = w[0]

    Q = simpson(A / B, x=x_fine) / simpson(1.0 / B, x=x_fine)
    dp = (Q - A) / B
    p_fine = cumulative_simpson(dp, x=x_fine, initial=0.0)
    p_fine -= x_fine * p_fine[-1]  # pin the far-end Dirichlet value exactly

    wall_shear = shear_a + dp * shear_b
    wall_w2 = w0_a + dp * w0_b
    W = float(simpson(p_fine, x=x_fine))
    F = float(simpson(wall_shear - 2.0 * params.N**2 * wall_w2, x=x_fine))

    return M0Reference(
        x=hgrid.nodes,
        p=p_fine[::refine].copy(),
        x_fine=x_fine,
        p_fine=p_fine,
        W=W,
        F=F,
        c_f=F / W,
        wall_shear=wall_shear,
        wall_w2=wall_w2,
        flux=float(Q),
    )
