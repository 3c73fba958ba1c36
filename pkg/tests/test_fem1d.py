import numpy as np
import pytest

from microlub.fem1d import (
    FemFunction,
    TridiagonalSystem,
    VerticalGrid,
    advection_coefficients,
    apply_derivative_form,
    as_trial_function,
    assemble_advected_laplacian,
    integrate,
    l2_norm,
    mass_coefficients,
    solve_tridiagonal,
    thomas_factor,
    thomas_solve,
    unit_load_vector,
    vz_norm,
)
from microlub.oracles import (
    DenseSystem,
    dense_assemble_advected_laplacian,
    dense_load_vector,
    dense_solve,
)


def dense_from_tri(system: TridiagonalSystem) -> np.ndarray:
    return DenseSystem.from_tridiagonal(system).matrix


def random_trial_function(rng, grid: VerticalGrid) -> FemFunction:
    return as_trial_function(rng.normal(size=grid.n_unknowns), grid)


class TestGrid:
    def test_layout(self):
        grid = VerticalGrid(4)
        assert grid.h == pytest.approx(0.2)
        assert grid.nodes[0] == 0.0 and grid.nodes[-1] == 1.0
        assert grid.n_unknowns == 5 and grid.n_nodes == 6

    def test_invalid(self):
        with pytest.raises(ValueError):
            VerticalGrid(0)


class TestAssembly:
    def test_smallest_grid_is_textbook_stiffness(self):
        # nZ = 1, h = 1/2: Neumann-at-0 / eliminated-Dirichlet-at-1 pattern
        system = assemble_advected_laplacian(0.0, VerticalGrid(1))
        expected = np.array([[2.0, -2.0], [-2.0, 4.0]])
        np.testing.assert_allclose(dense_from_tri(system), expected, atol=1e-14)

    @pytest.mark.parametrize("M", [0.0, 0.5, 1.0, 1.3])
    @pytest.mark.parametrize("reaction", [0.0, 2.7])
    def test_matches_dense_quadrature_assembly(self, M, reaction):
        grid = VerticalGrid(23)
        system = assemble_advected_laplacian(M, grid, reaction)
        dense = dense_assemble_advected_laplacian(M, grid, reaction)
        scale = np.max(np.abs(dense))
        np.testing.assert_allclose(dense_from_tri(system), dense, atol=1e-12 * scale)

    def test_advection_symmetric_part_is_minus_half_mass(self):
        # discrete image of int Z (u v)' dZ = -int u v dZ on the trial space
        grid = VerticalGrid(17)
        b = dense_from_tri(
            TridiagonalSystem(*advection_coefficients(grid), np.zeros(grid.n_unknowns))
        )
        m = dense_from_tri(
            TridiagonalSystem(*mass_coefficients(grid), np.zeros(grid.n_unknowns))
        )
        np.testing.assert_allclose(b + b.T, -m, atol=1e-15)

    def test_rejects_bad_coefficients(self):
        grid = VerticalGrid(4)
        with pytest.raises(ValueError):
            assemble_advected_laplacian(2.0, grid)
        with pytest.raises(ValueError):
            assemble_advected_laplacian(0.5, grid, reaction=-1.0)

    def test_coercivity_at_M_1(self, rng):
        # a(phi, phi) >= (1 - M/2) |phi'|^2 with M = 1
        grid = VerticalGrid(40)
        system = assemble_advected_laplacian(1.0, grid)
        a = dense_from_tri(system)
        for _ in range(100):
            phi = rng.normal(size=grid.n_unknowns)
            quad = phi @ a @ phi
            grad2 = vz_norm(np.append(phi, 0.0), grid) ** 2
            assert quad >= 0.5 * grad2 - 1e-12 * grad2

    def test_derivative_form_matches_quadrature(self, rng):
        grid = VerticalGrid(19)
        f = random_trial_function(rng, grid)
        produced = apply_derivative_form(f.values, grid)

        def derivative(z):
            idx = np.minimum((np.asarray(z) / grid.h).astype(int), grid.n_nodes - 2)
            return (f.values[idx + 1] - f.values[idx]) / grid.h

        expected = dense_load_vector(derivative, grid)
        np.testing.assert_allclose(produced, expected, atol=1e-13)


class TestTridiagonalSolve:
    def test_identity(self):
        n = 7
        rhs = np.arange(1.0, n + 1)
        system = TridiagonalSystem(np.zeros(n), np.ones(n), np.zeros(n), rhs)
        np.testing.assert_allclose(solve_tridiagonal(system), rhs, atol=0.0)

    def test_random_systems_match_dense_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 40))
            sub = rng.normal(size=n)
            sup = rng.normal(size=n)
            diag = 2.5 + np.abs(sub) + np.abs(sup) + rng.random(n)
            sub[0] = sup[-1] = 0.0
            system = TridiagonalSystem(sub, diag, sup, rng.normal(size=n))
            x = solve_tridiagonal(system)
            x_ref = dense_solve(DenseSystem.from_tridiagonal(system))
            np.testing.assert_allclose(x, x_ref, atol=1e-12 * max(1.0, np.max(np.abs(x_ref))))

    def test_singular_system_detected(self):
        system = TridiagonalSystem(np.zeros(3), np.zeros(3), np.zeros(3), np.ones(3))
        with pytest.raises(ValueError, match="singular"):
            solve_tridiagonal(system)

    def test_poisson_solve_hits_closed_form(self):
        # -psi'' = 1, psi'(0) = 0, psi(1) = 0: nodal values are exact in 1D
        grid = VerticalGrid(30)
        system = assemble_advected_laplacian(0.0, grid)
        system.rhs[:] = unit_load_vector(grid)
        psi = as_trial_function(solve_tridiagonal(system), grid)
        expected = 0.5 * (1.0 - grid.nodes**2)
        assert np.max(np.abs(psi.values - expected)) <= 5.0 * grid.h**2
        np.testing.assert_allclose(psi.values, expected, atol=1e-12)

    def test_batched_solve_matches_sequential(self, rng):
        grid = VerticalGrid(25)
        n = grid.n_unknowns
        reactions = np.array([0.3, 1.1, 4.2])
        from microlub.fem1d import stiffness_coefficients

        ksub, kdiag, ksup = stiffness_coefficients(grid)
        msub, mdiag, msup = mass_coefficients(grid)
        sub = ksub[None, :] + reactions[:, None] * msub[None, :]
        diag = kdiag[None, :] + reactions[:, None] * mdiag[None, :]
        sup = ksup[None, :] + reactions[:, None] * msup[None, :]
        rhs = rng.normal(size=(3, n))
        low, piv = thomas_factor(sub, diag, sup)
        batched = thomas_solve(low, piv, sup, rhs)
        for i, reaction in enumerate(reactions):
            system = TridiagonalSystem(sub[i], diag[i], sup[i], rhs[i])
            np.testing.assert_allclose(batched[i], solve_tridiagonal(system), atol=1e-15)


class TestManufacturedSolutions:
    def test_second_order_convergence_with_advection(self):
        # u* = cos(pi Z / 2) satisfies u*'(0) = 0, u*(1) = 0
        M = 1.0

        def f(z):
            return (np.pi / 2) ** 2 * np.cos(np.pi * z / 2) - M * z * (
                np.pi / 2
            ) * np.sin(np.pi * z / 2)

        errors = []
        for nZ in (20, 40, 80):
            grid = VerticalGrid(nZ)
            system = assemble_advected_laplacian(M, grid)
            system.rhs[:] = dense_load_vector(f, grid)
            u = as_trial_function(solve_tridiagonal(system), grid)
            errors.append(np.max(np.abs(u.values - np.cos(np.pi * grid.nodes / 2))))
        ratios = np.array(errors[:-1]) / np.array(errors[1:])
        assert np.all(ratios > 3.4) and np.all(ratios < 4.6)

    def test_neumann_datum_quadratic_solution(self):
        # u* = (1 - Z)^2 with u*'(0) = -2 enters through the wall rhs entry
        M = 0.7

        def f(z):
            return -2.0 - 2.0 * M * z * (1.0 - z)

        grid = VerticalGrid(60)
        system = assemble_advected_laplacian(M, grid)
        system.rhs[:] = dense_load_vector(f, grid)
        system.rhs[0] -= -2.0  # a(u, xi) = int f xi - u'(0) xi(0)
        u = as_trial_function(solve_tridiagonal(system), grid)
        np.testing.assert_allclose(u.values, (1.0 - grid.nodes) ** 2, atol=1e-10)


class TestQuadratureHelpers:
    def test_integrate_constant(self):
        grid = VerticalGrid(13)
        assert integrate(np.ones(grid.n_nodes), grid) == pytest.approx(1.0, abs=1e-14)

    def test_integrate_linear_exact(self):
        grid = VerticalGrid(13)
        assert integrate(grid.nodes.copy(), grid) == pytest.approx(0.5, abs=1e-14)

    def test_integrate_parabola(self):
        grid = VerticalGrid(50)
        vals = 0.5 * (1.0 - grid.nodes**2)
        assert abs(integrate(vals, grid) - 1.0 / 3.0) <= grid.h**2

    def test_vz_norm_of_linear(self):
        grid = VerticalGrid(9)
        f = FemFunction(grid, 1.0 - grid.nodes)
        assert vz_norm(f) == pytest.approx(1.0, abs=1e-14)
        assert f.in_trial_space

    def test_l2_norm_exact_for_affine(self):
        grid = VerticalGrid(9)
        f = FemFunction(grid, 1.0 - grid.nodes)
        assert l2_norm(f) == pytest.approx(np.sqrt(1.0 / 3.0), abs=1e-14)

    def test_fem_function_validation(self):
        grid = VerticalGrid(4)
        with pytest.raises(ValueError):
            FemFunction(grid, np.zeros(3))
        f = FemFunction(grid, np.append(np.ones(5), 0.5))
        assert not f.in_trial_space
