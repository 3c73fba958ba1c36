import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf

from microlub import HorizontalGrid
from microlub.oracles import (
    DenseSystem,
    dense_solve,
    m0_reference,
    psi_ode_oracle,
)

from conftest import reference_params

# Regression pins produced by the oracles themselves (recorded before the
# production path existed; they guard against silent drift).
PSI_BAR_PIN = {0.5: 0.36918614587730636, 1.0: 0.41068613464244624}
PSI_WALL_PIN = {0.5: 0.5446001267522231, 1.0: 0.5957493185127556}
W0_PIN = 0.05745153302502626
F0_PIN = -0.07387435258500054
CF0_PIN = -1.2858552016848774


class TestDenseSolve:
    def test_identity(self):
        rhs = np.array([3.0, -1.0, 2.0])
        assert np.array_equal(dense_solve(DenseSystem(np.eye(3), rhs)), rhs)

    def test_random_diagonally_dominant(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 30))
            a = rng.normal(size=(n, n))
            a += np.diag(np.sum(np.abs(a), axis=1) + 1.0)
            x_true = rng.normal(size=n)
            x = dense_solve(DenseSystem(a, a @ x_true))
            np.testing.assert_allclose(x, x_true, atol=1e-10)

    def test_singular_rejected(self):
        with pytest.raises(ValueError, match="singular"):
            dense_solve(DenseSystem(np.zeros((2, 2)), np.ones(2)))

    def test_hilbert_conditioning_smoke(self):
        # cond(H_5) ~ 5e5: partial pivoting still recovers the solution well
        n = 5
        hilbert = 1.0 / (np.arange(n)[:, None] + np.arange(n)[None, :] + 1.0)
        x = dense_solve(DenseSystem(hilbert, hilbert @ np.ones(n)))
        np.testing.assert_allclose(x, np.ones(n), atol=1e-9)


class TestPsiOracle:
    def test_closed_form_at_zero_roughness(self):
        oracle = psi_ode_oracle(0.0, steps=20000)
        np.testing.assert_allclose(oracle.psi, 0.5 * (1 - oracle.z**2), atol=1e-10)
        assert oracle.psi_bar == pytest.approx(1.0 / 3.0, abs=1e-10)

    @pytest.mark.parametrize("M", [0.5, 1.0])
    def test_regression_pins(self, M):
        oracle = psi_ode_oracle(M, steps=20000)
        assert oracle.psi_bar == pytest.approx(PSI_BAR_PIN[M], abs=1e-11)
        assert oracle.psi[0] == pytest.approx(PSI_WALL_PIN[M], abs=1e-11)

    @pytest.mark.parametrize("M", [0.5, 1.0])
    def test_wall_value_against_integrating_factor(self, M):
        # psi(0) = sqrt(pi/(2M)) int_0^1 exp(M t^2/2) erf(t sqrt(M/2)) dt,
        # an entirely quadrature-based second route to the same number
        scale = np.sqrt(np.pi / (2.0 * M))
        value, _ = quad(
            lambda t: scale * np.exp(M * t**2 / 2.0) * erf(t * np.sqrt(M / 2.0)),
            0.0,
            1.0,
            epsabs=1e-13,
        )
        oracle = psi_ode_oracle(M, steps=20000)
        assert oracle.psi[0] == pytest.approx(value, abs=1e-10)

    def test_step_count_guard(self):
        with pytest.raises(ValueError):
            psi_ode_oracle(0.5, steps=100)
        with pytest.raises(ValueError):
            psi_ode_oracle(2.0)


class TestM0Reference:
    def test_requires_smooth_surface(self, slider):
        with pytest.raises(ValueError, match="M = 0"):
            m0_reference(reference_params(M=0.5), slider, HorizontalGrid(10))

    def test_reference_solution_shape(self, slider):
        hgrid = HorizontalGrid(60)
        ref = m0_reference(reference_params(), slider, hgrid, n_y=1201, refine=4)
        assert ref.p[0] == 0.0 and ref.p[-1] == 0.0
        assert ref.p.shape == hgrid.nodes.shape
        assert np.all(ref.p[1:-1] > 0.0)
        assert ref.flux > 0.0
        assert ref.c_f == pytest.approx(ref.F / ref.W, rel=1e-14)

    def test_performance_pins(self, slider):
        ref = m0_reference(reference_params(), slider, HorizontalGrid(200))
        assert ref.W == pytest.approx(W0_PIN, abs=1e-7)
        assert ref.F == pytest.approx(F0_PIN, abs=1e-6)
        assert ref.c_f == pytest.approx(CF0_PIN, abs=1e-5)

    def test_self_convergence_under_refinement(self, slider):
        hgrid = HorizontalGrid(40)
        coarse = m0_reference(reference_params(), slider, hgrid, n_y=801, refine=4)
        fine = m0_reference(reference_params(), slider, hgrid, n_y=3201, refine=8)
        assert np.max(np.abs(coarse.p - fine.p)) < 1e-6
        assert abs(coarse.W - fine.W) < 1e-6
