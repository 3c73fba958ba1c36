import numpy as np
import pytest

from microlub import VerticalGrid, solve_potential
from microlub.oracles import psi_ode_oracle

from test_oracles import PSI_BAR_PIN


class TestPotential:
    def test_closed_form_at_zero_roughness(self):
        grid = VerticalGrid(200)
        potential = solve_potential(0.0, grid)
        expected = 0.5 * (1.0 - grid.nodes**2)
        assert np.max(np.abs(potential.psi.values - expected)) <= 5.0 * grid.h**2
        assert abs(potential.psi_bar - 1.0 / 3.0) <= 5.0 * grid.h**2

    @pytest.mark.parametrize("M", [0.5, 1.0])
    def test_matches_ode_oracle(self, M):
        grid = VerticalGrid(400)
        potential = solve_potential(M, grid)
        substeps = 50
        oracle = psi_ode_oracle(M, steps=substeps * (grid.nZ + 1))
        assert np.max(np.abs(potential.psi.values - oracle.psi[::substeps])) <= 1e-6
        assert potential.psi_bar == pytest.approx(PSI_BAR_PIN[M], abs=5.0 * grid.h**2)

    def test_profile_invariants(self):
        for M in (0.0, 0.5, 1.0, 1.9):
            grid = VerticalGrid(150)
            with pytest.warns(UserWarning) if M > 1.5 else _nullcontext():
                potential = solve_potential(M, grid)
            assert potential.psi.values[-1] == 0.0
            assert np.min(potential.psi.values) >= -1e-12
            assert np.max(np.diff(potential.psi.values)) <= 1e-12
            assert potential.psi_bar > 0.0

    def test_average_grows_with_roughness(self):
        grid = VerticalGrid(300)
        bars = [solve_potential(M, grid).psi_bar for M in (0.0, 0.5, 1.0)]
        assert 1.0 / 3.0 - 1e-5 < bars[0] < bars[1] < bars[2]

    def test_domain_guard(self):
        with pytest.raises(ValueError):
            solve_potential(2.0, VerticalGrid(10))


class _nullcontext:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False
