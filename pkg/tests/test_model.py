import math

import numpy as np
import pytest

from microlub import (
    BearingGeometry,
    ModelParams,
    RoughnessProfile,
    compute_roughness_coefficient,
    gap_function,
)

from conftest import reference_params


class TestModelParams:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(N=0.0), dict(N=1.0), dict(N=-0.2),
            dict(R_c=0.0), dict(R_c=-1.0),
            dict(alpha=0.0), dict(alpha=-3.0),
            dict(beta=-0.1),
            dict(M=-0.5), dict(M=2.0), dict(M=2.5),
        ],
    )
    def test_invalid_values_rejected(self, kwargs):
        base = dict(N=0.1, R_c=0.01, alpha=90.1, beta=50.0)
        base.update(kwargs)
        with pytest.raises(ValueError):
            ModelParams(**base)

    def test_soft_limit_warns(self):
        with pytest.warns(UserWarning, match="stability domain"):
            ModelParams(N=0.1, R_c=0.01, alpha=90.1, beta=50.0, M=1.7)

    def test_reference_parameterization(self):
        params = reference_params()
        assert params.alpha == pytest.approx(90.1, abs=1e-12)
        assert params.beta == pytest.approx(50.0, abs=1e-12)

    def test_round_trip_is_identity(self):
        for N, R_c, nu_b_bar, delta in [
            (0.1, 0.01, 0.1, 0.01),
            (0.3, 0.07, 0.45, 0.2),
            (0.75, 1.3, -0.2, 3.0),
        ]:
            params = ModelParams.from_boundary_viscosity(N, R_c, nu_b_bar, delta)
            derived = params.derived
            assert derived.nu_b_bar == pytest.approx(nu_b_bar, abs=1e-12)
            assert derived.delta == pytest.approx(delta, abs=1e-12)

    def test_zero_beta_maps_to_infinite_delta(self):
        params = ModelParams(N=0.2, R_c=0.05, alpha=2.0, beta=0.0)
        assert params.derived.delta == math.inf

    def test_with_roughness(self):
        params = reference_params().with_roughness(0.5)
        assert params.M == 0.5
        assert params.alpha == reference_params().alpha


class TestRoughnessCoefficient:
    def test_zero_profile(self):
        assert compute_roughness_coefficient(lambda X: np.zeros_like(X)) == 0.0
        assert compute_roughness_coefficient(np.zeros(64)) == 0.0

    @pytest.mark.parametrize("amplitude", [0.05, 0.1, 0.2])
    def test_sine_matches_closed_form(self, amplitude):
        expected = 2.0 * np.pi**2 * amplitude**2
        profile = RoughnessProfile.sine(amplitude)
        assert compute_roughness_coefficient(profile) == pytest.approx(expected, rel=1e-10)

    def test_callable_and_sampled_routes_agree(self):
        a = 0.13
        expected = 2.0 * np.pi**2 * a**2
        with_deriv = RoughnessProfile.sine(a)
        no_deriv = RoughnessProfile.from_callable(lambda X: a * np.sin(2 * np.pi * X))
        X = np.arange(512) / 512
        sampled = RoughnessProfile.from_samples(a * np.sin(2 * np.pi * X))
        for profile in (with_deriv, no_deriv, sampled):
            assert compute_roughness_coefficient(profile, 512) == pytest.approx(
                expected, rel=1e-10
            )

    def test_translation_invariance(self):
        base = compute_roughness_coefficient(RoughnessProfile.sine(0.2))
        for shift in (0.1, 0.37, 0.5):
            shifted = compute_roughness_coefficient(
                RoughnessProfile.sine(0.2, phase=2 * np.pi * shift)
            )
            assert shifted == pytest.approx(base, rel=1e-10)

    def test_amplitude_scaling_is_quadratic(self, rng):
        # random band-limited zero-average profile
        modes = rng.normal(size=5)
        X = np.arange(256) / 256
        h2 = sum(c * np.sin(2 * np.pi * (k + 1) * X) for k, c in enumerate(0.005 * modes))
        base = compute_roughness_coefficient(h2)
        for a in (0.5, 2.0, 3.0):
            scaled = compute_roughness_coefficient(a * h2)
            assert scaled == pytest.approx(a**2 * base, rel=1e-10)

    def test_nonzero_average_rejected(self):
        with pytest.raises(ValueError, match="zero average"):
            compute_roughness_coefficient(lambda X: 0.1 + 0.1 * np.sin(2 * np.pi * X))

    def test_out_of_domain_rejected(self):
        # amplitude 1 gives M = 2 pi^2 >> 2
        with pytest.raises(ValueError, match="stability domain"):
            compute_roughness_coefficient(RoughnessProfile.sine(1.0))

    def test_soft_limit_warns(self):
        a = math.sqrt(1.6 / (2.0 * np.pi**2))
        with pytest.warns(UserWarning, match="stability domain"):
            M = compute_roughness_coefficient(RoughnessProfile.sine(a))
        assert M == pytest.approx(1.6, rel=1e-10)

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            compute_roughness_coefficient(RoughnessProfile.sine(0.1), num_nodes=1)

    def test_reference_sweep_values_admissible(self):
        # the reference sweeps use M in {0, 0.5, 1}; all inside the domain
        for M in (0.0, 0.5, 1.0):
            assert reference_params(M=M).M == M


class TestGeometry:
    def test_default_slider_profile(self):
        geom = BearingGeometry(slope_m=-0.5)
        assert geom.h1(0.0) == pytest.approx(1.0)
        assert geom.h1(1.0) == pytest.approx(0.5)

    def test_nonpositive_gap_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            BearingGeometry(slope_m=-1.2)

    def test_roughness_average_validated(self):
        with pytest.raises(ValueError, match="zero average"):
            BearingGeometry(roughness=RoughnessProfile.from_callable(lambda X: 0.2 + 0.0 * X))

    def test_gap_function_smooth_wall(self):
        geom = BearingGeometry(slope_m=-0.5)
        assert gap_function(geom, 0.1, 0.0) == pytest.approx(0.1, abs=1e-15)
        assert gap_function(geom, 0.1, 1.0) == pytest.approx(0.05, abs=1e-15)

    def test_gap_function_rough_wall_pin(self):
        geom = BearingGeometry(slope_m=-0.5, roughness=RoughnessProfile.sine(0.1))
        # x1/eps^2 = 0.5 puts the fast phase at sin(pi) = 0
        expected = 0.1 * (1.0 - 0.5 * 0.005) + 0.01 * 0.1 * math.sin(math.pi)
        assert gap_function(geom, 0.1, 0.005) == pytest.approx(expected, abs=1e-15)

    def test_gap_function_domain_checks(self):
        geom = BearingGeometry()
        with pytest.raises(ValueError):
            gap_function(geom, -0.1, 0.5)
        with pytest.raises(ValueError):
            gap_function(geom, 0.1, 1.5)

    def test_sampled_profile_interpolates_periodically(self):
        X = np.arange(128) / 128
        profile = RoughnessProfile.from_samples(np.sin(2 * np.pi * X))
        assert profile(0.0) == pytest.approx(profile(1.0), abs=1e-14)
        assert profile(1.25) == pytest.approx(profile(0.25), abs=1e-14)
