import numpy as np
import pytest

from entwave.decay import (
    FitError,
    auto_exponential_window,
    auto_domain_length,
    default_perturbation,
    fit_exponential,
    fit_log_corrected,
    fit_power,
    project_zero_mass,
    residual_masses,
    rho_plus_for_delta,
)
from entwave.grid import ChannelGrid


class TestFitPower:
    def test_exact_model(self):
        t = np.linspace(0.0, 100.0, 200)
        fit = fit_power(t, (1.0 + t) ** -0.5, (0.0, 100.0))
        assert fit.value == pytest.approx(-0.5, abs=1e-9)
        assert fit.residual < 1e-12

    def test_constant_series(self):
        t = np.linspace(0.0, 10.0, 50)
        fit = fit_power(t, np.full(50, 3.7), (0.0, 10.0))
        assert fit.value == pytest.approx(0.0, abs=1e-12)

    def test_log_corrected_pair(self):
        t = np.linspace(1.0, 400.0, 500)
        series = (1.0 + t) ** -0.75 * np.log(2.0 + t) ** 0.5
        fit = fit_log_corrected(t, series, (1.0, 400.0))
        assert fit.value == pytest.approx(-0.75, abs=1e-6)

    def test_nonpositive_rejected(self):
        t = np.linspace(0.0, 20.0, 40)
        v = np.ones(40)
        v[5] = -1.0
        with pytest.raises(FitError, match="positive"):
            fit_power(t, v, (0.0, 20.0))

    def test_window_needs_ten_samples(self):
        t = np.linspace(0.0, 20.0, 40)
        with pytest.raises(FitError, match="10 samples"):
            fit_power(t, np.ones(40), (0.0, 1.0))


class TestFitLogCorrected:
    def test_exact_model(self):
        t = np.linspace(0.0, 300.0, 400)
        series = (1.0 + t) ** -0.75 * np.log(2.0 + t) ** 0.5
        fit = fit_log_corrected(t, series, (0.0, 300.0))
        assert fit.value == pytest.approx(-0.75, abs=1e-9)
        assert fit.residual < 1e-12

    def test_pure_power_has_small_negative_bias(self):
        t = np.linspace(1.0, 300.0, 400)
        series = (1.0 + t) ** -0.75
        fit = fit_log_corrected(t, series, (1.0, 300.0))
        bias = fit.value - (-0.75)
        assert bias < 0.0
        assert abs(bias) < 0.2

    def test_bias_shrinks_for_late_windows(self):
        t = np.geomspace(1.0, 3000.0, 600)
        series = (1.0 + t) ** -0.75
        biases = []
        for lo in (1.0, 30.0, 900.0):
            fit = fit_log_corrected(t, series, (lo, 3000.0))
            biases.append(abs(fit.value + 0.75))
        assert biases[0] > biases[1] > biases[2]


class TestFitExponential:
    def test_exact_model(self):
        t = np.linspace(0.0, 30.0, 200)
        fit = fit_exponential(t, np.exp(-0.3 * t), (0.0, 30.0))
        assert fit.value == pytest.approx(0.3, abs=1e-9)

    def test_noisy_model(self, rng):
        t = np.linspace(0.0, 30.0, 300)
        series = np.exp(-0.42 * t) * (1.0 + 0.01 * rng.normal(size=300))
        fit = fit_exponential(t, series, (0.0, 30.0))
        assert fit.value == pytest.approx(0.42, rel=0.05)

    def test_constant_series(self):
        t = np.linspace(0.0, 30.0, 100)
        fit = fit_exponential(t, np.full(100, 0.5), (0.0, 30.0))
        assert fit.value == pytest.approx(0.0, abs=1e-12)

    def test_auto_window_skips_transient_and_floor(self):
        t = np.linspace(0.0, 40.0, 401)
        series = np.exp(-2.0 * t) + 1e-13
        lo, hi = auto_exponential_window(t, series)
        assert lo > 0.0
        assert hi < 40.0
        fit = fit_exponential(t, series, (lo, hi))
        assert fit.value == pytest.approx(2.0, rel=0.05)


class TestRateFitConfidence:
    def test_confidence_covers_truth_on_noisy_input(self, rng):
        t = np.linspace(1.0, 200.0, 150)
        hits = 0
        for _ in range(20):
            series = (1.0 + t) ** -0.5 * np.exp(0.01 * rng.normal(size=150))
            fit = fit_power(t, series, (1.0, 200.0))
            if abs(fit.value + 0.5) < 2.0 * fit.confidence:
                hits += 1
        assert hits >= 18

    def test_window_widening_within_confidence(self):
        t = np.geomspace(1.0, 400.0, 300)
        series = (1.0 + t) ** -0.5 * (1.0 + 0.5 / (1.0 + t))
        f1 = fit_power(t, series, (100.0, 400.0))
        f2 = fit_power(t, series, (50.0, 400.0))
        assert abs(f1.value - f2.value) < max(
            2.0 * (f1.confidence + f2.confidence), 5e-3
        )


class TestExperimentHelpers:
    def test_rho_plus_solves_strength_equation(self):
        for delta in (0.02, 0.05, 0.1):
            rp = rho_plus_for_delta(delta)
            assert (rp - 1.0) + abs(1.0 - 1.0 / rp) == pytest.approx(delta, abs=1e-14)

    def test_auto_domain_covers_rays(self):
        L = auto_domain_length(400.0, 1.06)
        assert L >= 1.06 * 401.0 + 8.0 * np.sqrt(2.0 * 401.0)
        assert auto_domain_length(4.0, 1.06) == pytest.approx(
            15.0 * np.sqrt(5.0)
        )

    def test_zero_mass_projection(self):
        grid = ChannelGrid(40.0, 256, 4, 4)
        pert = default_perturbation(grid, 0.01)
        masses = residual_masses(pert, grid)
        assert np.max(np.abs(masses)) > 1e-4  # generic bump carries mass
        projected = project_zero_mass(pert, grid)
        masses0 = residual_masses(projected, grid)
        assert np.max(np.abs(masses0)) < 1e-14

    def test_projection_keeps_nonzero_modes(self):
        grid = ChannelGrid(40.0, 256, 4, 4)
        pert = default_perturbation(grid, 0.01)
        projected = project_zero_mass(pert, grid)
        nz_before = pert - pert.mean(axis=(2, 3), keepdims=True)
        nz_after = projected - projected.mean(axis=(2, 3), keepdims=True)
        assert np.allclose(nz_before, nz_after, atol=1e-15)

    def test_perturbation_excites_all_channels(self):
        grid = ChannelGrid(40.0, 256, 4, 4)
        pert = default_perturbation(grid, 0.01)
        masses = residual_masses(pert, grid)
        assert np.all(np.abs(masses) > 0.0)
        nz = pert - pert.mean(axis=(2, 3), keepdims=True)
        assert np.max(np.abs(nz)) > 1e-3
