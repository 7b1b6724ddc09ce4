"""Tests for lineshapes, the least-squares engine and measurement-level fits."""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from spin_photon_toolkit.errors import DomainError, RankDeficiencyError
from spin_photon_toolkit.fitting import (
    background_correct_g2,
    dephasing_from_linewidth,
    fit_cavity_resonance,
    fit_curve,
    fit_g2,
    fit_lifetime,
    fit_ple_multipeak,
    get_model,
    guess_initial,
    jitter_sigma,
    linewidth_ratio,
    list_models,
    model_fano_lorentz,
    model_g2_dip,
    model_lifetime_emg,
    model_lorentzian,
    model_multi_lorentzian,
    normalize_g2,
)
from spin_photon_toolkit.fitting.lineshapes import (
    emg_density,
    jacobian_fano_lorentz,
    jacobian_lorentzian,
    jacobian_multi_lorentzian,
)
from spin_photon_toolkit.models import AxisKind, SpectrumTrace
from spin_photon_toolkit.units import LinewidthFWHM

N_TRIALS = 40


def numeric_jacobian(f, x, params, step=1e-6):
    columns = []
    for i, p in enumerate(params):
        h = step * max(abs(p), 1.0)
        up = list(params)
        down = list(params)
        up[i] = p + h
        down[i] = p - h
        columns.append((f(x, *up) - f(x, *down)) / (2 * h))
    return np.column_stack(columns)


def within(outcome, name, truth, n_sigma=3.0):
    return abs(outcome.params[name] - truth) <= n_sigma * outcome.uncertainties[name]


class TestLineshapes:
    """Tests for lineshape identities."""

    def test_lorentzian_half_maximum(self):
        x = np.array([-0.5, 0.0, 0.5])
        np.testing.assert_allclose(model_lorentzian(x, 1.0, 2.0, 0.0, 1.0), [2.0, 3.0, 2.0])

    def test_fano_without_mixing_is_lorentzian(self):
        x = np.linspace(618.5, 620.0, 301)
        fano = model_fano_lorentz(x, 0.9, -0.5, 0.0, 3.0, 619.25, 0.27)
        lorentz = model_lorentzian(x, 0.9, -0.5, 619.25, 0.27)
        np.testing.assert_array_equal(fano, lorentz)

    def test_fano_large_q_tends_to_lorentzian(self):
        x = np.linspace(-2.0, 2.0, 101)
        fano = model_fano_lorentz(x, 0.0, 1.0, 1.0, 1e7, 0.0, 1.0)
        np.testing.assert_allclose(fano, model_lorentzian(x, 0.0, 1.0, 0.0, 1.0), atol=1e-5)

    def test_fano_zero_at_minus_q(self):
        # Ω = −q nulls the Fano term
        fwhm, q = 0.5, 2.0
        x = np.array([-q * fwhm / 2])
        assert model_fano_lorentz(x, 0.0, 1.0, 1.0, q, 0.0, fwhm)[0] == pytest.approx(0.0, abs=1e-15)

    def test_multi_with_one_peak_is_lorentzian(self):
        x = np.linspace(-500, 500, 51)
        np.testing.assert_allclose(
            model_multi_lorentzian(x, 10.0, 20.0, 150.0, 300.0),
            model_lorentzian(x, 10.0, 300.0, 20.0, 150.0),
        )

    def test_multi_rejects_partial_triples(self):
        with pytest.raises(DomainError):
            model_multi_lorentzian(np.zeros(3), 0.0, 1.0, 2.0)

    def test_non_positive_width(self):
        with pytest.raises(DomainError):
            model_lorentzian(np.zeros(3), 0.0, 1.0, 0.0, 0.0)

    def test_emg_zero_sigma_is_exponential(self):
        u = np.linspace(0.01, 10.0, 200)
        np.testing.assert_allclose(emg_density(u, 1.12, 0.0), np.exp(-u / 1.12) / 1.12)
        assert emg_density(np.array([-1.0]), 1.12, 0.0)[0] == 0.0

    def test_emg_unit_area(self):
        u = np.linspace(-5.0, 60.0, 65001)
        assert trapezoid(emg_density(u, 1.12, 0.2336), u) == pytest.approx(1.0, abs=1e-4)

    def test_emg_broad_irf_stays_finite(self):
        u = np.linspace(-10.0, 10.0, 2001)
        density = emg_density(u, 1e-3, 1.0)
        assert np.all(np.isfinite(density))
        assert trapezoid(density, u) == pytest.approx(1.0, abs=1e-3)

    def test_emg_model_adds_background(self):
        t = np.array([-50.0])
        assert model_lifetime_emg(t, 0.0, 100.0, 1.12, 0.2, 3.0)[0] == pytest.approx(3.0)

    def test_g2_dip_value_at_zero_delay(self):
        tau = np.linspace(-20, 20, 401)
        g2 = model_g2_dip(tau, 0.15, 2.0)
        assert g2[200] == pytest.approx(0.15)
        assert g2[0] == pytest.approx(1.0, abs=1e-4)

    def test_g2_jitter_fills_the_dip(self):
        tau = np.linspace(-20, 20, 801)
        bare = model_g2_dip(tau, 0.0, 1.0)
        smeared = model_g2_dip(tau, 0.0, 1.0, 0.5)
        assert smeared[400] > bare[400] + 0.1
        assert smeared[400] < 1.0


class TestJacobians:
    """Analytic Jacobians against central differences."""

    def test_lorentzian(self):
        x = np.linspace(-3, 3, 61)
        params = [0.3, 1.7, 0.2, 0.9]
        np.testing.assert_allclose(
            jacobian_lorentzian(x, *params),
            numeric_jacobian(model_lorentzian, x, params),
            atol=1e-6,
        )

    def test_fano_lorentz(self):
        x = np.linspace(-3, 3, 61)
        params = [0.3, -1.2, 0.4, 1.8, 0.1, 0.8]
        np.testing.assert_allclose(
            jacobian_fano_lorentz(x, *params),
            numeric_jacobian(model_fano_lorentz, x, params),
            atol=1e-6,
        )

    def test_multi_lorentzian(self):
        x = np.linspace(-3, 3, 61)
        params = [0.1, -0.8, 0.6, 2.0, 0.9, 0.4, 1.1]
        np.testing.assert_allclose(
            jacobian_multi_lorentzian(x, *params),
            numeric_jacobian(model_multi_lorentzian, x, params),
            atol=1e-6,
        )


class TestRegistry:
    """Tests for model lookup."""

    def test_list_models(self):
        assert set(list_models()) == {
            "lorentzian",
            "lorentzian_multi",
            "fano_lorentz",
            "lifetime_emg",
            "g2_dip",
        }

    def test_unknown_model(self):
        with pytest.raises(DomainError, match="Available"):
            get_model("voigt")

    def test_multi_param_names(self):
        model = get_model("lorentzian_multi", n_peaks=2)
        assert model.param_names == [
            "y0", "center_1", "fwhm_1", "amplitude_1", "center_2", "fwhm_2", "amplitude_2"
        ]

    def test_guess_initial_lorentzian(self):
        x = np.linspace(-5, 5, 201)
        trace = SpectrumTrace(x, 1.0 + 2.0 / (1 + (2 * x) ** 2), np.ones_like(x))
        guess = guess_initial("lorentzian", trace)
        assert guess["center"] == pytest.approx(0.0)
        assert guess["fwhm"] == pytest.approx(1.0, abs=0.05)
        assert guess["amplitude"] == pytest.approx(2.0, abs=0.05)


class TestEngine:
    """Tests for fit_curve."""

    def test_noise_free_recovery(self):
        x = np.linspace(-5, 5, 201)
        y = model_lorentzian(x, 1.0, 2.0, 0.3, 1.2)
        trace = SpectrumTrace(x, y, np.full_like(x, 0.01))
        outcome = fit_curve("lorentzian", trace, {"y0": 0.8, "amplitude": 1.5, "center": 0.0, "fwhm": 1.0})
        assert outcome.converged
        assert outcome.params["center"] == pytest.approx(0.3, abs=1e-8)
        assert outcome.derived["quality_factor"] == pytest.approx(0.25, abs=1e-8)

    def test_fixed_parameter_has_zero_covariance(self, rng):
        x = np.linspace(-5, 5, 201)
        y = model_lorentzian(x, 1.0, 2.0, 0.3, 1.2) + rng.normal(0, 0.01, x.size)
        trace = SpectrumTrace(x, y, np.full_like(x, 0.01))
        outcome = fit_curve(
            "lorentzian", trace, {"y0": 1.0, "amplitude": 2.0, "center": 0.0, "fwhm": 1.2}, fixed=["fwhm"]
        )
        assert outcome.params["fwhm"] == 1.2
        assert outcome.uncertainties["fwhm"] == 0.0
        assert outcome.fixed == ["fwhm"]

    def test_missing_init(self):
        trace = SpectrumTrace(np.arange(10.0), np.ones(10))
        with pytest.raises(DomainError, match="missing"):
            fit_curve("lorentzian", trace, {"y0": 1.0})

    def test_init_outside_bounds(self):
        trace = SpectrumTrace(np.arange(10.0), np.ones(10))
        with pytest.raises(DomainError, match="outside bounds"):
            fit_curve("lorentzian", trace, {"y0": 1.0, "amplitude": 1.0, "center": 5.0, "fwhm": -1.0})

    def test_too_few_points(self):
        trace = SpectrumTrace(np.arange(4.0), np.ones(4))
        with pytest.raises(DomainError, match="at least"):
            fit_curve("lorentzian", trace, {"y0": 1.0, "amplitude": 1.0, "center": 2.0, "fwhm": 1.0})

    def test_flat_trace_is_rank_deficient(self):
        x = np.linspace(-5, 5, 51)
        trace = SpectrumTrace(x, np.ones_like(x), np.full_like(x, 0.1))
        init = {"y0": 1.0, "amplitude": 0.0, "center": 0.0, "fwhm": 1.0}
        with pytest.raises(RankDeficiencyError) as excinfo:
            fit_curve("lorentzian", trace, init)
        assert excinfo.value.n_params == 4

        outcome = fit_curve("lorentzian", trace, init, allow_rank_deficient=True)
        assert not outcome.converged
        assert np.isnan(outcome.uncertainties["center"])

    def test_outcome_serialization_carries_units(self):
        x = np.linspace(619.0, 619.5, 101)
        y = model_lorentzian(x, 1.0, -0.5, 619.25, 0.27)
        trace = SpectrumTrace(x, y, np.full_like(x, 0.01), AxisKind.WAVELENGTH_NM)
        outcome = fit_curve("lorentzian", trace, guess_initial("lorentzian", trace))
        data = outcome.to_dict()
        assert "center_nm" in data["params"]
        assert "amplitude_dimless" in data["params"]
        assert data["derived"]["quality_factor_dimless"] == pytest.approx(619.25 / 0.27, rel=1e-6)
        assert data["covariance_order"] == ["y0", "amplitude", "center", "fwhm"]


class TestCavityResonance:
    """Weighted Fano-Lorentz fits of a Q≈2280 resonance."""

    TRUTH = {"y0": 1.0, "amplitude": -0.6, "eta": 0.3, "q": 2.0, "center": 619.25, "fwhm": 0.2716}

    def synthesize(self, rng, noise=0.01):
        x = np.linspace(618.5, 620.0, 301)
        y = model_fano_lorentz(x, *self.TRUTH.values())
        return SpectrumTrace(x, y + rng.normal(0, noise, x.size), np.full_like(x, noise))

    def test_partial_init_completed_by_heuristics(self, rng):
        outcome = fit_cavity_resonance(self.synthesize(rng, noise=1e-4), eta=0.3, init={"q": 2.5})
        assert outcome.converged
        assert outcome.params["center"] == pytest.approx(619.25, abs=1e-3)
        assert outcome.derived["quality_factor"] == pytest.approx(2280, rel=0.01)
        assert "eta" in outcome.fixed

    def test_coverage(self, rng):
        hits = 0
        for _ in range(N_TRIALS):
            outcome = fit_cavity_resonance(self.synthesize(rng), eta=0.3, init=self.TRUTH)
            hits += within(outcome, "center", 619.25) and within(outcome, "fwhm", 0.2716)
        assert hits >= 0.95 * N_TRIALS

    def test_eta_out_of_range(self, rng):
        with pytest.raises(DomainError):
            fit_cavity_resonance(self.synthesize(rng), eta=1.5)


class TestPLE:
    """Multi-peak Lorentzian fits of PLE scans."""

    PEAKS = [(-300.0, 180.0, 800.0), (250.0, 120.0, 500.0)]

    def synthesize(self, rng, noise=10.0):
        x = np.linspace(-1000.0, 1000.0, 401)
        flat = [v for peak in self.PEAKS for v in peak]
        y = model_multi_lorentzian(x, 50.0, *flat)
        return SpectrumTrace(x, y + rng.normal(0, noise, x.size), np.full_like(x, noise), AxisKind.DETUNING_MHZ)

    def test_two_peaks_sorted(self, rng):
        outcome = fit_ple_multipeak(self.synthesize(rng), 2)
        assert outcome.converged
        assert outcome.params["center_1"] < outcome.params["center_2"]
        assert outcome.derived["linewidth_1"] == pytest.approx(180.0, rel=0.05)
        assert outcome.units["linewidth_2"] == "MHz"

    def test_frequency_axis_reports_mhz_linewidths(self, rng):
        detuning = self.synthesize(rng, noise=1.0)
        origin = 484.1282
        trace = SpectrumTrace(origin + detuning.x * 1e-6, detuning.y, detuning.sigma, AxisKind.FREQUENCY_THZ)
        outcome = fit_ple_multipeak(trace, 2)
        assert outcome.params["center_2"] == pytest.approx(origin + 250e-6, abs=2e-6)
        assert outcome.derived["linewidth_2"] == pytest.approx(120.0, rel=0.02)
        assert outcome.units["center_1"] == "THz"

    def test_coverage(self, rng):
        hits = 0
        for _ in range(N_TRIALS):
            outcome = fit_ple_multipeak(self.synthesize(rng), 2)
            hits += within(outcome, "center_1", -300.0) and within(outcome, "center_2", 250.0)
        assert hits >= 0.95 * N_TRIALS

    def test_identical_peaks_are_degenerate(self, rng):
        trace = self.synthesize(rng)
        outcome = fit_ple_multipeak(trace, 2, init=[(-300.0, 180.0, 400.0), (-300.0, 180.0, 400.0)])
        assert not outcome.converged

    def test_missing_peak_is_flagged(self, rng):
        outcome = fit_ple_multipeak(self.synthesize(rng), 1)
        assert not outcome.converged
        assert "unexplained" in outcome.message

    def test_single_clean_peak_converges(self, rng):
        x = np.linspace(-1000.0, 1000.0, 401)
        y = model_multi_lorentzian(x, 50.0, 100.0, 150.0, 600.0) + rng.normal(0, 10.0, x.size)
        outcome = fit_ple_multipeak(SpectrumTrace(x, y, np.full_like(x, 10.0), AxisKind.DETUNING_MHZ), 1)
        assert outcome.converged
        assert outcome.params["center_1"] == pytest.approx(100.0, abs=5.0)

    def test_init_length_must_match(self, rng):
        with pytest.raises(DomainError):
            fit_ple_multipeak(self.synthesize(rng), 2, init=[(0.0, 100.0, 100.0)])


class TestLifetime:
    """EMG fits of Poisson lifetime histograms with a 550 ps jitter IRF."""

    TAU = 1.12

    def synthesize(self, rng):
        t = np.arange(0.0, 20.0, 0.02)
        expected = model_lifetime_emg(t, 2.0, 2000.0, self.TAU, jitter_sigma(550.0), 5.0)
        return SpectrumTrace(t, rng.poisson(expected).astype(float), None, AxisKind.TIME_NS)

    def test_jitter_sigma(self):
        assert jitter_sigma(550.0) == pytest.approx(0.2336, abs=1e-4)

    def test_recovery(self, rng):
        taus, hits = [], 0
        for _ in range(N_TRIALS):
            outcome = fit_lifetime(self.synthesize(rng))
            taus.append(outcome.params["tau"])
            hits += within(outcome, "tau", self.TAU)
        assert np.mean(taus) == pytest.approx(self.TAU, abs=0.04)
        assert hits >= 0.95 * N_TRIALS

    @pytest.mark.slow
    def test_recovery_large_sample(self, rng):
        hits = sum(within(fit_lifetime(self.synthesize(rng)), "tau", self.TAU) for _ in range(100))
        assert hits >= 95

    def test_irf_held_and_derived(self, rng):
        outcome = fit_lifetime(self.synthesize(rng))
        assert outcome.fixed == ["sigma"]
        assert outcome.derived["irf_fwhm"] == pytest.approx(0.55, abs=1e-9)
        assert outcome.derived["decay_rate"] == pytest.approx(1.0 / outcome.params["tau"])


class TestG2:
    """Antibunching fits and their corrections."""

    def synthesize(self, rng, g0=0.15, tau0=2.0, noise=0.02):
        tau = np.linspace(-50.0, 50.0, 201)
        y = model_g2_dip(tau, g0, tau0) + rng.normal(0, noise, tau.size)
        return SpectrumTrace(tau, y, np.full_like(tau, noise), AxisKind.DELAY_NS)

    def test_coverage(self, rng):
        hits = 0
        for _ in range(N_TRIALS):
            outcome = fit_g2(self.synthesize(rng))
            hits += within(outcome, "g0", 0.15) and within(outcome, "tau0", 2.0)
        assert hits >= 0.95 * N_TRIALS

    def test_derived_g2_0(self, rng):
        outcome = fit_g2(self.synthesize(rng))
        assert outcome.derived["g2_0"] == outcome.params["g0"]

    def test_normalization(self, rng):
        tau = np.linspace(-50.0, 50.0, 201)
        raw = 400.0 * model_g2_dip(tau, 0.15, 2.0)
        normalized = normalize_g2(SpectrumTrace(tau, raw, None, AxisKind.DELAY_NS), 2.0)
        assert normalized.factor == pytest.approx(400.0, rel=1e-3)

        outcome = fit_g2(SpectrumTrace(tau, raw, np.full_like(tau, 4.0), AxisKind.DELAY_NS), normalize=True)
        assert outcome.params["g0"] == pytest.approx(0.15, abs=0.01)

    def test_normalization_window_must_exist(self):
        tau = np.linspace(-5.0, 5.0, 21)
        with pytest.raises(DomainError):
            normalize_g2(SpectrumTrace(tau, np.ones_like(tau), None, AxisKind.DELAY_NS), 2.0)

    def test_background_correction(self):
        correction = background_correct_g2(0.25, 4380, 290)
        assert correction.value == pytest.approx(0.1474, abs=1e-4)
        assert not correction.clamped

    def test_background_correction_clamps(self):
        correction = background_correct_g2(0.05, 1000, 1000)
        assert correction.value == 0.0
        assert correction.clamped

    def test_background_without_signal(self):
        with pytest.raises(DomainError):
            background_correct_g2(0.25, 0, 290)


class TestDephasing:
    """Pure dephasing from measured linewidths."""

    @pytest.mark.parametrize(
        "linewidth,tau_off,expected",
        [(204.0, 5.89, 176.98), (55.2, 5.725, 27.4)],
    )
    def test_anchors(self, linewidth, tau_off, expected):
        estimate = dephasing_from_linewidth(LinewidthFWHM.from_mhz(linewidth), tau_off)
        assert estimate.gamma_star.mhz == pytest.approx(expected, abs=0.05)
        assert not estimate.clamped

    def test_below_transform_limit(self):
        estimate = dephasing_from_linewidth(LinewidthFWHM.from_mhz(10.0), 5.89)
        assert estimate.gamma_star.mhz == 0.0
        assert estimate.clamped

    def test_linewidth_ratio(self):
        assert linewidth_ratio(LinewidthFWHM.from_mhz(204.0), 5.89) == pytest.approx(7.55, abs=0.01)
