"""Tests for the pydantic and dataclass models."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models import (
    AxisKind,
    CavityParams,
    ChannelRecord,
    EmitterParams,
    FitOutcome,
    ProtocolConfig,
    SpectrumTrace,
    SpinCavitySystem,
    SweepMarker,
    SweepSettings,
)
from spin_photon_toolkit.units import wl_to_freq


def make_cavity(**overrides):
    values = {"resonance_THz": 484.1282, "quality_factor": 2280, "coupling_ratio": 0.62, "scatter_ratio": 0.38}
    values.update(overrides)
    return CavityParams(**values)


def make_emitter(**overrides):
    values = {"zpl_THz": 484.1282, "tau_on_ns": 1.12, "tau_off_ns": 5.725, "gamma_star_MHz": 27.0}
    values.update(overrides)
    return EmitterParams(**values)


class TestCavityParams:
    """Tests for CavityParams."""

    def test_partition(self):
        cavity = make_cavity()
        assert cavity.kappa_wg.value + cavity.kappa_s.value == pytest.approx(cavity.kappa.value)
        assert cavity.kappa.over_2pi_ghz == pytest.approx(212.3, abs=0.1)

    def test_partition_overflow(self):
        with pytest.raises(ValidationError, match="must not exceed 1"):
            make_cavity(coupling_ratio=0.7, scatter_ratio=0.4)

    def test_transmission_remainder_allowed(self):
        cavity = make_cavity(coupling_ratio=0.3, scatter_ratio=0.3)
        assert cavity.kappa_wg.value < 0.5 * cavity.kappa.value

    def test_wavelength_alias(self):
        cavity = CavityParams(resonance_nm=619.256, quality_factor=2280, coupling_ratio=0.5)
        assert cavity.resonance_THz == pytest.approx(wl_to_freq(619.256).thz)
        assert cavity.resonance_nm == pytest.approx(619.256)

    def test_non_positive_q(self):
        with pytest.raises(ValidationError):
            make_cavity(quality_factor=0)

    def test_frozen(self):
        cavity = make_cavity()
        with pytest.raises(ValidationError):
            cavity.coupling_ratio = 0.1

    def test_dump_includes_wavelength(self):
        data = make_cavity().model_dump(mode="json")
        assert "resonance_nm" in data


class TestEmitterParams:
    """Tests for EmitterParams."""

    def test_defaults(self):
        emitter = make_emitter()
        assert emitter.xi == pytest.approx(0.456)
        assert emitter.tau_bulk_ns == 5.10

    def test_enhanced_lifetime_cannot_exceed_detuned(self):
        with pytest.raises(ValidationError, match="must not exceed"):
            make_emitter(tau_on_ns=6.0)

    def test_zero_xi(self):
        with pytest.raises(ValidationError):
            make_emitter(quantum_efficiency=0.0)

    def test_radiative_linewidth(self):
        # 1/(2π·5.725 ns) ≈ 27.8 MHz
        assert make_emitter().radiative_linewidth.mhz == pytest.approx(27.8, abs=0.1)

    def test_negative_dephasing(self):
        with pytest.raises(ValidationError):
            make_emitter(gamma_star_MHz=-1.0)

    def test_zpl_alias(self):
        emitter = EmitterParams(zpl_nm=619.26, tau_on_ns=1.0, tau_off_ns=5.0)
        assert emitter.zpl.thz == pytest.approx(wl_to_freq(619.26).thz)


class TestSpinCavitySystem:
    """Tests for SpinCavitySystem."""

    def test_from_lifetimes(self):
        system = SpinCavitySystem.from_lifetimes(make_cavity(), make_emitter())
        assert system.g_over_2pi_GHz == pytest.approx(2.75, abs=0.05)
        assert system.emitter_offset_hz == 0.0

    def test_with_operating_point(self):
        system = SpinCavitySystem.from_lifetimes(make_cavity(), make_emitter())
        moved = system.with_operating_point(0.1, 500.0)
        assert moved.cavity.coupling_ratio == 0.1
        assert moved.cavity.scatter_ratio == pytest.approx(0.9)
        assert moved.emitter.gamma_star_MHz == 500.0
        assert moved.g_over_2pi_GHz == system.g_over_2pi_GHz
        assert system.cavity.coupling_ratio == 0.62

    @pytest.mark.parametrize("ratio, gamma", [(-0.1, 1.0), (1.1, 1.0), (0.5, -1.0)])
    def test_operating_point_bounds(self, ratio, gamma):
        system = SpinCavitySystem.from_lifetimes(make_cavity(), make_emitter())
        with pytest.raises(DomainError):
            system.with_operating_point(ratio, gamma)


class TestProtocolConfig:
    """Tests for ProtocolConfig and sweep settings."""

    def test_defaults(self):
        config = ProtocolConfig()
        assert config.r_v == 1.0
        assert config.diffusion_points == 129

    def test_r_v_magnitude(self):
        assert abs(ProtocolConfig(r_v_real=0.6, r_v_imag=0.8).r_v) == pytest.approx(1.0)
        with pytest.raises(ValidationError, match="r_V"):
            ProtocolConfig(r_v_real=0.9, r_v_imag=0.9)

    def test_sweep_axes(self):
        settings = SweepSettings(n_kappa=4, n_gamma=5)
        np.testing.assert_allclose(settings.kappa_axis(), [1e-3, 1e-2, 1e-1, 1.0])
        np.testing.assert_allclose(settings.gamma_axis(), np.logspace(-2, 3, 5))

    def test_sweep_reversed_axis(self):
        with pytest.raises(ValidationError, match="increasing"):
            SweepSettings(kappa_min=0.5, kappa_max=0.1)

    def test_single_point_axis(self):
        settings = SweepSettings(kappa_min=0.62, kappa_max=0.62, n_kappa=1)
        np.testing.assert_allclose(settings.kappa_axis(), [0.62])

    def test_marker_bounds(self):
        with pytest.raises(ValidationError):
            SweepMarker(label="x", coupling_ratio=1.5, gamma_star_MHz=1.0)


class TestSpectrumTrace:
    """Tests for SpectrumTrace."""

    def test_poisson_sigma(self):
        trace = SpectrumTrace([0.0, 1.0, 2.0], [0.0, 4.0, 9.0])
        np.testing.assert_allclose(trace.sigma, [1.0, 2.0, 3.0])
        assert trace.span == 2.0

    def test_axis_from_string(self):
        assert SpectrumTrace([0.0, 1.0], [1.0, 1.0], axis="delay_ns").axis is AxisKind.DELAY_NS
        assert AxisKind.FREQUENCY_THZ.unit == "THz"

    @pytest.mark.parametrize(
        "x, y, sigma",
        [
            ([0.0, 1.0], [1.0], None),
            ([], [], None),
            ([1.0, 0.0], [1.0, 1.0], None),
            ([0.0, 1.0], [1.0, np.inf], None),
            ([0.0, 1.0], [1.0, 1.0], [1.0, 0.0]),
            ([0.0, 1.0], [1.0, 1.0], [1.0]),
        ],
    )
    def test_rejects(self, x, y, sigma):
        with pytest.raises(DomainError):
            SpectrumTrace(x, y, sigma)


class TestFitOutcome:
    """Tests for FitOutcome serialization."""

    def make_outcome(self):
        return FitOutcome(
            model="lorentzian",
            param_names=["y0", "A", "center", "fwhm"],
            params={"y0": 1.0, "A": -0.5, "center": 619.25, "fwhm": 0.27},
            uncertainties={"y0": 0.01, "A": 0.02, "center": 0.001, "fwhm": 0.003},
            covariance=np.diag([1e-4, 4e-4, 1e-6, 9e-6]),
            derived={"quality_factor": 2293.5},
            derived_uncertainties={"quality_factor": 25.0},
            reduced_chi2=1.05,
            n_iter=12,
            converged=True,
            units={"center": "nm", "fwhm": "nm"},
        )

    def test_unit_suffixed_keys(self):
        data = self.make_outcome().to_dict()
        assert data["params"]["center_nm"] == 619.25
        assert data["params"]["y0_dimless"] == 1.0
        assert data["derived"]["quality_factor_dimless"] == 2293.5
        assert data["covariance_order"] == ["y0", "A", "center", "fwhm"]

    def test_json(self):
        data = json.loads(self.make_outcome().to_json())
        assert data["covariance"][1][1] == pytest.approx(4e-4)
        assert data["converged"] is True

    def test_value_lookup(self):
        outcome = self.make_outcome()
        assert outcome.value("fwhm") == 0.27
        assert outcome.value("quality_factor") == 2293.5
        with pytest.raises(KeyError):
            outcome.value("eta")


class TestChannelRecord:
    """Tests for ChannelRecord."""

    def test_lifetime_ratio(self):
        record = ChannelRecord(channel="ch4", zpl_nm=619.256, cavity_nm=614.4, tau_on_ns=0.9042, tau_off_ns=5.678)
        assert record.lifetime_ratio == pytest.approx(6.28, abs=0.01)
        assert record.quality_factor is None

    def test_invalid_lifetime(self):
        with pytest.raises(ValidationError):
            ChannelRecord(channel="ch0", zpl_nm=619.0, cavity_nm=615.0, tau_on_ns=0.0, tau_off_ns=5.0)
