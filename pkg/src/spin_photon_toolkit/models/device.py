"""Pydantic models for the cavity, the emitter and the composed spin-cavity system."""

from enum import Enum
from typing import Any

from pydantic import BaseModel, Field, computed_field, model_validator

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.units import (
    AngularRate,
    Frequency,
    LinewidthFWHM,
    freq_to_wl,
    lifetime_to_transform_limit,
    q_to_kappa,
    wl_to_freq,
)

_RATIO_SLACK = 1e-12


class SpinUpModel(str, Enum):
    """How the spin-up branch interacts with the cavity."""

    UNCOUPLED = "uncoupled"  # g_eff = 0, bare-cavity reflection
    ZEEMAN_DETUNED = "zeeman_detuned"  # coupled, emitter shifted by the Zeeman split


class Spin(str, Enum):
    """Spin branch of the ground state."""

    DOWN = "down"
    UP = "up"


def _wavelength_alias(data: Any, nm_key: str, thz_key: str) -> Any:
    """Accept a wavelength in nm in place of a frequency in THz."""
    if isinstance(data, dict) and nm_key in data and thz_key not in data:
        data = dict(data)
        data[thz_key] = wl_to_freq(float(data.pop(nm_key))).thz
    return data


class CavityParams(BaseModel):
    """Single-sided cavity: resonance, Q and the decay-rate partition.

    The waveguide (κ_wg) and scattering (κ_s) channels are fractions of the
    total κ; any remainder is the transmission port κ_t, which is never
    modeled beyond this bookkeeping.
    """

    resonance_THz: float = Field(gt=0)
    quality_factor: float = Field(gt=0)
    coupling_ratio: float = Field(ge=0, le=1)  # κ_wg/κ
    scatter_ratio: float = Field(default=0.0, ge=0, le=1)  # κ_s/κ
    mode_volume: float = Field(default=0.8, gt=0)  # (λ/n)³ units

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="before")
    @classmethod
    def accept_wavelength(cls, data: Any) -> Any:
        return _wavelength_alias(data, "resonance_nm", "resonance_THz")

    @model_validator(mode="after")
    def check_partition(self) -> "CavityParams":
        if self.coupling_ratio + self.scatter_ratio > 1 + _RATIO_SLACK:
            raise ValueError(
                f"coupling_ratio + scatter_ratio must not exceed 1, got "
                f"{self.coupling_ratio} + {self.scatter_ratio}"
            )
        return self

    @property
    def resonance(self) -> Frequency:
        return Frequency.from_thz(self.resonance_THz)

    @computed_field
    @property
    def resonance_nm(self) -> float:
        return freq_to_wl(self.resonance)

    @property
    def kappa(self) -> AngularRate:
        """Total energy decay rate κ."""
        return q_to_kappa(self.quality_factor, self.resonance)

    @property
    def kappa_wg(self) -> AngularRate:
        return AngularRate(self.coupling_ratio * self.kappa.value)

    @property
    def kappa_s(self) -> AngularRate:
        return AngularRate(self.scatter_ratio * self.kappa.value)


class EmitterParams(BaseModel):
    """Color-center emitter: ZPL, lifetimes, efficiencies and dephasing."""

    zpl_THz: float = Field(gt=0)
    tau_on_ns: float = Field(gt=0)  # on-resonance (cavity-enhanced) lifetime
    tau_off_ns: float = Field(gt=0)  # detuned lifetime
    tau_bulk_ns: float = Field(default=5.10, gt=0)
    quantum_efficiency: float = Field(default=0.80, ge=0, le=1)
    debye_waller: float = Field(default=0.57, ge=0, le=1)
    gamma_star_MHz: float = Field(default=0.0, ge=0)  # pure dephasing FWHM
    zeeman_split_GHz: float = 0.0  # ω_{↑,↓'} − ω_{↓,↓'} over 2π

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="before")
    @classmethod
    def accept_wavelength(cls, data: Any) -> Any:
        return _wavelength_alias(data, "zpl_nm", "zpl_THz")

    @model_validator(mode="after")
    def check_lifetimes(self) -> "EmitterParams":
        if self.tau_on_ns > self.tau_off_ns:
            raise ValueError(
                f"tau_on_ns ({self.tau_on_ns}) must not exceed tau_off_ns ({self.tau_off_ns})"
            )
        if self.xi <= 0:
            raise ValueError("quantum_efficiency * debye_waller must be positive")
        return self

    @property
    def xi(self) -> float:
        """ξ = QE·DW."""
        return self.quantum_efficiency * self.debye_waller

    @property
    def zpl(self) -> Frequency:
        return Frequency.from_thz(self.zpl_THz)

    @property
    def radiative_linewidth(self) -> LinewidthFWHM:
        """Transform limit set by the detuned lifetime."""
        return lifetime_to_transform_limit(self.tau_off_ns)

    @property
    def gamma_star(self) -> LinewidthFWHM:
        return LinewidthFWHM.from_mhz(self.gamma_star_MHz)


class SpinCavitySystem(BaseModel):
    """Cavity + emitter + coherent coupling g. Immutable once built."""

    cavity: CavityParams
    emitter: EmitterParams
    g_over_2pi_GHz: float = Field(ge=0)
    spin_up_model: SpinUpModel = SpinUpModel.UNCOUPLED

    model_config = {"frozen": True, "populate_by_name": True}

    @property
    def g(self) -> AngularRate:
        return AngularRate.from_ghz(self.g_over_2pi_GHz)

    @property
    def emitter_offset_hz(self) -> float:
        """ν_e − ν_c in Hz."""
        return (self.emitter.zpl_THz - self.cavity.resonance_THz) * 1e12

    @classmethod
    def from_lifetimes(
        cls,
        cavity: CavityParams,
        emitter: EmitterParams,
        spin_up_model: SpinUpModel = SpinUpModel.UNCOUPLED,
    ) -> "SpinCavitySystem":
        """Build a system whose g follows from the enhanced decay rate 1/τ_on and κ."""
        from spin_photon_toolkit.qed.coupling import coupling_g_from_enhanced_rate
        from spin_photon_toolkit.units import lifetime_to_rate

        g = coupling_g_from_enhanced_rate(lifetime_to_rate(emitter.tau_on_ns), cavity.kappa)
        return cls(
            cavity=cavity,
            emitter=emitter,
            g_over_2pi_GHz=g.over_2pi_ghz,
            spin_up_model=spin_up_model,
        )

    def with_operating_point(self, coupling_ratio: float, gamma_star_MHz: float) -> "SpinCavitySystem":
        """Copy with a new κ_wg/κ (κ_s/κ = 1 − κ_wg/κ) and pure dephasing.

        Used for sweep cells; g is kept from this system.
        """
        if not 0 <= coupling_ratio <= 1:
            raise DomainError(f"coupling_ratio must lie in [0, 1], got {coupling_ratio}")
        if not gamma_star_MHz >= 0:
            raise DomainError(f"gamma_star_MHz must be non-negative, got {gamma_star_MHz}")
        cavity = self.cavity.model_copy(
            update={"coupling_ratio": coupling_ratio, "scatter_ratio": 1.0 - coupling_ratio}
        )
        emitter = self.emitter.model_copy(update={"gamma_star_MHz": gamma_star_MHz})
        return self.model_copy(update={"cavity": cavity, "emitter": emitter})


class ChannelRecord(BaseModel):
    """One characterized microchiplet channel as reported in the device summary."""

    channel: str  # e.g. "ch4"
    zpl_nm: float = Field(gt=0)
    cavity_nm: float = Field(gt=0)  # cavity resonance before tuning
    tau_on_ns: float = Field(gt=0)
    tau_off_ns: float = Field(gt=0)
    quality_factor: float | None = Field(default=None, gt=0)
    reported_purcell: float | None = None
    reported_beta: float | None = None
    reported_lifetime_ratio: float | None = None

    model_config = {"frozen": True, "populate_by_name": True}

    @property
    def lifetime_ratio(self) -> float:
        """τ_off/τ_on."""
        return self.tau_off_ns / self.tau_on_ns
