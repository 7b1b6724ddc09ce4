"""Unit conventions and conversions.

Internal rate arithmetic uses angular rates (rad/s). Everything a user reads or
writes is ordinary frequency (Hz, with THz/GHz/MHz helpers) or wavelength in nm.
Inverse lifetimes are angular rates; FWHM linewidths are ordinary frequencies,
related by Δν = (1/τ) / 2π.

Example:
    >>> from spin_photon_toolkit.units import wl_to_freq, q_to_kappa
    >>> nu = wl_to_freq(619.2425)
    >>> round(nu.thz, 4)
    484.1282
    >>> round(q_to_kappa(2280, nu).over_2pi_hz / 1e9, 1)
    212.3
"""

import math
from dataclasses import dataclass

from spin_photon_toolkit.errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
TWO_PI = 2.0 * math.pi

THZ = 1e12
GHZ = 1e9
MHZ = 1e6
NS = 1e-9


@dataclass(frozen=True)
class Frequency:
    """Ordinary frequency in Hz."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value <= 0:
            raise DomainError(f"Frequency must be positive and finite, got {self.value} Hz")

    @classmethod
    def from_thz(cls, thz: float) -> "Frequency":
        return cls(thz * THZ)

    @classmethod
    def from_ghz(cls, ghz: float) -> "Frequency":
        return cls(ghz * GHZ)

    @property
    def thz(self) -> float:
        return self.value / THZ

    @property
    def ghz(self) -> float:
        return self.value / GHZ

    @property
    def angular(self) -> "AngularRate":
        """Angular frequency ω = 2πν."""
        return AngularRate(TWO_PI * self.value)


@dataclass(frozen=True)
class AngularRate:
    """Angular rate in rad/s (κ, g, γ and inverse lifetimes)."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise DomainError(f"AngularRate must be non-negative and finite, got {self.value} rad/s")

    @classmethod
    def from_hz(cls, hz: float) -> "AngularRate":
        """Build from an ordinary frequency: 2π × hz."""
        return cls(TWO_PI * hz)

    @classmethod
    def from_ghz(cls, ghz: float) -> "AngularRate":
        return cls.from_hz(ghz * GHZ)

    @property
    def over_2pi_hz(self) -> float:
        """The rate divided by 2π, in Hz."""
        return self.value / TWO_PI

    @property
    def over_2pi_ghz(self) -> float:
        return self.over_2pi_hz / GHZ


@dataclass(frozen=True)
class LinewidthFWHM:
    """Full width at half maximum, ordinary Hz."""

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise DomainError(f"Linewidth must be non-negative and finite, got {self.value} Hz")

    @classmethod
    def from_mhz(cls, mhz: float) -> "LinewidthFWHM":
        return cls(mhz * MHZ)

    @property
    def mhz(self) -> float:
        return self.value / MHZ

    @property
    def coherence_rate(self) -> AngularRate:
        """Optical coherence decay rate γ⊥ = π·Δν of a Lorentzian line."""
        return AngularRate(math.pi * self.value)


def wl_to_freq(wavelength_nm: float) -> Frequency:
    """Convert a vacuum wavelength in nm to an ordinary frequency.

    Args:
        wavelength_nm: Wavelength in nm

    Returns:
        Frequency with ν = c/λ

    Raises:
        DomainError: If the wavelength is not positive
    """
    if not wavelength_nm > 0:
        raise DomainError(f"Wavelength must be positive, got {wavelength_nm} nm")
    return Frequency(SPEED_OF_LIGHT / (wavelength_nm * 1e-9))


def freq_to_wl(frequency: Frequency) -> float:
    """Convert an ordinary frequency to a vacuum wavelength in nm."""
    return SPEED_OF_LIGHT / frequency.value * 1e9


def q_to_kappa(quality_factor: float, resonance: Frequency) -> AngularRate:
    """Total cavity energy decay rate κ = 2πν_c/Q.

    Raises:
        DomainError: If Q is not positive
    """
    if not quality_factor > 0:
        raise DomainError(f"Quality factor must be positive, got {quality_factor}")
    return AngularRate(TWO_PI * resonance.value / quality_factor)


def lifetime_to_transform_limit(lifetime_ns: float) -> LinewidthFWHM:
    """Transform-limited FWHM Δν = 1/(2πτ) of a lifetime τ in ns.

    Raises:
        DomainError: If the lifetime is not positive
    """
    if not lifetime_ns > 0:
        raise DomainError(f"Lifetime must be positive, got {lifetime_ns} ns")
    return LinewidthFWHM(1.0 / (TWO_PI * lifetime_ns * NS))


def lifetime_to_rate(lifetime_ns: float) -> AngularRate:
    """Decay rate 1/τ (angular) of a lifetime τ in ns."""
    if not lifetime_ns > 0:
        raise DomainError(f"Lifetime must be positive, got {lifetime_ns} ns")
    return AngularRate(1.0 / (lifetime_ns * NS))
