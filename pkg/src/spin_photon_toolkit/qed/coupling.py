"""Coherent coupling strength and cooperativity."""

import math

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.units import AngularRate


def coupling_g_from_enhanced_rate(enhanced_rate: AngularRate, kappa: AngularRate) -> AngularRate:
    """Coupling g = √(Γ_enh·κ)/2 in the bad-cavity regime.

    Args:
        enhanced_rate: Cavity-enhanced decay rate 1/τ_on
        kappa: Total cavity decay rate

    Example:
        >>> from spin_photon_toolkit.units import AngularRate
        >>> coupling_g_from_enhanced_rate(AngularRate(4.0), AngularRate(1.0)).value
        1.0
    """
    if not kappa.value > 0:
        raise DomainError(f"kappa must be positive, got {kappa.value} rad/s")
    return AngularRate(math.sqrt(enhanced_rate.value * kappa.value) / 2.0)


def cooperativity(g: AngularRate, kappa: AngularRate, gamma_total: AngularRate) -> float:
    """Cooperativity C = 4g²/(κ·γ_tot)."""
    if not kappa.value > 0 or not gamma_total.value > 0:
        raise DomainError(
            f"kappa and gamma_total must be positive, got {kappa.value} and {gamma_total.value}"
        )
    return 4.0 * g.value**2 / (kappa.value * gamma_total.value)
