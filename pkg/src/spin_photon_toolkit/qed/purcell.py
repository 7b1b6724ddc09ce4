"""Purcell calculus: lifetimes to enhancement, β, theoretical maximum, corrections."""

import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass

import numpy as np

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models.device import ChannelRecord

# Dipole projection for an SnV dipole along [111] in a [100]-cut cavity field.
# Back-solved from the published pair 216.2 -> 124.9; not derived from geometry.
PROJECTION_111_100 = 0.5777

# 3/(4π²)
_PURCELL_PREFACTOR = 3.0 / (4.0 * math.pi**2)


def purcell_from_lifetimes(
    tau_bulk_ns: float, xi: float, tau_on_ns: float, tau_off_ns: float
) -> float:
    """Purcell factor F_P = (τ_bulk/ξ)·(1/τ_on − 1/τ_off).

    Args:
        tau_bulk_ns: Lifetime of the emitter in bulk diamond
        xi: Product of quantum efficiency and Debye-Waller factor
        tau_on_ns: Lifetime with the cavity tuned onto the ZPL
        tau_off_ns: Lifetime with the cavity detuned

    Returns:
        Purcell factor (0 when the lifetimes are equal)

    Raises:
        DomainError: On non-positive lifetimes, ξ outside (0, 1] or τ_on > τ_off

    Example:
        >>> round(purcell_from_lifetimes(5.10, 0.456, 1.12, 5.89), 2)
        8.09
    """
    for label, value in (("tau_bulk", tau_bulk_ns), ("tau_on", tau_on_ns), ("tau_off", tau_off_ns)):
        if not value > 0:
            raise DomainError(f"{label} must be positive, got {value} ns")
    if not 0 < xi <= 1:
        raise DomainError(f"xi must lie in (0, 1], got {xi}")
    if tau_on_ns > tau_off_ns:
        raise DomainError(
            f"tau_on ({tau_on_ns} ns) exceeds tau_off ({tau_off_ns} ns); "
            "lifetime lengthening is not modeled"
        )
    return (tau_bulk_ns / xi) * (1.0 / tau_on_ns - 1.0 / tau_off_ns)


def purcell_from_ratio(tau_bulk_ns: float, xi: float, tau_off_ns: float, ratio: float) -> float:
    """Purcell factor from τ_off and the lifetime ratio τ_off/τ_on."""
    if not ratio >= 1:
        raise DomainError(f"Lifetime ratio tau_off/tau_on must be >= 1, got {ratio}")
    return purcell_from_lifetimes(tau_bulk_ns, xi, tau_off_ns / ratio, tau_off_ns)


def lifetimes_from_purcell(
    purcell: float, ratio: float, tau_bulk_ns: float, xi: float
) -> tuple[float, float]:
    """Invert the Purcell relation given the lifetime ratio.

    Returns:
        (tau_off_ns, tau_on_ns)
    """
    if not purcell > 0:
        raise DomainError(f"Purcell factor must be positive to invert, got {purcell}")
    if not ratio > 1:
        raise DomainError(f"Lifetime ratio must exceed 1 to invert, got {ratio}")
    if not 0 < xi <= 1:
        raise DomainError(f"xi must lie in (0, 1], got {xi}")
    tau_off = tau_bulk_ns * (ratio - 1.0) / (xi * purcell)
    return tau_off, tau_off / ratio


def beta_factor(purcell: float) -> float:
    """Cavity-mode emission probability β = F_P/(F_P + 1)."""
    if not purcell >= 0:
        raise DomainError(f"Purcell factor must be non-negative, got {purcell}")
    return purcell / (purcell + 1.0)


def purcell_max(quality_factor: float, mode_volume: float) -> float:
    """Theoretical maximum F_P,max = (3/4π²)·Q/V with V in (λ/n)³."""
    if not quality_factor > 0 or not mode_volume > 0:
        raise DomainError(
            f"Q and mode volume must be positive, got Q={quality_factor}, V={mode_volume}"
        )
    return _PURCELL_PREFACTOR * quality_factor / mode_volume


def dipole_projection(purcell_maximum: float, projection_factor: float = PROJECTION_111_100) -> float:
    """Scale a maximum Purcell factor by a dipole-orientation factor in [0, 1]."""
    if not 0 <= projection_factor <= 1:
        raise DomainError(f"Projection factor must lie in [0, 1], got {projection_factor}")
    return projection_factor * purcell_maximum


def detuning_correction(
    purcell_measured: float, quality_factor: float, emitter_nm: float, cavity_nm: float
) -> float:
    """Purcell factor at zero detuning from one measured at a detuning.

    Undoes the Lorentzian cavity falloff: F(0) = F·[1 + 4Q²(λ_e/λ_c − 1)²].
    """
    if not quality_factor > 0 or not emitter_nm > 0 or not cavity_nm > 0:
        raise DomainError("Q and wavelengths must be positive")
    detuning = emitter_nm / cavity_nm - 1.0
    return purcell_measured * (1.0 + 4.0 * quality_factor**2 * detuning**2)


def purcell_shortfall(purcell_limit: float, purcell_measured: float) -> float:
    """Ratio of the (projected) theoretical maximum to the measured Purcell factor."""
    if not purcell_measured > 0:
        raise DomainError(f"Measured Purcell factor must be positive, got {purcell_measured}")
    return purcell_limit / purcell_measured


@dataclass
class ChannelStatistics:
    """Cross-channel averages of measured figures of merit."""

    n_channels: int
    purcell_mean: float
    purcell_std: float
    beta_mean: float
    beta_std: float
    quality_factor_mean: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def channel_statistics(
    channels: Iterable[ChannelRecord], tau_bulk_ns: float = 5.10, xi: float = 0.456
) -> ChannelStatistics:
    """Mean and sample standard deviation of F_P, β and Q over channels."""
    records = list(channels)
    if not records:
        raise DomainError("channel_statistics needs at least one channel")
    purcell = np.array(
        [purcell_from_lifetimes(tau_bulk_ns, xi, c.tau_on_ns, c.tau_off_ns) for c in records]
    )
    beta = purcell / (purcell + 1.0)
    ddof = 1 if len(records) > 1 else 0
    qs = [c.quality_factor for c in records if c.quality_factor is not None]
    return ChannelStatistics(
        n_channels=len(records),
        purcell_mean=float(purcell.mean()),
        purcell_std=float(purcell.std(ddof=ddof)),
        beta_mean=float(beta.mean()),
        beta_std=float(beta.std(ddof=ddof)),
        quality_factor_mean=float(np.mean(qs)) if qs else None,
    )
