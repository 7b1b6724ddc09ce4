"""Input-output reflection coefficient of a single-sided cavity with a coupled emitter.

All frequencies enter as offsets from the cavity resonance ν_c in Hz, so the
reflection is evaluated without ever forming a ~10¹⁵ rad/s optical angular
frequency. For a probe offset Δp, emitter offset Δe and spectral-diffusion
sample δ:

    r = 1 − κ_wg / [ −i2πΔp + κ/2 + g²/( i2π(Δe + δ − Δp) + γ⊥ ) ]

The transmission port κ_t is taken as exactly zero.
"""

import numpy as np

from spin_photon_toolkit.errors import NumericalError
from spin_photon_toolkit.models.device import Spin, SpinCavitySystem, SpinUpModel
from spin_photon_toolkit.units import TWO_PI, AngularRate, Frequency, LinewidthFWHM


def coherence_rate(system: SpinCavitySystem, fold_dephasing: bool = False) -> AngularRate:
    """Optical coherence rate γ⊥ of the emitter.

    Args:
        system: Spin-cavity system
        fold_dephasing: Fold the pure dephasing into the rate,
            γ⊥ = π(Δν_rad + 2γ*), instead of leaving it to diffusion averaging

    Returns:
        γ⊥ = π·Δν_rad, or the folded rate
    """
    linewidth = system.emitter.radiative_linewidth.value
    if fold_dephasing:
        linewidth += 2.0 * system.emitter.gamma_star.value
    return LinewidthFWHM(linewidth).coherence_rate


def emitter_detuning_hz(system: SpinCavitySystem, spin: Spin) -> float | None:
    """Emitter offset from ν_c seen by a spin branch, or None if the branch is uncoupled."""
    offset = system.emitter_offset_hz
    if spin is Spin.UP:
        if system.spin_up_model is SpinUpModel.UNCOUPLED:
            return None
        offset += system.emitter.zeeman_split_GHz * 1e9
    return offset


def _reflection_core(
    probe_offset_hz: np.ndarray,
    kappa: float,
    kappa_wg: float,
    g: float,
    gamma_perp: float,
    emitter_offset_hz: np.ndarray | None,
) -> np.ndarray:
    """Broadcasting closed form. emitter_offset_hz=None drops the emitter term."""
    cavity = -1j * TWO_PI * probe_offset_hz + kappa / 2.0
    if emitter_offset_hz is not None and g > 0:
        emitter = 1j * TWO_PI * (emitter_offset_hz - probe_offset_hz) + gamma_perp
        cavity = cavity + g**2 / emitter
    return 1.0 - kappa_wg / cavity


def reflection_spectrum(
    system: SpinCavitySystem,
    spin: Spin,
    probe_offsets_hz: np.ndarray | float,
    delta_e_hz: np.ndarray | float = 0.0,
    gamma_perp: AngularRate | None = None,
) -> np.ndarray:
    """Vectorized reflection over probe offsets and/or diffusion samples.

    Args:
        system: Spin-cavity system
        spin: Spin branch
        probe_offsets_hz: Probe detuning ν − ν_c in Hz (array or scalar)
        delta_e_hz: Emitter-frequency offset(s) in Hz, broadcast against the probe axis
        gamma_perp: Coherence rate; defaults to π·Δν_rad

    Returns:
        Complex reflection coefficients with the broadcast shape

    Raises:
        NumericalError: If any coefficient is not finite
    """
    if gamma_perp is None:
        gamma_perp = coherence_rate(system)
    probe = np.asarray(probe_offsets_hz, dtype=float)
    detuning = emitter_detuning_hz(system, spin)
    delta = np.asarray(delta_e_hz, dtype=float)
    probe = np.broadcast_to(probe, np.broadcast_shapes(probe.shape, delta.shape))
    emitter = None if detuning is None else detuning + delta

    r = _reflection_core(
        probe,
        system.cavity.kappa.value,
        system.cavity.kappa_wg.value,
        system.g.value,
        gamma_perp.value,
        emitter,
    )
    if not np.all(np.isfinite(r)):
        raise NumericalError(f"Non-finite reflection coefficient for spin {spin.value}")
    return r


def reflection(
    probe: Frequency,
    system: SpinCavitySystem,
    spin: Spin,
    delta_e_hz: float = 0.0,
    gamma_perp: AngularRate | None = None,
) -> complex:
    """Reflection coefficient at an absolute probe frequency.

    Example:
        >>> from spin_photon_toolkit.models.device import CavityParams, EmitterParams
        >>> cavity = CavityParams(resonance_THz=484.0, quality_factor=2000, coupling_ratio=1.0)
        >>> emitter = EmitterParams(zpl_THz=484.0, tau_on_ns=1.0, tau_off_ns=5.0)
        >>> system = SpinCavitySystem(cavity=cavity, emitter=emitter, g_over_2pi_GHz=0.0)
        >>> reflection(cavity.resonance, system, Spin.DOWN).real
        -1.0
    """
    offset = probe.value - system.cavity.resonance.value
    return complex(reflection_spectrum(system, spin, offset, delta_e_hz, gamma_perp))
