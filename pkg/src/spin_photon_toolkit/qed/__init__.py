"""Emitter-cavity physics: Purcell calculus, coupling strength and reflection."""

from spin_photon_toolkit.qed.coupling import cooperativity, coupling_g_from_enhanced_rate
from spin_photon_toolkit.qed.purcell import (
    PROJECTION_111_100,
    ChannelStatistics,
    beta_factor,
    channel_statistics,
    detuning_correction,
    dipole_projection,
    lifetimes_from_purcell,
    purcell_from_lifetimes,
    purcell_from_ratio,
    purcell_max,
    purcell_shortfall,
)
from spin_photon_toolkit.qed.reflection import (
    coherence_rate,
    emitter_detuning_hz,
    reflection,
    reflection_spectrum,
)

__all__ = [
    "PROJECTION_111_100",
    "ChannelStatistics",
    "beta_factor",
    "channel_statistics",
    "coherence_rate",
    "cooperativity",
    "coupling_g_from_enhanced_rate",
    "detuning_correction",
    "dipole_projection",
    "emitter_detuning_hz",
    "lifetimes_from_purcell",
    "purcell_from_lifetimes",
    "purcell_from_ratio",
    "purcell_max",
    "purcell_shortfall",
    "reflection",
    "reflection_spectrum",
]
