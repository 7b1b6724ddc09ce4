"""Least-squares fitting of spectroscopy traces."""

from spin_photon_toolkit.fitting.engine import fit_curve
from spin_photon_toolkit.fitting.heuristics import guess_initial, jitter_sigma
from spin_photon_toolkit.fitting.lineshapes import (
    model_fano_lorentz,
    model_g2_dip,
    model_lifetime_emg,
    model_lorentzian,
    model_multi_lorentzian,
)
from spin_photon_toolkit.fitting.models import (
    LineshapeModel,
    ModelKind,
    get_model,
    list_models,
)
from spin_photon_toolkit.fitting.spectroscopy import (
    DephasingEstimate,
    G2Correction,
    G2Normalization,
    background_correct_g2,
    dephasing_from_linewidth,
    fit_cavity_resonance,
    fit_g2,
    fit_lifetime,
    fit_ple_multipeak,
    linewidth_ratio,
    normalize_g2,
)

__all__ = [
    "DephasingEstimate",
    "G2Correction",
    "G2Normalization",
    "LineshapeModel",
    "ModelKind",
    "background_correct_g2",
    "dephasing_from_linewidth",
    "fit_cavity_resonance",
    "fit_curve",
    "fit_g2",
    "fit_lifetime",
    "fit_ple_multipeak",
    "get_model",
    "guess_initial",
    "jitter_sigma",
    "linewidth_ratio",
    "list_models",
    "model_fano_lorentz",
    "model_g2_dip",
    "model_lifetime_emg",
    "model_lorentzian",
    "model_multi_lorentzian",
    "normalize_g2",
]
