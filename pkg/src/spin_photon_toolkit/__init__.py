"""
Spin-Photon Toolkit - modeling and analysis for cavity-coupled spin-photon interfaces

This package provides tools for diamond color centers in photonic cavities:

Cavity QED:
- Purcell factor and beta from lifetimes, F_P,max from Q and V
- Coherent coupling g and cooperativity
- Spin-dependent cavity reflection coefficients

State Transfer:
- Heralded photon-to-spin transfer fidelity and success probability
- Slow spectral-diffusion averaging or fast-dephasing folding
- (kappa_wg/kappa, gamma*) sweep maps with the optimal-coupling locus

Spectroscopy Fits:
- Fano-Lorentz cavity resonances, multi-peak PLE Lorentzians
- Lifetime histograms (exponential convolved with a Gaussian IRF)
- g2 antibunching dips with background correction

Efficiency Budgets:
- Multiplicative loss chains with per-subsystem subtotals

Example usage:
    >>> from spin_photon_toolkit import purcell_from_lifetimes, beta_factor
    >>> f = purcell_from_lifetimes(5.10, 0.456, 1.12, 5.89)
    >>> round(f, 2), round(beta_factor(f), 2)
    (8.09, 0.89)

Example usage (sweep):
    >>> from spin_photon_toolkit import resolve_config, sweep_from_settings
    >>> config = resolve_config(preset="paper-fig5")
    >>> grid = sweep_from_settings(config.system(), config.protocol, config.sweep)  # doctest: +SKIP
"""

__version__ = "0.1.0"

from spin_photon_toolkit.budget import chain_efficiency, db_to_efficiency, overall_detection
from spin_photon_toolkit.config import DeviceConfig, load_config, resolve_config
from spin_photon_toolkit.errors import (
    DomainError,
    NumericalError,
    RankDeficiencyError,
    SpinPhotonError,
    SweepCellError,
    TraceParseError,
)
from spin_photon_toolkit.fitting import fit_curve, get_model
from spin_photon_toolkit.io import load_trace
from spin_photon_toolkit.models import (
    CavityParams,
    EfficiencyChain,
    EfficiencyPair,
    EfficiencyStage,
    EmitterParams,
    FitOutcome,
    ProtocolConfig,
    SpectrumTrace,
    Spin,
    SpinCavitySystem,
    SweepGrid,
)
from spin_photon_toolkit.protocol import (
    success_probability,
    sweep_from_settings,
    sweep_map,
    transfer_fidelity,
)
from spin_photon_toolkit.qed import (
    beta_factor,
    cooperativity,
    coupling_g_from_enhanced_rate,
    purcell_from_lifetimes,
    purcell_max,
    reflection,
)

__all__ = [
    # Models
    "CavityParams",
    "EmitterParams",
    "SpinCavitySystem",
    "Spin",
    "ProtocolConfig",
    "EfficiencyPair",
    "SpectrumTrace",
    "FitOutcome",
    "SweepGrid",
    "EfficiencyStage",
    "EfficiencyChain",
    # Config
    "DeviceConfig",
    "load_config",
    "resolve_config",
    # Cavity QED
    "purcell_from_lifetimes",
    "beta_factor",
    "purcell_max",
    "coupling_g_from_enhanced_rate",
    "cooperativity",
    "reflection",
    # Protocol
    "transfer_fidelity",
    "success_probability",
    "sweep_map",
    "sweep_from_settings",
    # Fitting
    "fit_curve",
    "get_model",
    "load_trace",
    # Budget
    "chain_efficiency",
    "overall_detection",
    "db_to_efficiency",
    # Errors
    "SpinPhotonError",
    "DomainError",
    "TraceParseError",
    "NumericalError",
    "RankDeficiencyError",
    "SweepCellError",
]
