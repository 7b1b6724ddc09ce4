"""Domain records: pydantic models for inputs, dataclasses for computed results."""

from spin_photon_toolkit.models.budget import (
    ChainReport,
    EfficiencyChain,
    EfficiencyStage,
    StageContribution,
)
from spin_photon_toolkit.models.device import (
    CavityParams,
    ChannelRecord,
    EmitterParams,
    Spin,
    SpinCavitySystem,
    SpinUpModel,
)
from spin_photon_toolkit.models.protocol import (
    BranchNormalization,
    DephasingModel,
    EfficiencyPair,
    HeraldPolicy,
    InputStatePolicy,
    ProtocolConfig,
    SweepGrid,
    SweepMarker,
    SweepSettings,
)
from spin_photon_toolkit.models.report import Report, ReportBody, ReportMeta
from spin_photon_toolkit.models.spectra import AxisKind, FitOutcome, SpectrumTrace

__all__ = [
    # Device
    "CavityParams",
    "ChannelRecord",
    "EmitterParams",
    "Spin",
    "SpinCavitySystem",
    "SpinUpModel",
    # Protocol
    "BranchNormalization",
    "DephasingModel",
    "EfficiencyPair",
    "HeraldPolicy",
    "InputStatePolicy",
    "ProtocolConfig",
    "SweepGrid",
    "SweepMarker",
    "SweepSettings",
    # Spectra
    "AxisKind",
    "FitOutcome",
    "SpectrumTrace",
    # Budget
    "ChainReport",
    "EfficiencyChain",
    "EfficiencyStage",
    "StageContribution",
    # Report
    "Report",
    "ReportBody",
    "ReportMeta",
]
