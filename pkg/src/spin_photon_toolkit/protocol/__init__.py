"""Reflection-based photon-to-spin transfer and its parameter sweeps."""

from spin_photon_toolkit.protocol.quadrature import diffusion_nodes
from spin_photon_toolkit.protocol.sweep import (
    MarkerResult,
    evaluate_markers,
    sweep_from_settings,
    sweep_map,
)
from spin_photon_toolkit.protocol.transfer import (
    CARDINAL_STATES,
    BranchReflections,
    HeraldOutcome,
    StateTransfer,
    branch_reflections,
    evaluate_point,
    herald_contributions,
    heralded_spin_state,
    success_probability,
    target_state,
    transfer_density_matrices,
    transfer_fidelity,
)

__all__ = [
    "CARDINAL_STATES",
    "BranchReflections",
    "HeraldOutcome",
    "MarkerResult",
    "StateTransfer",
    "branch_reflections",
    "diffusion_nodes",
    "evaluate_markers",
    "evaluate_point",
    "herald_contributions",
    "heralded_spin_state",
    "success_probability",
    "sweep_from_settings",
    "sweep_map",
    "target_state",
    "transfer_density_matrices",
    "transfer_fidelity",
]
