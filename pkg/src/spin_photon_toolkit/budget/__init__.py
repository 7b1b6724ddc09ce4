"""Optical efficiency budgets."""

from spin_photon_toolkit.budget.chain import (
    chain_efficiency,
    db_to_efficiency,
    detection_efficiency,
    efficiency_to_db,
    overall_detection,
    stage_from_db,
)

__all__ = [
    "chain_efficiency",
    "db_to_efficiency",
    "detection_efficiency",
    "efficiency_to_db",
    "overall_detection",
    "stage_from_db",
]
