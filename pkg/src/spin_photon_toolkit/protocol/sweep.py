"""Fidelity and success-probability maps over (κ_wg/κ, γ*)."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from spin_photon_toolkit.errors import DomainError, SweepCellError
from spin_photon_toolkit.models.device import SpinCavitySystem
from spin_photon_toolkit.models.protocol import (
    EfficiencyPair,
    ProtocolConfig,
    SweepGrid,
    SweepMarker,
    SweepSettings,
)
from spin_photon_toolkit.protocol.transfer import evaluate_point

logger = logging.getLogger(__name__)


@dataclass
class MarkerResult:
    """Exact evaluation at a labelled operating point."""

    label: str
    coupling_ratio: float
    gamma_star_MHz: float
    fidelity: float
    success_probability: float

    def to_dict(self) -> dict:
        data = asdict(self)
        return {
            "label": data["label"],
            "kappa_wg_over_kappa_dimless": data["coupling_ratio"],
            "gamma_star_MHz": data["gamma_star_MHz"],
            "fidelity_dimless": data["fidelity"],
            "success_probability_dimless": data["success_probability"],
        }


def _check_axis(name: str, axis: np.ndarray) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size == 0:
        raise DomainError(f"{name} axis must be a non-empty 1-D array")
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise DomainError(f"{name} axis must be strictly increasing")
    return axis


def _cell(
    template: SpinCavitySystem,
    config: ProtocolConfig,
    efficiencies: EfficiencyPair,
    coupling_ratio: float,
    gamma_star_MHz: float,
) -> tuple[float, float]:
    try:
        system = template.with_operating_point(coupling_ratio, gamma_star_MHz)
        return evaluate_point(system, config, efficiencies)
    except Exception as e:
        raise SweepCellError(coupling_ratio, gamma_star_MHz, e) from e


def sweep_map(
    template: SpinCavitySystem,
    config: ProtocolConfig,
    kappa_ratios: np.ndarray,
    gamma_star_MHz: np.ndarray,
    efficiencies: EfficiencyPair | None = None,
    workers: int | None = None,
) -> SweepGrid:
    """Evaluate fidelity and success probability on every grid cell.

    Each cell copies the template with κ_wg/κ set, κ_s/κ = 1 − κ_wg/κ and the
    pure dephasing replaced; g is held at the template's value.

    Args:
        template: System supplying everything except the swept quantities
        config: Protocol settings
        kappa_ratios: κ_wg/κ axis, strictly increasing
        gamma_star_MHz: γ* axis in MHz, strictly increasing
        efficiencies: η_det, η_exc (defaults to EfficiencyPair())
        workers: Thread count over γ* rows; None or 1 evaluates serially

    Returns:
        SweepGrid with matrices indexed [γ* row, κ_wg/κ column]

    Raises:
        SweepCellError: If a cell fails, carrying its coordinates
    """
    kappa_ratios = _check_axis("kappa_wg/kappa", kappa_ratios)
    gamma_star_MHz = _check_axis("gamma_star", gamma_star_MHz)
    efficiencies = efficiencies or EfficiencyPair()

    def row(gamma: float) -> list[tuple[float, float]]:
        return [_cell(template, config, efficiencies, k, gamma) for k in kappa_ratios]

    logger.info(
        f"Sweeping {len(gamma_star_MHz)} x {len(kappa_ratios)} cells"
        + (f" on {workers} workers" if workers and workers > 1 else "")
    )
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, gamma_star_MHz))
    else:
        rows = [row(gamma) for gamma in gamma_star_MHz]

    values = np.array(rows, dtype=float)  # (n_gamma, n_kappa, 2)
    grid = SweepGrid(
        kappa_ratios=kappa_ratios,
        gamma_star_MHz=gamma_star_MHz,
        fidelity=values[:, :, 0],
        success_probability=values[:, :, 1],
    )
    logger.debug(f"Sweep done: F in [{grid.fidelity.min():.4f}, {grid.fidelity.max():.4f}]")
    return grid


def sweep_from_settings(
    template: SpinCavitySystem,
    config: ProtocolConfig,
    settings: SweepSettings,
    efficiencies: EfficiencyPair | None = None,
    workers: int | None = None,
) -> SweepGrid:
    """sweep_map on the log-spaced axes of a SweepSettings record."""
    return sweep_map(
        template,
        config,
        settings.kappa_axis(),
        settings.gamma_axis(),
        efficiencies=efficiencies,
        workers=workers,
    )


def evaluate_markers(
    template: SpinCavitySystem,
    config: ProtocolConfig,
    markers: list[SweepMarker],
    efficiencies: EfficiencyPair | None = None,
) -> list[MarkerResult]:
    """Evaluate labelled operating points exactly, off the grid."""
    efficiencies = efficiencies or EfficiencyPair()
    results = []
    for marker in markers:
        fidelity, p_succ = _cell(
            template, config, efficiencies, marker.coupling_ratio, marker.gamma_star_MHz
        )
        results.append(
            MarkerResult(
                label=marker.label,
                coupling_ratio=marker.coupling_ratio,
                gamma_star_MHz=marker.gamma_star_MHz,
                fidelity=fidelity,
                success_probability=p_succ,
            )
        )
    return results
