"""Multiplicative optical-loss chains with per-subsystem subtotals."""

import logging
import math

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models.budget import (
    ChainReport,
    EfficiencyChain,
    EfficiencyStage,
    StageContribution,
)

logger = logging.getLogger(__name__)


def db_to_efficiency(loss_db: float) -> float:
    """Fractional efficiency of a loss in dB: 10^(−loss/10).

    Example:
        >>> round(db_to_efficiency(0.5), 3)
        0.891
    """
    if not loss_db >= 0:
        raise DomainError(f"Loss must be non-negative, got {loss_db} dB")
    return 10.0 ** (-loss_db / 10.0)


def efficiency_to_db(efficiency: float) -> float:
    """Loss in dB of a fractional efficiency (inf for 0)."""
    if not 0 <= efficiency <= 1:
        raise DomainError(f"Efficiency must lie in [0, 1], got {efficiency}")
    if efficiency == 0:
        return math.inf
    return -10.0 * math.log10(efficiency)


def stage_from_db(
    name: str,
    loss_db: float,
    count: int = 1,
    subsystem: str | None = None,
    device_coupling: bool = False,
) -> EfficiencyStage:
    """Stage declared by its loss in dB."""
    return EfficiencyStage(
        name=name,
        value=db_to_efficiency(loss_db),
        count=count,
        subsystem=subsystem,
        device_coupling=device_coupling,
    )


def _product(values: list[float]) -> float:
    # sorted so the float product does not depend on stage order
    return math.prod(sorted(values))


def chain_efficiency(chain: EfficiencyChain) -> ChainReport:
    """Subtotal per subsystem marker and the chain total.

    Stages without a marker count toward the total only. An empty chain has
    total 1.
    """
    subtotals = {
        marker: _product([s.contribution for s in chain.stages if s.subsystem == marker])
        for marker in chain.markers
    }
    total = _product([s.contribution for s in chain.stages])
    stages = [
        StageContribution(
            name=s.name,
            value=s.value,
            count=s.count,
            subsystem=s.subsystem,
            device_coupling=s.device_coupling,
            contribution=s.contribution,
            loss_dB=efficiency_to_db(s.contribution),
        )
        for s in chain.stages
    ]
    for marker, reference in chain.reference.items():
        if marker in subtotals and reference > 0:
            deviation = subtotals[marker] / reference - 1.0
            logger.debug(
                f"{chain.name} ({marker}): {subtotals[marker]:.4g} vs reference "
                f"{reference:.4g} ({deviation:+.1%})"
            )
    return ChainReport(
        chain=chain.name,
        subtotals=subtotals,
        total=total,
        stages=stages,
        reference=dict(chain.reference),
    )


def overall_detection(chain: EfficiencyChain, detector_efficiency: float) -> ChainReport:
    """Chain report with the detector efficiency folded into ``overall``."""
    if not 0 <= detector_efficiency <= 1:
        raise DomainError(f"Detector efficiency must lie in [0, 1], got {detector_efficiency}")
    report = chain_efficiency(chain)
    report.detector_efficiency = detector_efficiency
    report.overall = report.total * detector_efficiency
    return report


def detection_efficiency(
    chain: EfficiencyChain,
    detector_efficiency: float,
    include_device_coupling: bool = False,
) -> float:
    """η_det-like figure: chain total times detector efficiency.

    Device-coupling stages (κ_wg/κ) are left out unless requested, matching
    efficiencies quoted "without accounting for κ_wg/κ".
    """
    if not include_device_coupling:
        chain = chain.without_device_coupling()
    return overall_detection(chain, detector_efficiency).overall or 0.0
