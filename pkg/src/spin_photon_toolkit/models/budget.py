"""Models for optical efficiency chains."""

from dataclasses import asdict, dataclass, field
from typing import Any

from pydantic import BaseModel, Field, model_validator


class EfficiencyStage(BaseModel):
    """One multiplicative loss element, optionally repeated ``count`` times.

    A stage may be declared with ``loss_dB`` instead of ``value``; the loss is
    converted once at load and stored as the fractional value.
    """

    name: str
    value: float = Field(ge=0, le=1)
    count: int = Field(default=1, ge=0)
    subsystem: str | None = None  # subtotal marker, e.g. "i", "ii", "iii"
    device_coupling: bool = False  # κ_wg/κ-type stage, excluded from η_det

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="before")
    @classmethod
    def accept_loss_db(cls, data: Any) -> Any:
        if isinstance(data, dict) and "loss_dB" in data:
            from spin_photon_toolkit.budget.chain import db_to_efficiency

            data = dict(data)
            loss = data.pop("loss_dB")
            if "value" in data:
                raise ValueError(f"Stage {data.get('name')!r}: give either value or loss_dB")
            data["value"] = db_to_efficiency(float(loss))
        return data

    @property
    def contribution(self) -> float:
        """value ** count."""
        return self.value**self.count


class EfficiencyChain(BaseModel):
    """Ordered list of stages with subsystem subtotal markers."""

    name: str = "chain"
    stages: list[EfficiencyStage] = Field(default_factory=list)
    reference: dict[str, float] = Field(default_factory=dict)  # published subtotals

    model_config = {"frozen": True, "populate_by_name": True}

    @property
    def markers(self) -> list[str]:
        """Subsystem markers in order of first appearance."""
        seen: list[str] = []
        for stage in self.stages:
            if stage.subsystem is not None and stage.subsystem not in seen:
                seen.append(stage.subsystem)
        return seen

    def without_device_coupling(self) -> "EfficiencyChain":
        return self.model_copy(
            update={"stages": [s for s in self.stages if not s.device_coupling]}
        )


@dataclass
class StageContribution:
    """Per-stage line of a chain report."""

    name: str
    value: float
    count: int
    subsystem: str | None
    device_coupling: bool
    contribution: float
    loss_dB: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ChainReport:
    """Subtotals per subsystem marker and the chain total."""

    chain: str
    subtotals: dict[str, float]
    total: float
    stages: list[StageContribution] = field(default_factory=list)
    reference: dict[str, float] = field(default_factory=dict)
    detector_efficiency: float | None = None
    overall: float | None = None

    def to_dict(self) -> dict[str, Any]:
        result: dict[str, Any] = {
            "chain": self.chain,
            "subtotals_dimless": dict(self.subtotals),
            "total_dimless": self.total,
            "stages": [s.to_dict() for s in self.stages],
            "reference_dimless": dict(self.reference),
        }
        if self.overall is not None:
            result["detector_efficiency_dimless"] = self.detector_efficiency
            result["overall_detection_dimless"] = self.overall
        return result

    def print_report(self):
        """Print stage table and subtotals."""
        print(f"\n{'=' * 50}")
        print(f"EFFICIENCY CHAIN: {self.chain}")
        print(f"{'=' * 50}")
        print(f"{'Stage':<32} {'sub':>4} {'value':>10} {'x':>3} {'loss dB':>9}")
        for s in self.stages:
            flag = " *" if s.device_coupling else ""
            print(
                f"{s.name:<32} {s.subsystem or '-':>4} {s.value:>10.4g} {s.count:>3}"
                f" {s.loss_dB:>9.3f}{flag}"
            )
        print()
        for marker, value in self.subtotals.items():
            ref = self.reference.get(marker)
            ref_text = f"  (published {ref:.3g})" if ref is not None else ""
            print(f"subsystem ({marker}): {value:.4g}{ref_text}")
        print(f"total:          {self.total:.4g}")
        if self.overall is not None:
            print(f"with detector {self.detector_efficiency:.3g}: {self.overall:.4g}")
