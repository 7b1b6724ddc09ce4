"""Machine-readable command report."""

import json
from typing import Any

from pydantic import BaseModel, Field


class ReportBody(BaseModel):
    """Deterministic part of a report: identical inputs give identical bytes."""

    command: str
    argv: list[str] = Field(default_factory=list)
    inputs: dict[str, Any] = Field(default_factory=dict)
    outputs: dict[str, Any] = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)
    tool_version: str
    deterministic: bool = True


class ReportMeta(BaseModel):
    """Run metadata kept outside the deterministic section."""

    generated_at: str | None = None
    artifacts: list[str] = Field(default_factory=list)


class Report(BaseModel):
    """Report written as report.json by every CLI command."""

    deterministic: ReportBody
    meta: ReportMeta = Field(default_factory=ReportMeta)

    def deterministic_json(self) -> str:
        """Canonical JSON of the deterministic section."""
        return json.dumps(
            self.deterministic.model_dump(mode="json"), indent=2, sort_keys=True, allow_nan=False
        )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True, allow_nan=False)
