"""Output directory layout and report/grid writers."""

import dataclasses
import logging
import math
import re
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models.protocol import GRID_CORNER_LABEL, SweepGrid
from spin_photon_toolkit.models.report import Report

logger = logging.getLogger(__name__)

# File names: alphanumeric, underscore, hyphen, dot; no separators
VALID_FILENAME_PATTERN = re.compile(r"^[A-Za-z0-9_-][A-Za-z0-9_.-]*$")

FLOAT_FORMAT = "%.10g"


class OutputLayout:
    """Manages the files a command writes.

    Default structure:
        <out_dir>/
        ├── report.json
        ├── fidelity.csv      (sweep)
        ├── psucc.csv         (sweep)
        ├── reflection.csv    (reflection)
        └── table1.csv        (report-table1)
    """

    REPORT = "report.json"
    FIDELITY = "fidelity.csv"
    SUCCESS_PROBABILITY = "psucc.csv"
    REFLECTION = "reflection.csv"
    TABLE1 = "table1.csv"

    def __init__(self, out_dir: str | Path):
        """Initialize the layout, creating the directory.

        Args:
            out_dir: Root output directory
        """
        self.out_dir = Path(out_dir).resolve()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[str] = []

    def _validate_filename(self, name: str) -> str:
        if not name or not VALID_FILENAME_PATTERN.match(name) or ".." in name:
            raise DomainError(
                f"Invalid output file name '{name}': must contain only alphanumeric "
                "characters, underscores, hyphens and dots"
            )
        return name

    def path(self, name: str) -> Path:
        """Path of an output file inside the directory.

        Raises:
            DomainError: If the name could escape the directory
        """
        path = (self.out_dir / self._validate_filename(name)).resolve()
        if path.parent != self.out_dir:
            raise DomainError(f"Path traversal detected: {name}")
        return path

    def record(self, name: str) -> Path:
        """Path of a file about to be written; remembered as an artifact."""
        path = self.path(name)
        if name not in self.written:
            self.written.append(name)
        return path


def to_jsonable(value: Any) -> Any:
    """Convert results (dataclasses with to_dict, pydantic models, numpy) to JSON types.

    Non-finite floats become None so reports stay strict JSON.
    """
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="json"))
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return to_jsonable(dataclasses.asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, complex):
        return to_jsonable({"real": value.real, "imag": value.imag})
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def write_report(report: Report, layout: OutputLayout) -> Path:
    """Write report.json (sorted keys, two-space indent)."""
    path = layout.record(OutputLayout.REPORT)
    report.meta.artifacts = list(layout.written)
    path.write_text(report.to_json() + "\n")
    logger.info(f"Wrote {path}")
    return path


def _format_axis(values: np.ndarray) -> list[str]:
    return [FLOAT_FORMAT % v for v in values]


def write_grid_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write a matrix with the κ_wg/κ axis as header row and γ* as first column."""
    frame = frame.copy()
    frame.columns = _format_axis(np.asarray(frame.columns, dtype=float))
    frame.index = pd.Index(_format_axis(np.asarray(frame.index, dtype=float)))
    frame.to_csv(path, index_label=GRID_CORNER_LABEL, float_format=FLOAT_FORMAT)
    return path


def write_sweep(grid: SweepGrid, layout: OutputLayout) -> tuple[Path, Path]:
    """Write fidelity.csv and psucc.csv."""
    fidelity, p_succ = grid.to_frames()
    paths = (
        write_grid_csv(fidelity, layout.record(OutputLayout.FIDELITY)),
        write_grid_csv(p_succ, layout.record(OutputLayout.SUCCESS_PROBABILITY)),
    )
    logger.info(f"Wrote {paths[0].name} and {paths[1].name} to {layout.out_dir}")
    return paths


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    """Write a plain table without the index."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_grid_csv(path: str | Path) -> pd.DataFrame:
    """Read a grid CSV back into a float-labelled DataFrame."""
    frame = pd.read_csv(path, index_col=0)
    frame.columns = frame.columns.astype(float)
    frame.index = frame.index.astype(float)
    return frame
