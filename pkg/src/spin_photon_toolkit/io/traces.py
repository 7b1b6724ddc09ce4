"""Trace ingestion from two- or three-column text files."""

import csv
import logging
import math
from pathlib import Path

import numpy as np

from spin_photon_toolkit.errors import TraceParseError
from spin_photon_toolkit.models.spectra import AxisKind, SpectrumTrace

logger = logging.getLogger(__name__)

# Header names (lower-cased) recognized for the x column
AXIS_ALIASES = {
    "wavelength_nm": AxisKind.WAVELENGTH_NM,
    "lambda_nm": AxisKind.WAVELENGTH_NM,
    "wl_nm": AxisKind.WAVELENGTH_NM,
    "frequency_thz": AxisKind.FREQUENCY_THZ,
    "freq_thz": AxisKind.FREQUENCY_THZ,
    "nu_thz": AxisKind.FREQUENCY_THZ,
    "detuning_mhz": AxisKind.DETUNING_MHZ,
    "delta_mhz": AxisKind.DETUNING_MHZ,
    "time_ns": AxisKind.TIME_NS,
    "t_ns": AxisKind.TIME_NS,
    "delay_ns": AxisKind.DELAY_NS,
    "tau_ns": AxisKind.DELAY_NS,
}

DEFAULT_AXIS = AxisKind.WAVELENGTH_NM
COMMENT_PREFIX = "#"


def _split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return [field.strip() for field in next(csv.reader([line], delimiter=delimiter))]


def _delimiter(sample: str) -> str | None:
    for candidate in (",", ";", "\t"):
        if candidate in sample:
            return candidate
    return None  # whitespace


def _parse_float(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value


def _axis_from_header(name: str) -> AxisKind | None:
    return AXIS_ALIASES.get(name.strip().lower())


def load_trace(
    path: str | Path,
    axis: AxisKind | str | None = None,
    allow_unsorted: bool = False,
) -> SpectrumTrace:
    """Read a trace file into a validated SpectrumTrace.

    Columns are x, y and an optional σ_y. A first row that does not parse as
    numbers is a header; its first name tags the axis kind when no ``axis``
    hint is given (e.g. "t_ns,counts,sigma" gives a time axis). Lines
    starting with ``#`` and blank lines are skipped. Comma, semicolon, tab
    and whitespace delimiters are detected from the first data line.

    Args:
        path: Trace file
        axis: Axis hint, overrides the header
        allow_unsorted: Stable-sort rows by x instead of rejecting them

    Returns:
        SpectrumTrace with σ_y defaulted to √max(y, 1) for two columns

    Raises:
        TraceParseError: Malformed rows, non-increasing or duplicate x,
            each naming the offending line
    """
    path = Path(path)
    if not path.is_file():
        raise TraceParseError("file not found", path=path)

    with open(path, "r", newline="") as f:
        lines = [(number, line.strip()) for number, line in enumerate(f, start=1)]
    lines = [(n, s) for n, s in lines if s and not s.startswith(COMMENT_PREFIX)]
    if not lines:
        raise TraceParseError("no data rows", path=path)

    delimiter = _delimiter(lines[0][1])
    header_axis: AxisKind | None = None
    first_fields = _split(lines[0][1], delimiter)
    n_columns: int | None = None
    if _parse_float(first_fields[0]) is None:
        header_axis = _axis_from_header(first_fields[0])
        n_columns = len(first_fields)
        logger.debug(f"{path.name}: header {first_fields}")
        lines = lines[1:]

    rows: list[list[float]] = []
    line_numbers: list[int] = []
    for number, text in lines:
        fields = _split(text, delimiter)
        if len(fields) not in (2, 3):
            raise TraceParseError(f"expected 2 or 3 columns, got {len(fields)}", path, number)
        if n_columns is None:
            n_columns = len(fields)
        elif len(fields) != n_columns:
            raise TraceParseError(
                f"expected {n_columns} columns, got {len(fields)}", path, number
            )
        values = [_parse_float(field) for field in fields]
        if any(v is None or not math.isfinite(v) for v in values):
            raise TraceParseError(f"non-numeric or non-finite value in {fields}", path, number)
        rows.append(values)
        line_numbers.append(number)

    if not rows:
        raise TraceParseError("no data rows", path=path)

    data = np.array(rows, dtype=float)
    numbers = np.array(line_numbers)

    steps = np.diff(data[:, 0])
    if np.any(steps <= 0) and not allow_unsorted:
        bad = int(np.argmax(steps <= 0)) + 1
        kind = "duplicate" if steps[bad - 1] == 0 else "non-increasing"
        raise TraceParseError(f"{kind} x value {data[bad, 0]:g}", path, int(numbers[bad]))
    if allow_unsorted:
        order = np.argsort(data[:, 0], kind="stable")
        data = data[order]
        numbers = numbers[order]
        duplicates = np.flatnonzero(np.diff(data[:, 0]) == 0)
        if duplicates.size:
            bad = int(duplicates[0]) + 1
            raise TraceParseError(f"duplicate x value {data[bad, 0]:g}", path, int(numbers[bad]))

    if axis is not None:
        kind = AxisKind(axis)
    elif header_axis is not None:
        kind = header_axis
    else:
        kind = DEFAULT_AXIS
        logger.info(f"{path.name}: no axis hint or recognized header, assuming {kind.value}")

    sigma = data[:, 2] if data.shape[1] == 3 else None
    if sigma is not None and not np.all(sigma > 0):
        bad = int(np.argmax(~(sigma > 0)))
        raise TraceParseError("sigma must be positive", path, int(numbers[bad]))

    logger.debug(f"Loaded {len(data)} samples from {path.name} ({kind.value})")
    return SpectrumTrace(data[:, 0], data[:, 1], sigma, kind)
