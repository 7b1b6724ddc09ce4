"""Trace ingestion and output writers."""

from spin_photon_toolkit.io.outputs import (
    OutputLayout,
    read_grid_csv,
    to_jsonable,
    write_grid_csv,
    write_report,
    write_sweep,
    write_table,
)
from spin_photon_toolkit.io.traces import AXIS_ALIASES, load_trace

__all__ = [
    "AXIS_ALIASES",
    "OutputLayout",
    "load_trace",
    "read_grid_csv",
    "to_jsonable",
    "write_grid_csv",
    "write_report",
    "write_sweep",
    "write_table",
]
