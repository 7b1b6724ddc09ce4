"""Command-line interface."""

from spin_photon_toolkit.cli.main import main, run_command

__all__ = ["main", "run_command"]
