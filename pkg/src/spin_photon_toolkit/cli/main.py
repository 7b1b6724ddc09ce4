"""
Unified CLI for spin-photon-toolkit

Command-line interface for cavity-QED figures of merit, state-transfer maps,
spectroscopy fits and efficiency budgets.

Usage:
    spinphoton purcell --tau-on 1.12 --tau-off 5.89        # Purcell factor and beta
    spinphoton sweep --preset paper-fig5 --out ./fig5      # Fidelity / p_succ maps
    spinphoton fit --model g2_dip --trace g2.csv           # Fit a measured trace
    spinphoton budget --preset paper-blue-star             # Collection efficiency
    spinphoton reflection --preset paper-red-star          # Reflection spectra
    spinphoton report-table1                               # Channel summary table
    spinphoton presets                                     # List bundled presets

Exit codes:
    0   success
    1   unexpected error
    2   validation error (bad input, config or trace file)
    3   numerical failure
    64  usage error (unknown flag or subcommand)
"""

import argparse
import logging
import os
import sys
from collections.abc import Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

from pydantic import ValidationError

from spin_photon_toolkit import __version__
from spin_photon_toolkit.errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_USAGE = 64

LOG_LEVEL_ENV = "SPINPHOTON_LOG_LEVEL"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

# Flags that change where or how fast results are produced, not what they are
_EXECUTION_FLAGS = {"--out", "-o", "--workers"}
_EXECUTION_SWITCHES = {"-v", "--verbose", "--json"}


class UsageError(Exception):
    """Unknown flag, subcommand or malformed argument."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class CommandResult:
    """What a command contributes to the report."""

    inputs: dict[str, Any] = field(default_factory=dict)
    outputs: dict[str, Any] = field(default_factory=dict)


class _WarningCollector(logging.Handler):
    """Collects package warnings so they land in the report."""

    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord):
        self.messages.append(record.getMessage())


class _RootRelay(logging.Handler):
    """Hands package records at or above its level to the root handlers."""

    def emit(self, record: logging.LogRecord):
        logging.getLogger().handle(record)


@contextmanager
def _collect_warnings():
    """Collect package warnings whatever the configured log level.

    When the root level is above WARNING the package logger is held at WARNING
    and stops propagating; a relay passes on only what the root level allows.
    """
    collector = _WarningCollector()
    package_logger = logging.getLogger("spin_photon_toolkit")
    saved_level, saved_propagate = package_logger.level, package_logger.propagate
    relay = None
    threshold = package_logger.getEffectiveLevel()
    if threshold > logging.WARNING:
        relay = _RootRelay(level=threshold)
        package_logger.setLevel(logging.WARNING)
        package_logger.propagate = False
        package_logger.addHandler(relay)
    package_logger.addHandler(collector)
    try:
        yield collector
    finally:
        package_logger.removeHandler(collector)
        if relay is not None:
            package_logger.removeHandler(relay)
        package_logger.setLevel(saved_level)
        package_logger.propagate = saved_propagate


def _configure_logging(verbose: bool):
    name = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    level = logging.DEBUG if verbose else logging.getLevelName(name)
    logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    if not isinstance(level, int):
        logger.warning(f"Unknown {LOG_LEVEL_ENV}={name!r}, using INFO")
        level = logging.INFO
    logging.getLogger().setLevel(level)


def _canonical_argv(argv: Sequence[str]) -> list[str]:
    canonical = []
    skip_value = False
    for token in argv:
        if skip_value:
            skip_value = False
            continue
        flag = token.split("=", 1)[0]
        if flag in _EXECUTION_FLAGS:
            skip_value = "=" not in token
            continue
        if token in _EXECUTION_SWITCHES:
            continue
        canonical.append(token)
    return canonical


def _resolve(args, overrides: dict[str, Any] | None = None):
    from spin_photon_toolkit.config import resolve_config

    return resolve_config(preset=args.preset, path=args.config, overrides=overrides)


def _quiet(args) -> bool:
    return bool(getattr(args, "json", False))


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def cmd_purcell(args, layout) -> CommandResult:
    """Purcell factor, beta and coupling figures."""
    from spin_photon_toolkit.qed import (
        beta_factor,
        cooperativity,
        dipole_projection,
        purcell_from_lifetimes,
        purcell_max,
    )
    from spin_photon_toolkit.units import lifetime_to_rate, lifetime_to_transform_limit

    outputs: dict[str, Any] = {}
    if args.tau_on is not None or args.tau_off is not None:
        if args.tau_on is None or args.tau_off is None:
            raise DomainError("--tau-on and --tau-off must be given together")
        tau_on, tau_off = args.tau_on, args.tau_off
        tau_bulk, xi = args.tau_bulk, args.xi
        quality_factor, mode_volume = args.q, args.mode_volume
        inputs = {
            "tau_on_ns": tau_on,
            "tau_off_ns": tau_off,
            "tau_bulk_ns": tau_bulk,
            "xi_dimless": xi,
            "quality_factor_dimless": quality_factor,
            "mode_volume_dimless": mode_volume,
        }
        system = None
    else:
        config = _resolve(args)
        system = config.system()
        emitter, cavity = config.emitter, config.cavity
        tau_on, tau_off = emitter.tau_on_ns, emitter.tau_off_ns
        tau_bulk, xi = emitter.tau_bulk_ns, emitter.xi
        quality_factor, mode_volume = cavity.quality_factor, cavity.mode_volume
        inputs = config.model_dump(mode="json")

    purcell = purcell_from_lifetimes(tau_bulk, xi, tau_on, tau_off)
    outputs["purcell_dimless"] = purcell
    outputs["beta_dimless"] = beta_factor(purcell)
    outputs["lifetime_ratio_dimless"] = tau_off / tau_on
    outputs["transform_limit_MHz"] = lifetime_to_transform_limit(tau_off).mhz
    if quality_factor is not None:
        limit = purcell_max(quality_factor, mode_volume)
        outputs["purcell_max_dimless"] = limit
        outputs["purcell_max_projected_dimless"] = dipole_projection(limit)
    if system is not None:
        kappa = system.cavity.kappa
        outputs["g_over_2pi_GHz"] = system.g_over_2pi_GHz
        outputs["kappa_over_2pi_GHz"] = kappa.over_2pi_hz / 1e9
        outputs["cooperativity_dimless"] = cooperativity(system.g, kappa, lifetime_to_rate(tau_off))

    if not _quiet(args):
        print(f"\n{'=' * 50}")
        print("PURCELL ENHANCEMENT")
        print(f"{'=' * 50}")
        print(f"tau_on / tau_off:   {tau_on:.4g} / {tau_off:.4g} ns")
        print(f"Purcell factor:     {outputs['purcell_dimless']:.4g}")
        print(f"beta:               {outputs['beta_dimless']:.4g}")
        print(f"Transform limit:    {outputs['transform_limit_MHz']:.4g} MHz")
        if "purcell_max_dimless" in outputs:
            print(f"F_P,max:            {outputs['purcell_max_dimless']:.4g}")
            print(f"F_P,max projected:  {outputs['purcell_max_projected_dimless']:.4g}")
        if "g_over_2pi_GHz" in outputs:
            print(f"g/2pi:              {outputs['g_over_2pi_GHz']:.4g} GHz")
            print(f"kappa/2pi:          {outputs['kappa_over_2pi_GHz']:.4g} GHz")
            print(f"Cooperativity:      {outputs['cooperativity_dimless']:.4g}")
    return CommandResult(inputs, outputs)


def cmd_fit(args, layout) -> CommandResult:
    """Fit a measured trace."""
    from spin_photon_toolkit.fitting import (
        ModelKind,
        background_correct_g2,
        dephasing_from_linewidth,
        fit_cavity_resonance,
        fit_curve,
        fit_g2,
        fit_lifetime,
        fit_ple_multipeak,
        get_model,
        guess_initial,
    )
    from spin_photon_toolkit.io import load_trace
    from spin_photon_toolkit.units import LinewidthFWHM

    kind = ModelKind(args.model)
    trace = load_trace(args.trace, axis=args.axis, allow_unsorted=args.allow_unsorted)

    if kind is ModelKind.FANO_LORENTZ:
        outcome = fit_cavity_resonance(trace, args.eta)
    elif kind is ModelKind.LORENTZIAN_MULTI:
        outcome = fit_ple_multipeak(trace, args.n_peaks)
    elif kind is ModelKind.LIFETIME_EMG:
        outcome = fit_lifetime(trace, irf_sigma_ns=args.irf_sigma_ns, jitter_fwhm_ps=args.jitter_ps)
    elif kind is ModelKind.G2_DIP:
        outcome = fit_g2(trace, sigma_jitter_ns=args.sigma_jitter_ns, normalize=args.normalize)
    else:
        model = get_model(kind)
        outcome = fit_curve(model, trace, guess_initial(model, trace))

    outputs: dict[str, Any] = {"fit": outcome.to_dict()}
    if kind is ModelKind.G2_DIP and args.signal_cps is not None:
        correction = background_correct_g2(
            outcome.derived["g2_0"], args.signal_cps, args.background_cps
        )
        outputs["background_correction"] = correction.to_dict()
    if kind is ModelKind.LORENTZIAN_MULTI and args.tau_off is not None:
        outputs["dephasing"] = [
            dephasing_from_linewidth(
                LinewidthFWHM.from_mhz(outcome.derived[f"linewidth_{i}"]), args.tau_off
            ).to_dict()
            for i in range(1, args.n_peaks + 1)
        ]

    inputs = {
        "model": kind.value,
        "trace_file": os.path.basename(args.trace),
        "axis": trace.axis.value,
        "n_samples": len(trace),
        "eta_dimless": args.eta if kind is ModelKind.FANO_LORENTZ else None,
        "n_peaks": args.n_peaks if kind is ModelKind.LORENTZIAN_MULTI else None,
    }

    if not _quiet(args):
        outcome.print_report()
        if "background_correction" in outputs:
            corrected = outputs["background_correction"]["g2_0_corrected_dimless"]
            print(f"g2(0) background-corrected: {corrected:.4g}")
        for i, estimate in enumerate(outputs.get("dephasing", []), start=1):
            print(f"peak {i}: gamma* = {estimate['gamma_star_MHz']:.4g} MHz")
    return CommandResult(inputs, outputs)


def cmd_sweep(args, layout) -> CommandResult:
    """Fidelity and success-probability maps."""
    from spin_photon_toolkit.io import write_sweep
    from spin_photon_toolkit.protocol import evaluate_markers, sweep_from_settings

    overrides: dict[str, Any] = {}
    if args.n_kappa is not None:
        overrides.setdefault("sweep", {})["n_kappa"] = args.n_kappa
    if args.n_gamma is not None:
        overrides.setdefault("sweep", {})["n_gamma"] = args.n_gamma
    config = _resolve(args, overrides)
    system = config.system()

    grid = sweep_from_settings(
        system, config.protocol, config.sweep, config.efficiencies, workers=args.workers
    )
    markers = evaluate_markers(system, config.protocol, config.sweep.markers, config.efficiencies)
    if layout is not None:
        write_sweep(grid, layout)

    outputs = {"grid": grid.to_dict(), "markers": [m.to_dict() for m in markers]}

    if not _quiet(args):
        print(f"\n{'=' * 50}")
        print(f"SWEEP: {config.preset or args.config}")
        print(f"{'=' * 50}")
        print(f"Grid:        {len(grid.gamma_star_MHz)} x {len(grid.kappa_ratios)}")
        print(f"Fidelity:    {grid.fidelity.min():.4f} .. {grid.fidelity.max():.4f}")
        print(
            f"p_succ:      {grid.success_probability.min():.3e} .. "
            f"{grid.success_probability.max():.3e}"
        )
        for m in markers:
            print(
                f"{m.label:<12} kappa_wg/kappa={m.coupling_ratio:<7.4g} "
                f"gamma*={m.gamma_star_MHz:<7.4g} MHz  F={m.fidelity:.4f}  "
                f"p={m.success_probability:.3e}"
            )
    return CommandResult(config.model_dump(mode="json"), outputs)


def cmd_budget(args, layout) -> CommandResult:
    """Collection-efficiency budget."""
    from spin_photon_toolkit.budget import detection_efficiency, overall_detection
    from spin_photon_toolkit.data import get_chain

    chain = None
    detector = 0.65
    inputs: dict[str, Any] = {}
    if args.preset or args.config:
        config = _resolve(args)
        chain = config.chain
        detector = config.detector_efficiency
        inputs["preset"] = config.preset
    if args.chain:
        chain = get_chain(args.chain)
    if chain is None:
        raise DomainError("No efficiency chain: give --chain or a preset/config with a chain")
    if args.detector_efficiency is not None:
        detector = args.detector_efficiency

    report = overall_detection(chain, detector)
    deviation = {
        marker: report.subtotals[marker] / reference - 1.0
        for marker, reference in chain.reference.items()
        if marker in report.subtotals and reference > 0
    }
    for key, value in (("total", report.total), ("overall", report.overall)):
        if key in chain.reference and chain.reference[key] > 0:
            deviation[key] = value / chain.reference[key] - 1.0

    inputs.update({"chain": chain.model_dump(mode="json"), "detector_efficiency_dimless": detector})
    outputs = {
        "budget": report.to_dict(),
        "reference_deviation_dimless": deviation,
        "detection_efficiency_without_device_coupling_dimless": detection_efficiency(
            chain, detector
        ),
    }

    if not _quiet(args):
        report.print_report()
        for key, value in deviation.items():
            print(f"deviation from published ({key}): {value:+.1%}")
    return CommandResult(inputs, outputs)


def cmd_reflection(args, layout) -> CommandResult:
    """Spin-dependent reflection spectra."""
    import numpy as np
    import pandas as pd

    from spin_photon_toolkit.io import OutputLayout, write_table
    from spin_photon_toolkit.models import DephasingModel, Spin
    from spin_photon_toolkit.qed import coherence_rate, cooperativity, reflection_spectrum
    from spin_photon_toolkit.units import AngularRate

    config = _resolve(args)
    system = config.system()
    fold = config.protocol.dephasing_model is DephasingModel.FAST_LINEWIDTH
    gamma_perp = coherence_rate(system, fold_dephasing=fold)
    kappa = system.cavity.kappa

    span_hz = (args.span_GHz * 1e9) if args.span_GHz is not None else kappa.over_2pi_hz
    if not span_hz > 0 or args.points < 2:
        raise DomainError("--span-GHz must be positive and --points at least 2")
    offsets = np.linspace(-span_hz / 2, span_hz / 2, args.points)
    delta = args.delta_e_MHz * 1e6

    columns: dict[str, np.ndarray] = {"probe_offset_GHz": offsets / 1e9}
    on_resonance: dict[str, Any] = {}
    for spin in (Spin.DOWN, Spin.UP):
        r = reflection_spectrum(system, spin, offsets, delta, gamma_perp)
        columns[f"r_{spin.value}_real"] = r.real
        columns[f"r_{spin.value}_imag"] = r.imag
        columns[f"r_{spin.value}_abs2"] = np.abs(r) ** 2
        r0 = complex(reflection_spectrum(system, spin, 0.0, delta, gamma_perp))
        on_resonance[spin.value] = {
            "real_dimless": r0.real,
            "imag_dimless": r0.imag,
            "reflectance_dimless": abs(r0) ** 2,
            "phase_rad": float(np.angle(r0)),
        }

    if layout is not None:
        write_table(pd.DataFrame(columns), layout.record(OutputLayout.REFLECTION))

    phase_contrast = on_resonance["down"]["phase_rad"] - on_resonance["up"]["phase_rad"]
    outputs = {
        "on_resonance": on_resonance,
        "phase_contrast_rad": float(np.angle(np.exp(1j * phase_contrast))),
        "g_over_2pi_GHz": system.g_over_2pi_GHz,
        "kappa_over_2pi_GHz": kappa.over_2pi_hz / 1e9,
        "gamma_perp_over_2pi_MHz": gamma_perp.over_2pi_hz / 1e6,
        "cooperativity_dimless": cooperativity(system.g, kappa, AngularRate(2.0 * gamma_perp.value)),
        "span_GHz": span_hz / 1e9,
        "points": args.points,
    }

    if not _quiet(args):
        print(f"\n{'=' * 50}")
        print(f"REFLECTION: {config.preset or args.config}")
        print(f"{'=' * 50}")
        print(f"g/2pi:          {outputs['g_over_2pi_GHz']:.4g} GHz")
        print(f"kappa/2pi:      {outputs['kappa_over_2pi_GHz']:.4g} GHz")
        print(f"gamma_perp/2pi: {outputs['gamma_perp_over_2pi_MHz']:.4g} MHz")
        for spin, values in on_resonance.items():
            print(
                f"r_{spin:<5} = {values['real_dimless']:+.4f} {values['imag_dimless']:+.4f}i"
                f"  |r|^2 = {values['reflectance_dimless']:.4f}"
            )
        print(f"phase contrast: {outputs['phase_contrast_rad']:+.4f} rad")
    return CommandResult(config.model_dump(mode="json"), outputs)


def cmd_report_table1(args, layout) -> CommandResult:
    """Channel summary: Purcell factor and beta from lifetimes."""
    import pandas as pd

    from spin_photon_toolkit.data import get_channels
    from spin_photon_toolkit.io import OutputLayout, write_table
    from spin_photon_toolkit.qed import (
        beta_factor,
        channel_statistics,
        detuning_correction,
        dipole_projection,
        purcell_from_lifetimes,
        purcell_max,
        purcell_shortfall,
    )

    channels = get_channels()
    rows = []
    for c in channels:
        purcell = purcell_from_lifetimes(args.tau_bulk, args.xi, c.tau_on_ns, c.tau_off_ns)
        rows.append(
            {
                "channel": c.channel,
                "zpl_nm": c.zpl_nm,
                "cavity_nm": c.cavity_nm,
                "tau_on_ns": c.tau_on_ns,
                "tau_off_ns": c.tau_off_ns,
                "lifetime_ratio_dimless": c.lifetime_ratio,
                "purcell_dimless": purcell,
                "beta_dimless": beta_factor(purcell),
                "reported_purcell_dimless": c.reported_purcell,
                "reported_beta_dimless": c.reported_beta,
            }
        )
    table = pd.DataFrame(rows)
    stats = channel_statistics(channels, tau_bulk_ns=args.tau_bulk, xi=args.xi)

    reference = next((c for c in channels if c.channel == args.reference_channel), None)
    if reference is None:
        raise DomainError(f"Unknown channel '{args.reference_channel}'")
    limit = purcell_max(args.q, args.mode_volume)
    projected = dipole_projection(limit)
    measured = purcell_from_lifetimes(
        args.tau_bulk, args.xi, reference.tau_on_ns, reference.tau_off_ns
    )
    corrected = detuning_correction(
        measured, args.q, reference.zpl_nm, reference.zpl_nm + args.detuning_nm
    )

    if layout is not None:
        write_table(table, layout.record(OutputLayout.TABLE1))

    outputs = {
        "channels": table.to_dict(orient="records"),
        "statistics": {
            "n_channels": stats.n_channels,
            "purcell_mean_dimless": stats.purcell_mean,
            "purcell_std_dimless": stats.purcell_std,
            "beta_mean_dimless": stats.beta_mean,
            "beta_std_dimless": stats.beta_std,
        },
        "purcell_max_dimless": limit,
        "purcell_max_projected_dimless": projected,
        "reference_channel": reference.channel,
        "purcell_detuning_corrected_dimless": corrected,
        "purcell_shortfall_dimless": purcell_shortfall(projected, corrected),
    }
    inputs = {
        "tau_bulk_ns": args.tau_bulk,
        "xi_dimless": args.xi,
        "quality_factor_dimless": args.q,
        "mode_volume_dimless": args.mode_volume,
        "detuning_nm": args.detuning_nm,
    }

    if not _quiet(args):
        print(f"\n{'=' * 50}")
        print("CHANNEL SUMMARY")
        print(f"{'=' * 50}")
        print(
            table[
                ["channel", "zpl_nm", "lifetime_ratio_dimless", "purcell_dimless", "beta_dimless"]
            ].to_string(index=False, float_format=lambda v: f"{v:.4g}")
        )
        print(f"\nmean F_P: {stats.purcell_mean:.3g} +/- {stats.purcell_std:.2g}")
        print(f"mean beta: {stats.beta_mean:.3g} +/- {stats.beta_std:.2g}")
        print(f"F_P,max (Q={args.q:g}, V={args.mode_volume:g}): {limit:.4g}")
        print(f"dipole-projected:     {projected:.4g}")
        print(f"{reference.channel} detuning-corrected: {corrected:.4g}")
        print(f"shortfall:            {outputs['purcell_shortfall_dimless']:.3g}x")
    return CommandResult(inputs, outputs)


def cmd_presets(args, layout) -> CommandResult:
    """List bundled presets and chains."""
    from spin_photon_toolkit.data import get_preset, list_chains, list_presets

    presets = {name: get_preset(name).get("description", "") for name in list_presets()}
    chains = list_chains()
    if not _quiet(args):
        print(f"\n{'=' * 50}")
        print("PRESETS")
        print(f"{'=' * 50}")
        for name, description in presets.items():
            print(f"  {name:<18} {description}")
        print("\nChains:")
        for name in chains:
            print(f"  {name}")
    return CommandResult({}, {"presets": presets, "chains": chains})


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------


def _add_device_args(parser: argparse.ArgumentParser):
    parser.add_argument("--preset", help="Bundled preset (see 'spinphoton presets')")
    parser.add_argument("--config", help="TOML or JSON device configuration file")


def _add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument("--out", "-o", help="Output directory for report.json and data files")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser for all subcommands."""
    from spin_photon_toolkit.fitting import list_models
    from spin_photon_toolkit.models import AxisKind

    parser = _Parser(
        prog="spinphoton",
        description="Spin-photon interface modeling: Purcell, transfer maps, fits, budgets",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Figures of merit
  spinphoton purcell --tau-on 1.12 --tau-off 5.89 --q 2280
  spinphoton purcell --preset paper-blue-star

  # State-transfer maps (writes fidelity.csv, psucc.csv, report.json)
  spinphoton sweep --preset paper-fig5 --out ./fig5 --workers 4

  # Fits
  spinphoton fit --model lifetime_emg --trace decay.csv --jitter-ps 550
  spinphoton fit --model g2_dip --trace g2.csv --signal-cps 4380 --background-cps 290

  # Budgets
  spinphoton budget --preset paper-improved
  spinphoton budget --chain paper-current --detector-efficiency 0.65

Log verbosity: SPINPHOTON_LOG_LEVEL=DEBUG|INFO|WARNING (or -v).
Exit codes: 0 ok, 1 unexpected, 2 validation, 3 numerical, 64 usage.
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # purcell command
    purcell_parser = subparsers.add_parser("purcell", help="Purcell factor, beta, g, cooperativity")
    _add_device_args(purcell_parser)
    purcell_parser.add_argument("--tau-on", type=float, help="Cavity-enhanced lifetime (ns)")
    purcell_parser.add_argument("--tau-off", type=float, help="Detuned lifetime (ns)")
    purcell_parser.add_argument(
        "--tau-bulk", type=float, default=5.10, help="Bulk lifetime (ns, default: 5.10)"
    )
    purcell_parser.add_argument(
        "--xi", type=float, default=0.456, help="QE x Debye-Waller (default: 0.456)"
    )
    purcell_parser.add_argument("--q", type=float, help="Quality factor for F_P,max")
    purcell_parser.add_argument(
        "--mode-volume", type=float, default=0.8, help="Mode volume in (lambda/n)^3 (default: 0.8)"
    )
    _add_output_args(purcell_parser)
    purcell_parser.set_defaults(func=cmd_purcell)

    # fit command
    fit_parser = subparsers.add_parser("fit", help="Fit a spectroscopy trace")
    fit_parser.add_argument("--model", required=True, choices=list_models(), help="Lineshape model")
    fit_parser.add_argument("--trace", required=True, help="Trace file (x, y[, sigma])")
    fit_parser.add_argument(
        "--axis", choices=[a.value for a in AxisKind], help="Axis kind (default: from header)"
    )
    fit_parser.add_argument(
        "--allow-unsorted", action="store_true", help="Sort rows by x instead of rejecting"
    )
    fit_parser.add_argument(
        "--eta", type=float, default=0.5, help="Fano mixing weight held fixed (default: 0.5)"
    )
    fit_parser.add_argument("--n-peaks", type=int, default=1, help="Lorentzians in a PLE fit")
    fit_parser.add_argument("--irf-sigma-ns", type=float, help="IRF Gaussian sigma (ns)")
    fit_parser.add_argument(
        "--jitter-ps", type=float, default=550.0, help="Detector jitter FWHM (ps, default: 550)"
    )
    fit_parser.add_argument(
        "--sigma-jitter-ns", type=float, default=0.0, help="g2 jitter sigma held in the fit (ns)"
    )
    fit_parser.add_argument("--normalize", action="store_true", help="Normalize raw g2 counts")
    fit_parser.add_argument("--signal-cps", type=float, help="Signal rate for g2 correction")
    fit_parser.add_argument(
        "--background-cps", type=float, default=0.0, help="Background rate for g2 correction"
    )
    fit_parser.add_argument("--tau-off", type=float, help="Lifetime (ns) for PLE dephasing")
    _add_output_args(fit_parser)
    fit_parser.set_defaults(func=cmd_fit)

    # sweep command
    sweep_parser = subparsers.add_parser(
        "sweep",
        help="Fidelity / success-probability maps",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="""\
Fidelity and success-probability maps over (kappa_wg/kappa, gamma*).

Dephasing and normalization come from the [protocol] table of the config.
With dephasing_model = "fast_linewidth" every cell is a single node, so under
the default branch_normalization = "equalized" the fidelity only sees the
relative phase of the two spin branches: 1 when opposite, 0.5 when equal. On
resonance the reflections are real and the map is a step whose position gamma*
shifts. Set branch_normalization = "physical" to see the amplitude loss from
fast dephasing in the fidelity.""",
    )
    _add_device_args(sweep_parser)
    sweep_parser.add_argument("--n-kappa", type=int, help="Points on the kappa_wg/kappa axis")
    sweep_parser.add_argument("--n-gamma", type=int, help="Points on the gamma* axis")
    sweep_parser.add_argument("--workers", type=int, help="Threads over gamma* rows")
    _add_output_args(sweep_parser)
    sweep_parser.set_defaults(func=cmd_sweep)

    # budget command
    budget_parser = subparsers.add_parser("budget", help="Collection-efficiency budget")
    _add_device_args(budget_parser)
    budget_parser.add_argument("--chain", help="Bundled chain name")
    budget_parser.add_argument("--detector-efficiency", type=float, help="Detector efficiency")
    _add_output_args(budget_parser)
    budget_parser.set_defaults(func=cmd_budget)

    # reflection command
    refl_parser = subparsers.add_parser("reflection", help="Reflection spectra of both spins")
    _add_device_args(refl_parser)
    refl_parser.add_argument("--span-GHz", type=float, help="Probe span (default: kappa/2pi)")
    refl_parser.add_argument("--points", type=int, default=801, help="Probe samples")
    refl_parser.add_argument(
        "--delta-e-MHz", type=float, default=0.0, help="Emitter offset (MHz)"
    )
    _add_output_args(refl_parser)
    refl_parser.set_defaults(func=cmd_reflection)

    # report-table1 command
    table_parser = subparsers.add_parser("report-table1", help="Channel summary table")
    table_parser.add_argument("--tau-bulk", type=float, default=5.10, help="Bulk lifetime (ns)")
    table_parser.add_argument("--xi", type=float, default=0.456, help="QE x Debye-Waller")
    table_parser.add_argument("--q", type=float, default=2280.0, help="Quality factor")
    table_parser.add_argument("--mode-volume", type=float, default=0.8, help="Mode volume")
    table_parser.add_argument(
        "--reference-channel", default="ch4", help="Channel for the shortfall (default: ch4)"
    )
    table_parser.add_argument(
        "--detuning-nm", type=float, default=0.14, help="Its emitter-cavity detuning (nm)"
    )
    _add_output_args(table_parser)
    table_parser.set_defaults(func=cmd_report_table1)

    # presets command
    presets_parser = subparsers.add_parser("presets", help="List bundled presets")
    _add_output_args(presets_parser)
    presets_parser.set_defaults(func=cmd_presets)

    return parser


def _build_report(command: str, argv: Sequence[str], result: CommandResult, warnings: list[str]):
    from spin_photon_toolkit.io import to_jsonable
    from spin_photon_toolkit.models import Report, ReportBody, ReportMeta

    body = ReportBody(
        command=command,
        argv=_canonical_argv(argv),
        inputs=to_jsonable(result.inputs),
        outputs=to_jsonable(result.outputs),
        warnings=warnings,
        tool_version=__version__,
    )
    meta = ReportMeta(generated_at=datetime.now(timezone.utc).isoformat(timespec="seconds"))
    return Report(deterministic=body, meta=meta)


def run_command(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help, --version
        return int(e.code or 0)

    _configure_logging(args.verbose)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    with _collect_warnings() as collector:
        return _run(args, argv, collector)


def _run(args, argv: list[str], collector: _WarningCollector) -> int:
    try:
        from spin_photon_toolkit.io import OutputLayout, write_report

        layout = OutputLayout(args.out) if getattr(args, "out", None) else None
        result = args.func(args, layout)
        report = _build_report(args.command, argv, result, collector.messages)
        if layout is not None:
            write_report(report, layout)
            if not args.json:
                print(f"\nSaved report to {layout.path(OutputLayout.REPORT)}")
        if args.json:
            print(report.to_json())
        return EXIT_OK
    except (DomainError, ValidationError, FileNotFoundError) as e:
        logger.error(f"Validation error: {e}")
        return EXIT_VALIDATION
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        return EXIT_NUMERICAL
    except KeyboardInterrupt:
        print("\nInterrupted")
        return EXIT_ERROR
    except Exception as e:
        logger.error(f"Error: {e}")
        if args.verbose:
            logger.exception("Traceback")
        return EXIT_ERROR


def main():
    """Main CLI entry point."""
    sys.exit(run_command())


if __name__ == "__main__":
    main()
