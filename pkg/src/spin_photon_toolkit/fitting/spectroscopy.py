"""Measurement-level fits and corrections built on fit_curve."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.fitting.engine import fit_curve
from spin_photon_toolkit.fitting.heuristics import (
    guess_g2,
    guess_initial,
    guess_lifetime,
    guess_peaks,
    jitter_sigma,
)
from spin_photon_toolkit.fitting.models import (
    FanoLorentzModel,
    G2DipModel,
    LifetimeEMGModel,
    MultiLorentzianModel,
)
from spin_photon_toolkit.models.spectra import AxisKind, FitOutcome, SpectrumTrace
from spin_photon_toolkit.units import LinewidthFWHM, lifetime_to_transform_limit

logger = logging.getLogger(__name__)

DEFAULT_JITTER_FWHM_PS = 550.0
NORMALIZATION_WINDOW = 5.0  # multiples of τ0
OVERLAP_FRACTION = 1.0  # centers closer than this × the narrower FWHM are unresolved
UNEXPLAINED_SIGMA = 5.0  # 3-point mean of residual/σ above this marks a missed peak

# x-axis scale to MHz offsets for PLE fits
_MHZ_PER_UNIT = {AxisKind.FREQUENCY_THZ: 1e6, AxisKind.DETUNING_MHZ: 1.0}


def fit_cavity_resonance(
    trace: SpectrumTrace, eta: float, init: dict[str, float] | None = None
) -> FitOutcome:
    """Weighted Fano-Lorentz fit of a cavity resonance with the mixing weight held.

    With y0, A, η and q all free the lineshape has only three independent
    amplitude coefficients, so η is fixed at the supplied value.

    Args:
        trace: Reflection or transmission spectrum
        eta: Fano weight in [0, 1]
        init: Optional initial values; missing entries come from heuristics

    Returns:
        FitOutcome with derived quality_factor = center/fwhm
    """
    if not 0 <= eta <= 1:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    model = FanoLorentzModel()
    start = guess_initial(model, trace)
    start.update(init or {})
    start["eta"] = eta
    return fit_curve(model, trace, start, fixed=["eta"])


def _peak_order(outcome: FitOutcome, n_peaks: int) -> list[int]:
    centers = [outcome.params[f"center_{i}"] for i in range(1, n_peaks + 1)]
    return list(np.argsort(centers, kind="stable"))


def _worst_residual(
    model: MultiLorentzianModel, trace: SpectrumTrace, outcome: FitOutcome
) -> float:
    values = np.array([outcome.params[n] for n in model.param_names])
    z = (trace.y - model.evaluate(trace.x, values)) / trace.sigma
    smoothed = np.convolve(z, np.full(3, 1.0 / 3.0), mode="valid") if z.size >= 3 else z
    return float(np.max(np.abs(smoothed)))


def fit_ple_multipeak(
    trace: SpectrumTrace,
    n_peaks: int,
    init: Sequence[tuple[float, float, float]] | None = None,
    reference: float | None = None,
) -> FitOutcome:
    """Sum-of-Lorentzians fit of a PLE scan, peaks reported sorted by center.

    Frequency traces are fitted internally as MHz offsets from a reference
    (the first sample by default) so the solver never works at 10⁻⁷ relative
    resolution. Results are returned in the trace's units, with derived
    ``linewidth_i`` in MHz for frequency axes.

    Args:
        trace: PLE trace
        n_peaks: Number of Lorentzians
        init: Optional (center, fwhm, amplitude) per peak, in trace units
        reference: Offset origin in trace units

    Returns:
        FitOutcome; converged is False when peaks are degenerate
    """
    if n_peaks < 1:
        raise DomainError(f"n_peaks must be at least 1, got {n_peaks}")
    if init is not None and len(init) != n_peaks:
        raise DomainError(f"init has {len(init)} peaks, expected {n_peaks}")
    scale = _MHZ_PER_UNIT.get(trace.axis, 1.0)
    origin = float(trace.x[0]) if reference is None else float(reference)
    local = SpectrumTrace((trace.x - origin) * scale, trace.y, trace.sigma, trace.axis)

    model = MultiLorentzianModel(n_peaks)
    y0, guessed = guess_peaks(local, n_peaks)
    if init is not None:
        guessed = [((c - origin) * scale, w * scale, a) for c, w, a in init]
    start = {"y0": y0}
    for i, (center, fwhm, amplitude) in enumerate(sorted(guessed), start=1):
        start.update({f"center_{i}": center, f"fwhm_{i}": fwhm, f"amplitude_{i}": amplitude})

    raw = fit_curve(model, local, start, allow_rank_deficient=True)

    # Sort peaks and map back to trace units
    order = _peak_order(raw, n_peaks)
    permutation = [0]
    for k in order:
        permutation += [1 + 3 * k, 2 + 3 * k, 3 + 3 * k]
    unit_scale = np.ones(len(model.param_names))
    for k in range(n_peaks):
        unit_scale[1 + 3 * k] = 1.0 / scale
        unit_scale[2 + 3 * k] = 1.0 / scale
    values = np.array([raw.params[n] for n in model.param_names])[permutation] * unit_scale
    for k in range(n_peaks):
        values[1 + 3 * k] += origin
    covariance = raw.covariance[np.ix_(permutation, permutation)] * np.outer(unit_scale, unit_scale)

    names = model.param_names
    params = {n: float(v) for n, v in zip(names, values)}
    uncertainties = {n: float(np.sqrt(covariance[i, i])) for i, n in enumerate(names)}
    units = model.units(trace.axis)

    derived: dict[str, float] = {}
    derived_errors: dict[str, float] = {}
    linewidth_unit = "MHz" if trace.axis in _MHZ_PER_UNIT else trace.axis.unit
    for i in range(1, n_peaks + 1):
        to_linewidth = scale if trace.axis in _MHZ_PER_UNIT else 1.0
        derived[f"linewidth_{i}"] = params[f"fwhm_{i}"] * to_linewidth
        derived_errors[f"linewidth_{i}"] = uncertainties[f"fwhm_{i}"] * to_linewidth
        units[f"linewidth_{i}"] = linewidth_unit

    converged = raw.converged
    message = raw.message
    centers = sorted(params[f"center_{i}"] for i in range(1, n_peaks + 1))
    narrowest = min(params[f"fwhm_{i}"] for i in range(1, n_peaks + 1))
    if n_peaks > 1 and np.min(np.diff(centers)) < OVERLAP_FRACTION * narrowest:
        converged = False
        message = f"overlapping peaks are degenerate: {message}"
        logger.warning(f"PLE fit: peaks closer than {OVERLAP_FRACTION} x FWHM are degenerate")
    worst = _worst_residual(model, local, raw)
    if worst > UNEXPLAINED_SIGMA:
        converged = False
        message = f"residual feature of {worst:.3g} sigma left unexplained: {message}"
        logger.warning(f"PLE fit: residuals reach {worst:.3g} sigma, a peak is missing")

    return FitOutcome(
        model=raw.model,
        param_names=list(names),
        params=params,
        uncertainties=uncertainties,
        covariance=covariance,
        derived=derived,
        derived_uncertainties=derived_errors,
        reduced_chi2=raw.reduced_chi2,
        n_iter=raw.n_iter,
        converged=converged,
        fixed=raw.fixed,
        message=message,
        units=units,
    )


def fit_lifetime(
    trace: SpectrumTrace,
    irf_sigma_ns: float | None = None,
    jitter_fwhm_ps: float = DEFAULT_JITTER_FWHM_PS,
    init: dict[str, float] | None = None,
    reweight_iterations: int = 3,
) -> FitOutcome:
    """Exponentially modified Gaussian fit of a lifetime histogram.

    The IRF width is held, either as σ directly or from the detector jitter FWHM.
    Counts are refit with σ² = model so the estimate is the Poisson maximum likelihood.
    """
    sigma = jitter_sigma(jitter_fwhm_ps) if irf_sigma_ns is None else float(irf_sigma_ns)
    if not sigma >= 0:
        raise DomainError(f"IRF sigma must be non-negative, got {sigma} ns")
    start = guess_lifetime(trace)
    start.update(init or {})
    start["sigma"] = sigma
    logger.debug(f"Lifetime fit with IRF sigma {sigma:.4g} ns")
    return fit_curve(
        LifetimeEMGModel(),
        trace,
        start,
        fixed=["sigma"],
        reweight_iterations=reweight_iterations,
    )


@dataclass
class G2Normalization:
    """Normalized trace and the factor it was divided by."""

    trace: SpectrumTrace
    factor: float


def normalize_g2(trace: SpectrumTrace, tau0_init: float) -> G2Normalization:
    """Divide raw coincidences by their mean at |τ| > 5·τ0_init."""
    if not tau0_init > 0:
        raise DomainError(f"tau0_init must be positive, got {tau0_init}")
    mask = np.abs(trace.x) > NORMALIZATION_WINDOW * tau0_init
    if not np.any(mask):
        raise DomainError(
            f"No samples beyond |tau| > {NORMALIZATION_WINDOW * tau0_init:.3g} ns to normalize by"
        )
    factor = float(np.mean(trace.y[mask]))
    if not factor > 0:
        raise DomainError("g2 normalization window has non-positive mean")
    normalized = SpectrumTrace(trace.x, trace.y / factor, trace.sigma / factor, trace.axis)
    return G2Normalization(normalized, factor)


def fit_g2(
    trace: SpectrumTrace,
    sigma_jitter_ns: float = 0.0,
    normalize: bool = False,
    init: dict[str, float] | None = None,
) -> FitOutcome:
    """Antibunching-dip fit with the jitter width held.

    σ_jitter = 0 fits the bare dip (jitter corrected post hoc, if at all);
    a positive value convolves the model on the sample grid.
    """
    if not sigma_jitter_ns >= 0:
        raise DomainError(f"Jitter sigma must be non-negative, got {sigma_jitter_ns}")
    if normalize:
        # initial τ0 from a provisional normalization by the outermost samples
        provisional = SpectrumTrace(
            trace.x, trace.y / max(trace.y[[0, -1]].mean(), 1e-300), None, trace.axis
        )
        normalized = normalize_g2(trace, guess_g2(provisional)["tau0"])
        logger.info(f"g2 trace normalized by {normalized.factor:.6g}")
        trace = normalized.trace
    start = guess_g2(trace)
    start.update(init or {})
    start["sigma_jitter"] = sigma_jitter_ns
    return fit_curve(G2DipModel(), trace, start, fixed=["sigma_jitter"])


@dataclass
class G2Correction:
    """Background-corrected g²(0)."""

    value: float
    signal_fraction: float
    clamped: bool

    def to_dict(self) -> dict:
        return {
            "g2_0_corrected_dimless": self.value,
            "signal_fraction_dimless": self.signal_fraction,
            "clamped": self.clamped,
        }


def background_correct_g2(g0_measured: float, signal_cps: float, background_cps: float) -> G2Correction:
    """Remove uncorrelated background from a measured g²(0).

    ρ = S/(S+B), g²_corr = (g²_meas − (1 − ρ²))/ρ², clamped below at 0.

    Example:
        >>> round(background_correct_g2(0.25, 4380, 290).value, 3)
        0.147
    """
    if not signal_cps > 0:
        raise DomainError(f"Signal rate must be positive, got {signal_cps} cps")
    if not background_cps >= 0:
        raise DomainError(f"Background rate must be non-negative, got {background_cps} cps")
    if not g0_measured >= 0:
        raise DomainError(f"Measured g2(0) must be non-negative, got {g0_measured}")
    rho = signal_cps / (signal_cps + background_cps)
    corrected = (g0_measured - (1.0 - rho**2)) / rho**2
    clamped = corrected < 0
    if clamped:
        logger.warning(f"Background-corrected g2(0) = {corrected:.4g} clamped to 0")
        corrected = 0.0
    return G2Correction(corrected, rho, clamped)


@dataclass
class DephasingEstimate:
    """Pure dephasing from a measured linewidth."""

    gamma_star: LinewidthFWHM
    transform_limit: LinewidthFWHM
    clamped: bool

    def to_dict(self) -> dict:
        return {
            "gamma_star_MHz": self.gamma_star.mhz,
            "transform_limit_MHz": self.transform_limit.mhz,
            "clamped": self.clamped,
        }


def dephasing_from_linewidth(measured: LinewidthFWHM, tau_off_ns: float) -> DephasingEstimate:
    """γ* = max(0, Γ_meas − 1/(2πτ_off)).

    Example:
        >>> round(dephasing_from_linewidth(LinewidthFWHM.from_mhz(204), 5.89).gamma_star.mhz)
        177
    """
    limit = lifetime_to_transform_limit(tau_off_ns)
    excess = measured.value - limit.value
    clamped = excess < 0
    if clamped:
        logger.warning(
            f"Measured linewidth {measured.mhz:.4g} MHz is below the transform limit "
            f"{limit.mhz:.4g} MHz; dephasing clamped to 0"
        )
    return DephasingEstimate(LinewidthFWHM(max(excess, 0.0)), limit, clamped)


def linewidth_ratio(measured: LinewidthFWHM, tau_off_ns: float) -> float:
    """Measured linewidth in units of the transform limit."""
    return measured.value / lifetime_to_transform_limit(tau_off_ns).value
