"""Weighted nonlinear least-squares driver shared by every fit."""

import logging
from collections.abc import Iterable, Mapping

import numpy as np
from scipy.optimize import least_squares

from spin_photon_toolkit.errors import DomainError, NumericalError, RankDeficiencyError
from spin_photon_toolkit.fitting.models import LineshapeModel, ModelKind, get_model
from spin_photon_toolkit.models.spectra import FitOutcome, SpectrumTrace

logger = logging.getLogger(__name__)

XTOL = 1e-10
FTOL = 1e-12
GTOL = 1e-12
DEFAULT_MAX_ITERATIONS = 200


def _as_vector(
    model: LineshapeModel, values: Mapping[str, float], what: str
) -> np.ndarray:
    missing = [name for name in model.param_names if name not in values]
    if missing:
        raise DomainError(f"{what} is missing parameters: {', '.join(missing)}")
    unknown = [name for name in values if name not in model.param_names]
    if unknown:
        raise DomainError(f"{what} has unknown parameters: {', '.join(unknown)}")
    return np.array([float(values[name]) for name in model.param_names])


def _resolve_bounds(
    model: LineshapeModel, bounds: Mapping[str, tuple[float, float]] | None
) -> tuple[np.ndarray, np.ndarray]:
    lower, upper = model.bounds()
    lower, upper = lower.astype(float).copy(), upper.astype(float).copy()
    for name, (lo, hi) in (bounds or {}).items():
        if name not in model.param_names:
            raise DomainError(f"Bounds given for unknown parameter '{name}'")
        i = model.param_names.index(name)
        lower[i], upper[i] = lo, hi
    return lower, upper


def _x_scale(model: LineshapeModel, p0: np.ndarray, trace: SpectrumTrace) -> np.ndarray:
    scale = np.abs(p0).astype(float)
    scale[scale == 0] = 1.0
    span = trace.span if trace.span > 0 else 1.0
    for i, name in enumerate(model.param_names):
        if name in model.location_params:
            scale[i] = span
    return scale


def _covariance(jac: np.ndarray, n_free: int) -> tuple[np.ndarray, int]:
    """Unscaled covariance (JᵀJ)⁻¹ via SVD, dropping singular directions."""
    _, s, vt = np.linalg.svd(jac, full_matrices=False)
    threshold = np.finfo(float).eps * max(jac.shape) * (s[0] if s.size else 0.0)
    keep = s > threshold
    rank = int(np.count_nonzero(keep))
    s, vt = s[keep], vt[keep]
    cov = (vt.T / s**2) @ vt
    return cov, rank


def fit_curve(
    model: LineshapeModel | ModelKind | str,
    trace: SpectrumTrace,
    init: Mapping[str, float],
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fixed: Iterable[str] = (),
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    reweight_iterations: int = 0,
    allow_rank_deficient: bool = False,
) -> FitOutcome:
    """Fit a model to a trace by weighted least squares.

    Residuals are (y − f)/σ. The trust-region reflective solver runs with
    parameter scaling by the initial magnitudes (trace span for location
    parameters). The covariance comes from the Jacobian at the solution and
    is scaled by the reduced χ².

    Args:
        model: Model instance or registered name
        trace: Data to fit
        init: Initial value for every parameter
        bounds: Per-parameter (lower, upper) overriding the model defaults
        fixed: Parameters held at their initial value
        max_iterations: Cap on function evaluations; hitting it flags non-convergence
        reweight_iterations: Refits with σ = √max(model, 1), turning the
            Neyman χ² of count data into a Poisson-likelihood fit
        allow_rank_deficient: Return NaN covariance and converged=False
            instead of raising on a singular Jacobian

    Returns:
        FitOutcome with parameters, covariance, derived quantities and χ²

    Raises:
        DomainError: On missing parameters, init outside bounds or too few points
        RankDeficiencyError: If the Jacobian is singular at the solution
        NumericalError: If the model produces non-finite values
    """
    if not isinstance(model, LineshapeModel):
        model = get_model(model)
    names = model.param_names
    p0 = _as_vector(model, init, "init")
    lower, upper = _resolve_bounds(model, bounds)
    if np.any(p0 < lower) or np.any(p0 > upper):
        outside = [n for n, v, lo, hi in zip(names, p0, lower, upper) if not lo <= v <= hi]
        raise DomainError(f"Initial values outside bounds: {', '.join(outside)}")

    fixed = [name for name in names if name in set(fixed)]
    free = np.array([name not in fixed for name in names])
    n_free = int(free.sum())
    if n_free == 0:
        raise DomainError("All parameters are fixed")
    if len(trace) < n_free + 1:
        raise DomainError(f"Need at least {n_free + 1} points for {n_free} free parameters, got {len(trace)}")

    x = trace.x
    y = trace.y
    sigma = trace.sigma

    def full(p_free: np.ndarray) -> np.ndarray:
        p = p0.copy()
        p[free] = p_free
        return p

    def residuals(p_free: np.ndarray) -> np.ndarray:
        r = (y - model.evaluate(x, full(p_free))) / sigma
        if not np.all(np.isfinite(r)):
            raise NumericalError(f"Non-finite residuals in {model.kind.value} model")
        return r

    analytic = model.jacobian(x, p0) is not None

    def jacobian(p_free: np.ndarray) -> np.ndarray:
        return -model.jacobian(x, full(p_free))[:, free] / sigma[:, None]

    x_scale = _x_scale(model, p0, trace)[free]
    start = p0[free]
    n_evaluations = 0
    result = None
    for attempt in range(reweight_iterations + 1):
        if attempt > 0:
            sigma = np.sqrt(np.maximum(model.evaluate(x, full(result.x)), 1.0))
            start = result.x
        result = least_squares(
            residuals,
            start,
            jac=jacobian if analytic else "2-point",
            bounds=(lower[free], upper[free]),
            method="trf",
            x_scale=x_scale,
            xtol=XTOL,
            ftol=FTOL,
            gtol=GTOL,
            max_nfev=max_iterations,
        )
        n_evaluations += int(result.nfev)

    params = full(result.x)
    chi2 = float(np.sum(result.fun**2))
    dof = len(trace) - n_free
    reduced_chi2 = chi2 / dof
    converged = bool(result.status > 0)
    message = str(result.message)

    cov_free, rank = _covariance(result.jac, n_free)
    if rank < n_free:
        if not allow_rank_deficient:
            raise RankDeficiencyError(f"Singular Jacobian in {model.kind.value} fit", rank, n_free)
        logger.warning(f"{model.kind.value} fit is rank deficient ({rank} < {n_free})")
        cov_free = np.full((n_free, n_free), np.nan)
        converged = False
        message = f"rank deficient ({rank} < {n_free}): {message}"
    else:
        cov_free = cov_free * reduced_chi2
        cov_free = 0.5 * (cov_free + cov_free.T)

    covariance = np.zeros((len(names), len(names)))
    covariance[np.ix_(free, free)] = cov_free
    if not converged:
        logger.warning(f"{model.kind.value} fit did not converge: {message}")

    derived, derived_errors = model.derived(params, covariance)
    units = model.units(trace.axis)
    return FitOutcome(
        model=model.kind.value,
        param_names=list(names),
        params={n: float(v) for n, v in zip(names, params)},
        uncertainties={n: float(np.sqrt(covariance[i, i])) for i, n in enumerate(names)},
        covariance=covariance,
        derived={k: float(v) for k, v in derived.items()},
        derived_uncertainties={k: float(v) for k, v in derived_errors.items()},
        reduced_chi2=reduced_chi2,
        n_iter=n_evaluations,
        converged=converged,
        fixed=fixed,
        message=message,
        units=units,
    )
