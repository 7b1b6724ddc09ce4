"""Initial-value heuristics so batch fits are reproducible without hand tuning."""

import logging

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks, peak_widths

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.fitting.models import (
    FWHM_PER_SIGMA,
    LineshapeModel,
    ModelKind,
    MultiLorentzianModel,
    get_model,
)
from spin_photon_toolkit.models.spectra import SpectrumTrace

logger = logging.getLogger(__name__)

EDGE_FRACTION = 0.1


def baseline(trace: SpectrumTrace, fraction: float = EDGE_FRACTION) -> float:
    """Median of the outermost samples on both edges."""
    n = max(1, int(len(trace) * fraction / 2))
    return float(np.median(np.concatenate([trace.y[:n], trace.y[-n:]])))


def _half_max_width(x: np.ndarray, signal: np.ndarray, index: int) -> float:
    """FWHM of the feature at index from interpolated half-maximum crossings."""
    _, _, left, right = peak_widths(signal, [index], rel_height=0.5)
    grid = np.arange(len(x))
    width = float(np.interp(right[0], grid, x) - np.interp(left[0], grid, x))
    if not width > 0:
        width = float(x[min(index + 1, len(x) - 1)] - x[max(index - 1, 0)])
    return width


def guess_resonance(trace: SpectrumTrace) -> dict[str, float]:
    """Baseline, signed amplitude, center and FWHM of the dominant peak or dip."""
    y0 = baseline(trace)
    high = trace.y.max() - y0
    low = y0 - trace.y.min()
    sign = 1.0 if high >= low else -1.0
    signal = sign * (trace.y - y0)
    index = int(np.argmax(signal))
    return {
        "y0": y0,
        "amplitude": sign * float(signal[index]),
        "center": float(trace.x[index]),
        "fwhm": _half_max_width(trace.x, signal, index),
    }


def guess_peaks(trace: SpectrumTrace, n_peaks: int) -> tuple[float, list[tuple[float, float, float]]]:
    """Baseline and (center, fwhm, amplitude) of the n most prominent peaks.

    Peaks are returned sorted by center. When fewer maxima exist than
    requested, the strongest one is split into shifted copies.
    """
    y0 = baseline(trace)
    signal = trace.y - y0
    indices, props = find_peaks(signal, prominence=0.0)
    if len(indices) == 0:
        indices = np.array([int(np.argmax(signal))])
        prominences = np.array([float(signal.max())])
    else:
        prominences = props["prominences"]
    order = np.argsort(prominences)[::-1][:n_peaks]
    peaks = []
    for i in order:
        index = int(indices[i])
        peaks.append(
            (float(trace.x[index]), _half_max_width(trace.x, signal, index), float(signal[index]))
        )
    while len(peaks) < n_peaks:
        center, fwhm, amplitude = peaks[0]
        shift = 0.5 * fwhm * len(peaks)
        peaks.append((center + shift, fwhm, 0.5 * amplitude))
        logger.debug(f"Only {len(indices)} maxima found; seeding extra peak at {center + shift}")
    return y0, sorted(peaks)


def guess_lifetime(trace: SpectrumTrace) -> dict[str, float]:
    """t0 at the histogram maximum, τ from the 1/e point, area by trapezoid."""
    x, y = trace.x, trace.y
    n_edge = max(1, len(x) // 20)
    y0 = float(np.median(y[:n_edge]))
    peak = int(np.argmax(y))
    height = y[peak] - y0
    if not height > 0:
        raise DomainError("Lifetime trace has no peak above its leading baseline")
    after = np.nonzero(y[peak:] - y0 < height / np.e)[0]
    tau = float(x[peak + after[0]] - x[peak]) if len(after) else trace.span / 4
    step = float(np.median(np.diff(x))) if len(x) > 1 else 1.0
    return {
        "t0": float(x[peak]),
        "amplitude": float(trapezoid(np.maximum(y - y0, 0.0), x)),
        "tau": max(tau, step),
        "sigma": max(step, 0.1 * tau),
        "y0": max(y0, 0.0),
    }


def guess_g2(trace: SpectrumTrace) -> dict[str, float]:
    """g0 from the minimum, τ0 from where the dip recovers halfway."""
    x, y = trace.x, trace.y
    g0 = float(np.clip(y.min(), 0.0, 1.0))
    half = 1.0 - 0.5 * (1.0 - g0)
    center = int(np.argmin(np.abs(x)))
    recovered = np.nonzero((y >= half) & (x > x[center]))[0]
    if len(recovered):
        tau0 = float(x[recovered[0]] - x[center]) / np.log(2.0)
    else:
        tau0 = trace.span / 10
    step = float(np.median(np.diff(x))) if len(x) > 1 else 1.0
    return {"g0": g0, "tau0": max(tau0, step), "sigma_jitter": 0.0}


def guess_initial(
    model: LineshapeModel | ModelKind | str, trace: SpectrumTrace, n_peaks: int = 1
) -> dict[str, float]:
    """Initial values for any registered model.

    Example:
        >>> import numpy as np
        >>> from spin_photon_toolkit.models.spectra import SpectrumTrace
        >>> x = np.linspace(-5, 5, 201)
        >>> trace = SpectrumTrace(x, 1.0 + 2.0 / (1 + (2 * x) ** 2), np.ones_like(x))
        >>> guess = guess_initial("lorentzian", trace)
        >>> round(guess["center"], 6), round(guess["fwhm"], 1)
        (0.0, 1.0)
    """
    if not isinstance(model, LineshapeModel):
        model = get_model(model, n_peaks=n_peaks)
    if model.kind is ModelKind.LORENTZIAN:
        return guess_resonance(trace)
    if model.kind is ModelKind.FANO_LORENTZ:
        return {**guess_resonance(trace), "eta": 0.5, "q": 1.0}
    if model.kind is ModelKind.LORENTZIAN_MULTI:
        assert isinstance(model, MultiLorentzianModel)
        y0, peaks = guess_peaks(trace, model.n_peaks)
        guess = {"y0": y0}
        for i, (center, fwhm, amplitude) in enumerate(peaks, start=1):
            guess.update({f"center_{i}": center, f"fwhm_{i}": fwhm, f"amplitude_{i}": amplitude})
        return guess
    if model.kind is ModelKind.LIFETIME_EMG:
        return guess_lifetime(trace)
    if model.kind is ModelKind.G2_DIP:
        return guess_g2(trace)
    raise DomainError(f"No initialization heuristic for model '{model.kind.value}'")


def jitter_sigma(jitter_fwhm_ps: float) -> float:
    """Gaussian σ in ns of a timing jitter given as FWHM in ps."""
    if not jitter_fwhm_ps >= 0:
        raise DomainError(f"Jitter FWHM must be non-negative, got {jitter_fwhm_ps} ps")
    return jitter_fwhm_ps * 1e-3 / FWHM_PER_SIGMA
