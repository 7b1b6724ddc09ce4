"""Measurement lineshapes and their analytic Jacobians.

Every model takes the x samples first and its parameters in a fixed order;
Jacobians return an (n_samples, n_params) array in the same order.
"""

import numpy as np
from scipy.special import erfc, erfcx

from spin_photon_toolkit.errors import DomainError, NumericalError

_SQRT2 = np.sqrt(2.0)


def _omega(x: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    if not fwhm > 0:
        raise DomainError(f"Width must be positive, got {fwhm}")
    return 2.0 * (np.asarray(x, dtype=float) - center) / fwhm


# =============================================================================
# Lorentzians
# =============================================================================


def model_lorentzian(
    x: np.ndarray, y0: float, amplitude: float, center: float, fwhm: float
) -> np.ndarray:
    """Peak-height Lorentzian y0 + A/(1 + Ω²), Ω = 2(x − center)/fwhm."""
    omega = _omega(x, center, fwhm)
    lorentz = 1.0 / (1.0 + omega**2)
    return y0 + amplitude * lorentz


def jacobian_lorentzian(
    x: np.ndarray, y0: float, amplitude: float, center: float, fwhm: float
) -> np.ndarray:
    omega = _omega(x, center, fwhm)
    lorentz = 1.0 / (1.0 + omega**2)
    l2 = lorentz**2
    return np.column_stack(
        [
            np.ones_like(omega),
            lorentz,
            4.0 * amplitude * omega * l2 / fwhm,
            2.0 * amplitude * omega**2 * l2 / fwhm,
        ]
    )


def model_multi_lorentzian(x: np.ndarray, y0: float, *peaks: float) -> np.ndarray:
    """Sum of peak-height Lorentzians.

    Args:
        x: Samples
        y0: Common baseline
        *peaks: Flattened (center, fwhm, amplitude) triples
    """
    if len(peaks) == 0 or len(peaks) % 3:
        raise DomainError(f"Expected (center, fwhm, amplitude) triples, got {len(peaks)} values")
    total = np.full(np.shape(x), y0, dtype=float)
    for i in range(0, len(peaks), 3):
        center, fwhm, amplitude = peaks[i : i + 3]
        total += model_lorentzian(x, 0.0, amplitude, center, fwhm)
    return total


def jacobian_multi_lorentzian(x: np.ndarray, y0: float, *peaks: float) -> np.ndarray:
    columns = [np.ones(np.shape(x), dtype=float)]
    for i in range(0, len(peaks), 3):
        center, fwhm, amplitude = peaks[i : i + 3]
        single = jacobian_lorentzian(x, 0.0, amplitude, center, fwhm)
        columns.extend([single[:, 2], single[:, 3], single[:, 1]])
    return np.column_stack(columns)


# =============================================================================
# Weighted Fano-Lorentz
# =============================================================================


def model_fano_lorentz(
    x: np.ndarray,
    y0: float,
    amplitude: float,
    eta: float,
    q: float,
    center: float,
    fwhm: float,
) -> np.ndarray:
    """Convex mix of a unit-peak Fano profile and a Lorentzian sharing center and width.

    I = y0 + A·[η(q+Ω)²/((1+q²)(1+Ω²)) + (1−η)/(1+Ω²)]

    η = 0 reproduces model_lorentzian exactly; q → ∞ with η = 1 tends to it.
    """
    omega = _omega(x, center, fwhm)
    lorentz = 1.0 / (1.0 + omega**2)
    fano = (q + omega) ** 2 * lorentz / (1.0 + q**2)
    return y0 + amplitude * (eta * fano + (1.0 - eta) * lorentz)


def jacobian_fano_lorentz(
    x: np.ndarray,
    y0: float,
    amplitude: float,
    eta: float,
    q: float,
    center: float,
    fwhm: float,
) -> np.ndarray:
    omega = _omega(x, center, fwhm)
    lorentz = 1.0 / (1.0 + omega**2)
    l2 = lorentz**2
    q2 = 1.0 + q**2
    fano = (q + omega) ** 2 * lorentz / q2
    mix = eta * fano + (1.0 - eta) * lorentz

    d_fano_dq = 2.0 * (q + omega) * (1.0 - q * omega) * lorentz / q2**2
    d_fano_domega = 2.0 * (q + omega) * (1.0 - q * omega) * l2 / q2
    d_lorentz_domega = -2.0 * omega * l2
    d_domega = amplitude * (eta * d_fano_domega + (1.0 - eta) * d_lorentz_domega)
    return np.column_stack(
        [
            np.ones_like(omega),
            mix,
            amplitude * (fano - lorentz),
            amplitude * eta * d_fano_dq,
            d_domega * (-2.0 / fwhm),
            d_domega * (-omega / fwhm),
        ]
    )


# =============================================================================
# Lifetime: exponential convolved with a Gaussian IRF
# =============================================================================


def emg_density(u: np.ndarray, tau: float, sigma: float) -> np.ndarray:
    """Unit-area exponentially modified Gaussian at offsets u = t − t0.

    Uses erfcx where the plain form would overflow, so σ/τ up to 10³ stays finite.
    """
    if not tau > 0:
        raise DomainError(f"Lifetime must be positive, got {tau}")
    if not sigma >= 0:
        raise DomainError(f"IRF width must be non-negative, got {sigma}")
    u = np.asarray(u, dtype=float)
    if sigma == 0:
        out = np.where(u > 0, np.exp(-np.maximum(u, 0.0) / tau) / tau, 0.0)
        return np.where(u == 0, 0.5 / tau, out)

    shape = u.shape
    u = np.atleast_1d(u)
    z = (sigma / tau - u / sigma) / _SQRT2
    out = np.empty_like(u)
    upper = z >= 0
    zu, uu = z[upper], u[upper]
    out[upper] = 0.5 / tau * erfcx(zu) * np.exp(-(uu**2) / (2.0 * sigma**2))
    lower = ~upper
    zl, ul = z[lower], u[lower]
    out[lower] = 0.5 / tau * np.exp(sigma**2 / (2.0 * tau**2) - ul / tau) * erfc(zl)
    return out.reshape(shape)


def model_lifetime_emg(
    t: np.ndarray, t0: float, amplitude: float, tau: float, sigma: float, y0: float
) -> np.ndarray:
    """Counts A·EMG(t − t0; τ, σ) + y0; A is the area above background."""
    values = amplitude * emg_density(np.asarray(t, dtype=float) - t0, tau, sigma) + y0
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"Non-finite lifetime model at tau={tau}, sigma={sigma}")
    return values


# =============================================================================
# g²(τ) antibunching dip
# =============================================================================


def gaussian_smoothing_matrix(x: np.ndarray, sigma: float) -> np.ndarray:
    """Row-normalized Gaussian convolution kernel on a (possibly uneven) sample grid."""
    x = np.asarray(x, dtype=float)
    spacing = np.gradient(x) if len(x) > 1 else np.ones(1)  # trapezoid-like weights
    kernel = np.exp(-0.5 * ((x[:, None] - x[None, :]) / sigma) ** 2) * spacing[None, :]
    return kernel / kernel.sum(axis=1, keepdims=True)


def model_g2_dip(
    tau_delay: np.ndarray, g0: float, tau0: float, sigma_jitter: float = 0.0
) -> np.ndarray:
    """g²(τ) = 1 − (1 − g0)·exp(−|τ|/τ0), optionally smeared by timing jitter.

    The jitter convolution runs on the sample grid itself, so it is only as
    accurate as the grid resolves σ_jitter.
    """
    if not tau0 > 0:
        raise DomainError(f"tau0 must be positive, got {tau0}")
    if not sigma_jitter >= 0:
        raise DomainError(f"Jitter width must be non-negative, got {sigma_jitter}")
    tau_delay = np.asarray(tau_delay, dtype=float)
    bare = 1.0 - (1.0 - g0) * np.exp(-np.abs(tau_delay) / tau0)
    if sigma_jitter == 0 or tau_delay.ndim == 0:
        return bare
    return gaussian_smoothing_matrix(tau_delay, sigma_jitter) @ bare
