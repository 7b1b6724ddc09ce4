"""Spectral-diffusion quadrature over a truncated Lorentzian of emitter offsets."""

from functools import lru_cache

import numpy as np

from spin_photon_toolkit.errors import DomainError


@lru_cache(maxsize=16)
def _legendre(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def diffusion_nodes(
    gamma_star_hz: float, n_points: int = 129, truncation: float = 20.0
) -> tuple[np.ndarray, np.ndarray]:
    """Offsets and weights averaging over a Lorentzian of FWHM γ*, cut at ±truncation·γ*.

    The substitution δ = (γ*/2)·tanθ makes the Lorentzian weight uniform in θ,
    so Gauss-Legendre nodes in θ integrate the smooth reflection directly.

    Args:
        gamma_star_hz: Pure-dephasing FWHM in Hz
        n_points: Number of Gauss-Legendre nodes (>= 3)
        truncation: Half-width of the averaging window in units of γ*

    Returns:
        (offsets_hz, weights); weights sum to 1. γ* = 0 gives the single node 0.
    """
    if not gamma_star_hz >= 0:
        raise DomainError(f"gamma_star must be non-negative, got {gamma_star_hz} Hz")
    if n_points < 3:
        raise DomainError(f"Quadrature needs at least 3 points, got {n_points}")
    if not truncation > 0:
        raise DomainError(f"Truncation must be positive, got {truncation}")
    if gamma_star_hz == 0:
        return np.zeros(1), np.ones(1)

    u, w = _legendre(n_points)
    theta_max = np.arctan(2.0 * truncation)
    offsets = 0.5 * gamma_star_hz * np.tan(theta_max * u)
    return offsets, w / 2.0
