"""Fit model registry.

Each model bundles a lineshape, its parameter names, default bounds, unit
labels and the derived quantities reported alongside a fit. Models are
addressed by stable string names for CLI dispatch.
"""

from collections.abc import Callable
from enum import Enum
from typing import Protocol, runtime_checkable

import numpy as np

from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.fitting import lineshapes
from spin_photon_toolkit.models.spectra import AxisKind

FWHM_PER_SIGMA = 2.0 * np.sqrt(2.0 * np.log(2.0))  # 2.3548


class ModelKind(str, Enum):
    """Stable model names."""

    LORENTZIAN = "lorentzian"
    LORENTZIAN_MULTI = "lorentzian_multi"
    FANO_LORENTZ = "fano_lorentz"
    LIFETIME_EMG = "lifetime_emg"
    G2_DIP = "g2_dip"


@runtime_checkable
class LineshapeModel(Protocol):
    """Interface every fit model implements."""

    kind: ModelKind
    param_names: list[str]
    location_params: frozenset[str]

    def evaluate(self, x: np.ndarray, params: np.ndarray) -> np.ndarray:
        """Model values at x for a full parameter vector."""
        ...

    def jacobian(self, x: np.ndarray, params: np.ndarray) -> np.ndarray | None:
        """Analytic Jacobian, or None to fall back to finite differences."""
        ...

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Default (lower, upper) bounds."""
        ...

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        """Unit label per parameter and derived quantity."""
        ...

    def derived(
        self, params: np.ndarray, covariance: np.ndarray
    ) -> tuple[dict[str, float], dict[str, float]]:
        """Derived quantities and their propagated uncertainties."""
        ...


def _propagate(gradient: np.ndarray, covariance: np.ndarray) -> float:
    """First-order uncertainty of a scalar function of the parameters."""
    variance = float(gradient @ covariance @ gradient)
    return float(np.sqrt(variance)) if variance >= 0 else float("nan")


class _BaseModel:
    kind: ModelKind
    param_names: list[str]
    location_params: frozenset[str] = frozenset()
    _function: Callable[..., np.ndarray]
    _jacobian: Callable[..., np.ndarray] | None = None

    def evaluate(self, x: np.ndarray, params: np.ndarray) -> np.ndarray:
        return self._function(x, *params)

    def jacobian(self, x: np.ndarray, params: np.ndarray) -> np.ndarray | None:
        if self._jacobian is None:
            return None
        return self._jacobian(x, *params)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.param_names)
        return np.full(n, -np.inf), np.full(n, np.inf)

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        return {}

    def derived(
        self, params: np.ndarray, covariance: np.ndarray
    ) -> tuple[dict[str, float], dict[str, float]]:
        return {}, {}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(self.param_names)})"


class LorentzianModel(_BaseModel):
    kind = ModelKind.LORENTZIAN
    param_names = ["y0", "amplitude", "center", "fwhm"]
    location_params = frozenset({"center"})

    def __init__(self):
        self._function = lineshapes.model_lorentzian
        self._jacobian = lineshapes.jacobian_lorentzian

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower, upper = super().bounds()
        lower[3] = 0.0
        return lower, upper

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        return {"center": axis.unit, "fwhm": axis.unit}

    def derived(self, params, covariance):
        return _quality_factor(params[2], params[3], covariance, 2, 3)


def _quality_factor(center, fwhm, covariance, i_center, i_fwhm):
    gradient = np.zeros(covariance.shape[0])
    gradient[i_center] = 1.0 / fwhm
    gradient[i_fwhm] = -center / fwhm**2
    quality = abs(center / fwhm)
    return {"quality_factor": quality}, {"quality_factor": _propagate(gradient, covariance)}


class FanoLorentzModel(_BaseModel):
    """Weighted Fano-Lorentz resonance; derived Q = center/fwhm regardless of the mix."""

    kind = ModelKind.FANO_LORENTZ
    param_names = ["y0", "amplitude", "eta", "q", "center", "fwhm"]
    location_params = frozenset({"center"})

    def __init__(self):
        self._function = lineshapes.model_fano_lorentz
        self._jacobian = lineshapes.jacobian_fano_lorentz

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower, upper = super().bounds()
        lower[2], upper[2] = 0.0, 1.0
        lower[5] = 0.0
        return lower, upper

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        return {"center": axis.unit, "fwhm": axis.unit}

    def derived(self, params, covariance):
        return _quality_factor(params[4], params[5], covariance, 4, 5)


class MultiLorentzianModel(_BaseModel):
    """Common baseline plus n peak-height Lorentzians."""

    kind = ModelKind.LORENTZIAN_MULTI

    def __init__(self, n_peaks: int = 1):
        if n_peaks < 1:
            raise DomainError(f"n_peaks must be at least 1, got {n_peaks}")
        self.n_peaks = n_peaks
        self.param_names = ["y0"]
        for i in range(1, n_peaks + 1):
            self.param_names += [f"center_{i}", f"fwhm_{i}", f"amplitude_{i}"]
        self.location_params = frozenset(f"center_{i}" for i in range(1, n_peaks + 1))
        self._function = lineshapes.model_multi_lorentzian
        self._jacobian = lineshapes.jacobian_multi_lorentzian

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower, upper = super().bounds()
        for i in range(self.n_peaks):
            lower[2 + 3 * i] = 0.0
        return lower, upper

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        units: dict[str, str | None] = {}
        for i in range(1, self.n_peaks + 1):
            units[f"center_{i}"] = axis.unit
            units[f"fwhm_{i}"] = axis.unit
        return units


class LifetimeEMGModel(_BaseModel):
    """Single exponential decay convolved with a Gaussian instrument response."""

    kind = ModelKind.LIFETIME_EMG
    param_names = ["t0", "amplitude", "tau", "sigma", "y0"]
    location_params = frozenset({"t0"})

    def __init__(self):
        self._function = lineshapes.model_lifetime_emg

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower, upper = super().bounds()
        lower[1] = 0.0
        lower[2] = 1e-6
        lower[3] = 0.0
        return lower, upper

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        return {
            "t0": "ns",
            "amplitude": "counts_ns",
            "tau": "ns",
            "sigma": "ns",
            "y0": "counts",
            "irf_fwhm": "ns",
            "decay_rate": "per_ns",
        }

    def derived(self, params, covariance):
        _, _, tau, sigma, _ = params
        rate_gradient = np.zeros(5)
        rate_gradient[2] = -1.0 / tau**2
        fwhm_gradient = np.zeros(5)
        fwhm_gradient[3] = FWHM_PER_SIGMA
        values = {"decay_rate": 1.0 / tau, "irf_fwhm": FWHM_PER_SIGMA * sigma}
        errors = {
            "decay_rate": _propagate(rate_gradient, covariance),
            "irf_fwhm": _propagate(fwhm_gradient, covariance),
        }
        return values, errors


class G2DipModel(_BaseModel):
    """Antibunching dip of a normalized second-order correlation histogram."""

    kind = ModelKind.G2_DIP
    param_names = ["g0", "tau0", "sigma_jitter"]

    def __init__(self):
        self._function = lineshapes.model_g2_dip

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array([0.0, 1e-6, 0.0]), np.array([1.0, np.inf, np.inf])

    def units(self, axis: AxisKind) -> dict[str, str | None]:
        return {"tau0": "ns", "sigma_jitter": "ns"}

    def derived(self, params, covariance):
        gradient = np.zeros(3)
        gradient[0] = 1.0
        return {"g2_0": float(params[0])}, {"g2_0": _propagate(gradient, covariance)}


_REGISTRY: dict[ModelKind, Callable[..., LineshapeModel]] = {
    ModelKind.LORENTZIAN: LorentzianModel,
    ModelKind.LORENTZIAN_MULTI: MultiLorentzianModel,
    ModelKind.FANO_LORENTZ: FanoLorentzModel,
    ModelKind.LIFETIME_EMG: LifetimeEMGModel,
    ModelKind.G2_DIP: G2DipModel,
}


def list_models() -> list[str]:
    """Names of all registered models."""
    return [kind.value for kind in _REGISTRY]


def get_model(kind: ModelKind | str, n_peaks: int = 1) -> LineshapeModel:
    """Instantiate a model by name.

    Raises:
        DomainError: If the name is unknown
    """
    try:
        kind = ModelKind(kind)
    except ValueError:
        raise DomainError(f"Unknown model '{kind}'. Available: {', '.join(list_models())}") from None
    if kind is ModelKind.LORENTZIAN_MULTI:
        return MultiLorentzianModel(n_peaks)
    return _REGISTRY[kind]()
