"""Dataclass models for measured traces and fit results."""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from spin_photon_toolkit.errors import DomainError


class AxisKind(str, Enum):
    """Physical quantity on the x axis of a trace."""

    WAVELENGTH_NM = "wavelength_nm"  # reflection / transmission spectra
    FREQUENCY_THZ = "frequency_THz"  # PLE scans
    DETUNING_MHZ = "detuning_MHz"  # PLE scans relative to a reference
    TIME_NS = "time_ns"  # lifetime histograms
    DELAY_NS = "delay_ns"  # g² histograms

    @property
    def unit(self) -> str:
        return self.value.split("_", 1)[1]


@dataclass
class SpectrumTrace:
    """Ordered (x, y, σ_y) samples.

    When sigma is omitted the samples are treated as counts and σ = √max(y, 1).
    """

    x: np.ndarray
    y: np.ndarray
    sigma: np.ndarray | None = None
    axis: AxisKind = AxisKind.WAVELENGTH_NM

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.y.ndim != 1:
            raise DomainError("Trace x and y must be one-dimensional")
        if len(self.x) != len(self.y):
            raise DomainError(f"Trace lengths differ: {len(self.x)} x vs {len(self.y)} y")
        if len(self.x) == 0:
            raise DomainError("Trace is empty")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise DomainError("Trace contains non-finite samples")
        steps = np.diff(self.x)
        if np.any(steps <= 0):
            bad = int(np.argmax(steps <= 0)) + 1
            raise DomainError(f"Trace x must be strictly increasing (sample {bad})")
        if self.sigma is None:
            self.sigma = np.sqrt(np.maximum(self.y, 1.0))
        else:
            self.sigma = np.asarray(self.sigma, dtype=float)
            if self.sigma.shape != self.y.shape:
                raise DomainError("Trace sigma must match y in length")
            if not np.all(self.sigma > 0) or not np.all(np.isfinite(self.sigma)):
                raise DomainError("Trace sigma must be positive and finite")
        self.axis = AxisKind(self.axis)

    def __len__(self) -> int:
        return len(self.x)

    @property
    def span(self) -> float:
        return float(self.x[-1] - self.x[0])

    def with_sigma(self, sigma: np.ndarray) -> "SpectrumTrace":
        return SpectrumTrace(self.x, self.y, sigma, self.axis)


def _unit_key(name: str, unit: str | None) -> str:
    return f"{name}_{unit}" if unit else f"{name}_dimless"


@dataclass
class FitOutcome:
    """Result of a weighted least-squares fit.

    ``covariance`` is indexed by ``param_names``; fixed parameters have zero
    rows and columns. ``units`` maps parameter and derived names to unit
    labels (None for dimensionless).
    """

    model: str
    param_names: list[str]
    params: dict[str, float]
    uncertainties: dict[str, float]
    covariance: np.ndarray
    derived: dict[str, float]
    derived_uncertainties: dict[str, float]
    reduced_chi2: float
    n_iter: int
    converged: bool
    fixed: list[str] = field(default_factory=list)
    message: str = ""
    units: dict[str, str | None] = field(default_factory=dict)

    def value(self, name: str) -> float:
        """Look up a parameter or derived quantity."""
        if name in self.params:
            return self.params[name]
        return self.derived[name]

    def to_dict(self) -> dict[str, Any]:
        def keyed(values: dict[str, float]) -> dict[str, float]:
            return {_unit_key(k, self.units.get(k)): float(v) for k, v in values.items()}

        return {
            "model": self.model,
            "params": keyed(self.params),
            "uncertainties": keyed(self.uncertainties),
            "derived": keyed(self.derived),
            "derived_uncertainties": keyed(self.derived_uncertainties),
            "covariance_order": list(self.param_names),
            "covariance": np.asarray(self.covariance, dtype=float).tolist(),
            "reduced_chi2_dimless": float(self.reduced_chi2),
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
            "fixed": list(self.fixed),
            "message": self.message,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)

    def print_report(self):
        """Print a parameter table."""
        print(f"\n{'=' * 50}")
        print(f"FIT: {self.model} ({'converged' if self.converged else 'NOT converged'})")
        print(f"{'=' * 50}")
        for name in self.param_names:
            unit = self.units.get(name) or ""
            flag = " (fixed)" if name in self.fixed else ""
            print(
                f"{name:<16} {self.params[name]:>16.8g} ± {self.uncertainties[name]:<12.3g}"
                f" {unit}{flag}"
            )
        for name, value in self.derived.items():
            unit = self.units.get(name) or ""
            err = self.derived_uncertainties.get(name, float("nan"))
            print(f"{name:<16} {value:>16.8g} ± {err:<12.3g} {unit}")
        print(f"reduced chi2:    {self.reduced_chi2:.4g}")
        print(f"evaluations:     {self.n_iter}")
