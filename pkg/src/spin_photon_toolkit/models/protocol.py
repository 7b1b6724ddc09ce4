"""Protocol configuration records and the fidelity/success-probability sweep grid."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from spin_photon_toolkit.errors import DomainError


class InputStatePolicy(str, Enum):
    """Which photonic input states the reported fidelity averages over."""

    FIXED_EQUAL_SUPERPOSITION = "fixed_equal_superposition"  # (|H⟩+|V⟩)/√2 only
    CARDINAL_SIX = "cardinal_six"  # ±Z, ±X, ±Y


class HeraldPolicy(str, Enum):
    """Which photon detection outcomes herald a transfer."""

    PLUS_ONLY = "plus_only"
    BOTH_WITH_FEED_FORWARD = "both_with_feed_forward"  # minus outcome gets a Z correction


class DephasingModel(str, Enum):
    """How pure dephasing enters the reflection coefficient."""

    SLOW_DIFFUSION = "slow_diffusion"  # average over a Lorentzian of emitter offsets
    FAST_LINEWIDTH = "fast_linewidth"  # fold γ* into the coherence rate


class BranchNormalization(str, Enum):
    """Amplitude treatment of the two spin branches of the H reflection."""

    PHYSICAL = "physical"  # raw reflection amplitudes
    EQUALIZED = "equalized"  # each branch rescaled to unit rms reflectance


class ProtocolConfig(BaseModel):
    """Settings of the reflection-based photon-to-spin transfer."""

    probe_THz: float | None = Field(default=None, gt=0)  # None probes at the cavity resonance
    input_state_policy: InputStatePolicy = InputStatePolicy.CARDINAL_SIX
    r_v_real: float = 1.0
    r_v_imag: float = 0.0
    herald_policy: HeraldPolicy = HeraldPolicy.BOTH_WITH_FEED_FORWARD
    dephasing_model: DephasingModel = DephasingModel.SLOW_DIFFUSION
    diffusion_points: int = Field(default=129, ge=3)
    diffusion_truncation: float = Field(default=20.0, gt=0)  # in units of γ*
    branch_normalization: BranchNormalization = BranchNormalization.EQUALIZED

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="after")
    def check_r_v(self) -> "ProtocolConfig":
        if abs(self.r_v) > 1 + 1e-12:
            raise ValueError(f"|r_V| must not exceed 1, got {abs(self.r_v):.6g}")
        return self

    @property
    def r_v(self) -> complex:
        return complex(self.r_v_real, self.r_v_imag)


class EfficiencyPair(BaseModel):
    """Detection and excitation efficiencies, excluding κ_wg/κ."""

    eta_det: float = Field(default=1.9e-2, ge=0, le=1)
    eta_exc: float = Field(default=3.4e-2, ge=0, le=1)

    model_config = {"frozen": True, "populate_by_name": True}


class SweepMarker(BaseModel):
    """A labelled operating point evaluated exactly alongside a sweep."""

    label: str
    coupling_ratio: float = Field(ge=0, le=1)
    gamma_star_MHz: float = Field(ge=0)

    model_config = {"frozen": True}


class SweepSettings(BaseModel):
    """Log-spaced sweep axes."""

    kappa_min: float = Field(default=1e-3, gt=0, le=1)
    kappa_max: float = Field(default=1.0, gt=0, le=1)
    n_kappa: int = Field(default=60, ge=1)
    gamma_min_MHz: float = Field(default=1e-2, gt=0)
    gamma_max_MHz: float = Field(default=1e3, gt=0)
    n_gamma: int = Field(default=60, ge=1)
    markers: list[SweepMarker] = Field(default_factory=list)

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_ranges(self) -> "SweepSettings":
        if self.kappa_min > self.kappa_max or (
            self.kappa_min == self.kappa_max and self.n_kappa > 1
        ):
            raise ValueError("kappa axis must be strictly increasing")
        if self.gamma_min_MHz > self.gamma_max_MHz or (
            self.gamma_min_MHz == self.gamma_max_MHz and self.n_gamma > 1
        ):
            raise ValueError("gamma axis must be strictly increasing")
        return self

    def kappa_axis(self) -> np.ndarray:
        return np.logspace(np.log10(self.kappa_min), np.log10(self.kappa_max), self.n_kappa)

    def gamma_axis(self) -> np.ndarray:
        return np.logspace(
            np.log10(self.gamma_min_MHz), np.log10(self.gamma_max_MHz), self.n_gamma
        )


GRID_CORNER_LABEL = "gamma_star_MHz\\kappa_wg_over_kappa"


@dataclass
class SweepGrid:
    """Fidelity and success probability over (κ_wg/κ, γ*).

    Matrices are indexed [γ* row, κ_wg/κ column].
    """

    kappa_ratios: np.ndarray
    gamma_star_MHz: np.ndarray
    fidelity: np.ndarray
    success_probability: np.ndarray
    optimal_index: np.ndarray = field(init=False)

    def __post_init__(self):
        shape = (len(self.gamma_star_MHz), len(self.kappa_ratios))
        for name in ("fidelity", "success_probability"):
            if getattr(self, name).shape != shape:
                raise DomainError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}"
                )
        # argmax returns the first maximum, i.e. the smallest κ_wg/κ on ties
        self.optimal_index = np.argmax(self.fidelity, axis=1)

    @property
    def optimal_locus(self) -> np.ndarray:
        """κ_wg/κ maximizing fidelity for each γ*."""
        return self.kappa_ratios[self.optimal_index]

    def cell(self, coupling_ratio: float, gamma_star_MHz: float) -> tuple[float, float]:
        """(fidelity, success probability) of the cell nearest in log space."""
        def log(values):
            return np.log(np.maximum(values, 1e-300))

        i = int(np.argmin(np.abs(log(self.kappa_ratios) - log(coupling_ratio))))
        j = int(np.argmin(np.abs(log(self.gamma_star_MHz) - log(gamma_star_MHz))))
        return float(self.fidelity[j, i]), float(self.success_probability[j, i])

    def to_frames(self) -> tuple[pd.DataFrame, pd.DataFrame]:
        """Fidelity and success-probability matrices with axis labels."""
        frames = []
        for values in (self.fidelity, self.success_probability):
            df = pd.DataFrame(values, index=self.gamma_star_MHz, columns=self.kappa_ratios)
            df.index.name = GRID_CORNER_LABEL
            frames.append(df)
        return frames[0], frames[1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kappa_wg_over_kappa_dimless": self.kappa_ratios.tolist(),
            "gamma_star_MHz": self.gamma_star_MHz.tolist(),
            "optimal_kappa_wg_over_kappa_dimless": self.optimal_locus.tolist(),
            "optimal_fidelity_dimless": self.fidelity[
                np.arange(len(self.gamma_star_MHz)), self.optimal_index
            ].tolist(),
            "fidelity_max_dimless": float(self.fidelity.max()),
            "fidelity_min_dimless": float(self.fidelity.min()),
            "success_probability_max_dimless": float(self.success_probability.max()),
            "success_probability_min_dimless": float(self.success_probability.min()),
        }
