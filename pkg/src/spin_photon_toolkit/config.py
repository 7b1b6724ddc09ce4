"""Device configuration: preset resolution, TOML/JSON loading and overrides.

A configuration file names an optional bundled preset and overrides any of
its tables::

    preset = "paper-red-star"

    [cavity]
    coupling_ratio = 0.4
    scatter_ratio = 0.6

    [protocol]
    dephasing_model = "fast_linewidth"
"""

import json
import logging
import sys
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, model_validator

from spin_photon_toolkit.data import deep_merge, get_chain, get_preset
from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models import (
    CavityParams,
    EfficiencyChain,
    EfficiencyPair,
    EmitterParams,
    ProtocolConfig,
    SpinCavitySystem,
    SpinUpModel,
    SweepSettings,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

# (table, key) pairs where either spelling may be given; a user override in
# one spelling replaces an inherited value in the other
_SPELLINGS = {
    "cavity": ("resonance_nm", "resonance_THz"),
    "emitter": ("zpl_nm", "zpl_THz"),
}


class CouplingMode(str, Enum):
    """Where the coherent coupling g comes from."""

    FROM_LIFETIMES = "from_lifetimes"  # g = √(κ/τ_on)/2
    EXPLICIT = "explicit"  # g_over_2pi_GHz as given


class CouplingSettings(BaseModel):
    """Coupling table of a device configuration."""

    mode: CouplingMode = CouplingMode.FROM_LIFETIMES
    g_over_2pi_GHz: float | None = Field(default=None, ge=0)
    spin_up_model: SpinUpModel = SpinUpModel.UNCOUPLED

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="after")
    def check_explicit(self) -> "CouplingSettings":
        if self.mode is CouplingMode.EXPLICIT and self.g_over_2pi_GHz is None:
            raise ValueError("coupling mode 'explicit' requires g_over_2pi_GHz")
        return self


class DeviceConfig(BaseModel):
    """Fully resolved device configuration.

    ``chain`` may be given as the name of a bundled chain or as an inline
    table with a ``stages`` array.
    """

    preset: str | None = None
    description: str = ""
    channel: str | None = None
    cavity: CavityParams
    emitter: EmitterParams
    coupling: CouplingSettings = Field(default_factory=CouplingSettings)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    efficiencies: EfficiencyPair = Field(default_factory=EfficiencyPair)
    chain: EfficiencyChain | None = None
    detector_efficiency: float = Field(default=0.65, ge=0, le=1)
    sweep: SweepSettings = Field(default_factory=SweepSettings)

    model_config = {"frozen": True, "populate_by_name": True}

    @model_validator(mode="before")
    @classmethod
    def resolve_chain_name(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("chain"), str):
            data = dict(data)
            data["chain"] = get_chain(data["chain"])
        return data

    def system(self) -> SpinCavitySystem:
        """Compose the spin-cavity system described by this configuration."""
        if self.coupling.mode is CouplingMode.EXPLICIT:
            return SpinCavitySystem(
                cavity=self.cavity,
                emitter=self.emitter,
                g_over_2pi_GHz=self.coupling.g_over_2pi_GHz,
                spin_up_model=self.coupling.spin_up_model,
            )
        return SpinCavitySystem.from_lifetimes(
            self.cavity, self.emitter, spin_up_model=self.coupling.spin_up_model
        )


def _drop_shadowed(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    base = dict(base)
    for table, spellings in _SPELLINGS.items():
        given = override.get(table)
        inherited = base.get(table)
        if not isinstance(given, dict) or not isinstance(inherited, dict):
            continue
        for key in spellings:
            if key in given:
                others = [k for k in spellings if k != key]
                base[table] = {k: v for k, v in inherited.items() if k not in others}
    return base


def merge_overrides(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """deep_merge that also lets nm/THz spellings replace each other."""
    return deep_merge(_drop_shadowed(base, override), override)


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a TOML (or ``.json``) configuration file into a dict.

    Raises:
        DomainError: If the file is missing or cannot be parsed
    """
    path = Path(path)
    if not path.is_file():
        raise DomainError(f"Config file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            with open(path, "r") as f:
                return json.load(f)
        with open(path, "rb") as f:
            return tomllib.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise DomainError(f"Cannot parse config {path}: {e}") from e


def resolve_config(
    preset: str | None = None,
    path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> DeviceConfig:
    """Resolve preset < file < overrides into a validated DeviceConfig.

    Args:
        preset: Bundled preset name; a ``preset`` key in the file is used when
            this is None
        path: TOML or JSON configuration file
        overrides: Extra nested values applied last (e.g., from CLI flags)

    Raises:
        DomainError: Unknown preset, unreadable file, or nothing to resolve
        pydantic.ValidationError: If the merged record violates an invariant
    """
    user = read_config_file(path) if path is not None else {}
    name = preset or user.get("preset")
    user = {k: v for k, v in user.items() if k != "preset"}

    if name is None and not user:
        raise DomainError("Nothing to configure: give a preset or a config file")

    merged: dict[str, Any] = get_preset(name) if name else {}
    merged = merge_overrides(merged, user)
    if overrides:
        merged = merge_overrides(merged, overrides)
    merged["preset"] = name

    config = DeviceConfig.model_validate(merged)
    logger.debug(
        f"Resolved config (preset={name}, file={path}): "
        f"Q={config.cavity.quality_factor}, kappa_wg/kappa={config.cavity.coupling_ratio}"
    )
    return config


def load_config(path: str | Path) -> DeviceConfig:
    """Load a configuration file, resolving any preset it names."""
    return resolve_config(path=path)
