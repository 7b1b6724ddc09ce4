"""Data loading utilities for bundled device presets.

This module provides functions to load the bundled data file:
- Device presets (demonstrated and projected operating points, Table-1 channels)
- Efficiency chains (current and improved collection paths)
- Characterized channel records
"""

import copy
import json
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Any

from spin_photon_toolkit.errors import DomainError

if TYPE_CHECKING:
    from spin_photon_toolkit.models import ChannelRecord, EfficiencyChain, SpinCavitySystem

# Package data directory
DATA_DIR = Path(__file__).parent

SCHEMA_VERSION = 1


@lru_cache(maxsize=1)
def load_presets() -> dict[str, Any]:
    """Load the preset registry from the bundled JSON file.

    Returns:
        Dict with "chains", "channels" and "presets" sections

    Example:
        >>> registry = load_presets()
        >>> registry["presets"]["paper-blue-star"]["cavity"]["quality_factor"]
        2280
    """
    presets_file = DATA_DIR / "presets.json"
    with open(presets_file, "r") as f:
        registry = json.load(f)

    version = registry.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DomainError(
            f"{presets_file} has schema_version {version}, expected {SCHEMA_VERSION}"
        )
    return registry


def deep_merge(base: dict[str, Any], override: dict[str, Any]) -> dict[str, Any]:
    """Recursively merge ``override`` into a copy of ``base``.

    Nested dicts merge key by key; any other value in ``override`` replaces
    the base value, lists included.
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _lookup(section: str, name: str) -> dict[str, Any]:
    entries = load_presets()[section]
    if name not in entries:
        available = ", ".join(sorted(entries))
        raise DomainError(f"Unknown {section[:-1]} '{name}'. Available: {available}")
    return entries[name]


def get_preset(name: str) -> dict[str, Any]:
    """Get a preset with its ``inherits`` chain resolved.

    Args:
        name: Preset name (e.g., 'paper-red-star')

    Returns:
        Fresh dict safe to mutate

    Raises:
        DomainError: If the preset, or one it inherits from, is unknown
    """
    seen: list[str] = []
    layers: list[dict[str, Any]] = []
    current: str | None = name
    while current is not None:
        if current in seen:
            raise DomainError(f"Preset inheritance cycle: {' -> '.join([*seen, current])}")
        seen.append(current)
        entry = dict(_lookup("presets", current))
        current = entry.pop("inherits", None)
        layers.append(entry)

    resolved: dict[str, Any] = {}
    for layer in reversed(layers):
        resolved = deep_merge(resolved, layer)
    return resolved


def get_chain(name: str) -> "EfficiencyChain":
    """Get a bundled efficiency chain.

    Args:
        name: Chain name ('paper-current' or 'paper-improved')

    Returns:
        Validated EfficiencyChain
    """
    from spin_photon_toolkit.models import EfficiencyChain

    return EfficiencyChain.model_validate(_lookup("chains", name))


def get_channels() -> list["ChannelRecord"]:
    """Get the characterized channel records in channel order.

    Returns:
        List of ChannelRecord
    """
    from spin_photon_toolkit.models import ChannelRecord

    channels = load_presets()["channels"]
    return [ChannelRecord.model_validate(channels[key]) for key in sorted(channels)]


def get_system(name: str) -> "SpinCavitySystem":
    """Build the spin-cavity system of a preset.

    Example:
        >>> system = get_system("paper-blue-star")
        >>> round(system.g_over_2pi_GHz, 1)
        2.8
    """
    from spin_photon_toolkit.config import resolve_config

    return resolve_config(preset=name).system()


def list_presets() -> list[str]:
    """List all preset names.

    Returns:
        Sorted list of preset names
    """
    return sorted(load_presets()["presets"].keys())


def list_chains() -> list[str]:
    """List all bundled chain names.

    Returns:
        Sorted list of chain names
    """
    return sorted(load_presets()["chains"].keys())


# Re-export for convenience
__all__ = [
    "load_presets",
    "deep_merge",
    "get_preset",
    "get_chain",
    "get_channels",
    "get_system",
    "list_presets",
    "list_chains",
    "DATA_DIR",
    "SCHEMA_VERSION",
]
