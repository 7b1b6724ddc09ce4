"""Tests for presets and configuration resolution."""

import json

import pytest
from pydantic import ValidationError

from spin_photon_toolkit.config import CouplingMode, load_config, resolve_config
from spin_photon_toolkit.data import (
    deep_merge,
    get_chain,
    get_channels,
    get_preset,
    get_system,
    list_chains,
    list_presets,
)
from spin_photon_toolkit.errors import DomainError
from spin_photon_toolkit.models import DephasingModel
from spin_photon_toolkit.units import wl_to_freq


class TestPresets:
    """Tests for the bundled preset registry."""

    def test_list(self):
        presets = list_presets()
        for name in ("paper-blue-star", "paper-red-star", "paper-fig5", "paper-improved", "table1-ch4"):
            assert name in presets
        assert list_chains() == ["paper-current", "paper-improved"]

    def test_unknown_preset(self):
        with pytest.raises(DomainError, match="Available"):
            get_preset("paper-green-star")

    def test_inheritance(self):
        fig5 = get_preset("paper-fig5")
        assert "inherits" not in fig5
        assert fig5["cavity"]["coupling_ratio"] == 0.62
        assert [m["label"] for m in fig5["sweep"]["markers"]] == ["blue-star", "red-star"]

    def test_presets_are_fresh_copies(self):
        first = get_preset("paper-red-star")
        first["cavity"]["coupling_ratio"] = 0.1
        assert get_preset("paper-red-star")["cavity"]["coupling_ratio"] == 0.62

    def test_improved_uses_improved_chain(self):
        config = resolve_config(preset="paper-improved")
        assert config.chain.name == "paper-improved"
        assert config.detector_efficiency == 0.99
        assert config.cavity.coupling_ratio == 0.62

    def test_channels(self):
        channels = get_channels()
        assert [c.channel for c in channels] == ["ch2", "ch4", "ch5", "ch6"]
        assert channels[1].quality_factor == 2280

    def test_get_chain_unknown(self):
        with pytest.raises(DomainError):
            get_chain("paper-future")

    def test_get_system(self):
        system = get_system("paper-red-star")
        assert system.g_over_2pi_GHz == pytest.approx(2.75, abs=0.05)
        assert system.cavity.kappa.over_2pi_ghz == pytest.approx(212.3, abs=0.1)

    def test_table1_preset_tunes_cavity_onto_zpl(self):
        config = resolve_config(preset="table1-ch4")
        assert config.cavity.resonance_THz == pytest.approx(config.emitter.zpl_THz)


class TestDeepMerge:
    """Tests for deep_merge."""

    def test_nested(self):
        merged = deep_merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
        assert merged == {"a": {"x": 1, "y": 3}, "b": 1}

    def test_lists_replace(self):
        assert deep_merge({"a": [1, 2]}, {"a": [3]}) == {"a": [3]}

    def test_base_untouched(self):
        base = {"a": {"x": 1}}
        deep_merge(base, {"a": {"x": 2}})
        assert base == {"a": {"x": 1}}


class TestResolveConfig:
    """Tests for resolve_config and load_config."""

    def test_nothing_to_configure(self):
        with pytest.raises(DomainError, match="Nothing"):
            resolve_config()

    def test_overrides_win(self):
        config = resolve_config(
            preset="paper-red-star",
            overrides={"cavity": {"coupling_ratio": 0.4, "scatter_ratio": 0.6}},
        )
        assert config.cavity.coupling_ratio == 0.4
        assert config.cavity.quality_factor == 2280
        assert config.preset == "paper-red-star"

    def test_toml_file_names_preset(self, tmp_path):
        path = tmp_path / "device.toml"
        path.write_text(
            'preset = "paper-red-star"\n'
            "\n"
            "[emitter]\n"
            "gamma_star_MHz = 50.0\n"
            "\n"
            "[protocol]\n"
            'dephasing_model = "fast_linewidth"\n'
        )
        config = load_config(path)
        assert config.preset == "paper-red-star"
        assert config.emitter.gamma_star_MHz == 50.0
        assert config.emitter.tau_on_ns == 1.12
        assert config.protocol.dephasing_model is DephasingModel.FAST_LINEWIDTH

    def test_preset_argument_beats_file_preset(self, tmp_path):
        path = tmp_path / "device.toml"
        path.write_text('preset = "paper-red-star"\n')
        config = resolve_config(preset="paper-blue-star", path=path)
        assert config.cavity.coupling_ratio == 0.005

    def test_json_file(self, tmp_path):
        path = tmp_path / "device.json"
        path.write_text(
            json.dumps(
                {
                    "cavity": {"resonance_nm": 619.26, "quality_factor": 2000, "coupling_ratio": 0.7},
                    "emitter": {"zpl_nm": 619.26, "tau_on_ns": 1.0, "tau_off_ns": 5.5},
                    "coupling": {"mode": "explicit", "g_over_2pi_GHz": 3.0},
                    "chain": "paper-current",
                }
            )
        )
        config = load_config(path)
        assert config.preset is None
        assert config.coupling.mode is CouplingMode.EXPLICIT
        assert config.system().g_over_2pi_GHz == 3.0
        assert config.cavity.resonance_THz == pytest.approx(wl_to_freq(619.26).thz)
        assert config.chain.name == "paper-current"

    def test_wavelength_override_replaces_inherited_frequency(self):
        config = resolve_config(preset="paper-red-star", overrides={"cavity": {"resonance_nm": 619.0}})
        assert config.cavity.resonance_nm == pytest.approx(619.0)

    def test_explicit_coupling_requires_g(self):
        with pytest.raises(ValidationError):
            resolve_config(preset="paper-red-star", overrides={"coupling": {"mode": "explicit"}})

    def test_invalid_partition(self):
        with pytest.raises(ValidationError):
            resolve_config(preset="paper-red-star", overrides={"cavity": {"coupling_ratio": 0.9}})

    def test_missing_file(self, tmp_path):
        with pytest.raises(DomainError, match="not found"):
            load_config(tmp_path / "absent.toml")

    def test_unparseable_file(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("[cavity\n")
        with pytest.raises(DomainError, match="Cannot parse"):
            load_config(path)

    def test_inline_chain(self):
        config = resolve_config(
            preset="paper-red-star",
            overrides={"chain": {"name": "bench", "stages": [{"name": "lens", "loss_dB": 1.0}]}},
        )
        assert config.chain.name == "bench"
        assert config.chain.stages[0].value == pytest.approx(0.7943, abs=1e-4)
