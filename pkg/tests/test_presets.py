from __future__ import annotations

import json
import logging
from pathlib import Path

import pytest

from inforeg.config import get_settings
from inforeg.densities import Gaussian, Mixture, Uniform1D
from inforeg.errors import ConfigurationError
from inforeg.services.presets import (
    PresetRegistry,
    _load_presets,
    get_preset_registry,
    load_preset_registry,
    resolve_density,
)


@pytest.fixture
def registry() -> PresetRegistry:
    return PresetRegistry(
        {
            "Unit Box": Uniform1D(lo=0.0, hi=1.0),
            "normal": Gaussian(mean=(0.0,), variance=1.0),
        }
    )


def _write(path: Path, payload: object) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_lookup_ignores_case_and_whitespace(registry: PresetRegistry) -> None:
    assert registry.get("unit box") == Uniform1D(lo=0.0, hi=1.0)
    assert registry.get("  UNIT   box ") == Uniform1D(lo=0.0, hi=1.0)
    assert "Normal" in registry
    assert "unit" not in registry
    assert 3 not in registry
    assert registry.names() == ["normal", "unit box"]
    assert len(registry) == 2
    assert not registry.is_empty


def test_unknown_preset_lists_known_names(registry: PresetRegistry) -> None:
    with pytest.raises(ConfigurationError, match="known: normal, unit box"):
        registry.get("laplace")


def test_empty_registry() -> None:
    registry = PresetRegistry({})
    assert registry.is_empty
    assert registry.items() == []
    with pytest.raises(ConfigurationError, match="known: none"):
        registry.get("gaussian")


def test_resolve_accepts_references_objects_and_densities(registry: PresetRegistry) -> None:
    normal = Gaussian(mean=(0.0,), variance=1.0)
    assert registry.resolve("preset:Normal") == normal
    assert registry.resolve({"kind": "gaussian", "mean": [0.0], "variance": 1.0}) == normal
    assert registry.resolve(normal) is normal


def test_resolve_rejects_bare_names(registry: PresetRegistry) -> None:
    with pytest.raises(ConfigurationError, match="preset:<name>"):
        registry.resolve("normal")


def test_load_presets_missing_file(tmp_path: Path) -> None:
    assert _load_presets(tmp_path / "absent.json") == {}


def test_load_presets_invalid_json(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert _load_presets(path) == {}


def test_load_presets_requires_object(tmp_path: Path) -> None:
    path = _write(tmp_path / "list.json", [{"kind": "uniform", "lo": 0, "hi": 1}])
    assert _load_presets(path) == {}


def test_load_presets_skips_invalid_entries(
    tmp_path: Path, caplog: pytest.LogCaptureFixture
) -> None:
    path = _write(
        tmp_path / "presets.json",
        {
            "box": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
            "reversed": {"kind": "uniform", "lo": 1.0, "hi": 0.0},
            "mystery": {"kind": "cauchy"},
            "scalar": 3,
            " ": {"kind": "uniform", "lo": 0.0, "hi": 1.0},
        },
    )

    with caplog.at_level(logging.WARNING, logger="inforeg.services.presets"):
        presets = _load_presets(path)

    assert list(presets) == ["box"]
    assert "Skipping invalid density preset reversed" in caplog.text


def test_load_presets_keeps_first_duplicate(tmp_path: Path) -> None:
    path = tmp_path / "dupes.json"
    path.write_text(
        '{"Box": {"kind": "uniform", "lo": 0, "hi": 1},'
        ' "box": {"kind": "uniform", "lo": 0, "hi": 2}}',
        encoding="utf-8",
    )

    presets = _load_presets(path)

    assert presets == {"Box": Uniform1D(lo=0.0, hi=1.0)}


def test_registry_from_explicit_path(tmp_path: Path) -> None:
    path = _write(tmp_path / "one.json", {"box": {"kind": "uniform", "lo": 0.0, "hi": 1.0}})

    registry = get_preset_registry(path)

    assert registry.names() == ["box"]
    assert get_preset_registry(path) is registry


def test_registry_path_from_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    path = _write(tmp_path / "env.json", {"wide": {"kind": "uniform", "lo": -5.0, "hi": 5.0}})
    monkeypatch.setenv("INFOREG_PRESETS_PATH", str(path))

    assert resolve_density("preset:wide") == Uniform1D(lo=-5.0, hi=5.0)


def test_registry_follows_configured_path(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    box = {"box": {"kind": "uniform", "lo": 0.0, "hi": 1.0}}
    wide = {"wide": {"kind": "uniform", "lo": -5.0, "hi": 5.0}}
    first = _write(tmp_path / "first.json", box)
    second = _write(tmp_path / "second.json", wide)
    monkeypatch.setenv("INFOREG_PRESETS_PATH", str(first))
    assert get_preset_registry().names() == ["box"]

    # a settings reload is enough; the registry cache is keyed on the file
    monkeypatch.setenv("INFOREG_PRESETS_PATH", str(second))
    get_settings.cache_clear()

    assert get_preset_registry().names() == ["wide"]
    assert get_preset_registry(first) is load_preset_registry(first.resolve())


def test_bundled_presets() -> None:
    registry = get_preset_registry()

    assert registry.names() == [
        "bimodal",
        "gaussian",
        "laplace",
        "two-bumps",
        "two-gaussians",
        "uniform",
    ]
    bimodal = registry.get("bimodal")
    assert isinstance(bimodal, Mixture)
    assert bimodal.dim == 1
    assert registry.get("two-gaussians").dim == 2
