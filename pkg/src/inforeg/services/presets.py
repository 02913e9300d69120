"""Named density presets shared by the CLI and the HTTP routes."""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..config import get_settings
from ..densities import Density, parse_density
from ..errors import ConfigurationError

logger = logging.getLogger(__name__)

PRESET_PREFIX = "preset:"


def _normalize(name: str) -> str:
    return " ".join(name.split()).lower()


class PresetRegistry:
    """Maps preset names to validated densities.

    Lookups are case-insensitive and ignore repeated whitespace.
    """

    def __init__(self, presets: Mapping[str, Density]):
        self._presets: dict[str, Density] = {
            _normalize(name): density for name, density in presets.items() if name.strip()
        }
        logger.debug("Preset registry initialized with %d densities", len(self._presets))

    def get(self, name: str) -> Density:
        try:
            return self._presets[_normalize(name)]
        except KeyError:
            known = ", ".join(sorted(self._presets)) or "none"
            raise ConfigurationError(f"unknown density preset '{name}' (known: {known})") from None

    def __contains__(self, name: object) -> bool:
        return isinstance(name, str) and _normalize(name) in self._presets

    def names(self) -> list[str]:
        return sorted(self._presets)

    def items(self) -> list[tuple[str, Density]]:
        return sorted(self._presets.items())

    def __len__(self) -> int:
        return len(self._presets)

    @property
    def is_empty(self) -> bool:
        return not self._presets

    def resolve(self, value: Density | str | Mapping[str, Any]) -> Density:
        """Turn ``"preset:<name>"``, a density JSON object or a density into a density."""

        if isinstance(value, str):
            if not value.startswith(PRESET_PREFIX):
                raise ConfigurationError(
                    f"density strings must look like '{PRESET_PREFIX}<name>', got '{value}'"
                )
            return self.get(value[len(PRESET_PREFIX):])
        return parse_density(value)


def _default_data_path() -> Path:
    # src/inforeg/services/presets.py -> src/inforeg/data/densities.json
    return Path(__file__).resolve().parent.parent / "data" / "densities.json"


def _load_presets(path: Path) -> dict[str, Density]:
    """Read and validate the preset file; bad entries are skipped with a warning."""

    logger.info("Loading density presets from %s", path)
    if not path.exists():
        logger.error("Density preset file not found: %s", path)
        return {}

    try:
        with path.open("r", encoding="utf-8") as fp:
            items = json.load(fp)
    except json.JSONDecodeError as e:
        logger.error("Density preset file contains invalid JSON at %s: %s", path, e)
        return {}
    except OSError as e:
        logger.error("Failed to read density preset file %s: %s", path, e)
        return {}

    if not isinstance(items, dict):
        logger.error(
            "Density preset file must contain a JSON object, got %s: %s",
            type(items).__name__,
            path,
        )
        return {}

    presets: dict[str, Density] = {}
    seen: set[str] = set()
    for name, spec in items.items():
        normalized = _normalize(name)
        if not normalized:
            logger.warning("Skipping density preset with an empty name")
            continue
        if normalized in seen:
            logger.warning("Duplicate density preset found (case-insensitive): %s", name)
            continue
        try:
            presets[name.strip()] = parse_density(spec)
        except ValidationError as e:
            logger.warning("Skipping invalid density preset %s: %s", name, e.errors()[0]["msg"])
            continue
        seen.add(normalized)

    logger.info("Loaded %d density presets", len(presets))
    return presets


@lru_cache(maxsize=4)
def load_preset_registry(path: Path) -> PresetRegistry:
    """Load the preset registry once per resolved file path.

    The registry is immutable after creation and safe to share between requests.
    """

    presets = _load_presets(path)
    if not presets:
        logger.warning("Density preset registry is empty")
    return PresetRegistry(presets)


def get_preset_registry(path: Path | None = None) -> PresetRegistry:
    """Registry for ``path``, else the configured presets file, else the bundled one."""

    data_path = path or get_settings().presets_path or _default_data_path()
    return load_preset_registry(Path(data_path).resolve())


def resolve_density(value: Density | str | Mapping[str, Any]) -> Density:
    """Resolve a density reference against the default registry."""

    return get_preset_registry().resolve(value)


__all__ = [
    "PRESET_PREFIX",
    "PresetRegistry",
    "get_preset_registry",
    "load_preset_registry",
    "resolve_density",
]
