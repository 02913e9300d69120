"""Meta endpoints such as health checks and version info."""

from __future__ import annotations

from typing import Union

from fastapi import APIRouter, Depends

from ..config import Settings, get_settings
from ..services.presets import PresetRegistry, get_preset_registry

router = APIRouter(tags=["meta"])


def preset_registry_dependency() -> PresetRegistry:
    return get_preset_registry()


@router.get("/health")
async def health(
    presets: PresetRegistry = Depends(preset_registry_dependency),
) -> dict[str, Union[str, int]]:
    """Return application health status."""

    try:
        if presets.is_empty:
            return {"status": "degraded", "reason": "density preset registry empty"}
        return {"status": "ok", "presets_loaded": len(presets)}
    except Exception as e:
        return {"status": "degraded", "reason": f"health check error: {e}"}


@router.get("/version")
async def version(settings: Settings = Depends(get_settings)) -> dict[str, str]:
    """Return the application version."""

    return {"version": settings.version}


@router.get("/presets")
async def presets(
    registry: PresetRegistry = Depends(preset_registry_dependency),
) -> dict[str, list[str]]:
    """List the density preset names accepted as ``"preset:<name>"``."""

    return {"presets": registry.names()}


__all__ = ["preset_registry_dependency", "router"]
