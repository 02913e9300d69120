"""Application entry point for the FastAPI service."""

from __future__ import annotations

import logging
from collections.abc import AsyncIterator
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, RedirectResponse

from .config import get_settings, setup_logging
from .errors import InfoRegError
from .routes import compute as compute_routes
from .routes import meta as meta_routes
from .services.presets import get_preset_registry

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(_: FastAPI) -> AsyncIterator[None]:
    """Warm up the preset registry and log startup/shutdown."""
    settings = get_settings()
    setup_logging(settings)

    logger.info("Starting up inforeg service v%s", settings.version)
    try:
        registry = get_preset_registry()
        if registry.is_empty:
            logger.warning(
                "Density preset registry is EMPTY - 'preset:<name>' densities will be rejected"
            )
        else:
            logger.info("Preset registry warmed up with %d densities", len(registry))
    except Exception as e:
        logger.error("Failed to warm up preset registry: %s", e)

    yield
    logger.info("Shutting down inforeg service")


async def _unprocessable(request: Request, exc: Exception) -> JSONResponse:
    logger.warning("%s %s rejected: %s", request.method, request.url.path, exc)
    return JSONResponse(status_code=422, content={"detail": str(exc)})


def create_app() -> FastAPI:
    """Create and configure the FastAPI application instance."""

    settings = get_settings()
    app = FastAPI(
        title="inforeg",
        version=settings.version,
        docs_url="/docs",
        redoc_url="/redoc",
        lifespan=lifespan,
    )

    app.include_router(meta_routes.router)
    app.include_router(compute_routes.router)
    # Input ValueErrors include pydantic's ValidationError raised inside handlers.
    app.add_exception_handler(InfoRegError, _unprocessable)
    app.add_exception_handler(ValueError, _unprocessable)

    @app.get("/", include_in_schema=False)
    async def root() -> RedirectResponse:
        """Redirect the root path to the interactive docs."""
        return RedirectResponse(url="/docs")

    return app


app = create_app()


__all__ = ["app", "create_app"]
