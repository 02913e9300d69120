"""Service layer shared by the CLI and the FastAPI application."""

__all__ = [
    "presets",
]
