"""Route groups for the FastAPI application."""

__all__ = [
    "compute",
    "meta",
]
