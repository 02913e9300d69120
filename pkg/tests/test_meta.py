from __future__ import annotations

from collections.abc import AsyncIterator, Iterator

import pytest
import pytest_asyncio
from httpx import ASGITransport, AsyncClient

from inforeg.main import app
from inforeg.routes.meta import preset_registry_dependency
from inforeg.services.presets import PresetRegistry


@pytest.fixture(autouse=True)
def restore_overrides() -> Iterator[None]:
    """Restore app dependency overrides after each test."""
    original = app.dependency_overrides.copy()
    yield
    app.dependency_overrides = original


@pytest_asyncio.fixture
async def client() -> AsyncIterator[AsyncClient]:
    """Provide an async HTTP client for testing."""
    transport = ASGITransport(app=app)
    async with AsyncClient(transport=transport, base_url="http://test") as async_client:
        yield async_client


@pytest.mark.asyncio
async def test_health_endpoint(client: AsyncClient) -> None:
    response = await client.get("/health")

    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "ok"
    assert isinstance(data["presets_loaded"], int)
    assert data["presets_loaded"] > 0


@pytest.mark.asyncio
async def test_health_degraded_without_presets(client: AsyncClient) -> None:
    app.dependency_overrides[preset_registry_dependency] = lambda: PresetRegistry({})

    response = await client.get("/health")

    assert response.status_code == 200
    assert response.json() == {"status": "degraded", "reason": "density preset registry empty"}


@pytest.mark.asyncio
async def test_version_endpoint(client: AsyncClient) -> None:
    response = await client.get("/version")

    assert response.status_code == 200
    payload = response.json()
    assert payload == {"version": "0.1.0"}


@pytest.mark.asyncio
async def test_presets_endpoint(client: AsyncClient) -> None:
    response = await client.get("/presets")

    assert response.status_code == 200
    names = response.json()["presets"]
    assert names == sorted(names)
    assert {"gaussian", "uniform", "two-bumps"} <= set(names)


@pytest.mark.asyncio
async def test_root_redirects_to_docs(client: AsyncClient) -> None:
    response = await client.get("/")

    assert response.status_code == 307
    assert response.headers["location"] == "/docs"
