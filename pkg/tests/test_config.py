from __future__ import annotations

import io
import logging
import os
from collections.abc import Iterator
from pathlib import Path

import pytest
from pydantic import ValidationError

from inforeg.config import Settings, get_settings, setup_logging


@pytest.fixture
def isolated_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Iterator[None]:
    """Keep stray INFOREG_* variables and .env files out of these tests."""
    for name in list(os.environ):
        if name.startswith("INFOREG_"):
            monkeypatch.delenv(name)
    monkeypatch.chdir(tmp_path)
    yield


@pytest.fixture
def restore_root_logger() -> Iterator[None]:
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_defaults(isolated_env: None) -> None:
    settings = Settings()
    assert settings.env == "dev"
    assert settings.version == "0.1.0"
    assert settings.log_level == "INFO"
    assert (settings.host, settings.port, settings.workers) == ("127.0.0.1", 8000, 1)
    assert settings.presets_path is None


def test_environment_overrides(isolated_env: None, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("INFOREG_PORT", "9001")
    monkeypatch.setenv("INFOREG_WORKERS", "4")
    monkeypatch.setenv("INFOREG_LOG_LEVEL", "debug")
    monkeypatch.setenv("INFOREG_PRESETS_PATH", "/tmp/presets.json")

    settings = get_settings()

    assert settings.port == 9001
    assert settings.workers == 4
    assert settings.log_level == "DEBUG"
    assert settings.presets_path == Path("/tmp/presets.json")
    assert get_settings() is settings


def test_dotenv_file_is_read(isolated_env: None, tmp_path: Path) -> None:
    (tmp_path / ".env").write_text("INFOREG_ENV=prod\nINFOREG_VERSION= 1.2.3 \n", encoding="utf-8")

    settings = Settings()

    assert settings.env == "prod"
    assert settings.version == "1.2.3"


@pytest.mark.parametrize(
    "field, value",
    [
        ("log_level", "LOUD"),
        ("workers", 0),
        ("version", "   "),
        ("env", "staging"),
    ],
)
def test_invalid_settings(isolated_env: None, field: str, value: object) -> None:
    with pytest.raises(ValidationError):
        Settings(**{field: value})


def test_setup_logging_writes_to_stream(
    isolated_env: None, restore_root_logger: None
) -> None:
    stream = io.StringIO()

    setup_logging(Settings(log_level="warning"), stream=stream)
    logging.getLogger("inforeg.test").info("hidden")
    logging.getLogger("inforeg.test").warning("shown")

    assert logging.getLogger().level == logging.WARNING
    output = stream.getvalue()
    assert "hidden" not in output
    assert "inforeg.test - WARNING - shown" in output
