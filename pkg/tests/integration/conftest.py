# tests/integration/conftest.py
from typing import AsyncGenerator, Callable

import httpx
import pytest
from fastapi import FastAPI
from httpx import AsyncClient

from osim.config import AppSettings
from osim.dependencies import get_app_settings
from osim.main import app


@pytest.fixture(scope="function")
def temp_settings_for_test(tmp_path) -> AppSettings:
    """Settings pointing every writable path into the test's tmp dir, with a small sample size."""
    return AppSettings(
        LOG_DIR=tmp_path / "logs",
        OUTPUT_DIR=tmp_path / "reports",
        LOG_LEVEL="DEBUG",
        DEFAULT_SAMPLE_SIZE=2000,
        WORKERS=1,
    )


@pytest.fixture(scope="function")
def app_for_integration_tests(temp_settings_for_test: AppSettings) -> FastAPI:
    app.dependency_overrides[get_app_settings] = lambda: temp_settings_for_test
    yield app
    app.dependency_overrides.clear()


@pytest.fixture(scope="function")
def override_settings(app_for_integration_tests: FastAPI, temp_settings_for_test: AppSettings) -> Callable:
    """Swap in a copy of the test settings with some fields changed."""

    def apply(**changes) -> AppSettings:
        settings = temp_settings_for_test.model_copy(update=changes)
        app_for_integration_tests.dependency_overrides[get_app_settings] = lambda: settings
        return settings

    return apply


@pytest.fixture(scope="function")
async def test_client(app_for_integration_tests: FastAPI) -> AsyncGenerator[AsyncClient, None]:
    """HTTPX AsyncClient talking to the app in-process."""
    async with AsyncClient(
        transport=httpx.ASGITransport(app=app_for_integration_tests), base_url="http://testserver"
    ) as client:
        yield client
