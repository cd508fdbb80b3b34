# osim/routers/system.py
import logging
from typing import Annotated, Dict

from fastapi import APIRouter, Depends, HTTPException, status

from osim.config import AppSettings
from osim.core.scenarios import TheoremScenario
from osim.dependencies import get_app_settings, get_catalog
from osim.models.common import ModuleState, PingResponse, SamplingInfo, StatusResponse

logger = logging.getLogger(__name__)
router = APIRouter()
MODULE_NAME = "System Service"
TAG_SYSTEM_INFO = "System Information"

# Type Alias for Dependency
SettingsDep = Annotated[AppSettings, Depends(get_app_settings)]
CatalogDep = Annotated[Dict[str, TheoremScenario], Depends(get_catalog)]


def _check_module_enabled(current_settings: SettingsDep):
    if not current_settings.ENABLE_SYSTEM_MODULE:
        logger.warning(f"{MODULE_NAME} is disabled in configuration.")
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail=f"{MODULE_NAME} is currently disabled.",
        )


def _state(enabled: bool) -> ModuleState:
    return ModuleState.OK if enabled else ModuleState.DISABLED


@router.get(
    "/status",
    response_model=StatusResponse,
    summary="Get Service Status, Sampling Defaults and Module States",
    tags=[TAG_SYSTEM_INFO],
    dependencies=[Depends(_check_module_enabled)],
)
async def get_system_status(current_settings: SettingsDep, catalog: CatalogDep):
    logger.debug("Request for system status.")
    return StatusResponse(
        version=current_settings.APP_VERSION,
        debug_mode=current_settings.DEBUG,
        catalog_size=len(catalog),
        sampling=SamplingInfo(
            default_sample_size=current_settings.DEFAULT_SAMPLE_SIZE,
            chunk=current_settings.SAMPLING_CHUNK,
            workers=current_settings.WORKERS,
        ),
        modules={
            "system": _state(current_settings.ENABLE_SYSTEM_MODULE),
            "generators": _state(current_settings.ENABLE_GENERATORS_MODULE),
            "scenarios": _state(current_settings.ENABLE_SCENARIOS_MODULE),
        },
    )


@router.get(
    "/ping",
    response_model=PingResponse,
    summary="Ping System for Liveness Check",
    tags=[TAG_SYSTEM_INFO],
    dependencies=[Depends(_check_module_enabled)],
)
async def ping_system():
    logger.debug("Ping request received, sending pong.")
    return PingResponse()
