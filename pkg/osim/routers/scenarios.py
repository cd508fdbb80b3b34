# osim/routers/scenarios.py
import asyncio
import logging
import time
from typing import Annotated, Dict, List

from fastapi import APIRouter, Body, Depends, HTTPException, Path, status

from osim.config import AppSettings
from osim.core.exceptions import ConfigParseError, OsimError, UnknownScenarioError
from osim.core.harness import verify_scenario
from osim.core.scenarios import TheoremScenario, get_scenario
from osim.dependencies import get_app_settings, get_catalog
from osim.models.config_models import ExperimentConfig
from osim.models.report_models import ScenarioInfo, VerifyResponse

logger = logging.getLogger(__name__)
router = APIRouter()
MODULE_NAME = "Scenarios Service"
TAG_SCENARIOS = "Theorem Scenarios"

SettingsDep = Annotated[AppSettings, Depends(get_app_settings)]
CatalogDep = Annotated[Dict[str, TheoremScenario], Depends(get_catalog)]


def _check_module_enabled(current_settings: SettingsDep):
    if not current_settings.ENABLE_SCENARIOS_MODULE:
        logger.warning(f"{MODULE_NAME} is disabled in configuration.")
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail=f"{MODULE_NAME} is currently disabled.",
        )


@router.get(
    "/",
    response_model=List[ScenarioInfo],
    summary="List the Scenario Catalog",
    tags=[TAG_SCENARIOS],
    dependencies=[Depends(_check_module_enabled)],
)
async def list_all_scenarios(catalog: CatalogDep):
    logger.debug(f"Returning {len(catalog)} scenarios.")
    return [scenario.info() for scenario in catalog.values()]


@router.get(
    "/{scenario_id}",
    response_model=ScenarioInfo,
    summary="Get One Scenario",
    tags=[TAG_SCENARIOS],
    dependencies=[Depends(_check_module_enabled)],
)
async def get_one_scenario(scenario_id: Annotated[str, Path(...)]):
    try:
        return get_scenario(scenario_id).info()
    except UnknownScenarioError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))


@router.post(
    "/{scenario_id}/verify",
    response_model=VerifyResponse,
    summary="Verify a Scenario",
    tags=[TAG_SCENARIOS],
    dependencies=[Depends(_check_module_enabled)],
)
async def verify_one_scenario(
    scenario_id: Annotated[str, Path(...)],
    config: Annotated[ExperimentConfig, Body(...)],
):
    logger.info(f"Request to verify scenario '{scenario_id}' (seed={config.seed})")
    start = time.perf_counter()
    try:
        report = await asyncio.to_thread(verify_scenario, scenario_id, config)
    except UnknownScenarioError as e:
        raise HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    except ConfigParseError as e:
        logger.warning(f"Invalid config for '{scenario_id}': {e}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
                            detail={"message": str(e), "field": e.field})
    except OsimError as e:
        logger.warning(f"Scenario '{scenario_id}' could not be built: {e}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=f"{type(e).__name__}: {e}")
    except Exception as e:
        logger.error(f"Unexpected error verifying '{scenario_id}': {e}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"An unexpected error occurred: {str(e)}",
        )
    return VerifyResponse(report=report, wall_time=time.perf_counter() - start)
