# osim/routers/generators.py
import logging
from typing import Annotated, List, Optional

from fastapi import APIRouter, Depends, HTTPException, Path, Query, status

from osim.config import AppSettings
from osim.core.copulagen import (
    builtin_names,
    check_condition,
    generator_diagnostics,
    kendall_tau,
    make_generator,
    validate_generator,
)
from osim.core.exceptions import OsimError, UnknownGeneratorError
from osim.core.grids import generator_grid
from osim.dependencies import get_app_settings
from osim.models.api_models import GeneratorCheckResponse
from osim.models.verdict_models import ConditionId, GeneratorDiagnostics

logger = logging.getLogger(__name__)
router = APIRouter()
MODULE_NAME = "Generators Service"
TAG_GENERATORS = "Archimedean Generators"

SettingsDep = Annotated[AppSettings, Depends(get_app_settings)]


def _check_module_enabled(current_settings: SettingsDep):
    if not current_settings.ENABLE_GENERATORS_MODULE:
        logger.warning(f"{MODULE_NAME} is disabled in configuration.")
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail=f"{MODULE_NAME} is currently disabled.",
        )


def _http_error(e: Exception, name: str) -> HTTPException:
    if isinstance(e, UnknownGeneratorError):
        logger.info(f"Unknown generator requested: '{name}'")
        return HTTPException(status_code=status.HTTP_404_NOT_FOUND, detail=str(e))
    if isinstance(e, OsimError):
        logger.warning(f"Generator request for '{name}' rejected: {e}")
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=f"{type(e).__name__}: {e}")
    logger.error(f"Unexpected error for generator '{name}': {e}", exc_info=True)
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=f"An unexpected error occurred: {e}")


@router.get(
    "/",
    response_model=List[str],
    summary="List Builtin Generators",
    tags=[TAG_GENERATORS],
    dependencies=[Depends(_check_module_enabled)],
)
async def list_generators():
    return builtin_names()


@router.get(
    "/{name}/check",
    response_model=GeneratorCheckResponse,
    summary="Check Generator Conditions and Validity",
    tags=[TAG_GENERATORS],
    dependencies=[Depends(_check_module_enabled)],
)
async def check_generator(
    name: Annotated[str, Path(..., description="Builtin generator name")],
    params: Annotated[Optional[List[float]], Query(description="Positional parameters, e.g. ?params=2")] = None,
    condition: Annotated[Optional[List[ConditionId]], Query(description="Conditions; all when omitted")] = None,
    n: Annotated[Optional[int], Query(ge=1, description="Dimension plugged into G(nu)")] = None,
    dim: Annotated[Optional[int], Query(ge=2, description="Also report d-monotonicity in this dimension")] = None,
    grid_points: Annotated[Optional[int], Query(ge=50, le=5000)] = None,
):
    logger.info(f"Request to check generator '{name}' with params {params}")
    try:
        gen = make_generator(name, params or [])
        grid = generator_grid(points=grid_points) if grid_points else None
        conditions = condition or list(ConditionId)
        verdicts = []
        for cond in conditions:
            needs_n = cond == ConditionId.GR_DIFF_POS_INC
            if needs_n and n is None:
                continue
            verdicts.append(check_condition(gen, cond, grid=grid, n=n if needs_n else None))
        validity = validate_generator(gen, dim) if dim else None
        return GeneratorCheckResponse(generator=gen.label, kendall_tau=kendall_tau(gen), conditions=verdicts,
                                      validity=validity)
    except Exception as e:
        raise _http_error(e, name)


@router.get(
    "/{name}/diagnostics",
    response_model=GeneratorDiagnostics,
    summary="Tabulate H, R and G on the Generator Grid",
    tags=[TAG_GENERATORS],
    dependencies=[Depends(_check_module_enabled)],
)
async def get_generator_diagnostics(
    name: Annotated[str, Path(..., description="Builtin generator name")],
    params: Annotated[Optional[List[float]], Query(description="Positional parameters, e.g. ?params=2")] = None,
    points: Annotated[int, Query(ge=2, le=2000)] = 50,
):
    logger.debug(f"Request for diagnostics of generator '{name}'")
    try:
        gen = make_generator(name, params or [])
        return generator_diagnostics(gen, generator_grid(points=points))
    except Exception as e:
        raise _http_error(e, name)
