# osim/main.py
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from osim.config import app_settings, setup_logging
from osim.routers import generators, scenarios, system

setup_logging(log_level_str=app_settings.LOG_LEVEL, log_dir=app_settings.LOG_DIR)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"Starting up osim verification service v{app_settings.APP_VERSION}...")
    logger.info(f"Debug mode: {'on' if app_settings.DEBUG else 'off'}")
    logger.info(f"DEFAULT_SAMPLE_SIZE: {app_settings.DEFAULT_SAMPLE_SIZE}, WORKERS: {app_settings.WORKERS}")

    yield

    logger.info("Shutting down osim verification service...")


app = FastAPI(
    title="osim",
    description="Simulation and stochastic-order verification for ordered random vectors.",
    version=app_settings.APP_VERSION,
    lifespan=lifespan,
)

if app_settings.ENABLE_SYSTEM_MODULE:
    app.include_router(system.router, prefix="/system", tags=["System"])
    logger.info("System module enabled and router included.")

if app_settings.ENABLE_GENERATORS_MODULE:
    app.include_router(generators.router, prefix="/generators", tags=["Generators"])
    logger.info("Generators module enabled and router included.")

if app_settings.ENABLE_SCENARIOS_MODULE:
    app.include_router(scenarios.router, prefix="/scenarios", tags=["Scenarios"])
    logger.info("Scenarios module enabled and router included.")


@app.get("/", tags=["Root"])
async def read_root():
    return {"message": f"Welcome to osim v{app_settings.APP_VERSION}"}
