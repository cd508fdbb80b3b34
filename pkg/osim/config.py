# osim/config.py
import logging
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from osim import __version__

_VALID_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


# --- Logging Setup ---
def setup_logging(log_level_str: str = "INFO", log_dir: Optional[Path] = None):
    """Configures application-wide logging.

    Console logging is always on; a file handler is added when ``log_dir`` is given.
    """
    numeric_level = getattr(logging, log_level_str.upper(), None)
    if not isinstance(numeric_level, int):
        raise ValueError(f"Invalid log level: {log_level_str}")

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    log_file = None
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / "osim.log"
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )
    logging.getLogger("uvicorn.access").setLevel(logging.WARNING)

    logger = logging.getLogger(__name__)
    logger.info(f"Logging initialized. Level: {log_level_str}. Log file: {log_file or 'console only'}")


# --- Application Settings ---
class AppSettings(BaseSettings):
    APP_VERSION: str = __version__
    DEBUG: bool = False
    HOST: str = Field(default="127.0.0.1", description="Interface the verification service binds to")
    PORT: int = Field(default=8000, description="Port to run the verification service on")

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: Optional[Path] = Field(default=None, description="Directory for osim.log; console only when unset")

    # Module Enablement Flags
    ENABLE_SYSTEM_MODULE: bool = True
    ENABLE_GENERATORS_MODULE: bool = True
    ENABLE_SCENARIOS_MODULE: bool = True

    # Generator evaluation grid
    GRID_POINTS: int = Field(default=200, description="Number of log-spaced points on the generator grid")
    GRID_LO: float = Field(default=1e-4, description="Lower end of the generator grid")
    GRID_HI: float = Field(default=20.0, description="Upper end of the generator grid")

    # Numerical tolerances
    MONOTONE_TOL: float = Field(default=1e-9, description="Tolerance for non-strict monotonicity checks")
    DISP_MULTI_TOL: float = Field(default=1e-8, description="Tolerance for multivariate dispersive checks")
    ROOT_XTOL: float = Field(default=1e-12, description="Root-finding tolerance for psi and conditional inversion")
    PSI_BRACKET_HI: float = Field(default=60.0, description="Upper end of the bracket for psi and inversion roots")
    FD_STEP: float = Field(default=1e-4, description="Step for finite-difference derivatives")
    QUANTILE_XTOL: float = Field(default=1e-10, description="Root-finding tolerance for quantiles and D^-1")

    # Sampling and batch execution
    DEFAULT_SAMPLE_SIZE: int = Field(default=100_000, description="Monte Carlo sample size N")
    SAMPLING_CHUNK: int = Field(default=10_000, description="Draws per independently seeded chunk")
    WORKERS: int = Field(default=4, description="Thread-pool size for chunked sampling")
    CONVOLUTION_POINTS: int = Field(default=2**18, description="Grid cells for tabulated sums of increments")

    OUTPUT_DIR: Path = Field(default=Path("osim_reports"), description="Default directory for reports")

    @field_validator("LOG_LEVEL", mode="after")
    @classmethod
    def check_log_level(cls, value: str) -> str:
        if value.upper() not in _VALID_LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {_VALID_LOG_LEVELS}, got '{value}'")
        return value.upper()

    @field_validator("GRID_POINTS", "DEFAULT_SAMPLE_SIZE", "SAMPLING_CHUNK", "WORKERS", "CONVOLUTION_POINTS")
    @classmethod
    def check_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError(f"must be positive, got {value}")
        return value

    model_config = SettingsConfigDict(
        env_prefix="OSIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


app_settings = AppSettings()
