# osim/models/config_models.py
"""
Experiment and batch configuration schema
=========================================

Configs are JSON documents validated here; any validation failure is turned
into a ``ConfigParseError`` naming the first offending field.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from osim.config import app_settings
from osim.core.exceptions import ConfigParseError
from osim.models.report_models import ScenarioMethod

Params = Union[List[float], Dict[str, float]]


# --- References to library objects ---
class GeneratorRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Builtin generator name, e.g. 'gumbel'")
    params: Params = Field(default_factory=list, description="Positional list or {'theta': value}")


class PhrRef(BaseModel):
    model_config = ConfigDict(extra="forbid")

    baseline: "DistributionRef"
    alpha: float = Field(..., gt=0.0)


class DistributionRef(BaseModel):
    """Either a builtin family ``{"name", "params"}`` or a PHR transform ``{"phr": {...}}``."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    params: Params = Field(default_factory=list)
    phr: Optional[PhrRef] = None

    @model_validator(mode="after")
    def check_one_form(self) -> "DistributionRef":
        if (self.name is None) == (self.phr is None):
            raise ValueError("give exactly one of 'name' or 'phr'")
        return self


PhrRef.model_rebuild()


class ModelRef(BaseModel):
    """Model parameters; DGOS accepts (n, k, m), an explicit gamma vector or a preset."""

    model_config = ConfigDict(extra="forbid")

    type: Literal["dsos", "dgos"] = "dgos"
    n: Optional[int] = Field(None, ge=1)
    k: float = Field(1.0, gt=0.0)
    m: Optional[List[float]] = None
    gamma: Optional[List[float]] = None
    gamma_prime: Optional[List[float]] = Field(None, description="Second gamma vector of two-parameter comparisons")
    m_next: Optional[float] = Field(None, description="m_n used to extend m~_n to m~_{n+1}")
    preset: Optional[str] = None
    preset_params: Dict[str, Any] = Field(default_factory=dict)


class IndexOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    i: Optional[int] = Field(None, ge=1)
    p: Optional[List[int]] = None
    q: Optional[List[int]] = None


class GridOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u_points: int = Field(9, ge=5, description="Levels per axis for multivariate dispersive grids")
    time_levels: int = Field(9, ge=5, description="Quantile levels per step for dynamic hazard histories")
    generator_points: int = Field(200, ge=50, description="Points of the generator condition grid")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    scenario: Optional[str] = None
    seed: int = Field(..., ge=0)
    N: int = Field(default_factory=lambda: app_settings.DEFAULT_SAMPLE_SIZE, ge=1000)
    generator: Optional[GeneratorRef] = None
    distributions: Optional[List[DistributionRef]] = Field(None, min_length=1)
    distributions_g: Optional[List[DistributionRef]] = Field(None, min_length=1)
    model: Optional[ModelRef] = None
    indices: Optional[IndexOptions] = None
    gr_n: Union[Literal["larger", "smaller"], int] = "larger"
    reverse: bool = False
    method: Optional[ScenarioMethod] = None
    grids: GridOptions = Field(default_factory=GridOptions)


class BatchConfig(BaseModel):
    """Shared seed and N plus per-scenario overrides; all catalog entries when ``runs`` is absent."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(..., ge=0)
    N: int = Field(default_factory=lambda: app_settings.DEFAULT_SAMPLE_SIZE, ge=1000)
    grids: GridOptions = Field(default_factory=GridOptions)
    runs: Optional[List[Dict[str, Any]]] = None

    def experiments(self, catalog_ids: List[str]) -> List[ExperimentConfig]:
        runs = self.runs if self.runs is not None else [{"scenario": sid} for sid in catalog_ids]
        shared = {"seed": self.seed, "N": self.N, "grids": self.grids.model_dump()}
        configs = []
        for idx, run in enumerate(runs):
            if "scenario" not in run:
                raise ConfigParseError(f"runs[{idx}] has no scenario", field=f"runs[{idx}].scenario")
            configs.append(parse_experiment({**shared, **run}, prefix=f"runs[{idx}]."))
        return configs


# --- Parsing ---
def _first_field(exc: ValidationError, prefix: str = "") -> str:
    errors = exc.errors()
    if not errors:
        return prefix.rstrip(".")
    return prefix + ".".join(str(part) for part in errors[0]["loc"])


def _parse(model, data: Mapping, prefix: str = ""):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        field = _first_field(e, prefix)
        message = e.errors()[0]["msg"] if e.errors() else str(e)
        raise ConfigParseError(f"invalid config field '{field}': {message}", field=field) from e


def parse_experiment(data: Mapping, prefix: str = "") -> ExperimentConfig:
    return _parse(ExperimentConfig, data, prefix)


def parse_batch(data: Mapping) -> BatchConfig:
    return _parse(BatchConfig, data)


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigParseError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                               field=f"line {e.lineno}") from e
    if not isinstance(data, dict):
        raise ConfigParseError(f"{path}: top level must be a JSON object")
    return data


def is_batch(data: Mapping) -> bool:
    return "runs" in data or "scenario" not in data
