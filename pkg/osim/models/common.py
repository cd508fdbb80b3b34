# osim/models/common.py
import datetime
from enum import Enum
from typing import Dict, Literal

from pydantic import BaseModel, ConfigDict, Field


class ModuleState(str, Enum):
    OK = "ok"
    DISABLED = "disabled"


class SamplingInfo(BaseModel):
    model_config = ConfigDict(extra="forbid")

    default_sample_size: int
    chunk: int
    workers: int


class StatusResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    status: Literal["ok"] = "ok"
    version: str
    debug_mode: bool = False
    catalog_size: int = Field(..., ge=0, description="Number of scenarios in the catalog.")
    sampling: SamplingInfo
    modules: Dict[str, ModuleState] = Field(default_factory=dict)


class PingResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    ping: Literal["pong"] = "pong"
    timestamp: str = Field(
        default_factory=lambda: datetime.datetime.now(datetime.timezone.utc).isoformat(),
        description="UTC time the ping was answered.",
    )
