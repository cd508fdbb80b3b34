# osim/models/api_models.py
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from osim.models.verdict_models import ConditionVerdict, ValidityReport


# --- Generators ---
class GeneratorCheckResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generator: str
    kendall_tau: Optional[float] = None
    conditions: List[ConditionVerdict] = Field(default_factory=list)
    validity: Optional[ValidityReport] = None
