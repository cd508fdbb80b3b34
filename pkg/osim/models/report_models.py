# osim/models/report_models.py
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from osim.models.verdict_models import OrderRelation, OrderVerdict, VerdictStatus


# --- Enums ---
class ScenarioMethod(str, Enum):
    MONTE_CARLO = "monte_carlo"
    ANALYTIC_GRID = "analytic_grid"


class HypothesisKind(str, Enum):
    GENERATOR_CONDITION = "generator_condition"
    GENERATOR_VALIDITY = "generator_validity"
    ORDER = "order"
    AGING = "aging"
    MAJORIZATION = "majorization"
    PARAMETER = "parameter"


# --- Catalog ---
class ScenarioInfo(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: str
    title: str
    statement: str = Field(..., description="Conclusion checked by the scenario, X <= Y in the named relation")
    relation: OrderRelation
    method: ScenarioMethod
    hypotheses: List[str] = Field(default_factory=list)
    defaults: Dict[str, Any] = Field(default_factory=dict)


# --- Reports ---
class HypothesisResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str
    kind: HypothesisKind
    holds: bool
    detail: Dict[str, Any] = Field(default_factory=dict)
    error: Optional[str] = None
    advisory: bool = Field(default=False, description="Reported only; a failure does not block the conclusion")


class CheckResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    label: str
    verdict: OrderVerdict


class Report(BaseModel):
    """Outcome of one scenario run; carries no wall-clock data so reruns are byte-identical."""

    model_config = ConfigDict(extra="forbid")

    tool_version: str
    scenario: str
    title: str
    statement: str
    relation: OrderRelation
    method: ScenarioMethod
    reverse: bool = False
    seed: int
    N: int
    gr_n: Optional[int] = None
    config: Dict[str, Any]
    hypotheses: List[HypothesisResult] = Field(default_factory=list)
    failing_hypothesis: Optional[str] = None
    verdict: VerdictStatus
    max_violation: Optional[float] = None
    tolerance: Optional[float] = None
    checks: List[CheckResult] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class IndexEntry(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: str
    status: Optional[VerdictStatus] = None
    report_path: Optional[str] = None
    wall_time: float = Field(..., ge=0.0)
    error: Optional[str] = None


class BatchIndex(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tool_version: str
    exit_code: int
    entries: List[IndexEntry] = Field(default_factory=list)


class VerifyResponse(BaseModel):
    model_config = ConfigDict(extra="forbid")

    report: Report
    wall_time: float
