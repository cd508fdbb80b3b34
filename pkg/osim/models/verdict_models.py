# osim/models/verdict_models.py
from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


# --- Enums ---
class ConditionId(str, Enum):
    R_RATIO_POS_INC = "R_RATIO_POS_INC"
    R_RATIO_INC = "R_RATIO_INC"
    H_RATIO_NEG_DEC = "H_RATIO_NEG_DEC"
    H_RATIO_DEC = "H_RATIO_DEC"
    R_DEC = "R_DEC"
    GR_DIFF_POS_INC = "GR_DIFF_POS_INC"


class VerdictStatus(str, Enum):
    HOLDS = "HOLDS"
    VIOLATED = "VIOLATED"
    INCONCLUSIVE = "INCONCLUSIVE"


class OrderRelation(str, Enum):
    ST = "st"
    HR = "hr"
    RH = "rh"
    LR = "lr"
    DISP = "disp"
    ICX = "icx"
    MRL = "mrl"
    C = "c"
    ST_MULTI = "st_multi"
    DYN_HR = "dyn_hr"
    DISP_MULTI = "disp_multi"


class AgingClass(str, Enum):
    ILR = "ILR"
    DLR = "DLR"
    IFR = "IFR"
    DFR = "DFR"
    DRFR = "DRFR"


class CheckMode(str, Enum):
    ANALYTIC = "analytic"
    EMPIRICAL = "empirical"


class MajorizationKind(str, Enum):
    W_SUPER = "w_super"
    P_LARGER = "p_larger"
    RM = "rm"


# --- Generator verdicts ---
class ConditionVerdict(BaseModel):
    """Outcome of a monotonicity/sign condition on a generator functional."""

    model_config = ConfigDict(extra="forbid")

    condition: ConditionId
    generator: str
    holds: bool
    worst_u: Optional[float] = Field(None, description="Grid point with the smallest slack.")
    worst_margin: float = Field(..., description="Smallest slack over the grid; negative when violated.")
    n: Optional[int] = Field(None, description="Dimension plugged into G(nu) for GR_DIFF_POS_INC.")
    grid_lo: float
    grid_hi: float
    grid_points: int


class ValidityReport(BaseModel):
    """d-monotonicity of a generator on the evaluation grid."""

    model_config = ConfigDict(extra="forbid")

    generator: str
    dim: int = Field(..., ge=2)
    valid: bool
    failed_clause: Optional[str] = None
    witness_u: Optional[float] = None
    witness_value: Optional[float] = None
    numeric_derivatives: bool = False


class GeneratorDiagnostics(BaseModel):
    model_config = ConfigDict(extra="forbid")

    generator: str
    params: Dict[str, float]
    grid: List[float]
    H: List[float]
    R: List[float]
    G: List[float]


# --- Order verdicts ---
class OrderVerdict(BaseModel):
    """Verdict of a stochastic order or aging-class check.

    ``max_violation`` and ``tolerance`` come from the same witness. HOLDS and
    VIOLATED are decided by ``max_violation <= tolerance``; INCONCLUSIVE carries
    whatever the estimator produced before a quality gate stopped it.
    """

    model_config = ConfigDict(extra="forbid")

    relation: Union[OrderRelation, AgingClass]
    direction: str = "X<=Y"
    status: VerdictStatus
    mode: CheckMode = CheckMode.ANALYTIC
    max_violation: float = Field(..., ge=0.0)
    tolerance: float = Field(..., ge=0.0)
    witness: Dict[str, Any] = Field(default_factory=dict)
    grid: List[float] = Field(default_factory=list, description="Grid of the tested functional.")
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_status_matches_violation(self) -> "OrderVerdict":
        within = self.max_violation <= self.tolerance
        if within and self.status == VerdictStatus.VIOLATED:
            raise ValueError("a violation within tolerance cannot report VIOLATED")
        if not within and self.status == VerdictStatus.HOLDS:
            raise ValueError("HOLDS requires max_violation <= tolerance")
        return self

    @property
    def holds(self) -> bool:
        return self.status == VerdictStatus.HOLDS


class MajorizationResult(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: MajorizationKind
    holds: bool
    violated_at: Optional[int] = Field(None, description="First 1-based partial index that fails.")
    margins: List[float] = Field(default_factory=list)
