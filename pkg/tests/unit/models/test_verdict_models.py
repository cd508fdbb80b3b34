# tests/unit/models/test_verdict_models.py
import pytest
from pydantic import ValidationError

from osim.models.verdict_models import CheckMode, OrderRelation, OrderVerdict, VerdictStatus


def _verdict(status, max_violation, tolerance):
    return OrderVerdict(relation=OrderRelation.HR, status=status, max_violation=max_violation, tolerance=tolerance)


def test_verdict_defaults():
    verdict = _verdict(VerdictStatus.HOLDS, 0.0, 1e-9)
    assert verdict.holds
    assert verdict.direction == "X<=Y"
    assert verdict.mode == CheckMode.ANALYTIC
    print("\n[PASSED] test_verdict_defaults")


@pytest.mark.parametrize(
    "status, max_violation, tolerance",
    [(VerdictStatus.VIOLATED, 0.0, 0.1), (VerdictStatus.HOLDS, 0.5, 0.1)],
)
def test_status_must_match_violation(status, max_violation, tolerance):
    with pytest.raises(ValidationError):
        _verdict(status, max_violation, tolerance)
    print(f"\n[PASSED] test_status_must_match_violation: {status.value}")


def test_inconclusive_accepts_any_violation():
    assert not _verdict(VerdictStatus.INCONCLUSIVE, 0.5, 0.1).holds
    assert not _verdict(VerdictStatus.INCONCLUSIVE, 0.0, 0.1).holds
    print("\n[PASSED] test_inconclusive_accepts_any_violation")


def test_negative_violation_rejected():
    with pytest.raises(ValidationError):
        _verdict(VerdictStatus.HOLDS, -1.0, 0.1)
    print("\n[PASSED] test_negative_violation_rejected")
