# tests/unit/models/test_common_models.py
import datetime

import pytest
from pydantic import ValidationError

from osim.models.common import ModuleState, PingResponse, SamplingInfo, StatusResponse

SAMPLING = {"default_sample_size": 20000, "chunk": 10000, "workers": 2}


# --- StatusResponse Tests ---
def test_status_response_valid():
    response = StatusResponse(version="0.3.0", catalog_size=37, sampling=SAMPLING,
                              modules={"scenarios": "ok", "generators": "disabled"})
    assert response.status == "ok"
    assert isinstance(response.sampling, SamplingInfo)
    assert response.modules["generators"] == ModuleState.DISABLED
    print("\n[PASSED] test_status_response_valid")


def test_status_response_rejects_unknown_module_state():
    with pytest.raises(ValidationError) as excinfo:
        StatusResponse(version="0.3.0", catalog_size=37, sampling=SAMPLING, modules={"scenarios": "sleeping"})
    assert excinfo.value.errors()[0]["loc"][0] == "modules"
    print("\n[PASSED] test_status_response_rejects_unknown_module_state")


def test_status_response_extra_fields_forbidden():
    with pytest.raises(ValidationError) as excinfo:
        StatusResponse(version="0.3.0", catalog_size=37, sampling=SAMPLING, unexpected="value")
    assert excinfo.value.errors()[0]["type"] == "extra_forbidden"
    print("\n[PASSED] test_status_response_extra_fields_forbidden")


# --- PingResponse Tests ---
def test_ping_response_defaults():
    response = PingResponse()
    assert response.ping == "pong"
    stamp = datetime.datetime.fromisoformat(response.timestamp)
    assert abs((datetime.datetime.now(datetime.timezone.utc) - stamp).total_seconds()) < 5
    print("\n[PASSED] test_ping_response_defaults")


def test_ping_response_rejects_other_payloads():
    with pytest.raises(ValidationError):
        PingResponse(ping="ping")
    print("\n[PASSED] test_ping_response_rejects_other_payloads")
