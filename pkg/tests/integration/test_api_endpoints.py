# tests/integration/test_api_endpoints.py
import pytest
from fastapi import status
from httpx import AsyncClient

pytestmark = pytest.mark.asyncio


# --- Root and system ---
async def test_root(test_client: AsyncClient):
    response = await test_client.get("/")
    assert response.status_code == status.HTTP_200_OK
    assert response.json()["message"].startswith("Welcome to osim")
    print("\n[PASSED] test_root")


async def test_ping(test_client: AsyncClient):
    response = await test_client.get("/system/ping")
    assert response.status_code == status.HTTP_200_OK
    assert response.json()["ping"] == "pong"
    print("\n[PASSED] test_ping")


async def test_status_reports_catalog_and_sampling(test_client: AsyncClient):
    response = await test_client.get("/system/status")
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["status"] == "ok"
    assert data["catalog_size"] == 37
    assert data["sampling"]["default_sample_size"] == 2000
    assert data["modules"]["scenarios"] == "ok"
    print("\n[PASSED] test_status_reports_catalog_and_sampling")


# --- Generators ---
async def test_list_generators(test_client: AsyncClient):
    response = await test_client.get("/generators/")
    assert response.status_code == status.HTTP_200_OK
    assert {"clayton", "gumbel", "independence"} <= set(response.json())
    print("\n[PASSED] test_list_generators")


async def test_check_generator(test_client: AsyncClient):
    response = await test_client.get(
        "/generators/gumbel/check",
        params={"params": [2.0], "condition": ["R_RATIO_POS_INC", "GR_DIFF_POS_INC"], "n": 3, "dim": 3},
    )
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["generator"] == "gumbel(theta=2)"
    assert data["kendall_tau"] == pytest.approx(0.5, abs=1e-6)
    assert [c["condition"] for c in data["conditions"]] == ["R_RATIO_POS_INC", "GR_DIFF_POS_INC"]
    assert all(c["holds"] for c in data["conditions"])
    assert data["validity"]["valid"] is True
    print("\n[PASSED] test_check_generator")


async def test_check_generator_skips_gr_without_dimension(test_client: AsyncClient):
    response = await test_client.get("/generators/clayton/check", params={"params": [1.0]})
    assert response.status_code == status.HTTP_200_OK
    conditions = [c["condition"] for c in response.json()["conditions"]]
    assert "GR_DIFF_POS_INC" not in conditions
    assert "R_RATIO_POS_INC" in conditions
    print("\n[PASSED] test_check_generator_skips_gr_without_dimension")


@pytest.mark.parametrize(
    "path, params, expected",
    [
        ("/generators/frank/check", {"params": [1.0]}, status.HTTP_404_NOT_FOUND),
        ("/generators/gumbel/check", {"params": [0.5]}, status.HTTP_422_UNPROCESSABLE_ENTITY),
        ("/generators/gumbel/diagnostics", {"params": [2.0], "points": 1}, status.HTTP_422_UNPROCESSABLE_ENTITY),
    ],
)
async def test_generator_errors(test_client: AsyncClient, path, params, expected):
    response = await test_client.get(path, params=params)
    assert response.status_code == expected
    print(f"\n[PASSED] test_generator_errors: {path} -> {expected}")


async def test_generator_diagnostics(test_client: AsyncClient):
    response = await test_client.get("/generators/clayton/diagnostics", params={"params": [1.0], "points": 10})
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert len(data["grid"]) == len(data["R"]) == 10
    print("\n[PASSED] test_generator_diagnostics")


async def test_disabled_generators_module(test_client: AsyncClient, override_settings):
    override_settings(ENABLE_GENERATORS_MODULE=False)
    response = await test_client.get("/generators/")
    assert response.status_code == status.HTTP_503_SERVICE_UNAVAILABLE
    print("\n[PASSED] test_disabled_generators_module")


# --- Scenarios ---
async def test_list_scenarios(test_client: AsyncClient):
    response = await test_client.get("/scenarios/")
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert len(data) == 37
    assert data[0]["id"] == "T4.1a"
    print("\n[PASSED] test_list_scenarios")


async def test_get_scenario(test_client: AsyncClient):
    response = await test_client.get("/scenarios/t5.9b")
    assert response.status_code == status.HTTP_200_OK
    assert response.json()["relation"] == "lr"
    missing = await test_client.get("/scenarios/T9.9")
    assert missing.status_code == status.HTTP_404_NOT_FOUND
    print("\n[PASSED] test_get_scenario")


async def test_verify_scenario_inconclusive(test_client: AsyncClient):
    body = {"seed": 0, "generator": {"name": "clayton", "params": [2.0]}}
    response = await test_client.post("/scenarios/T4.1b/verify", json=body)
    assert response.status_code == status.HTTP_200_OK
    data = response.json()
    assert data["report"]["verdict"] == "INCONCLUSIVE"
    assert data["report"]["failing_hypothesis"] == "R_RATIO_POS_INC"
    assert data["wall_time"] >= 0
    print("\n[PASSED] test_verify_scenario_inconclusive")


@pytest.mark.parametrize(
    "scenario_id, body, expected",
    [
        ("T9.9", {"seed": 0}, status.HTTP_404_NOT_FOUND),
        ("T4.1b", {"N": 5000}, status.HTTP_422_UNPROCESSABLE_ENTITY),
        ("T4.1b", {"seed": 0, "generator": {"name": "frank", "params": [1.0]}}, status.HTTP_422_UNPROCESSABLE_ENTITY),
    ],
)
async def test_verify_scenario_errors(test_client: AsyncClient, scenario_id, body, expected):
    response = await test_client.post(f"/scenarios/{scenario_id}/verify", json=body)
    assert response.status_code == expected
    print(f"\n[PASSED] test_verify_scenario_errors: {scenario_id} -> {expected}")


async def test_disabled_scenarios_module(test_client: AsyncClient, override_settings):
    override_settings(ENABLE_SCENARIOS_MODULE=False)
    response = await test_client.get("/scenarios/")
    assert response.status_code == status.HTTP_503_SERVICE_UNAVAILABLE
    print("\n[PASSED] test_disabled_scenarios_module")
