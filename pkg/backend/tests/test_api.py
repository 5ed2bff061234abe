"""Tests for the HTTP API."""

import pytest
from fastapi.testclient import TestClient

from backend.api.main import app
from backend.database import DatabaseManager, get_db


@pytest.fixture
def client():
    manager = DatabaseManager("sqlite://")
    manager.create_tables()

    def _get_db():
        with manager.get_session() as session:
            yield session

    app.dependency_overrides[get_db] = _get_db
    yield TestClient(app)
    app.dependency_overrides.clear()


class TestMeta:
    """Test service metadata endpoints."""

    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json()["status"] == "healthy"

    def test_version_lists_modules(self, client):
        assert "mlb_controller" in client.get("/version").json()["modules"]


class TestSimulationRoutes:
    """Test cases for the simulation routes."""

    def test_run(self, client):
        response = client.post(
            "/api/simulations/run", json={"algorithm": "mlb1", "ue_count": 8, "duration": 0.5, "seed": 2}
        )
        assert response.status_code == 200
        body = response.json()
        assert body["algorithm"] == "mlb1"
        assert body["ue_count"] == 8
        assert len(body["sector_throughput_mbps"]) == 9

    def test_invalid_config_is_422(self, client):
        """Test that config validation errors map to 422."""
        response = client.post("/api/simulations/run", json={"config": {"handover": {"ttt": -1}}})
        assert response.status_code == 422
        assert "handover.ttt" in response.json()["detail"]

    def test_matrix(self, client):
        response = client.post(
            "/api/simulations/matrix",
            json={"algorithms": ["none", "mlb2"], "ue_counts": [6], "seeds": [0], "config": {"duration": 0.5}},
        )
        assert response.status_code == 200
        body = response.json()
        assert len(body["runs"]) == 2
        assert len(body["aggregates"]) == 2
        assert all({"claim", "holds", "detail"} <= set(check) for check in body["trends"])


class TestScenarioRoutes:
    """Test cases for presets and stored runs."""

    def test_presets(self, client):
        names = [p["name"] for p in client.get("/api/scenarios/presets").json()]
        assert names == ["low_density", "medium_density", "high_density"]

    def test_unknown_preset_is_404(self, client):
        assert client.post("/api/scenarios/presets/rush_hour/run").status_code == 404

    def test_run_preset_then_fetch(self, client):
        response = client.post(
            "/api/scenarios/presets/low_density/run", json={"overrides": {"duration": 0.5, "ue_count": 6}}
        )
        assert response.status_code == 200
        run_id = response.json()["id"]

        runs = client.get("/api/scenarios/runs").json()
        assert [r["id"] for r in runs] == [run_id]

        stored = client.get(f"/api/scenarios/runs/{run_id}").json()
        assert stored["scenario"] == "low_density"
        assert stored["config"]["ue_count"] == 6

    def test_missing_run_is_404(self, client):
        assert client.get("/api/scenarios/runs/999").status_code == 404
