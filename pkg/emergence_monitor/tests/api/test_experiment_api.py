import copy

import pytest

from emergence_monitor.src.api.experiment_api import app
from emergence_monitor.tests.conftest import SMALL_CONFIG


@pytest.fixture
def client():
    app.config["TESTING"] = True
    with app.test_client() as client:
        yield client


class TestExperimentApi:
    """Tests for the HTTP endpoints."""

    def test_list_configurations(self, client):
        response = client.get("/api/emergence/configurations")
        assert response.status_code == 200
        assert "synth_small" in response.get_json()["configurations"]

    def test_validate_valid_configuration(self, client):
        response = client.post("/api/emergence/validate-config", json=SMALL_CONFIG)
        assert response.get_json() == {"valid": True, "errors": []}

    def test_validate_invalid_configuration(self, client):
        response = client.post("/api/emergence/validate-config", json={"corpus": {}})
        data = response.get_json()
        assert response.status_code == 200
        assert data["valid"] is False
        assert data["errors"]

    def test_validate_without_body(self, client):
        assert client.post("/api/emergence/validate-config").status_code == 400

    def test_run_without_body(self, client):
        assert client.post("/api/emergence/run", json={}).status_code == 400

    def test_unknown_configuration_name(self, client):
        response = client.post("/api/emergence/gold", json={"config_name": "does_not_exist"})
        assert response.status_code == 400
        assert "does_not_exist" in response.get_json()["error"]

    def test_gold(self, client, tmp_path):
        config = copy.deepcopy(SMALL_CONFIG)
        config["output_dir"] = str(tmp_path / "api")
        response = client.post("/api/emergence/gold", json=config)
        data = response.get_json()
        assert response.status_code == 200
        assert sorted(data["gold"]) == ["cat00", "cat01", "cat02"]
        assert data["files"]["gold"].startswith(str(tmp_path))

    def test_run(self, client, tmp_path):
        config = copy.deepcopy(SMALL_CONFIG)
        config["output_dir"] = str(tmp_path / "api")
        config["seeds"] = [0]
        response = client.post("/api/emergence/run", json=config)
        data = response.get_json()
        assert response.status_code == 200
        assert [r["method"] for r in data["reports"]] == ["correlation", "tfidf"]
        assert data["manifest"].endswith("manifest.json")

    def test_unknown_category(self, client, tmp_path):
        response = client.post("/api/emergence/run", json={
            "config_name": "synth_small",
            "overrides": {"output_dir": str(tmp_path / "bad"), "category": "cat09"},
        })
        assert response.status_code == 400
