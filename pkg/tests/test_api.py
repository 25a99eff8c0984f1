import pytest
from fastapi.testclient import TestClient

from config.config_loader import ConfigLoader, WorkbenchConfig
from ui import backend_api
from ui.backend_api import app, get_settings


@pytest.fixture
def client():
    settings = WorkbenchConfig()
    app.dependency_overrides[get_settings] = lambda: settings
    yield TestClient(app)
    app.dependency_overrides.clear()


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert "version" in response.json()


def test_suites(client):
    suites = client.get("/api/suites").json()["suites"]
    assert "brst" in suites and "all" in suites


def test_unknown_suite(client):
    assert client.get("/api/verify/nosuch").status_code == 404


def test_verify_beta(client):
    response = client.get("/api/verify/beta")
    assert response.status_code == 200
    report = response.json()
    assert report["suite"] == "beta"
    assert all(v["status"] == "pass" for v in report["verdicts"])


def test_omega(client):
    response = client.get("/api/omega", params={"k": [0, 1]})
    assert response.status_code == 200
    estimates = response.json()["numbers"]["estimates"]
    assert set(estimates) == {"0", "1"}
    assert estimates["0"]["value"] > estimates["1"]["value"] > 0


@pytest.mark.parametrize("params", [{"method": "simpson"}, {"k": "one"}])
def test_omega_bad_query(client, params):
    assert client.get("/api/omega", params=params).status_code == 422


def test_omega_negative_k(client):
    assert client.get("/api/omega", params={"k": -1}).status_code == 400


def test_beta(client):
    report = client.get("/api/beta", params={"model": "pure", "g": [0.1, 1.0]}).json()
    assert report["numbers"]["beta"]["1"] < 0
    assert report["command"] == ["beta", "--model", "pure", "--g", "0.1", "1"]


def test_config(client):
    assert client.get("/api/config").json() == WorkbenchConfig().model_dump(mode="json")


def test_update_config(client, monkeypatch, config_file):
    loader = ConfigLoader(config_file)
    monkeypatch.setattr(backend_api, "config_loader", loader)
    assert client.post("/api/config/regulator", json={"seed": 11}).status_code == 200
    assert loader.settings.regulator.seed == 11
    assert client.post("/api/config/regulator", json={"rel_tol": -1}).status_code == 422
    assert client.post("/api/config/scheduler", json={"interval": 5}).status_code == 404
