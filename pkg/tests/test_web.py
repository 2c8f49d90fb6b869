from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from inicalc.web.app import create_app


@pytest.fixture
def client() -> TestClient:
    return TestClient(create_app())


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "service": "inicalc"}


def test_check(client, programs):
    response = client.post("/api/check", json={"source": "#lang ini1\ncoin (x) coin"})
    assert response.status_code == 200
    assert response.json()["outcome"]["type"] == "Bool (x) Bool"

    response = client.post("/api/check", json={"source": (programs / "layer_mismatch.ini").read_text()})
    assert response.status_code == 400
    assert response.json()["kind"] == "LayerMismatch"


def test_eval(client):
    response = client.post("/api/eval", json={"source": "#lang ini2 layer=NI\n(fresh, fresh)", "model": "name"})
    assert response.status_code == 200
    assert response.json()["outcome"]["value"] == {"names": 2, "value": "(n0,n1)"}


def test_independence(client):
    response = client.post("/api/independence", json={"source": "#lang ini1\nlet x = coin in x (x) true"})
    assert response.status_code == 200
    assert response.json()["outcome"]["is_product"] is True


def test_independence_rejects_the_sharing_layer(client):
    source = "#lang ini2 layer=NI\nlet x = coin in (x, x)"
    response = client.post("/api/independence", json={"source": source})
    assert response.status_code == 400
    assert response.json()["kind"] == "UsageError"


def test_translate(client):
    response = client.post("/api/translate", json={"source": "#lang ini1\ncoin (x) true", "fragment": "Multiplicative"})
    assert response.status_code == 200
    outcome = response.json()["outcome"]
    assert outcome["fragment"] == "Multiplicative"
    assert outcome["type"] == "M Bool (x) M Bool"


def test_invalid_model(client):
    response = client.post("/api/eval", json={"source": "#lang ini1\ncoin", "model": "quantum"})
    assert response.status_code == 422
