import json

from fastapi.testclient import TestClient

from dcohom.service import app

client = TestClient(app)


def test_health():
    body = client.get("/v1/health").json()
    assert body["status"] == "ok"


def test_catalog_listing():
    body = client.get("/v1/catalog").json()
    assert body["schema_version"] == 1
    names = {e["name"] for e in body["entries"]}
    assert {"affine1", "torus2", "localized_x2p1"} <= names
    golden = {e["name"]: e["expected"] for e in body["entries"]}
    assert golden["torus2"] == [1, 2, 1]


def test_run_dr():
    resp = client.post("/v1/run", json={"command": "dr", "space": "torus(1)"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["schema_version"] == 1
    assert body["dims"]["de-rham"] == [1, 1]
    assert body["status"] == "ok"


def test_run_hh_routes_agree():
    resp = client.post("/v1/run", json={"command": "hh", "space": "affine(1)", "window": 4})
    body = resp.json()
    assert body["dims"]["koszul"] == [1, 0, 0]
    assert body["dims"]["de-rham"] == [1, 0]
    assert all(body["stabilized"])


def test_run_deform_with_lambda_alias():
    resp = client.post(
        "/v1/run",
        json={"command": "deform", "space": "affine(2)", "omega": "dx1^dx2", "window": 3},
    )
    body = resp.json()
    kinds = {w["kind"]: w["expr"] for w in body["witnesses"]}
    assert kinds["potential"] == "x1*dx2"


def test_run_outer_with_lambda():
    resp = client.post(
        "/v1/run",
        json={"command": "outer", "space": "torus(1)", "window": 4, "lambda": "x1^-1 dx1"},
    )
    body = resp.json()
    assert body["dims"]["outer"] == [1]
    notes = [w["expr"] for w in body["witnesses"] if w["kind"] == "note"]
    assert any("outer" in n for n in notes)


def test_parse_error_payload():
    resp = client.post("/v1/run", json={"command": "dr", "space": "blob(1)"})
    assert resp.status_code == 422
    body = resp.json()
    assert body["name"] == "ParseError"
    assert body["exit_code"] == 2


def test_not_squarefree_payload():
    resp = client.post(
        "/v1/run", json={"command": "dr", "space": "localized(f = x1^2 + 2*x1 + 1)"}
    )
    assert resp.status_code == 422
    assert resp.json()["exit_code"] == 3


def test_unknown_command_payload():
    resp = client.post("/v1/run", json={"command": "explode", "space": "affine(1)"})
    assert resp.status_code == 422
