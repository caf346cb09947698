"""HTTP service: endpoint contracts and error mapping."""
import json

import pytest
from fastapi.testclient import TestClient

from robusthedge.model import dump_market
from robusthedge.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def _market(fix):
    return json.loads(dump_market(*fix))


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200 and resp.json() == {"status": "ok"}


def test_validate_ok(client, fix_d):
    resp = client.post("/validate", json={"market": _market(fix_d)})
    assert resp.status_code == 200
    assert resp.json() == {"valid": True, "horizon": 2, "assets": 1,
                           "nodes": 7, "leaves": 4, "has_claim": True}


def test_validate_bad_market(client, fix_a):
    doc = _market(fix_a)
    doc["root_generators"][0]["u"] = "1/3"  # mass no longer 1
    resp = client.post("/validate", json={"market": doc})
    assert resp.status_code == 422
    body = resp.json()
    assert body["error"] == "ValidationError"
    assert "root_generators/0" in body["detail"]


def test_validate_wrong_shape_rejected_by_schema(client):
    resp = client.post("/validate", json={"market": {"horizon": "x"}})
    assert resp.status_code == 422


def test_price_qs(client, fix_a):
    resp = client.post("/price", json={"market": _market(fix_a)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["price"] == "1/2" and body["semantics"] == "quasi_sure"
    assert body["strategy"]["initial_capital"] == "1/2"


def test_price_lower_returns_maximizer(client, fix_b2):
    resp = client.post("/price", json={"market": _market(fix_b2),
                                       "mode": "lower"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["price"] == "2/5" and body["semantics"] == "lower"
    assert body["maximizing_prior"]["root_mixture"] == ["1/2", "1/2"]


def test_price_mono_needs_prior(client, fix_a):
    resp = client.post("/price", json={"market": _market(fix_a),
                                       "mode": "mono"})
    assert resp.status_code == 422
    resp = client.post("/price", json={
        "market": _market(fix_a), "mode": "mono",
        "prior": {"root_mixture": ["1"], "node_mixtures": {}},
    })
    assert resp.status_code == 200 and resp.json()["price"] == "1/2"


def test_price_requires_claim(client, fix_a):
    doc = _market(fix_a)
    del doc["claim"]
    resp = client.post("/price", json={"market": doc})
    assert resp.status_code == 422


def test_price_arbitrage_conflict(client, fix_c):
    resp = client.post("/price", json={"market": _market(fix_c)})
    assert resp.status_code == 409
    body = resp.json()
    assert body["error"] == "NoArbitrageViolation"
    assert body["node"] == "" and body["certificate"] == ["1"]


def test_na_verdicts(client, fix_b2, fix_c):
    resp = client.post("/na", json={"market": _market(fix_b2)})
    assert resp.status_code == 200 and resp.json() == {"holds": True}
    resp = client.post("/na", json={"market": _market(fix_c)})
    assert resp.status_code == 200
    assert resp.json() == {"holds": False, "node": "", "certificate": ["1"]}
    resp = client.post("/na", json={"market": _market(fix_b2),
                                    "scope": "family"})
    assert resp.status_code == 200 and resp.json()["holds"] is True


def test_supports(client, fix_b2):
    resp = client.post("/supports", json={"market": _market(fix_b2)})
    assert resp.status_code == 200
    assert resp.json() == {"supports": {"": [["-1"], ["3/2"], ["2"]]}}


def test_dual_with_evidence(client, fix_b2):
    resp = client.post("/dual", json={"market": _market(fix_b2),
                                      "ns": [1, 10, 100]})
    assert resp.status_code == 200
    body = resp.json()
    assert body["value"] == "2/5"
    assert body["gap_constant"] == "2/55"
    assert body["gaps"] == {"1": "2/55", "10": "1/275", "100": "1/2750"}
    assert body["gap_law_holds"] is True


def test_dual_rejects_bad_ns(client, fix_b2):
    resp = client.post("/dual", json={"market": _market(fix_b2), "ns": [0]})
    assert resp.status_code == 422


def test_construct_ptilde(client, fix_b2):
    resp = client.post("/construct", json={"market": _market(fix_b2),
                                           "what": "ptilde"})
    assert resp.status_code == 200
    assert resp.json()["prior"]["root_mixture"] == ["5/7", "2/7"]


def test_construct_family_round_trips(client, fix_b2):
    resp = client.post("/construct", json={"market": _market(fix_b2),
                                           "what": "family", "lam": "1/2"})
    assert resp.status_code == 200
    fam = resp.json()["market"]
    # the emitted family is itself a valid market with the same price
    price = client.post("/price", json={"market": fam})
    assert price.status_code == 200 and price.json()["price"] == "2/5"


def test_construct_repair_and_errors(client, fix_b2):
    resp = client.post("/construct", json={
        "market": _market(fix_b2), "what": "repair",
        "prior": {"root_mixture": ["1", "0"], "node_mixtures": {}},
    })
    assert resp.status_code == 200
    assert all(w != "0" for w in resp.json()["prior"]["root_mixture"])
    resp = client.post("/construct", json={"market": _market(fix_b2),
                                           "what": "repair"})
    assert resp.status_code == 422
    resp = client.post("/construct", json={"market": _market(fix_b2),
                                           "what": "family", "lam": "2"})
    assert resp.status_code == 422
    resp = client.post("/construct", json={"market": _market(fix_b2),
                                           "what": "nope"})
    assert resp.status_code == 422


def test_fixture_endpoint(client):
    resp = client.get("/fixture/FIX-B", params={"param": 2})
    assert resp.status_code == 200
    market = resp.json()["market"]
    price = client.post("/price", json={"market": market})
    assert price.json()["price"] == "2/5"
    assert client.get("/fixture/FIX-E").status_code == 422


def test_verify_chain_endpoint(client, fix_d, fix_c):
    resp = client.post("/verify-chain", json={"market": _market(fix_d)})
    assert resp.status_code == 200
    body = resp.json()
    assert body["passed"] is True and body["common_value"] == "3/10"
    assert all(r["passed"] for r in body["records"])
    resp = client.post("/verify-chain", json={"market": _market(fix_c)})
    assert resp.status_code == 409


def test_verify_random_endpoint(client):
    resp = client.post("/verify-random", json={"count": 2, "seed": 5})
    assert resp.status_code == 200
    body = resp.json()
    assert body["verified"] == 2 and body["passed"] == 2
    assert client.post("/verify-random",
                       json={"count": -1, "seed": 0}).status_code == 422
