import pytest

from app import app
from engines import ENGINES
from engines.cctlv import check_cctlv
from utils.model_format import parse_model
from utils.parser import parse_formula

ATM = """
ap error lock
state idle { }
state e1 { error }
state e2 { error }
state e3 { error }
state lock { lock }
trans idle -> e1
trans e1 -> e2
trans e2 -> e3
trans e3 -> lock
trans lock -> lock
"""


@pytest.fixture
def client():
    app.config["TESTING"] = True
    with app.test_client() as client:
        yield client


def test_list_engines(client):
    response = client.get("/api/engines")
    assert response.status_code == 200
    assert response.get_json()["engines"] == sorted(ENGINES)


def test_check(client):
    response = client.post("/api/check", json={
        "model": ATM, "formula": "!EF{#error <= 2} lock", "state": "idle",
    })
    assert response.status_code == 200
    data = response.get_json()
    assert data["verdict"] is True
    assert data["engine"] == "polytime"
    assert data["fragment"] == "CCTL1"
    assert data["satisfying"] == ["idle", "e1"]


def test_check_with_witness_and_dict_model(client):
    model = parse_model(ATM).to_dict()
    response = client.post("/api/check", json={
        "model": model, "formula": "EF{#error <= 2} lock", "state": "e2", "witness": True,
    })
    data = response.get_json()
    assert data["verdict"] is True
    assert data["witness_kind"] == "witness"
    assert data["witness"] == ["e2", "e3", "lock"]


def test_check_error_codes(client):
    response = client.post("/api/check", json={"model": ATM, "formula": "EF{#error - #lock = 0 & #error >= 1} TT"})
    assert response.status_code == 422
    assert response.get_json()["fragment"] == "CCTLb±1"

    response = client.post("/api/check", json={"model": ATM})
    assert response.status_code == 400
    assert "formula" in response.get_json()["error"]

    response = client.post("/api/check", json={"model": ATM, "formula": "EF (lock"})
    assert response.status_code == 400

    response = client.post("/api/check", json={"model": ATM, "formula": "EF lock", "state": "nowhere"})
    assert response.status_code == 400


def test_translate(client):
    response = client.post("/api/translate", json={"formula": "EF{#P >= 0} Q"})
    assert response.status_code == 200
    assert parse_formula(response.get_json()["formula"]) is parse_formula("EF Q")

    response = client.post("/api/translate", json={"formula": "EF{#P + #Q = 20} R", "fuel": 5})
    assert response.status_code == 413


def test_sat(client):
    assert client.post("/api/sat", json={"formula": "EF P & AG !P"}).get_json()["status"] == "UNSAT"
    undecidable = client.post("/api/sat", json={"formula": "EF{#P - #Q = 0} TT"}).get_json()
    assert undecidable["status"] == "UNDECIDABLE"
    assert undecidable["fragment"] == "CCTL±1"

    data = client.post("/api/sat", json={"formula": "EF{#P = 1} TT"}).get_json()
    assert data["status"] == "SAT"
    witness = parse_model(data["witness"])
    assert data["initial"] in witness.names


def test_classify(client):
    data = client.post("/api/classify", json={"formula": "z[P].EF(z >= 1)"}).get_json()
    assert data["fragment"] == "CCTLv"
    assert data["engine"] == "cctlv"
    assert data["flags"]["uses_variables"] is True


def test_generate_qbf(client):
    instance = {"p": 1, "clauses": [[[1, True], [1, True], [2, True]]]}
    data = client.post("/api/generate/qbf", json={"instance": instance}).get_json()
    assert data["expected"] is True
    structure = parse_model(data["model"])
    assert 0 in check_cctlv(structure, parse_formula(data["formula"]))


def test_generate_random_snsat(client):
    data = client.post("/api/generate/snsat", json={"seed": 3, "p": 1, "m": 1, "clauses": 1}).get_json()
    assert set(data["expected"]) == {"z1"}
    assert parse_model(data["model"]).size == 7


def test_generate_dks_embedding(client):
    model = {
        "states": [{"name": "q0", "labels": ["P"]}],
        "transitions": [{"source": "q0", "weight": 2, "target": "q0"}],
    }
    data = client.post("/api/generate/dks-embed", json={"model": model, "formula": "E(TT U{DUR = 4} P)"}).get_json()
    assert parse_model(data["model"]).size == 2
    assert "P_2" in data["formula"]

    response = client.post("/api/generate/dks-embed", json={"model": ATM})
    assert response.status_code == 400


def test_unknown_generator(client):
    response = client.post("/api/generate/sat", json={})
    assert response.status_code == 404
