import pytest
from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)

FIX_A = {
    "universe": ["1", "2"],
    "family": [["1"], ["1", "2"]],
    "payoff": {"kind": "extensional", "sets": [["1"]]},
    "horizon": 1,
}
DISCRETE_2 = {"points": ["0", "1"], "subbase": [["0"], ["1"]], "basis": [["0"], ["1"]]}


class TestSolveRoutes:
    def test_solve_markov(self):
        response = client.post("/api/v1/solve", json={"instance": FIX_A, "relation": "II_markov"})
        assert response.status_code == 200
        data = response.json()
        assert data["holds"] is True
        assert data["witness"] == {"player": "II", "class": "markov", "horizon": 1, "table": {"0,0": "1", "1,0": "1"}}
        assert data["nodes"] > 0

    def test_solve_without_witness(self):
        response = client.post("/api/v1/solve", json={"instance": FIX_A, "relation": "II_full", "witness": False})
        assert response.status_code == 200
        assert response.json()["witness"] is None

    @pytest.mark.parametrize("relation, holds", [("I_full", False), ("I_pre", False), ("II_full", True)])
    def test_solve_relations(self, relation, holds):
        response = client.post("/api/v1/solve", json={"instance": FIX_A, "relation": relation})
        assert response.json()["holds"] is holds

    def test_unknown_relation(self):
        response = client.post("/api/v1/solve", json={"instance": FIX_A, "relation": "III"})
        assert response.status_code == 422

    def test_budget_exceeded(self):
        response = client.post("/api/v1/solve", json={"instance": FIX_A, "relation": "II_full", "budget": 1})
        assert response.status_code == 413
        assert response.json()["detail"]["error"] == "BoundExceeded"

    def test_atom_outside_universe(self):
        bad = {**FIX_A, "family": [["1"], ["3"]]}
        response = client.post("/api/v1/solve", json={"instance": bad, "relation": "I_full"})
        assert response.status_code == 400

    def test_chain_check(self):
        response = client.post("/api/v1/chain-check", json={"instance": FIX_A})
        assert response.status_code == 200
        data = response.json()
        assert data["consistent"] is True
        assert data["verdicts"] == {"I_full": False, "I_pre": False, "II_full": True, "II_markov": True}


class TestReflectionRoutes:
    def test_reflect_fails_subset(self):
        response = client.post("/api/v1/reflect", json={"instance": FIX_A, "reflection": {"family": [["1", "2"]]}})
        assert response.status_code == 200
        data = response.json()
        assert data["is_reflection"] is False
        assert data["failed_condition"] == "subset"
        assert data["coinitial_ok"] is True

    def test_dualize(self):
        response = client.post("/api/v1/dualize", json={"instance": FIX_A, "reflection": {"family": [["1"]]}})
        assert response.status_code == 200
        assert response.json()["payoff"]["negated"] is True

    def test_translate_check(self):
        body = {
            "instance": FIX_A,
            "reflection": {"family": [["1"]]},
            "strategy": {"player": "I", "class": "predetermined", "horizon": 1, "table": [0]},
            "theorem": "t2",
            "direction": "backward",
            "check": True,
        }
        response = client.post("/api/v1/translate", json=body)
        assert response.status_code == 200
        assert response.json()["wins"] is True

    def test_translate_non_reflection(self):
        body = {
            "instance": FIX_A,
            "reflection": {"family": [["1", "2"]]},
            "strategy": {"player": "I", "class": "predetermined", "horizon": 1, "table": [0]},
            "theorem": "t1",
            "direction": "forward",
        }
        response = client.post("/api/v1/translate", json=body)
        assert response.status_code == 400
        assert response.json()["detail"]["error"] == "ReflectionViolation"

    def test_translate_bad_entry(self):
        body = {
            "instance": FIX_A,
            "reflection": {"family": [["1"]]},
            "strategy": {"player": "I", "class": "full", "horizon": 1, "table": {"": "x"}},
            "theorem": "t3",
            "direction": "forward",
        }
        response = client.post("/api/v1/translate", json=body)
        assert response.status_code == 422


class TestDualityRoutes:
    def test_verify_duality_files(self):
        response = client.post("/api/v1/verify-duality", json={"instance": FIX_A, "reflection": {"family": [["1"]]}})
        assert response.status_code == 200
        assert response.json()["holds"] is True

    def test_verify_duality_named(self):
        body = {"space": DISCRETE_2, "game": "point_open", "horizon": 2, "soundness": True}
        response = client.post("/api/v1/verify-duality", json=body)
        assert response.status_code == 200
        data = response.json()
        assert data["holds"] is True
        assert all(check["ok"] for check in data["soundness"])

    def test_verify_duality_needs_one_source(self):
        response = client.post("/api/v1/verify-duality", json={"instance": FIX_A})
        assert response.status_code == 422

    def test_non_reflection_detail(self):
        response = client.post("/api/v1/verify-duality", json={"instance": FIX_A, "reflection": {"family": [["1", "2"]]}})
        assert response.status_code == 400
        detail = response.json()["detail"]
        assert detail["detail"] == "subset condition failed, witness range {2}"
        assert detail["failed_condition"] == "subset"


def test_gen_selection_set():
    response = client.post("/api/v1/gen", json={"space": DISCRETE_2, "kind": "P_X"})
    assert response.status_code == 200
    assert response.json()["family"] == [["{0}"], ["{1}"]]


def test_gen_needs_exactly_one_target():
    response = client.post("/api/v1/gen", json={"space": DISCRETE_2, "kind": "P_X", "game": "rothberger"})
    assert response.status_code == 422


def test_gen_point_required():
    response = client.post("/api/v1/gen", json={"space": DISCRETE_2, "kind": "T_X_x"})
    assert response.status_code == 400


def test_corpus_route():
    response = client.post("/api/v1/corpus", json={"seed": 3, "count": 4, "max_horizon": 2})
    assert response.status_code == 200
    data = response.json()
    assert data["count"] == 4
    assert data["duality_pass"] == 4
    assert data["files"] == []


def test_corpus_count_limit():
    response = client.post("/api/v1/corpus", json={"count": 5000})
    assert response.status_code == 422
