import json
import time

import pytest
from fastapi.testclient import TestClient

from idealflow.service import create_app

from conftest import DATA_DIR


def cycle_doc(n: int = 5) -> dict:
    return {
        "schemaVersion": 1,
        "nodes": [{"id": i, "label": str(i + 1)} for i in range(n)],
        "arcs": [{"tail": i, "head": (i + 1) % n, "capacity": 1.0} for i in range(n)],
    }


@pytest.fixture
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def create_session(client, augment=False, reference_arc=None, doc=None):
    payload = {"network": doc or cycle_doc()}
    if reference_arc:
        payload["referenceArc"] = list(reference_arc)
    response = client.post(f"/api/v1/sessions?augment={str(augment).lower()}", json=payload)
    assert response.status_code == 201, response.text
    return response.json()


class TestHealth:
    def test_ok(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["version"]

    def test_api_prefix_alias(self, client):
        assert client.get("/api/v1/health").status_code == 200


class TestCreateSession:
    def test_cycle_has_unit_flows(self, client):
        body = create_session(client)
        flow = body["snapshot"]["flow"]
        values = [v for row in flow for v in row if v > 0]
        assert values == [1.0] * 5

    def test_malformed_json_is_400(self, client):
        response = client.post(
            "/api/v1/sessions",
            content=b"{not json",
            headers={"Content-Type": "application/json"},
        )
        assert response.status_code == 400

    def test_not_strongly_connected_is_422(self, client):
        doc = cycle_doc()
        doc["arcs"] = doc["arcs"][:-1]
        response = client.post("/api/v1/sessions", json={"network": doc})
        assert response.status_code == 422
        assert response.json()["code"] == "not_strongly_connected"

    def test_augmented_session_notes_cloud(self, client):
        doc = cycle_doc()
        doc["arcs"] = doc["arcs"][:-1]
        body = create_session(client, augment=True, doc=doc)
        assert body["snapshot"]["cloudNode"] == 5

    def test_tntp_payload_accepted(self, client):
        text = (DATA_DIR / "siouxfalls_net.tntp").read_text()
        response = client.post("/api/v1/sessions", json={"tntp": text})
        assert response.status_code == 201
        assert len(response.json()["snapshot"]["flow"]) == 24

    def test_both_or_neither_inputs_rejected(self, client):
        assert client.post("/api/v1/sessions", json={}).status_code == 400
        both = {"network": cycle_doc(), "tntp": "x"}
        assert client.post("/api/v1/sessions", json=both).status_code == 400


class TestEdits:
    def test_growth_stages_match_reference_values(self, client):
        body = create_session(client, reference_arc=(1, 2))
        sid = body["sessionId"]

        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 1, "head": 4})
        flow = r.json()["flow"]
        assert flow[4][0] == 2.0 and flow[0][1] == 2.0

        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 0, "head": 2})
        snap = r.json()
        assert snap["maxFlowArc"]["value"] == 4.0
        assert snap["flow"][1][2] == 1.0

        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 1, "head": 3})
        snap = r.json()
        assert snap["maxFlowArc"] == {"tail": 4, "head": 0, "value": 6.0}

        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 3, "head": 0})
        snap = r.json()
        assert snap["flow"][4][0] == 3.5
        assert snap["referenceFlow"] == 1.0

    def test_unknown_session_404(self, client):
        r = client.post("/api/v1/sessions/none/edits", json={"op": "add", "tail": 0, "head": 2})
        assert r.status_code == 404

    def test_duplicate_add_409(self, client):
        sid = create_session(client)["sessionId"]
        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 0, "head": 1})
        assert r.status_code == 409

    def test_remove_missing_409(self, client):
        sid = create_session(client)["sessionId"]
        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "remove", "tail": 0, "head": 2})
        assert r.status_code == 409

    def test_connectivity_breaking_edit_422_and_state_kept(self, client):
        body = create_session(client)
        sid = body["sessionId"]
        before = body["snapshot"]
        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "remove", "tail": 0, "head": 1})
        assert r.status_code == 422
        flow = client.get(f"/api/v1/sessions/{sid}/flow").json()
        assert flow["snapshot"] == before


class TestUndo:
    def test_undo_returns_previous_stage(self, client):
        sid = create_session(client)["sessionId"]
        first = client.post(
            f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 1, "head": 4}
        ).json()
        client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 0, "head": 2})
        undone = client.post(f"/api/v1/sessions/{sid}/undo").json()
        assert undone == first

    def test_undo_fresh_session_409(self, client):
        sid = create_session(client)["sessionId"]
        assert client.post(f"/api/v1/sessions/{sid}/undo").status_code == 409


class TestFlowEndpoint:
    def test_methods_agree(self, client):
        sid = create_session(client)["sessionId"]
        for tail, head in [(1, 4), (0, 2), (1, 3)]:
            client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": tail, "head": head})
        markov = client.get(f"/api/v1/sessions/{sid}/flow?method=markov").json()["flow"]
        null = client.get(f"/api/v1/sessions/{sid}/flow?method=nullspace").json()["flow"]
        for row_m, row_n in zip(markov, null):
            for a, b in zip(row_m, row_n):
                assert abs(a - b) <= 1e-8
        assert max(v for row in markov for v in row) == 6.0

    def test_unknown_session_404(self, client):
        assert client.get("/api/v1/sessions/none/flow").status_code == 404

    def test_bad_query_params_rejected(self, client):
        sid = create_session(client)["sessionId"]
        assert client.get(f"/api/v1/sessions/{sid}/flow?method=magic").status_code == 400


class TestJournaling:
    def test_journal_dir_records_session_events(self, tmp_path):
        client = TestClient(create_app(journal_dir=tmp_path))
        sid = create_session(client)["sessionId"]
        client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 1, "head": 4})
        journal = tmp_path / f"{sid}.jsonl"
        events = [json.loads(line) for line in journal.read_text().splitlines()]
        assert [e["event"] for e in events] == ["create", "edit"]


class TestLatency:
    def test_edit_under_100ms_for_200_nodes(self, client):
        body = create_session(client, doc=cycle_doc(200))
        sid = body["sessionId"]
        client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 0, "head": 100})
        start = time.perf_counter()
        r = client.post(f"/api/v1/sessions/{sid}/edits", json={"op": "add", "tail": 3, "head": 120})
        elapsed = time.perf_counter() - start
        assert r.status_code == 200
        assert elapsed < 0.100, f"edit took {elapsed * 1e3:.1f} ms"


class TestDeterminism:
    def test_replayed_scripts_give_byte_identical_snapshots(self, client):
        script = [
            {"op": "add", "tail": 1, "head": 4},
            {"op": "add", "tail": 0, "head": 2},
            {"op": "add", "tail": 1, "head": 3},
            {"op": "add", "tail": 2, "head": 0},
        ]

        def run():
            sid = create_session(client)["sessionId"]
            out = []
            for edit in script:
                r = client.post(f"/api/v1/sessions/{sid}/edits", json=edit)
                out.append(json.dumps(r.json(), sort_keys=True))
            return out

        assert run() == run()
