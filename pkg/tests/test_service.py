import json
import threading
import time

import pytest
from fastapi.testclient import TestClient

from declog.service import create_app

WALKTHROUGH_ANSWERS = ["no", "yes", "no", "yes", "yes"]
LOCATED_INSTANCE = "insert(1,[3],[3,1]) :- 3>1, insert(1,[],[1])."


@pytest.fixture()
def client(tmp_ws):
    return TestClient(create_app(tmp_ws.root))


def _isort_session(client, oracle="interactive"):
    r = client.post("/sessions", json={
        "kind": "incorrectness", "program": "isort_buggy.pl",
        "query": "isort([2,1,3],Ys)", "oracle": oracle,
        "corr_spec": "s_isort_corr"})
    assert r.status_code == 201, r.text
    return r.json()


def _wait_job(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get("/checks/%s" % job_id).json()
        if doc["status"] in ("done", "error"):
            return doc
        time.sleep(0.05)
    raise AssertionError("job %s did not finish" % job_id)


def test_interactive_session_walkthrough(client):
    doc = _isort_session(client)
    sid = doc["id"]
    assert doc["state"] == "awaiting-answer"
    assert doc["pending"]["atom"] == "isort([1,3],[3,1])"
    assert doc["pending"]["prompt"].startswith("Is ")
    questions = []
    for ans in WALKTHROUGH_ANSWERS:
        q = client.get("/sessions/%s/question" % sid).json()
        assert not q["done"]
        questions.append(q["question"]["atom"])
        r = client.post("/sessions/%s/answer" % sid, json={"answer": ans})
        assert r.status_code == 200
    q = client.get("/sessions/%s/question" % sid).json()
    assert q["done"] and q["result"]["instance"] == LOCATED_INSTANCE
    assert questions == ["isort([1,3],[3,1])", "isort([3],[3])",
                         "insert(1,[3],[3,1])", "3>1", "insert(1,[],[1])"]
    # transcript persisted in order
    doc = client.get("/sessions/%s" % sid).json()
    assert [a for _q, a in doc["transcript"]] == WALKTHROUGH_ANSWERS


def test_spec_driven_session_completes_immediately(client):
    doc = _isort_session(client, oracle="spec-driven")
    assert doc["state"] == "done"
    assert doc["result"]["instance"] == LOCATED_INSTANCE
    # no question controls for a finished session
    q = client.get("/sessions/%s/question" % doc["id"]).json()
    assert q["done"] and q["question"] is None


def test_question_is_idempotent(client):
    doc = _isort_session(client)
    sid = doc["id"]
    q1 = client.get("/sessions/%s/question" % sid).json()
    q2 = client.get("/sessions/%s/question" % sid).json()
    assert q1 == q2


def test_answer_in_done_state_conflicts(client):
    doc = _isort_session(client, oracle="spec-driven")
    r = client.post("/sessions/%s/answer" % doc["id"], json={"answer": "yes"})
    assert r.status_code == 409


def test_restart_resumes_from_persisted_transcript(tmp_ws):
    app1 = TestClient(create_app(tmp_ws.root))
    doc = _isort_session(app1)
    sid = doc["id"]
    app1.post("/sessions/%s/answer" % sid, json={"answer": "no"})
    app1.post("/sessions/%s/answer" % sid, json={"answer": "yes"})
    # simulate a crash: a brand-new process over the same workspace
    app2 = TestClient(create_app(tmp_ws.root))
    q = app2.get("/sessions/%s/question" % sid).json()
    assert q["question"]["atom"] == "insert(1,[3],[3,1])"
    for ans in ("no", "yes", "yes"):
        app2.post("/sessions/%s/answer" % sid, json={"answer": ans})
    q = app2.get("/sessions/%s/question" % sid).json()
    assert q["done"] and q["result"]["instance"] == LOCATED_INSTANCE


def test_session_replay_equals_original(client):
    # replaying the spec-driven transcript as an interactive session step by
    # step produces the identical outcome
    spec_doc = _isort_session(client, oracle="spec-driven")
    it = _isort_session(client)
    sid = it["id"]
    while True:
        q = client.get("/sessions/%s/question" % sid).json()
        if q["done"]:
            break
        answered = dict((a, b) for a, b in spec_doc["transcript"])
        client.post("/sessions/%s/answer" % sid,
                    json={"answer": answered[q["question"]["atom"]]})
    q = client.get("/sessions/%s/question" % sid).json()
    assert q["result"]["instance"] == spec_doc["result"]["instance"]


def test_duplicate_answer_one_wins(client):
    doc = _isort_session(client)
    sid = doc["id"]
    index = doc["pending"]["index"]
    codes = []
    lock = threading.Barrier(2)

    def submit():
        lock.wait()
        r = client.post("/sessions/%s/answer" % sid,
                        json={"answer": "no", "question_index": index})
        codes.append(r.status_code)

    t1, t2 = threading.Thread(target=submit), threading.Thread(target=submit)
    t1.start(); t2.start(); t1.join(); t2.join()
    assert sorted(codes) == [200, 409]


def test_create_session_parse_error_is_400_and_not_persisted(client):
    r = client.post("/sessions", json={
        "kind": "incorrectness", "program": "isort_buggy.pl",
        "query": "isort([2,1,3], !)", "oracle": "interactive",
        "corr_spec": "s_isort_corr"})
    assert r.status_code == 400
    assert client.get("/workspace").json()["sessions"] == []


def test_create_session_missing_program_404(client):
    r = client.post("/sessions", json={
        "kind": "incorrectness", "program": "nope.pl", "query": "p(a)",
        "oracle": "interactive", "corr_spec": "s_isort_corr"})
    assert r.status_code == 404


def test_not_a_symptom_rejected(client):
    r = client.post("/sessions", json={
        "kind": "incorrectness", "program": "append.pl",
        "query": "app([a],[b],Z)", "oracle": "spec-driven",
        "corr_spec": "s_append"})
    assert r.status_code == 400
    assert "not a symptom" in r.json()["detail"]


def test_incompleteness_session(client):
    r = client.post("/sessions", json={
        "kind": "incompleteness", "program": "append_nounit.pl",
        "query": "app([],[],Z)", "oracle": "spec-driven",
        "compl_spec": "s_append0"})
    assert r.status_code == 201
    doc = r.json()
    assert doc["state"] == "done"
    assert doc["result"]["kind"] == "uncovered-atom"
    assert doc["result"]["atom"] == "app([],[],[])"


def test_check_jobs(client):
    r = client.post("/checks", json={"kind": "correctness", "program": "split.pl",
                                     "spec": "s_split_len", "bound": 6})
    assert r.status_code == 201
    doc = _wait_job(client, r.json()["id"])
    assert doc["status"] == "done"
    assert doc["report"]["verdict"] == "verified"

    r = client.post("/checks", json={"kind": "semicomplete", "program": "weakspec.pl",
                                     "spec": "s_0", "bound": 5})
    doc = _wait_job(client, r.json()["id"])
    assert doc["report"]["verdict"] == "refuted"
    assert doc["report"]["witness"]["data"]["atom"] == "q(0)"


def test_check_job_validation_before_creation(client):
    r = client.post("/checks", json={"kind": "correctness", "program": "append.pl",
                                     "spec": "no_such_spec"})
    assert r.status_code == 404
    assert client.get("/workspace").json()["jobs"] == []
    r = client.post("/checks", json={"kind": "frobnicate"})
    assert r.status_code == 400


def test_report_json_schema_stable(client):
    r = client.post("/checks", json={"kind": "correctness", "program": "append.pl",
                                     "spec": "s_append0", "bound": 4})
    doc = _wait_job(client, r.json()["id"])
    rep = doc["report"]
    assert set(rep) == {"check", "verdict", "bound", "instances_checked",
                        "witness", "reason", "details"}
    assert set(rep["witness"]) == {"kind", "rendering", "data"}
    assert rep["verdict"] == "refuted"
    assert rep["witness"]["data"]["instance"] == "app([],'$c1','$c1')."


def test_workspace_listing(client):
    doc = client.get("/workspace").json()
    assert "append.pl" in doc["programs"]
    assert "s_append0" in doc["specs"]
    assert "nop" in doc["splits"]
    assert "nop_cut" in doc["rules"]
