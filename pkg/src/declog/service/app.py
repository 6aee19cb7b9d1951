"""HTTP front end: verification jobs and interactive diagnosis sessions.

Sessions are resumable: the persisted transcript is the whole state.  Each
answer is appended and the diagnosis is replayed through a scripted oracle;
the replay either parks at the next question (awaiting-answer) or completes.
Replaying the same transcript always reproduces the same run, so a restart
resumes exactly where the previous process stopped.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from .. import diagnosis as diag
from .. import dsl
from .. import workspace as wsmod
from ..dsl import DslError
from ..herbrand import working_signature
from ..reports import BudgetExceeded
from ..specs import ApproxSpec, GuardError
from ..syntax import ParseError, atom_to_json, atom_to_str, parse_query
from ..terms import Program
from .models import AnswerBody, CheckCreate, SessionCreate
from .store import Store

SESSIONS = "sessions"
JOBS = "jobs"


class SessionEngine:
    """Rebuilds the deterministic diagnosis run for a persisted session."""

    def __init__(self, ws: wsmod.Workspace):
        self.ws = ws

    def _oracle_spec(self, doc: dict) -> ApproxSpec:
        cfg = doc["workspace"]
        corr = self.ws.spec(cfg["corr_spec"]) if cfg.get("corr_spec") else None
        compl = self.ws.spec(cfg["compl_spec"]) if cfg.get("compl_spec") else None
        return ApproxSpec(s_compl=compl or corr, s_corr=corr or compl)

    def validate(self, doc: dict) -> None:
        """Symptom precondition; raises diag.NotASymptom or ValueError."""
        cfg = doc["workspace"]
        program = self.ws.program(cfg["program"])
        query = parse_query(cfg["query"])
        bound, depth = doc["bound"], doc["depth"]
        if doc["kind"] == diag.INCORRECTNESS:
            tree = diag.proof_tree(program, query, depth)
            if tree is None:
                raise ValueError("query %s has no success within depth %d - nothing to diagnose"
                                 % (cfg["query"], depth))
            ap = self._oracle_spec(doc)
            oracle = diag.spec_oracle(ap, diag.INCORRECTNESS, bound,
                                      self._sig(program, ap, query))
            if oracle.judge(tree.atom, ()):
                raise diag.NotASymptom("root %s is not a symptom w.r.t. %s"
                                       % (atom_to_str(tree.atom), ap.s_corr.name))
        else:
            # incompleteness: the run itself checks the symptom
            self.ws.spec(cfg["compl_spec"])

    def _sig(self, program: Program, ap: ApproxSpec, query):
        return working_signature(program, specs=[ap.s_compl, ap.s_corr], queries=[query])

    def advance(self, doc: dict) -> dict:
        """Replay the transcript; park at the next question or finish."""
        cfg = doc["workspace"]
        program = self.ws.program(cfg["program"])
        query = parse_query(cfg["query"])
        bound, depth = doc["bound"], doc["depth"]
        ap = self._oracle_spec(doc)
        sig = self._sig(program, ap, query)
        spec_driven = doc["oracle"] == "spec-driven"

        try:
            if doc["kind"] == diag.INCORRECTNESS:
                tree = diag.proof_tree(program, query, depth)
                if spec_driven:
                    oracle = diag.spec_oracle(ap, diag.INCORRECTNESS, bound, sig)
                else:
                    oracle = diag.scripted_oracle([a for _, a in doc["transcript"]],
                                                  diag.INCORRECTNESS)
                result = diag.diagnose_incorrectness(tree, oracle)
                doc["proof_tree"] = tree.to_json()
            else:
                if spec_driven:
                    oracle = diag.spec_oracle(ap, diag.INCOMPLETENESS, bound, sig)
                else:
                    oracle = diag.scripted_oracle([a for _, a in doc["transcript"]],
                                                  diag.INCOMPLETENESS)
                result = diag.diagnose_incompleteness(
                    program, query, ap.s_compl, oracle, bound, depth, sig,
                    require_symptom=doc.get("require_symptom", True))
        except diag.NeedAnswer as need:
            doc["state"] = "awaiting-answer"
            doc["pending"] = {
                "atom": atom_to_str(need.atom),
                "structured": atom_to_json(need.atom),
                "path": list(need.path),
                "index": len(doc["transcript"]),
                "prompt": ("Is %s correct?" % atom_to_str(need.atom)
                           if need.mode == diag.INCORRECTNESS
                           else "Should %s succeed?" % atom_to_str(need.atom)),
            }
            if doc["kind"] == diag.INCORRECTNESS:
                tree = diag.proof_tree(program, query, depth)
                doc["proof_tree"] = tree.to_json()
            return doc
        doc["state"] = "done"
        doc["pending"] = None
        doc["transcript"] = [list(e) for e in result.transcript]
        doc["result"] = result.to_json()
        return doc


def create_app(workspace_root, ui_dir: Optional[str] = None) -> FastAPI:
    ws = wsmod.Workspace(workspace_root)
    store = Store(ws.root)
    engine = SessionEngine(ws)
    app = FastAPI(title="declog session service")
    # the web UI may be served from any static host
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    app.state.workspace = ws
    executor = ThreadPoolExecutor(max_workers=2)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    def _session_view(doc: dict) -> dict:
        return doc

    @app.get("/workspace")
    def workspace_listing():
        specs, lms = ws._load_specs()
        return {
            "programs": sorted(p.name for p in (ws.root / "programs").glob("*.pl"))
            if (ws.root / "programs").is_dir() else [],
            "specs": sorted(specs),
            "lms": sorted(lms),
            "splits": sorted(
                d.name
                for p in (ws.root / "splits").glob("*.split")
                for d in dsl.parse_split_file(p.read_text())
            ) if (ws.root / "splits").is_dir() else [],
            "rules": sorted(
                d.name
                for p in (ws.root / "rules").glob("*.csel")
                for d in dsl.parse_csel_file(p.read_text())
            ) if (ws.root / "rules").is_dir() else [],
            "sessions": store.list_ids(SESSIONS),
            "jobs": store.list_ids(JOBS),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: SessionCreate):
        if body.kind not in (diag.INCORRECTNESS, diag.INCOMPLETENESS):
            raise HTTPException(400, "kind must be incorrectness or incompleteness")
        if body.oracle not in ("interactive", "spec-driven"):
            raise HTTPException(400, "oracle must be interactive or spec-driven")
        cfg = ws.config()
        doc = {
            "id": store.new_id(),
            "kind": body.kind,
            "oracle": body.oracle,
            "workspace": {"program": body.program, "query": body.query,
                          "corr_spec": body.corr_spec, "compl_spec": body.compl_spec},
            "bound": body.bound or cfg["bound"],
            "depth": body.depth or cfg["depth"],
            "require_symptom": body.require_symptom,
            "state": "running",
            "pending": None,
            "transcript": [],
            "result": None,
            "error": None,
            "created_at": time.time(),
            "updated_at": time.time(),
        }
        try:
            engine.validate(doc)
            doc = engine.advance(doc)
        except wsmod.WorkspaceError as e:
            raise HTTPException(404, str(e))
        except (ParseError, DslError, diag.NotASymptom, ValueError, GuardError,
                BudgetExceeded) as e:
            raise HTTPException(400, str(e))
        doc["updated_at"] = time.time()
        store.write(SESSIONS, doc["id"], doc)
        return _session_view(doc)

    def _get_session(session_id: str) -> dict:
        doc = store.read(SESSIONS, session_id)
        if doc is None:
            raise HTTPException(404, "unknown session %s" % session_id)
        return doc

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(_get_session(session_id))

    @app.get("/sessions/{session_id}/question")
    def next_question(session_id: str):
        doc = _get_session(session_id)
        if doc["state"] == "done":
            return {"done": True, "question": None, "result": doc["result"],
                    "state": doc["state"]}
        return {"done": False, "question": doc["pending"], "result": None,
                "state": doc["state"]}

    @app.post("/sessions/{session_id}/answer")
    def submit_answer(session_id: str, body: AnswerBody):
        if body.answer not in (diag.YES, diag.NO):
            raise HTTPException(400, "answer must be yes or no")
        lock = store.lock(session_id)
        with lock:
            doc = _get_session(session_id)
            if doc["state"] != "awaiting-answer":
                raise HTTPException(409, "session is %s, not awaiting-answer" % doc["state"])
            if body.question_index is not None \
                    and body.question_index != doc["pending"]["index"]:
                raise HTTPException(409, "stale answer: question %d is no longer pending"
                                    % body.question_index)
            question = doc["pending"]["atom"]
            doc["transcript"].append([question, body.answer])
            doc["state"] = "running"
            doc["pending"] = None
            store.write(SESSIONS, session_id, doc)  # persist the answer first
            try:
                doc = engine.advance(doc)
            except (ParseError, DslError, GuardError, BudgetExceeded) as e:
                doc["state"] = "error"
                doc["error"] = str(e)
            doc["updated_at"] = time.time()
            store.write(SESSIONS, session_id, doc)
        return _session_view(doc)

    @app.post("/checks", status_code=201)
    def run_check(body: CheckCreate):
        params = body.params()
        if body.kind not in wsmod.CHECK_KINDS:
            raise HTTPException(400, "unknown check kind %r" % body.kind)
        # resolve references up front so validation errors precede job creation
        try:
            if params.get("program"):
                ws.program(params["program"])
            for key in ("spec", "corr_spec"):
                if params.get(key):
                    ws.spec(params[key])
            if params.get("lm"):
                ws.lm(params["lm"])
            if params.get("split"):
                ws.split(params["split"])
            if params.get("rules"):
                ws.csel(params["rules"])
        except wsmod.WorkspaceError as e:
            raise HTTPException(404, str(e))
        except (ParseError, DslError) as e:
            raise HTTPException(400, str(e))
        job = {
            "id": store.new_id(),
            "kind": body.kind,
            "params": params,
            "status": "queued",
            "report": None,
            "error": None,
            "created_at": time.time(),
            "updated_at": time.time(),
        }
        store.write(JOBS, job["id"], job)

        def run(job_id: str):
            doc = store.read(JOBS, job_id)
            doc["status"] = "running"
            store.write(JOBS, job_id, doc)
            try:
                report = wsmod.run_check(ws, doc["params"])
                doc["report"] = report.to_json()
                doc["status"] = "done"
            except Exception as e:  # job errors are part of the record
                doc["status"] = "error"
                doc["error"] = str(e)
            doc["updated_at"] = time.time()
            store.write(JOBS, job_id, doc)

        executor.submit(run, job["id"])
        return {"id": job["id"], "status": "queued"}

    @app.get("/checks/{job_id}")
    def get_job(job_id: str):
        doc = store.read(JOBS, job_id)
        if doc is None:
            raise HTTPException(404, "unknown job %s" % job_id)
        return doc

    return app
