"""Live acquisition sessions over a JSON request/response protocol.

Each session runs one acquisition loop in a background thread.  When the
oracle is human, the loop parks on a handoff cell every time it posts a
query; POST /sessions/{id}/answer delivers the classification and wakes it.
The protocol is strictly turn based: one pending query at a time.
"""

from __future__ import annotations

import threading
import time
import uuid
from enum import Enum
from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .acquisition import (
    AcquisitionConfig,
    AcquisitionRun,
    Algorithm,
    FindScopeVariant,
    Status,
)
from . import benchmarks
from .model import Assignment, Instance
from .oracle import Oracle, OracleAborted, SimulatedOracle
from .solver import QGenMode, SearchConfig, ValHeuristic, VarHeuristic


class Phase(str, Enum):
    GENERATING = "generating"
    AWAITING_ANSWER = "awaiting_answer"
    CONVERGED = "converged"
    PREMATURE_CONVERGENCE = "premature_convergence"
    COLLAPSED = "collapsed"
    ABORTED = "aborted"


_TERMINAL = {
    Status.CONVERGED: Phase.CONVERGED,
    Status.PREMATURE_CONVERGENCE: Phase.PREMATURE_CONVERGENCE,
    Status.COLLAPSE: Phase.COLLAPSED,
    Status.ABORTED: Phase.ABORTED,
}


class WrongPhase(Exception):
    pass


class UnknownSession(KeyError):
    pass


class _HumanOracle(Oracle):
    """Parks the acquisition thread until the service delivers an answer."""

    def __init__(self, session: "Session", idle_timeout: float):
        super().__init__()
        self._session = session
        self._idle_timeout = idle_timeout

    def classify(self, e: Assignment) -> bool:
        s = self._session
        with s.cond:
            s.pending_query = e
            s.phase = Phase.AWAITING_ANSWER
            s.refresh_learned_view()
            s.cond.notify_all()
            deadline = time.monotonic() + self._idle_timeout
            while s.answer_cell is None and not s.abort_flag:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    s.abort_flag = True
                    break
                s.cond.wait(timeout=min(remaining, 1.0))
            if s.abort_flag:
                s.pending_query = None
                raise OracleAborted("session aborted")
            answer = s.answer_cell
            s.answer_cell = None
            return bool(answer)


class Session:
    def __init__(self, instance: Instance, config: AcquisitionConfig, *,
                 oracle_kind: str, idle_timeout: float, name: str = ""):
        self.id = uuid.uuid4().hex[:12]
        self.instance = instance
        self.config = config
        self.name = name or instance.name
        self.phase = Phase.GENERATING
        self.pending_query: Assignment | None = None
        self.answer_cell: bool | None = None
        self.abort_flag = False
        self.cond = threading.Condition()
        self.created_at = time.time()
        self.touched_at = time.time()
        self.learned_view: list[str] = []
        self.outcome = None
        if oracle_kind == "human":
            self.oracle: Oracle = _HumanOracle(self, idle_timeout)
        else:
            self.oracle = SimulatedOracle(instance.target, instance.vocabulary.n_variables)
        self.run = AcquisitionRun(instance, self.oracle, config)
        self.thread = threading.Thread(target=self._drive, daemon=True)
        self.thread.start()

    def _drive(self) -> None:
        outcome = self.run.run()
        with self.cond:
            self.outcome = outcome
            self.phase = _TERMINAL[outcome.status]
            self.pending_query = None
            self.refresh_learned_view()
            self.cond.notify_all()

    def refresh_learned_view(self) -> None:
        # called at parked/terminal points only, when the run is not mutating
        self.learned_view = [c.describe() for c in self.run.learned]

    def touch(self) -> None:
        self.touched_at = time.time()

    def snapshot(self) -> dict:
        with self.cond:
            log = self.oracle.log
            n = self.instance.vocabulary.n_variables
            pending = None
            if self.pending_query is not None:
                vals = self.pending_query
                pending = [
                    {"variable": i, "value": vals.get(i)} for i in range(n)
                ]
            snap = {
                "id": self.id,
                "name": self.name,
                "phase": self.phase.value,
                "variables": n,
                "domains": [list(d) for d in self.instance.vocabulary.domains],
                "pending_query": pending,
                "queries": log.total_queries,
                "learned_size": len(self.run.learned),
                "bias_size": len(self.run.bias),
                "learned": list(self.learned_view),
                "metrics": {
                    "avg_query_size": log.mean_size,
                    "avg_wait": log.mean_wait,
                    "max_wait": log.max_wait,
                },
            }
            if self.outcome is not None:
                snap["final_metrics"] = self.outcome.metrics.as_dict()
            return snap

    def answer(self, positive: bool, wait_timeout: float) -> dict:
        with self.cond:
            if self.phase is not Phase.AWAITING_ANSWER or self.pending_query is None:
                raise WrongPhase(f"no pending query (phase {self.phase.value})")
            self.pending_query = None
            self.phase = Phase.GENERATING
            self.answer_cell = positive
            self.cond.notify_all()
            deadline = time.monotonic() + wait_timeout
            while self.phase is Phase.GENERATING:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                self.cond.wait(timeout=remaining)
        return self.snapshot()

    def abort(self, join_timeout: float = 10.0) -> None:
        with self.cond:
            self.abort_flag = True
            self.cond.notify_all()
        self.thread.join(timeout=join_timeout)
        with self.cond:
            if self.phase not in (
                Phase.CONVERGED,
                Phase.PREMATURE_CONVERGENCE,
                Phase.COLLAPSED,
            ):
                self.phase = Phase.ABORTED

    def transcript(self) -> dict:
        with self.cond:
            return {
                "id": self.id,
                "name": self.name,
                "phase": self.phase.value,
                "records": [
                    {
                        "variables": list(r.variables),
                        "values": list(r.values),
                        "answer": r.answer,
                        "origin": r.origin,
                        "asked_at": r.asked_at,
                        "wait_time": r.wait_time,
                        "answer_time": r.answer_time,
                    }
                    for r in self.oracle.log.records
                ],
                "learned": list(self.learned_view),
            }


class SessionManager:
    def __init__(self, idle_timeout: float = 1800.0):
        self.idle_timeout = idle_timeout
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, instance: Instance, config: AcquisitionConfig, oracle_kind: str,
               name: str = "") -> Session:
        session = Session(
            instance, config, oracle_kind=oracle_kind,
            idle_timeout=self.idle_timeout, name=name,
        )
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        self.evict_idle()
        with self._lock:
            try:
                session = self._sessions[session_id]
            except KeyError:
                raise UnknownSession(session_id) from None
        session.touch()
        return session

    def drop(self, session_id: str) -> None:
        session = self.get(session_id)
        session.abort()
        with self._lock:
            self._sessions.pop(session_id, None)

    def evict_idle(self) -> None:
        now = time.time()
        with self._lock:
            stale = [
                sid
                for sid, s in self._sessions.items()
                if now - s.touched_at > self.idle_timeout
            ]
            for sid in stale:
                session = self._sessions.pop(sid)
                threading.Thread(target=session.abort, daemon=True).start()


class CreateRequest(BaseModel):
    instance: dict | None = None
    benchmark: str | None = None
    params: dict = Field(default_factory=dict)
    oracle: str | None = None  # "human" | "simulated"; default by target presence
    name: str = ""
    algorithm: str = "mquacq"
    findscope: int = 2
    qgen: str = "max"
    var: str | None = None
    val: str = "random"
    cut_min: float = 1.0
    cut_max: float = 5.0
    seed: int = 0


class AnswerRequest(BaseModel):
    classification: str


def _build_config(req: CreateRequest) -> AcquisitionConfig:
    algos = {"quacq": Algorithm.QUACQ, "multiacq": Algorithm.MULTIACQ, "mquacq": Algorithm.MQUACQ}
    if req.algorithm not in algos:
        raise ValueError(f"unknown algorithm {req.algorithm!r}")
    mode = QGenMode.MAX_B_PARTIAL if req.qgen == "maxb" else QGenMode.MAX_COMPLETE
    var = req.var or ("bdeg" if req.qgen == "maxb" else "domwdeg")
    return AcquisitionConfig(
        algorithm=algos[req.algorithm],
        findscope_variant=FindScopeVariant.V2 if req.findscope == 2 else FindScopeVariant.V1,
        search=SearchConfig(
            var_heuristic=VarHeuristic(var),
            val_heuristic=ValHeuristic(req.val),
            cut_min=req.cut_min,
            cut_max=req.cut_max,
            rng_seed=req.seed,
            mode=mode,
        ),
    )


def create_app(manager: SessionManager | None = None, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="acqlab session service")
    mgr = manager or SessionManager()
    app.state.manager = mgr

    @app.post("/sessions")
    def create_session(req: CreateRequest):
        try:
            if req.instance is not None:
                instance = Instance.from_dict(req.instance)
            elif req.benchmark is not None:
                instance = benchmarks.build(req.benchmark, **req.params)
            else:
                raise ValueError("provide either `instance` or `benchmark`")
            config = _build_config(req)
        except (ValueError, KeyError, benchmarks.UnknownBenchmark, benchmarks.InvalidParams) as exc:
            raise HTTPException(status_code=422, detail=f"invalid instance: {exc}")
        oracle_kind = req.oracle or ("simulated" if instance.target else "human")
        if oracle_kind not in ("human", "simulated"):
            raise HTTPException(status_code=422, detail="oracle must be 'human' or 'simulated'")
        if oracle_kind == "simulated" and not instance.target:
            raise HTTPException(status_code=422, detail="simulated oracle needs a target network")
        session = mgr.create(instance, config, oracle_kind, name=req.name)
        # give the loop a moment to reach the first query (or a terminal state)
        with session.cond:
            deadline = time.monotonic() + min(req.cut_max * 2 + 2, 30.0)
            while session.phase is Phase.GENERATING:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                session.cond.wait(timeout=remaining)
        return session.snapshot()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        try:
            return mgr.get(session_id).snapshot()
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.post("/sessions/{session_id}/answer")
    def answer(session_id: str, req: AnswerRequest):
        if req.classification not in ("yes", "no"):
            raise HTTPException(status_code=422, detail='classification must be "yes" or "no"')
        try:
            session = mgr.get(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        try:
            cut_max = session.config.search.cut_max
            return session.answer(req.classification == "yes", wait_timeout=cut_max * 2 + 2)
        except WrongPhase as exc:
            raise HTTPException(status_code=409, detail=str(exc))

    @app.delete("/sessions/{session_id}")
    def abort(session_id: str):
        try:
            mgr.drop(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")
        return JSONResponse({"status": "aborted"})

    @app.get("/sessions/{session_id}/transcript")
    def transcript(session_id: str):
        try:
            return mgr.get(session_id).transcript()
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session")

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
