"""HTTP facade: sessions, rule administration, beep diagnosis, agent control.

The rule-base lives behind a copy-on-write store: readers take whatever
snapshot is current and never block; writers are serialized, mutate a
clone, persist it, and only then publish it. A request can therefore
see the state before or after a concurrent write, never a mixture, and
every acknowledged write is already on disk.

Sessions are held in memory with an idle timeout. A session that
delivered its diagnosis stays around (answering it again is reported as
closed, not unknown) until the timeout sweeps it away.
"""

from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path
from typing import Callable, Mapping

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import agent as agent_mod
from .agent import Fetcher, SourceConfig, SyncReport, default_fetcher
from .engine import (
    InvalidChoiceError,
    Question,
    SessionClosedError,
    answer as engine_answer,
    start_session,
)
from .fuzzy import (
    BeepPattern,
    MembershipFunctions,
    NegativeDurationError,
    diagnose_beep,
    fuzzify,
)
from .rules import (
    DuplicateRuleError,
    EmptyFieldError,
    Rule,
    RuleBase,
    RuleNotFoundError,
    load,
    match_key,
    save,
)
from .seed import seed_rulebase

AGENT_LOG_NAME = "agent_log.jsonl"
RECENT_REPORTS_KEPT = 50


class UnknownSessionError(KeyError):
    """No live session under that id (never existed, or idled out)."""


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the service reads from its JSON config file."""

    listen_addr: str = "127.0.0.1:8080"
    rulebase_path: str = "rules.json"
    seed_if_missing: bool = False
    fuzzy_breakpoints: Mapping[str, list] | None = None
    agent: SourceConfig = dataclass_field(default_factory=SourceConfig)
    session_idle_timeout_seconds: float = 900.0

    def __post_init__(self) -> None:
        if not self.listen_addr.strip() or not str(self.rulebase_path).strip():
            raise ValueError("listen_addr and rulebase_path must be non-empty")
        if self.session_idle_timeout_seconds <= 0:
            raise ValueError("session_idle_timeout_seconds must be positive")
        self.host_port()  # validate eagerly

    def host_port(self) -> tuple[str, int]:
        host, sep, port = self.listen_addr.rpartition(":")
        if not sep or not port.isdigit():
            raise ValueError(f"listen_addr must be host:port, got {self.listen_addr!r}")
        return host or "127.0.0.1", int(port)

    def membership(self) -> MembershipFunctions:
        if self.fuzzy_breakpoints is None:
            return MembershipFunctions()
        return MembershipFunctions.from_breakpoints(self.fuzzy_breakpoints)

    def agent_log_path(self) -> Path:
        return Path(self.rulebase_path).parent / AGENT_LOG_NAME

    @classmethod
    def from_dict(cls, data: Mapping) -> "ServiceConfig":
        if not isinstance(data, Mapping):
            raise ValueError("config must be a JSON object")
        known = {
            "listen_addr", "rulebase_path", "seed_if_missing",
            "fuzzy_breakpoints", "agent", "session_idle_timeout_seconds",
        }
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        agent_raw = data.get("agent") or {}
        agent_keys = {"sources", "poll_interval_seconds", "fetch_timeout_seconds"}
        bad = set(agent_raw) - agent_keys
        if bad:
            raise ValueError(f"unknown agent config keys: {sorted(bad)}")
        kwargs = {k: data[k] for k in known & set(data) if k != "agent"}
        return cls(agent=SourceConfig(**agent_raw), **kwargs)


def load_config(path: str | Path) -> ServiceConfig:
    """Read and validate the service config file."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config is not valid JSON: {exc}") from exc
    return ServiceConfig.from_dict(data)


class RuleStore:
    """Copy-on-write rule-base with write-through persistence.

    Readers call snapshot() and get an immutable-by-convention version.
    Writers run inside mutate(), one at a time: the change is applied to
    a clone, saved to disk, and only then swapped in. A failed mutation
    (domain error or disk error) leaves both memory and file untouched.
    """

    def __init__(self, path: str | Path, rulebase: RuleBase):
        self._path = Path(path)
        self._current = rulebase
        self._write_lock = threading.Lock()

    @classmethod
    def open(cls, path: str | Path, seed_if_missing: bool = False) -> "RuleStore":
        """Load the store, optionally creating the file from the built-in corpus."""
        target = Path(path)
        if not target.exists() and seed_if_missing:
            rulebase = seed_rulebase()
            save(rulebase, target)
            return cls(target, rulebase)
        return cls(target, load(target))

    @property
    def path(self) -> Path:
        return self._path

    def snapshot(self) -> RuleBase:
        return self._current

    def mutate(self, change: Callable[[RuleBase], object]) -> object:
        with self._write_lock:
            draft = self._current.clone()
            result = change(draft)
            save(draft, self._path)
            self._current = draft
            return result


class SessionRegistry:
    """Live questionnaire sessions, swept by idle timeout on every access."""

    def __init__(self, idle_timeout_seconds: float, clock: Callable[[], float] = time.monotonic):
        self._timeout = idle_timeout_seconds
        self._clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple] = {}  # id -> (Session, last_touched)

    def _sweep(self) -> None:
        now = self._clock()
        dead = [
            sid for sid, (_, touched) in self._sessions.items()
            if now - touched > self._timeout
        ]
        for sid in dead:
            del self._sessions[sid]

    def count(self) -> int:
        with self._lock:
            self._sweep()
            return len(self._sessions)

    def start(self, rulebase: RuleBase):
        with self._lock:
            self._sweep()
            session, question = start_session(rulebase)
            self._sessions[session.session_id] = (session, self._clock())
            return session, question

    def answer(self, session_id: str, choice: str):
        with self._lock:
            self._sweep()
            try:
                session, _ = self._sessions[session_id]
            except KeyError:
                raise UnknownSessionError(session_id) from None
            result = engine_answer(session, choice)
            self._sessions[session_id] = (session, self._clock())
            return result


# --- request bodies ------------------------------------------------------

class RuleIn(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    condition_a: str = Field(alias="if")
    condition_b: str = Field(alias="and")
    conclusion: str = Field(alias="then")
    solution: str


class RulePatch(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    condition_a: str | None = Field(default=None, alias="if")
    condition_b: str | None = Field(default=None, alias="and")
    conclusion: str | None = Field(default=None, alias="then")
    solution: str | None = None


class AnswerIn(BaseModel):
    choice: str


class BeepIn(BaseModel):
    duration_seconds: float
    repeating_without_end: bool = False


def rule_json(rule: Rule) -> dict:
    return {
        "id": rule.id,
        "if": rule.condition_a,
        "and": rule.condition_b,
        "then": rule.conclusion,
        "solution": rule.solution,
    }


def question_json(question: Question) -> dict:
    return {"text": question.text, "options": list(question.options)}


def create_app(
    config: ServiceConfig,
    *,
    fetcher: Fetcher = default_fetcher,
    clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    """Assemble the application around one rule store.

    Raises ParseError/OSError if the rule-base file is unusable, and
    ValueError for bad fuzzy breakpoints, so callers can abort startup
    with a diagnostic instead of serving a broken instance.
    """
    store = RuleStore.open(config.rulebase_path, config.seed_if_missing)
    membership = config.membership()
    sessions = SessionRegistry(config.session_idle_timeout_seconds, clock)
    recent_reports: list[SyncReport] = []
    reports_lock = threading.Lock()

    def run_sync() -> SyncReport:
        report = store.mutate(lambda rb: agent_mod.sync(rb, config.agent, fetcher))
        with reports_lock:
            recent_reports.append(report)
            del recent_reports[:-RECENT_REPORTS_KEPT]
        agent_mod.append_report(config.agent_log_path(), report)
        return report

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        stop = threading.Event()
        thread = None
        if config.agent.sources:
            thread = threading.Thread(
                target=agent_mod.run_periodic,
                args=(None, config.agent, fetcher, stop),
                kwargs={"sync_once": run_sync},
                name="knowledge-agent",
                daemon=True,
            )
            thread.start()
        try:
            yield
        finally:
            stop.set()
            if thread is not None:
                thread.join(timeout=5)

    app = FastAPI(title="PC troubleshooting service", lifespan=lifespan)

    def error_response(status: int, code: str, message: str, **extra):
        return JSONResponse(
            status_code=status,
            content={"error": code, "message": message, **extra},
        )

    @app.exception_handler(InvalidChoiceError)
    async def bad_choice(request: Request, exc: InvalidChoiceError):
        return error_response(
            400, "invalid_choice", str(exc), valid_options=list(exc.valid_options)
        )

    @app.exception_handler(SessionClosedError)
    async def closed(request: Request, exc: SessionClosedError):
        return error_response(410, "session_closed", str(exc))

    @app.exception_handler(UnknownSessionError)
    async def unknown_session(request: Request, exc: UnknownSessionError):
        return error_response(404, "unknown_session", "no such session")

    @app.exception_handler(RuleNotFoundError)
    async def missing_rule(request: Request, exc: RuleNotFoundError):
        return error_response(404, "not_found", str(exc))

    @app.exception_handler(DuplicateRuleError)
    async def duplicate(request: Request, exc: DuplicateRuleError):
        return error_response(409, "duplicate_rule", str(exc))

    @app.exception_handler(EmptyFieldError)
    async def empty_field(request: Request, exc: EmptyFieldError):
        return error_response(422, "empty_field", str(exc))

    @app.exception_handler(NegativeDurationError)
    async def negative(request: Request, exc: NegativeDurationError):
        return error_response(422, "invalid_duration", str(exc))

    @app.post("/sessions")
    def open_session():
        session, question = sessions.start(store.snapshot())
        return {"session_id": session.session_id, "question": question_json(question)}

    @app.post("/sessions/{session_id}/answer")
    def answer_session(session_id: str, body: AnswerIn):
        result = sessions.answer(session_id, body.choice)
        if isinstance(result, Question):
            return {"question": question_json(result)}
        return {
            "diagnosis": {
                "rule_id": result.rule_id,
                "conclusion": result.conclusion,
                "solution": result.solution,
            }
        }

    @app.get("/rules")
    def list_rules(category: str | None = None):
        rulebase = store.snapshot()
        rules = list(rulebase)
        if category is not None:
            wanted = match_key(category)
            rules = [r for r in rules if match_key(r.condition_a) == wanted]
        return {
            "version": rulebase.version,
            "rules": [rule_json(r) for r in rules],
        }

    @app.get("/rules/{rule_id}")
    def get_rule(rule_id: int):
        return rule_json(store.snapshot().get(rule_id))

    @app.post("/admin/rules", status_code=201)
    def add_rule(body: RuleIn):
        rule = store.mutate(
            lambda rb: rb.add_rule(
                body.condition_a, body.condition_b, body.conclusion, body.solution
            )
        )
        return rule_json(rule)

    @app.put("/admin/rules/{rule_id}")
    def update_rule(rule_id: int, body: RulePatch):
        changes = {
            name: value
            for name, value in (
                ("condition_a", body.condition_a),
                ("condition_b", body.condition_b),
                ("conclusion", body.conclusion),
                ("solution", body.solution),
            )
            if value is not None
        }
        rule = store.mutate(lambda rb: rb.update_rule(rule_id, **changes))
        return rule_json(rule)

    @app.delete("/admin/rules/{rule_id}", status_code=204)
    def delete_rule(rule_id: int):
        store.mutate(lambda rb: rb.delete_rule(rule_id))

    @app.post("/beep")
    def beep(body: BeepIn):
        pattern = BeepPattern(body.duration_seconds, body.repeating_without_end)
        result = diagnose_beep(pattern, membership)
        degrees = fuzzify(pattern.duration_seconds, membership)
        return {
            "linguistic": result.linguistic.value,
            "message": result.message,
            "memberships": {value.value: deg for value, deg in degrees.items()},
        }

    @app.post("/admin/agent/sync")
    def agent_sync():
        if not config.agent.sources:
            return error_response(409, "no_sources", "no agent sources configured")
        return run_sync().to_dict()

    @app.get("/admin/agent/reports")
    def agent_reports():
        with reports_lock:
            return {"reports": [r.to_dict() for r in recent_reports]}

    @app.get("/health")
    def health():
        rulebase = store.snapshot()
        return {
            "status": "ok",
            "rulebase_version": rulebase.version,
            "rule_count": len(rulebase),
        }

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted (uvicorn owns the loop)."""
    import uvicorn

    app = create_app(config)
    host, port = config.host_port()
    uvicorn.run(app, host=host, port=port, log_level="info")
