"""Event-sourced interactive fair-division sessions.

A session wraps a suspended SolveMachine whose oracle is one or more humans.
Every state change is appended to `<data-dir>/<id>.events.ndjson` before it is
acknowledged; restarting the service replays the logs, and because the engine
scan is a pure function of its answer cache, any replayed prefix reconstructs
a valid session state.
"""

from __future__ import annotations

import json
import os
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .engine import (
    EngineError,
    NeedAnswers,
    ResolutionExceeded,
    SolveMachine,
    default_schedule,
)
from .fairdivision import cuts_of, pieces_of


class SessionError(Exception):
    pass


class UnknownSession(SessionError):
    pass


class UnknownQuery(SessionError):
    pass


class AnswerConflict(SessionError):
    """A different answer was already accepted for this query."""


class InvalidAnswer(SessionError):
    pass


class NotCompleted(SessionError):
    pass


@dataclass
class Config:
    data_dir: Path = field(default_factory=lambda: Path("./kkmw-data"))
    port: int = 8000
    max_resolution: int = 1 << 10
    tolerance: float = 1e-2
    log_level: str = "info"

    @classmethod
    def from_env(cls, **overrides) -> "Config":
        cfg = cls()
        if os.environ.get("KKMW_DATA_DIR"):
            cfg.data_dir = Path(os.environ["KKMW_DATA_DIR"])
        if os.environ.get("KKMW_PORT"):
            cfg.port = int(os.environ["KKMW_PORT"])
        if os.environ.get("KKMW_MAX_RESOLUTION"):
            cfg.max_resolution = int(os.environ["KKMW_MAX_RESOLUTION"])
        for key, val in overrides.items():
            if val is not None:
                setattr(cfg, key, val)
        cfg.data_dir = Path(cfg.data_dir)
        return cfg


def _render_query(kind: str, n: int, point, total_rent: float) -> dict:
    if kind == "cake":
        return {
            "pieces": [{"index": i, "start": a, "end": b} for i, (a, b) in enumerate(pieces_of(point))],
            "cuts": cuts_of(point),
        }
    return {
        "rooms": [
            {"index": i, "rent": xi * total_rent, "free": xi <= 0.0}
            for i, xi in enumerate(point)
        ]
    }


class Session:
    """Single interactive solve; mutations serialize through the event log."""

    def __init__(self, session_id: str, kind: str, n: int, machine: SolveMachine,
                 log_path: Path, total_rent: float = 1.0, participants=None):
        self.id = session_id
        self.kind = kind
        self.n = n
        self.machine = machine
        self.log_path = log_path
        self.total_rent = total_rent
        self.participants = participants or [f"player {j}" for j in range(n)]
        self.lock = threading.Lock()
        self.status = "active"
        self.error: str | None = None
        self.result: dict | None = None
        self.pending: list = []
        self.answered: dict[str, list[int]] = {}
        self._issued: set[str] = set()

    # -- event log -------------------------------------------------------

    def _append(self, event: dict) -> None:
        event = dict(event, ts=time.time())
        with open(self.log_path, "a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # -- state -----------------------------------------------------------

    def refresh(self, log_events: bool = True) -> None:
        """Re-run the suspended scan and update pending/result."""
        try:
            out = self.machine.advance(None)
        except ResolutionExceeded as exc:
            self.status = "failed"
            self.error = str(exc)
            self.pending = []
            if log_events:
                self._append({"type": "failed", "error": self.error})
            return
        if isinstance(out, NeedAnswers):
            self.pending = out.queries
            new = [q.query_id for q in out.queries if q.query_id not in self._issued]
            if new:
                self._issued.update(new)
                if log_events:
                    self._append({"type": "query-issued", "query_ids": new})
            return
        self.pending = []
        if self.status != "completed":
            self.status = "completed"
            self.result = self._build_result(out)
            if log_events:
                self._append({"type": "completed", "result": self.result})

    def _build_result(self, rainbow) -> dict:
        perm = [rainbow.permutation[j] for j in range(self.n)]
        base = {
            "kind": self.kind,
            "x": list(rainbow.witness),
            "permutation": perm,
            "cell_diameter": rainbow.diameter(),
            "resolution": rainbow.cell.base.resolution,
        }
        if self.kind == "cake":
            base["cuts"] = cuts_of(rainbow.witness)
            base["pieces"] = [list(p) for p in pieces_of(rainbow.witness)]
        else:
            base["rents"] = [xi * self.total_rent for xi in rainbow.witness]
            base["total_rent"] = self.total_rent
        return base

    # -- API-facing views ------------------------------------------------

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "players": self.n,
            "participants": self.participants,
            "status": self.status,
            "error": self.error,
            "resolution": self.pending[0].vertex.resolution if self.pending else None,
            "pending_queries": len(self.pending),
            "answered": len(self.answered),
        }

    def pending_view(self) -> list[dict]:
        out = []
        for q in self.pending:
            out.append({
                "query_id": q.query_id,
                "player": q.cover,
                "participant": self.participants[q.cover],
                "rendering": _render_query(self.kind, self.n, q.point(), self.total_rent),
            })
        return out

    def answer(self, query_id: str, labels) -> dict:
        with self.lock:
            if self.status == "completed":
                raise AnswerConflict("session already completed")
            try:
                labels = sorted({int(i) for i in labels})
            except (TypeError, ValueError):
                raise InvalidAnswer("answer must be a list of indices")
            if not labels or any(i < 0 or i >= self.n for i in labels):
                raise InvalidAnswer(f"labels must be a nonempty subset of 0..{self.n - 1}")
            if query_id in self.answered:
                if self.answered[query_id] == labels:
                    return {"query_id": query_id, "accepted": True, "duplicate": True}
                raise AnswerConflict(f"query {query_id} already answered differently")
            query = next((q for q in self.pending if q.query_id == query_id), None)
            if query is None:
                raise UnknownQuery(f"no pending query {query_id}")
            self._check_admissible(query, labels)
            self._append({"type": "answer-received", "query_id": query_id, "labels": labels})
            self.machine.supply_answer(query_id, labels)
            self.answered[query_id] = labels
            self.refresh()
            return {"query_id": query_id, "accepted": True, "duplicate": False}

    def _check_admissible(self, query, labels) -> None:
        point = query.point()
        if self.machine.mode == "primal":
            if not any(point[i] > 0 for i in labels):
                raise InvalidAnswer("hungry-player condition: pick at least one positive-length piece")
        else:
            zeros = [i for i, xi in enumerate(point) if xi == 0.0]
            if not set(zeros) <= set(labels):
                raise InvalidAnswer("free-room condition: zero-rent rooms must be acceptable")

    def result_or_raise(self) -> dict:
        if self.status == "failed":
            raise SessionError(self.error or "solve failed")
        if self.result is None:
            raise NotCompleted("session still running")
        return self.result


class SessionStore:
    """All sessions under one data directory, replayed on startup."""

    def __init__(self, config: Config):
        self.config = config
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self.sessions: dict[str, Session] = {}
        self.lock = threading.Lock()
        for path in sorted(self.config.data_dir.glob("*.events.ndjson")):
            try:
                session = self._replay(path)
            except (json.JSONDecodeError, KeyError, EngineError, OSError) as exc:
                # a torn final line is possible after a crash; earlier events
                # were acknowledged and must survive, so replay what parses
                raise SessionError(f"corrupt session log {path.name}: {exc}") from exc
            self.sessions[session.id] = session

    def create(self, kind: str, n: int, tolerance: float | None = None,
               total_rent: float = 1.0, participants=None) -> Session:
        if kind not in ("cake", "rent"):
            raise SessionError(f"unknown session kind {kind!r}")
        if n < 2:
            raise SessionError("need at least 2 players")
        if kind == "rent" and total_rent <= 0:
            raise SessionError("total rent must be positive")
        tol = tolerance if tolerance is not None else self.config.tolerance
        schedule = default_schedule(n, tol, self.config.max_resolution)
        mode = "primal" if kind == "cake" else "dual"
        machine = SolveMachine(n, n, mode, tol, schedule)
        session_id = secrets.token_hex(16)
        log_path = self.config.data_dir / f"{session_id}.events.ndjson"
        session = Session(session_id, kind, n, machine, log_path,
                          total_rent=total_rent, participants=participants)
        session._append({
            "type": "created",
            "id": session_id,
            "kind": kind,
            "players": n,
            "total_rent": total_rent,
            "participants": session.participants,
            "engine": machine.to_dict(),
        })
        session.refresh()
        with self.lock:
            self.sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id}")
        return session

    def _replay(self, path: Path) -> Session:
        events = []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(json.loads(line))
                except json.JSONDecodeError:
                    break  # torn tail write from a crash; drop it
        if not events or events[0].get("type") != "created":
            raise KeyError("log does not start with a created event")
        head = events[0]
        machine = SolveMachine.from_dict(head["engine"])
        session = Session(
            head["id"], head["kind"], head["players"], machine, path,
            total_rent=head.get("total_rent", 1.0),
            participants=head.get("participants"),
        )
        for event in events[1:]:
            if event["type"] == "answer-received":
                machine.supply_answer(event["query_id"], event["labels"])
                session.answered[event["query_id"]] = sorted(event["labels"])
            elif event["type"] == "query-issued":
                session._issued.update(event["query_ids"])
        # recompute pending/result from the cache; everything derivable was
        # already logged, so replay never appends
        session.refresh(log_events=False)
        return session
