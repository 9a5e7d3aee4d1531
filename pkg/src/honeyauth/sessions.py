"""Login session lifecycle: first factor, OTP wait, closed.

Stages only move forward. Session state lives in memory in the service
process; a session is worthless after close and sessions do not survive
restarts by design.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum

from .errors import SessionNotFoundError


class Stage(str, Enum):
    AWAITING_FIRST_FACTOR = "AwaitingFirstFactor"
    AWAITING_OTP = "AwaitingOtp"
    CLOSED = "Closed"


_ORDER = {Stage.AWAITING_FIRST_FACTOR: 0, Stage.AWAITING_OTP: 1, Stage.CLOSED: 2}


@dataclass
class SessionState:
    session_id: str
    user_ref: bytes
    stage: Stage = Stage.AWAITING_FIRST_FACTOR
    mistype_count: int = 0
    created_at: int = 0  # milliseconds since epoch

    def advance(self, stage: Stage) -> None:
        if _ORDER[stage] < _ORDER[self.stage]:
            raise ValueError(f"stage cannot move backward: {self.stage} -> {stage}")
        self.stage = stage


class SessionStore:
    """In-memory session map with per-call atomic read-modify-write."""

    def __init__(self):
        self._lock = threading.RLock()
        self._sessions: dict[str, SessionState] = {}

    def add(self, session: SessionState) -> None:
        with self._lock:
            self._sessions[session.session_id] = session

    def get(self, session_id: str) -> SessionState | None:
        with self._lock:
            return self._sessions.get(session_id)

    @contextmanager
    def exclusive(self, session_id: str):
        """Hold the store lock across one attempt on one session."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                raise SessionNotFoundError(f"no session {session_id!r}")
            yield session

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)
