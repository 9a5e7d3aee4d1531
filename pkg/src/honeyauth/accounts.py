"""Account records and their single-file journaled store.

The store file is an append-only JSON-lines journal of record upserts:
every mutation is written and fsynced before it is applied in memory, and
loading replays the journal. A partial final line (crash mid-write) is
ignored on replay; the preceding state is intact. Credentials are stored
as KDF digests only - never a password, never an OTP.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import StorageError, UnknownAccountError, UsernameTakenError
from .vault import CredentialRecord, KdfParams


@dataclass(frozen=True)
class AccountRecord:
    username: str
    credentials: CredentialRecord
    honeytoken_position: int  # 1-based, fixed at registration
    locked: bool
    created_at: int  # milliseconds since epoch
    user_ref: bytes  # digest(username + server salt); what goes on the ledger


def _record_to_json(record: AccountRecord) -> dict:
    return {
        "username": record.username,
        "password_digest": record.credentials.password_digest.hex(),
        "salt": record.credentials.salt.hex(),
        "kdf_log2_n": record.credentials.kdf_params.log2_n,
        "kdf_r": record.credentials.kdf_params.r,
        "kdf_p": record.credentials.kdf_params.p,
        "honeytoken_position": record.honeytoken_position,
        "locked": record.locked,
        "created_at": record.created_at,
        "user_ref": record.user_ref.hex(),
    }


def _record_from_json(doc: dict) -> AccountRecord:
    credentials = CredentialRecord(
        password_digest=bytes.fromhex(doc["password_digest"]),
        salt=bytes.fromhex(doc["salt"]),
        kdf_params=KdfParams(doc["kdf_log2_n"], doc["kdf_r"], doc["kdf_p"]),
    )
    return AccountRecord(
        username=doc["username"],
        credentials=credentials,
        honeytoken_position=doc["honeytoken_position"],
        locked=doc["locked"],
        created_at=doc["created_at"],
        user_ref=bytes.fromhex(doc["user_ref"]),
    )


class AccountStore:
    """Key-value store over usernames with atomic read-modify-write."""

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.RLock()
        self.path = Path(path) if path is not None else None
        self._by_username: dict[str, AccountRecord] = {}
        self._by_ref: dict[bytes, str] = {}
        if self.path is not None and self.path.exists():
            self._replay()

    def _replay(self) -> None:
        try:
            lines = self.path.read_bytes().split(b"\n")
        except OSError as exc:
            raise StorageError(f"cannot read account store {self.path}: {exc}") from exc
        for line in lines:
            if not line.strip():
                continue
            try:
                record = _record_from_json(json.loads(line))
            except (ValueError, KeyError):
                # torn final line from a crash mid-append; everything before it holds
                continue
            self._apply(record)

    def _journal(self, record: AccountRecord) -> None:
        if self.path is None:
            return
        line = json.dumps(_record_to_json(record), separators=(",", ":")) + "\n"
        try:
            with open(self.path, "ab") as fh:
                fh.write(line.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"cannot write account store {self.path}: {exc}") from exc

    def _apply(self, record: AccountRecord) -> None:
        self._by_username[record.username] = record
        self._by_ref[record.user_ref] = record.username

    def _put(self, record: AccountRecord) -> None:
        self._journal(record)  # write ahead, then apply
        self._apply(record)

    def create(self, record: AccountRecord) -> None:
        with self._lock:
            if record.username in self._by_username:
                raise UsernameTakenError(f"username {record.username!r} already registered")
            self._put(record)

    def get(self, username: str) -> AccountRecord | None:
        with self._lock:
            return self._by_username.get(username)

    def get_by_ref(self, user_ref: bytes) -> AccountRecord | None:
        with self._lock:
            username = self._by_ref.get(user_ref)
            return self._by_username.get(username) if username is not None else None

    def set_locked(self, user_ref: bytes, locked: bool) -> AccountRecord:
        """Idempotent lock-flag update, persisted before returning."""
        with self._lock:
            record = self.get_by_ref(user_ref)
            if record is None:
                raise UnknownAccountError(f"no account with user_ref {user_ref.hex()}")
            if record.locked != locked:
                record = replace(record, locked=locked)
                self._put(record)
            return record

    def usernames(self) -> list[str]:
        with self._lock:
            return sorted(self._by_username)
