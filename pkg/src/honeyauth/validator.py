"""OTP classification and the validation state machine.

An entered OTP is exactly one of three things: the honeytoken (valid),
one of the session's decoys (fake - an intruder holding the issued set
but not the user's secret position), or neither (mistyped). Fake locks
the account; mistyped earns a bounded retry; only the honeytoken
authenticates. A locked account stays locked until an admin unlocks it.

Comparisons against secret material go through `constant_time_equals`
(hmac.compare_digest); tests pin that choice.
"""

from __future__ import annotations

import hmac
import logging
from dataclasses import dataclass
from enum import Enum

from .accounts import AccountStore
from .errors import (
    ChainCorruptError,
    EncodingError,
    PayloadNotFoundError,
    SealAuthenticationError,
    UnknownKeyError,
)
from .ledger import Chain
from .vault import HoneytokenPayload, SealedHoneytoken, Vault, decoy_digest, make_aad

security_log = logging.getLogger("honeyauth.security")

constant_time_equals = hmac.compare_digest


class Classification(Enum):
    VALID = "Valid"
    FAKE = "Fake"
    MISTYPED = "Mistyped"


class OutcomeKind(str, Enum):
    AUTHENTICATED = "Authenticated"
    LOCKED = "Locked"
    RETRY = "Retry"
    SESSION_INVALID = "SessionInvalid"


@dataclass(frozen=True)
class ValidationOutcome:
    kind: OutcomeKind
    remaining: int | None = None  # set for Retry only


def classify_otp(entered: str, payload: HoneytokenPayload) -> Classification:
    """Partition an entered value against one session's payload."""
    if constant_time_equals(entered.encode("utf-8"), payload.honeytoken_otp.encode("utf-8")):
        return Classification.VALID
    entered_digest = decoy_digest(entered, payload.salt)
    is_decoy = False
    for candidate in payload.decoy_digests:
        # no early exit; every digest is compared
        is_decoy |= constant_time_equals(entered_digest, candidate)
    return Classification.FAKE if is_decoy else Classification.MISTYPED


def lock_account(user_ref: bytes, store: AccountStore) -> None:
    store.set_locked(user_ref, True)


def unlock_account(user_ref: bytes, store: AccountStore) -> None:
    store.set_locked(user_ref, False)


class Validator:
    """Drives one OTP attempt to its outcome, persisting lock state first."""

    def __init__(self, vault: Vault, accounts: AccountStore, max_mistypes: int = 3, ttl_seconds: int = 300):
        self.vault = vault
        self.accounts = accounts
        self.max_mistypes = max_mistypes
        self.ttl_seconds = ttl_seconds

    def _alert(self, session, what: str) -> None:
        security_log.warning(
            "possible tamper: %s (session=%s user_ref=%s)", what, session.session_id, session.user_ref.hex()
        )

    def validate_attempt(self, session, entered: str, chain: Chain, now: int) -> ValidationOutcome:
        from .sessions import Stage  # local import avoids a cycle in type usage

        if session.stage is not Stage.AWAITING_OTP:
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)

        try:
            block = chain.find_block(session.session_id)
        except ChainCorruptError as exc:
            self._alert(session, f"ledger rejected read: {exc}")
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)
        except PayloadNotFoundError:
            self._alert(session, "session has no ledger block")
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)

        try:
            from .ledger import BlockPayload

            block_payload = BlockPayload.from_bytes(block.payload)
            sealed = SealedHoneytoken.from_bytes(block_payload.envelope)
            payload = self.vault.unseal(
                sealed, sealed.key_id, make_aad(session.session_id, session.user_ref)
            )
        except (SealAuthenticationError, EncodingError, UnknownKeyError) as exc:
            self._alert(session, f"unseal failed: {exc}")
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)

        if now > session.created_at + self.ttl_seconds * 1000:
            # expiry is not evidence of attack: invalidate, never lock
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)

        account = self.accounts.get_by_ref(session.user_ref)
        if account is None:
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)
        if account.locked:
            # lock is absorbing; nothing short of admin unlock authenticates
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.LOCKED)

        kind = classify_otp(entered, payload)
        if kind is Classification.VALID:
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.AUTHENTICATED)
        if kind is Classification.FAKE:
            lock_account(session.user_ref, self.accounts)  # persisted before returning
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.LOCKED)

        # The mistype budget is max_mistypes entries per session; exhausting it
        # invalidates the session (never locks - mistypes are not an attack
        # signal). `remaining` counts submissions still accepted.
        attempted = session.mistype_count + 1
        session.mistype_count = attempted
        if attempted >= self.max_mistypes:
            session.advance(Stage.CLOSED)
            return ValidationOutcome(OutcomeKind.SESSION_INVALID)
        return ValidationOutcome(OutcomeKind.RETRY, remaining=self.max_mistypes - attempted)
