"""Authentication service: registration, first factor, OTP issuance, validation.

One successful login is one protocol round: credentials are checked, a
fresh OTP set is generated, the honeytoken payload is sealed and appended
to the ledger, all N OTPs are mailed to the user, and a session awaiting
the OTP entry is opened. OTP submissions are delegated to the validator.

Failures during issuance are all-or-nothing for the session: a ledger or
mail error aborts the login and no session exists afterwards. The ledger
itself is append-only, so a block written before a later step failed
stays on the chain; it is inert because no session references it.
"""

from __future__ import annotations

import secrets

from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .accounts import AccountRecord, AccountStore
from .config import ServiceConfig
from .errors import (
    AccountLockedError,
    BadCredentialsError,
    ChainCorruptError,
    DeliveryError,
    DemoDisabledError,
    InvalidPositionError,
    SessionNotFoundError,
    StorageError,
    UnknownAccountError,
    UsernameTakenError,
    WeakPasswordError,
)
from .ledger import BlockPayload, Chain
from .mail import DeliveryChannel, MailMessage, MockMailbox
from .otp import OtpConfig, generate_otp_set, now_ms
from .sessions import SessionState, SessionStore, Stage
from .validator import ValidationOutcome, Validator
from .vault import Keystore, Vault, build_payload, digest, hash_password, make_aad, verify_password

MIN_PASSWORD_LENGTH = 8


class AuthService:
    def __init__(
        self,
        config: ServiceConfig,
        keystore: Keystore | None = None,
        channel: DeliveryChannel | None = None,
        clock=now_ms,
    ):
        self.config = config
        self.keystore = keystore if keystore is not None else Keystore.from_env(config.key_id)
        self.vault = Vault(self.keystore, config.cipher)
        self.accounts = AccountStore(config.store_path)
        self.sessions = SessionStore()
        self.chain = Chain(config.chain_path)
        self.channel = channel if channel is not None else MockMailbox()
        self.clock = clock
        self.otp_config = OtpConfig(config.n_otps, config.otp_digits, config.otp_ttl_seconds)
        self.validator = Validator(
            self.vault, self.accounts, max_mistypes=config.max_mistypes, ttl_seconds=config.otp_ttl_seconds
        )
        # usernames never appear on the ledger; blocks carry this digest instead
        self._ref_salt = digest(b"honeyauth/user-ref/v1" + self.keystore.get(config.key_id))

    def user_ref(self, username: str) -> bytes:
        return digest(username.encode("utf-8") + self._ref_salt)

    def register(self, username: str, password: str, honeytoken_position: int) -> None:
        if not username:
            raise UsernameTakenError("username must be non-empty")
        if len(password) < MIN_PASSWORD_LENGTH:
            raise WeakPasswordError(f"password must be at least {MIN_PASSWORD_LENGTH} characters")
        if not 1 <= honeytoken_position <= self.config.n_otps:
            raise InvalidPositionError(
                f"honeytoken_position {honeytoken_position} outside [1, {self.config.n_otps}]"
            )
        record = AccountRecord(
            username=username,
            credentials=hash_password(password, self.config.kdf_params),
            honeytoken_position=honeytoken_position,
            locked=False,
            created_at=self.clock(),
            user_ref=self.user_ref(username),
        )
        self.accounts.create(record)

    def login(self, username: str, password: str) -> str:
        account = self.accounts.get(username)
        if account is None or not verify_password(password, account.credentials):
            raise BadCredentialsError("unknown username or wrong password")
        if account.locked:
            raise AccountLockedError(f"account {username!r} is locked")

        now = self.clock()
        session_id = secrets.token_hex(16)
        otp_set = generate_otp_set(
            self.otp_config, account.honeytoken_position, session_id, issued_at=now
        )
        payload = build_payload(otp_set.honeytoken, otp_set.decoys, session_id)
        sealed = self.vault.seal(
            payload, self.config.key_id, make_aad(session_id, account.user_ref)
        )
        self.chain.append_block(
            BlockPayload(session_id, account.user_ref, sealed.to_bytes()), now
        )
        self.channel.deliver(MailMessage(username, session_id, otp_set.otps, now))
        session = SessionState(session_id, account.user_ref, created_at=now)
        session.advance(Stage.AWAITING_OTP)
        self.sessions.add(session)
        return session_id

    def submit_otp(self, session_id: str, entered: str) -> ValidationOutcome:
        with self.sessions.exclusive(session_id) as session:
            return self.validator.validate_attempt(session, entered, self.chain, self.clock())

    def read_mailbox(self, username: str) -> list[MailMessage]:
        if not self.config.demo_mode:
            raise DemoDisabledError("mailbox endpoint is available in demo mode only")
        if self.accounts.get(username) is None:
            raise UnknownAccountError(f"no account {username!r}")
        if not isinstance(self.channel, MockMailbox):
            return []
        return self.channel.read(username)


class _RegisterBody(BaseModel):
    username: str
    password: str
    honeytoken_position: int


class _LoginBody(BaseModel):
    username: str
    password: str


class _OtpBody(BaseModel):
    session_id: str
    otp: str


def _error(status: int, code: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code})


def create_app(service: AuthService, demo_ui_dir: str | None = None) -> FastAPI:
    """HTTP adapter; every endpoint is a thin mapping onto service calls."""
    app = FastAPI(title="honeyauth")

    @app.post("/register", status_code=201)
    def register(body: _RegisterBody):
        try:
            service.register(body.username, body.password, body.honeytoken_position)
        except UsernameTakenError:
            return _error(409, "username-taken")
        except InvalidPositionError:
            return _error(400, "invalid-position")
        except WeakPasswordError:
            return _error(400, "weak-password")
        return {"status": "registered"}

    @app.post("/login")
    def login(body: _LoginBody):
        try:
            session_id = service.login(body.username, body.password)
        except BadCredentialsError:
            return _error(401, "bad-credentials")
        except AccountLockedError:
            return _error(423, "account-locked")
        except (ChainCorruptError, StorageError, DeliveryError):
            return _error(500, "internal-error")
        return {"session_id": session_id}

    @app.post("/otp")
    def submit_otp(body: _OtpBody):
        try:
            outcome = service.submit_otp(body.session_id, body.otp)
        except SessionNotFoundError:
            return _error(404, "session-not-found")
        content: dict = {"outcome": outcome.kind.value}
        if outcome.remaining is not None:
            content["remaining"] = outcome.remaining
        status = {"Authenticated": 200, "Retry": 200, "Locked": 423, "SessionInvalid": 410}
        return JSONResponse(status_code=status[outcome.kind.value], content=content)

    @app.get("/demo/mailbox/{username}")
    def mailbox(username: str):
        try:
            messages = service.read_mailbox(username)
        except DemoDisabledError:
            return _error(403, "disabled-in-production")
        except UnknownAccountError:
            return _error(404, "unknown-user")
        return {
            "messages": [
                {
                    "recipient": m.recipient,
                    "session_id": m.session_id,
                    "otps": list(m.otps),
                    "sent_at": m.sent_at,
                }
                for m in messages
            ]
        }

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "n_otps": service.config.n_otps,
            "demo_mode": service.config.demo_mode,
        }

    if demo_ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=demo_ui_dir, html=True), name="demo-ui")

    return app
