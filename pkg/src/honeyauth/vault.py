"""Sealing, credential hashing, and the ledger's digest primitive.

The sealed envelope is the only thing that ever leaves the issuing
process with OTP-derived content inside: the plaintext honeytoken plus
salted digests of the decoys, encrypted under an AEAD whose associated
data binds the envelope to one session and one user reference. Nothing
OTP-related is persisted anywhere else, and the decoys are recoverable
by nobody (digests only) - entering one can still be detected, which is
exactly what the lockout signal needs.

Algorithm names are deployment configuration: `cipher`, `hash`, and
`kdf` in the service config select entries from the registries below.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass

from .encoding import FORMAT_V1, Reader, encode_bytes, encode_str, encode_u64
from .errors import ConfigError, EncodingError, SealAuthenticationError, UnknownKeyError, WeakPasswordError
from .xchacha import NONCE_SIZE, XChaCha20Poly1305

DIGEST_SIZE = 32
SALT_SIZE = 16
MASTER_KEY_ENV = "HONEYAUTH_MASTER_KEY"
KEY_ID_ENV = "HONEYAUTH_KEY_ID"
DEFAULT_KEY_ID = "k1"

CIPHERS = {"xchacha20-poly1305": XChaCha20Poly1305}
HASHES = {"sha-256": hashlib.sha256}
KDFS = ("scrypt",)


def digest(data: bytes) -> bytes:
    """256-bit digest of the exact input bytes (the ledger's block hash)."""
    return hashlib.sha256(data).digest()


def decoy_digest(otp: str, salt: bytes) -> bytes:
    """Salted digest used to recognize decoy OTPs without storing them."""
    return digest(salt + otp.encode("utf-8"))


def make_aad(session_id: str, user_ref: bytes) -> bytes:
    """Associated data binding an envelope to one session and user."""
    return bytes([FORMAT_V1]) + encode_str(session_id) + encode_bytes(user_ref)


@dataclass(frozen=True)
class HoneytokenPayload:
    """Transient validation payload; exists in plaintext only in memory."""

    honeytoken_otp: str
    decoy_digests: tuple[bytes, ...]
    session_id: str
    salt: bytes

    def __post_init__(self):
        object.__setattr__(self, "decoy_digests", tuple(self.decoy_digests))
        for d in self.decoy_digests:
            if len(d) != DIGEST_SIZE:
                raise EncodingError("decoy digest must be 32 bytes")
        own = decoy_digest(self.honeytoken_otp, self.salt)
        if any(hmac.compare_digest(own, d) for d in self.decoy_digests):
            raise EncodingError("honeytoken collides with a decoy digest")

    def to_bytes(self) -> bytes:
        out = bytes([FORMAT_V1])
        out += encode_str(self.honeytoken_otp)
        out += encode_u64(len(self.decoy_digests))
        for d in self.decoy_digests:
            out += encode_bytes(d)
        out += encode_str(self.session_id)
        out += encode_bytes(self.salt)
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> "HoneytokenPayload":
        r = Reader(data)
        r.expect_format()
        honeytoken = r.str_field()
        count = r.u64()
        if count > r.remaining:  # cheap sanity bound before allocating
            raise EncodingError("decoy count exceeds payload size")
        decoys = tuple(r.bytes_field() for _ in range(count))
        session_id = r.str_field()
        salt = r.bytes_field()
        r.expect_end()
        return cls(honeytoken, decoys, session_id, salt)


def build_payload(
    honeytoken_otp: str,
    decoy_otps: tuple[str, ...] | list[str],
    session_id: str,
    salt: bytes | None = None,
) -> HoneytokenPayload:
    salt = os.urandom(SALT_SIZE) if salt is None else salt
    digests = tuple(decoy_digest(o, salt) for o in decoy_otps)
    return HoneytokenPayload(honeytoken_otp, digests, session_id, salt)


@dataclass(frozen=True)
class SealedHoneytoken:
    """Authenticated-encryption envelope; safe to place on the ledger."""

    ciphertext: bytes
    nonce: bytes
    key_id: str
    aad_digest: bytes

    def to_bytes(self) -> bytes:
        return (
            bytes([FORMAT_V1])
            + encode_bytes(self.ciphertext)
            + encode_bytes(self.nonce)
            + encode_str(self.key_id)
            + encode_bytes(self.aad_digest)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "SealedHoneytoken":
        r = Reader(data)
        r.expect_format()
        ciphertext = r.bytes_field()
        nonce = r.bytes_field()
        key_id = r.str_field()
        aad_digest = r.bytes_field()
        r.expect_end()
        return cls(ciphertext, nonce, key_id, aad_digest)


class Keystore:
    """Server-held master keys, loaded once at startup, read-only after."""

    def __init__(self, keys: dict[str, bytes]):
        for key_id, key in keys.items():
            if len(key) != 32:
                raise ConfigError(f"key {key_id!r} must be 32 bytes")
        self._keys = dict(keys)

    @classmethod
    def from_env(cls, key_id: str | None = None, environ=None) -> "Keystore":
        env = os.environ if environ is None else environ
        raw = env.get(MASTER_KEY_ENV)
        if raw is None:
            raise ConfigError(f"{MASTER_KEY_ENV} is not set")
        raw = raw.strip()
        if len(raw) != 64:
            raise ConfigError(f"{MASTER_KEY_ENV} must be 64 hex chars")
        try:
            key = bytes.fromhex(raw)
        except ValueError as exc:
            raise ConfigError(f"{MASTER_KEY_ENV} is not valid hex") from exc
        if key_id is None:
            key_id = env.get(KEY_ID_ENV, DEFAULT_KEY_ID)
        return cls({key_id: key})

    def get(self, key_id: str) -> bytes:
        try:
            return self._keys[key_id]
        except KeyError:
            raise UnknownKeyError(f"no key with id {key_id!r}") from None


class Vault:
    """Seal/unseal honeytoken payloads under a named AEAD cipher."""

    def __init__(self, keystore: Keystore, cipher: str = "xchacha20-poly1305"):
        if cipher not in CIPHERS:
            raise ConfigError(f"unknown cipher {cipher!r}; known: {sorted(CIPHERS)}")
        self._keystore = keystore
        self._cipher_cls = CIPHERS[cipher]
        self.cipher_name = cipher

    def seal(self, payload: HoneytokenPayload, key_id: str, aad: bytes) -> SealedHoneytoken:
        key = self._keystore.get(key_id)
        nonce = os.urandom(NONCE_SIZE)
        ciphertext = self._cipher_cls(key).encrypt(nonce, payload.to_bytes(), aad)
        return SealedHoneytoken(ciphertext, nonce, key_id, digest(aad))

    def unseal(self, sealed: SealedHoneytoken, key_id: str, aad: bytes) -> HoneytokenPayload:
        key = self._keystore.get(key_id)
        if not hmac.compare_digest(digest(aad), sealed.aad_digest):
            raise SealAuthenticationError("aad digest does not match envelope")
        if len(sealed.nonce) != NONCE_SIZE:
            raise SealAuthenticationError("nonce has wrong length")
        plaintext = self._cipher_cls(key).decrypt(sealed.nonce, sealed.ciphertext, aad)
        try:
            return HoneytokenPayload.from_bytes(plaintext)
        except EncodingError as exc:
            # Authenticated bytes that fail to parse indicate a version or
            # implementation mismatch, not tampering, but fail closed anyway.
            raise SealAuthenticationError(f"sealed payload unparsable: {exc}") from exc


@dataclass(frozen=True)
class KdfParams:
    """scrypt cost parameters; defaults target ~50 ms on desktop hardware."""

    log2_n: int = 14
    r: int = 8
    p: int = 1

    def __post_init__(self):
        if not 1 <= self.log2_n <= 24 or self.r < 1 or self.p < 1:
            raise ConfigError(f"invalid scrypt parameters {self}")


@dataclass(frozen=True)
class CredentialRecord:
    password_digest: bytes
    salt: bytes
    kdf_params: KdfParams

    def __post_init__(self):
        if len(self.salt) < 16:
            raise ConfigError("credential salt must be at least 16 bytes")
        if len(self.password_digest) != DIGEST_SIZE:
            raise ConfigError("password digest must be 32 bytes")


def _scrypt(password: str, salt: bytes, params: KdfParams) -> bytes:
    return hashlib.scrypt(
        password.encode("utf-8"),
        salt=salt,
        n=1 << params.log2_n,
        r=params.r,
        p=params.p,
        maxmem=128 * (1 << params.log2_n) * params.r * 2,
        dklen=DIGEST_SIZE,
    )


def hash_password(password: str, params: KdfParams | None = None) -> CredentialRecord:
    if not password:
        raise WeakPasswordError("password must be non-empty")
    params = KdfParams() if params is None else params
    salt = os.urandom(SALT_SIZE)
    return CredentialRecord(_scrypt(password, salt, params), salt, params)


def verify_password(password: str, record: CredentialRecord) -> bool:
    recomputed = _scrypt(password, record.salt, record.kdf_params)
    return hmac.compare_digest(recomputed, record.password_digest)
