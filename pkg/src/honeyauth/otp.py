"""Per-session OTP set generation and lifetime checks.

Each login session gets N fixed-length decimal OTPs, pairwise distinct,
drawn uniformly from a cryptographically strong source with rejection on
intra-set duplicates. Exactly one position - chosen by the user at
registration and fixed thereafter - is the honeytoken; the rest are
decoys whose entry signals an intruder.
"""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass

from .errors import ConfigError, InvalidPositionError


def now_ms() -> int:
    return time.time_ns() // 1_000_000


@dataclass(frozen=True)
class OtpConfig:
    n: int = 3
    otp_digits: int = 6
    ttl_seconds: int = 300

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be at least 1")
        if self.otp_digits < 4:
            raise ConfigError("otp_digits must be at least 4")
        if self.ttl_seconds <= 0:
            raise ConfigError("ttl_seconds must be positive")
        if self.n > 10**self.otp_digits:
            raise ConfigError("n exceeds the number of distinct OTPs")


@dataclass(frozen=True)
class OtpSet:
    session_id: str
    otps: tuple[str, ...]
    honeytoken_index: int  # 1-based
    issued_at: int  # milliseconds since epoch
    ttl_seconds: int

    def __post_init__(self):
        object.__setattr__(self, "otps", tuple(self.otps))
        if len(self.otps) < 1:
            raise ConfigError("otp set must not be empty")
        if len(set(self.otps)) != len(self.otps):
            raise ConfigError("otps must be pairwise distinct")
        width = len(self.otps[0])
        for otp in self.otps:
            if len(otp) != width or not otp.isascii() or not otp.isdigit():
                raise ConfigError(f"otp {otp!r} is not a fixed-width decimal string")
        if not 1 <= self.honeytoken_index <= len(self.otps):
            raise InvalidPositionError(
                f"honeytoken_index {self.honeytoken_index} outside [1, {len(self.otps)}]"
            )
        if self.ttl_seconds <= 0:
            raise ConfigError("ttl_seconds must be positive")

    @property
    def honeytoken(self) -> str:
        return self.otps[self.honeytoken_index - 1]

    @property
    def decoys(self) -> tuple[str, ...]:
        i = self.honeytoken_index - 1
        return self.otps[:i] + self.otps[i + 1 :]


def generate_otp_set(
    config: OtpConfig,
    honeytoken_position: int,
    session_id: str,
    *,
    randbelow=secrets.randbelow,
    issued_at: int | None = None,
) -> OtpSet:
    """Draw N distinct OTPs and mark the honeytoken position.

    `randbelow` is injectable for tests; the default is the stdlib CSPRNG.
    """
    if not 1 <= honeytoken_position <= config.n:
        raise InvalidPositionError(
            f"position {honeytoken_position} outside [1, {config.n}]"
        )
    space = 10**config.otp_digits
    seen: set[str] = set()
    otps: list[str] = []
    while len(otps) < config.n:
        candidate = format(randbelow(space), f"0{config.otp_digits}d")
        if candidate in seen:
            continue
        seen.add(candidate)
        otps.append(candidate)
    return OtpSet(
        session_id=session_id,
        otps=tuple(otps),
        honeytoken_index=honeytoken_position,
        issued_at=now_ms() if issued_at is None else issued_at,
        ttl_seconds=config.ttl_seconds,
    )


def is_expired(otp_set: OtpSet, now: int) -> bool:
    """True iff `now` (ms) is strictly past issued_at + ttl."""
    return now > otp_set.issued_at + otp_set.ttl_seconds * 1000
