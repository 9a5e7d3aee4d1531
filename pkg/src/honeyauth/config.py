"""Service configuration: a dataclass plus a `key = value` file parser."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .vault import CIPHERS, DEFAULT_KEY_ID, HASHES, KDFS, KdfParams


@dataclass
class ServiceConfig:
    n_otps: int = 3
    otp_digits: int = 6
    otp_ttl_seconds: int = 300
    max_mistypes: int = 3
    demo_mode: bool = True
    chain_path: str = "chain.dat"
    store_path: str = "accounts.db"
    bind_address: str = "127.0.0.1:8000"
    cipher: str = "xchacha20-poly1305"
    hash: str = "sha-256"
    kdf: str = "scrypt"
    kdf_log2_n: int = 14
    kdf_r: int = 8
    kdf_p: int = 1
    key_id: str = DEFAULT_KEY_ID

    def __post_init__(self):
        if self.n_otps < 2:
            raise ConfigError("n_otps must be at least 2 outside tests")
        if self.otp_digits < 4:
            raise ConfigError("otp_digits must be at least 4")
        if self.otp_ttl_seconds <= 0:
            raise ConfigError("otp_ttl_seconds must be positive")
        if self.max_mistypes < 1:
            raise ConfigError("max_mistypes must be at least 1")
        if self.cipher not in CIPHERS:
            raise ConfigError(f"unknown cipher {self.cipher!r}; known: {sorted(CIPHERS)}")
        if self.hash not in HASHES:
            raise ConfigError(f"unknown hash {self.hash!r}; known: {sorted(HASHES)}")
        if self.kdf not in KDFS:
            raise ConfigError(f"unknown kdf {self.kdf!r}; known: {sorted(KDFS)}")

    @property
    def kdf_params(self) -> KdfParams:
        return KdfParams(self.kdf_log2_n, self.kdf_r, self.kdf_p)

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.bind_address.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"bind_address must be host:port, got {self.bind_address!r}")
        return host, int(port)


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def load_config(path: str | Path) -> ServiceConfig:
    """Parse a `key = value` file; '#' starts a comment; unknown keys error."""
    spec = {f.name: f.type for f in fields(ServiceConfig)}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in spec:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if spec[key] == "int":
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: {key} must be an integer") from None
        elif spec[key] == "bool":
            if value.lower() not in _BOOL:
                raise ConfigError(f"{path}:{lineno}: {key} must be true or false")
            values[key] = _BOOL[value.lower()]
        else:
            values[key] = value
    return ServiceConfig(**values)
