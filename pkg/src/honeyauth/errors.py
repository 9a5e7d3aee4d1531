"""Exception hierarchy shared across the package."""


class HoneyauthError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HoneyauthError):
    """Invalid configuration value or unparsable config file."""


class EncodingError(HoneyauthError):
    """Malformed or truncated canonical serialization."""


class UnknownKeyError(HoneyauthError):
    """Requested key id is not present in the keystore."""


class SealAuthenticationError(HoneyauthError):
    """Envelope failed authentication: tampered bytes, wrong key, or wrong aad."""


class WeakPasswordError(HoneyauthError):
    """Password below the minimum length."""


class InvalidPositionError(HoneyauthError):
    """Honeytoken position outside [1, N]."""


class ChainCorruptError(HoneyauthError):
    """Ledger failed verification; carries the tamper report when available."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PayloadNotFoundError(HoneyauthError):
    """No ledger block exists for the requested session."""


class StorageError(HoneyauthError):
    """Persistence layer failed (I/O error, unwritable path, ...)."""


class UsernameTakenError(HoneyauthError):
    """Registration attempted with an existing username."""


class UnknownAccountError(HoneyauthError):
    """Account lookup by username or user reference found nothing."""


class BadCredentialsError(HoneyauthError):
    """First-factor check failed."""


class AccountLockedError(HoneyauthError):
    """Login attempted against a locked account."""


class SessionNotFoundError(HoneyauthError):
    """No session exists for the supplied session id."""


class DeliveryError(HoneyauthError):
    """Mail channel failed to deliver."""


class DemoDisabledError(HoneyauthError):
    """Demo-only surface requested while demo_mode is off."""


class InvalidParametersError(HoneyauthError):
    """Benchmark invoked with out-of-range parameters."""
