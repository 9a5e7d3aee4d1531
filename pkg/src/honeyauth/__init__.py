"""Two-factor honeytoken authentication over an append-only hash-chained ledger.

Each login issues N one-time passwords of which exactly one - the
position the user chose at registration - is valid. Entering a decoy
locks the account; the sealed honeytoken travels to the validation
process over a private tamper-evident ledger.
"""

__version__ = "0.1.0"

from .ledger import Block, BlockPayload, Chain, TamperReport
from .otp import OtpConfig, OtpSet, generate_otp_set, is_expired
from .validator import OutcomeKind, ValidationOutcome, classify_otp
from .vault import HoneytokenPayload, SealedHoneytoken

__all__ = [
    "Block",
    "BlockPayload",
    "Chain",
    "HoneytokenPayload",
    "OtpConfig",
    "OtpSet",
    "OutcomeKind",
    "SealedHoneytoken",
    "TamperReport",
    "ValidationOutcome",
    "classify_otp",
    "generate_otp_set",
    "is_expired",
    "__version__",
]
