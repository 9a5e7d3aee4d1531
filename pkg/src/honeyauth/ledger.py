"""Append-only private hash-chained ledger.

One writer, no consensus: immutability here means tamper evidence. Each
block hashes its canonical bytes (index, timestamp, payload, prev_hash);
any bit flipped anywhere in a stored record breaks either that block's
hash or a successor's link, and verification localizes the earliest
violating index.

On disk the chain is a single record file: repeated
[u32 little-endian record length][record bytes], where the record bytes
are the canonical block serialization (format byte 0x01) with the block
hash appended. A truncated tail is therefore detectable, and an earlier
serialization is always a byte-prefix of any later one.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .encoding import FORMAT_V1, Reader, encode_bytes, encode_str, encode_u32, encode_u64
from .errors import ChainCorruptError, EncodingError, PayloadNotFoundError, StorageError
from .vault import DIGEST_SIZE, digest

GENESIS_PAYLOAD = b"B2FHA-GENESIS"
GENESIS_TIMESTAMP = 0
ZERO_HASH = bytes(DIGEST_SIZE)


@dataclass(frozen=True)
class BlockPayload:
    """What one login session ships to validation: no usernames, no plaintext OTPs."""

    session_id: str
    user_ref: bytes  # digest of username + server salt
    envelope: bytes  # serialized SealedHoneytoken

    def to_bytes(self) -> bytes:
        return (
            bytes([FORMAT_V1])
            + encode_str(self.session_id)
            + encode_bytes(self.user_ref)
            + encode_bytes(self.envelope)
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "BlockPayload":
        r = Reader(data)
        r.expect_format()
        session_id = r.str_field()
        user_ref = r.bytes_field()
        envelope = r.bytes_field()
        r.expect_end()
        return cls(session_id, user_ref, envelope)


@dataclass(frozen=True)
class Block:
    index: int
    timestamp: int
    payload: bytes  # raw payload bytes; GENESIS_PAYLOAD for block 0
    prev_hash: bytes
    hash: bytes

    def canonical_bytes(self) -> bytes:
        return (
            bytes([FORMAT_V1])
            + encode_u64(self.index)
            + encode_u64(self.timestamp)
            + encode_bytes(self.payload)
            + self.prev_hash
        )

    def to_record(self) -> bytes:
        return self.canonical_bytes() + self.hash

    @classmethod
    def from_record(cls, record: bytes) -> "Block":
        r = Reader(record)
        r.expect_format()
        index = r.u64()
        timestamp = r.u64()
        payload = r.bytes_field()
        prev_hash = r.take(DIGEST_SIZE)
        block_hash = r.take(DIGEST_SIZE)
        r.expect_end()
        return cls(index, timestamp, payload, prev_hash, block_hash)


def compute_block_hash(index: int, timestamp: int, payload: bytes, prev_hash: bytes) -> bytes:
    return digest(
        bytes([FORMAT_V1]) + encode_u64(index) + encode_u64(timestamp) + encode_bytes(payload) + prev_hash
    )


def make_block(index: int, timestamp: int, payload: bytes, prev_hash: bytes) -> Block:
    return Block(index, timestamp, payload, prev_hash, compute_block_hash(index, timestamp, payload, prev_hash))


def genesis_block() -> Block:
    """Deterministic anchor; identical bytes on every run and machine."""
    return make_block(0, GENESIS_TIMESTAMP, GENESIS_PAYLOAD, ZERO_HASH)


class TamperReason(str, Enum):
    HASH_MISMATCH = "hash-mismatch"
    LINK_MISMATCH = "link-mismatch"
    INDEX_GAP = "index-gap"
    MALFORMED = "malformed"


@dataclass(frozen=True)
class TamperReport:
    valid: bool
    first_bad_index: int | None = None
    reason: TamperReason | None = None

    def __post_init__(self):
        if self.valid != (self.first_bad_index is None):
            raise ValueError("valid=true iff first_bad_index absent")

    def describe(self) -> str:
        if self.valid:
            return "OK"
        return f"TAMPER at block {self.first_bad_index}: {self.reason.value}"


def _check_block(block: Block, position: int, prev_hash: bytes) -> TamperReason | None:
    """Shared verification rule; check order fixes the reported reason."""
    if block.index != position:
        return TamperReason.INDEX_GAP
    if block.prev_hash != prev_hash:
        return TamperReason.LINK_MISMATCH
    if block.hash != compute_block_hash(block.index, block.timestamp, block.payload, block.prev_hash):
        return TamperReason.HASH_MISMATCH
    if position == 0 and (block.payload != GENESIS_PAYLOAD or block.timestamp != GENESIS_TIMESTAMP):
        # internally consistent but not the fixed genesis constant
        return TamperReason.HASH_MISMATCH
    return None


def verify_blocks(blocks: list[Block]) -> TamperReport:
    if not blocks:
        return TamperReport(False, 0, TamperReason.MALFORMED)
    prev_hash = ZERO_HASH
    for position, block in enumerate(blocks):
        reason = _check_block(block, position, prev_hash)
        if reason is not None:
            return TamperReport(False, position, reason)
        prev_hash = block.hash
    return TamperReport(True)


def iter_records(data: bytes):
    """Yield (position, record_bytes | None); None marks an unparsable tail."""
    pos = 0
    index = 0
    while pos < len(data):
        if pos + 4 > len(data):
            yield index, None
            return
        length = int.from_bytes(data[pos : pos + 4], "little")
        pos += 4
        if pos + length > len(data):
            yield index, None
            return
        yield index, data[pos : pos + length]
        pos += length
        index += 1


def verify_chain_bytes(data: bytes) -> TamperReport:
    """Verify a serialized chain image; malformed records never raise."""
    blocks: list[Block] = []
    for position, record in iter_records(data):
        if record is None:
            return TamperReport(False, position, TamperReason.MALFORMED)
        try:
            blocks.append(Block.from_record(record))
        except EncodingError:
            return TamperReport(False, position, TamperReason.MALFORMED)
    return verify_blocks(blocks)


def verify_chain_file(path: str | Path) -> TamperReport:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise StorageError(f"cannot read chain file {path}: {exc}") from exc
    return verify_chain_bytes(data)


class Chain:
    """In-memory chain plus its record file; the single exclusive appender.

    Appends are serialized through an internal lock and made durable
    (flush + fsync) before they return. Blocks appended or loaded through
    this handle are verified, so reads only need to check the suffix
    beyond the verified watermark.
    """

    def __init__(self, path: str | Path | None = None):
        self._lock = threading.Lock()
        self.path = Path(path) if path is not None else None
        self.blocks: list[Block] = [genesis_block()]
        self._verified_upto = 1
        if self.path is not None:
            if self.path.exists() and self.path.stat().st_size > 0:
                self._load_existing()
            else:
                self._append_record(self.blocks[0])

    # -- persistence ------------------------------------------------------

    def _load_existing(self) -> None:
        data = self.path.read_bytes()
        blocks: list[Block] = []
        for position, record in iter_records(data):
            if record is None:
                raise ChainCorruptError(
                    f"truncated record at position {position}",
                    TamperReport(False, position, TamperReason.MALFORMED),
                )
            try:
                blocks.append(Block.from_record(record))
            except EncodingError as exc:
                raise ChainCorruptError(
                    f"malformed record at position {position}: {exc}",
                    TamperReport(False, position, TamperReason.MALFORMED),
                ) from exc
        report = verify_blocks(blocks)
        if not report.valid:
            raise ChainCorruptError(report.describe(), report)
        self.blocks = blocks
        self._verified_upto = len(blocks)

    def _append_record(self, block: Block) -> None:
        record = block.to_record()
        try:
            with open(self.path, "ab") as fh:
                fh.write(encode_u32(len(record)) + record)
                fh.flush()
                os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"cannot append to chain file {self.path}: {exc}") from exc

    # -- operations -------------------------------------------------------

    @property
    def head_hash(self) -> bytes:
        return self.blocks[-1].hash

    def __len__(self) -> int:
        return len(self.blocks)

    def append_block(self, payload: BlockPayload | bytes, now: int) -> Block:
        payload_bytes = payload.to_bytes() if isinstance(payload, BlockPayload) else payload
        with self._lock:
            self._verify_suffix()
            head = self.blocks[-1]
            block = make_block(head.index + 1, now, payload_bytes, head.hash)
            if self.path is not None:
                self._append_record(block)
            self.blocks.append(block)
            self._verified_upto = len(self.blocks)
            return block

    def verify(self) -> TamperReport:
        with self._lock:
            return verify_blocks(self.blocks)

    def _verify_suffix(self) -> None:
        """Check any blocks beyond the watermark (e.g. injected by hand)."""
        if self._verified_upto >= len(self.blocks):
            return
        start = self._verified_upto
        prev_hash = self.blocks[start - 1].hash if start > 0 else ZERO_HASH
        for position in range(start, len(self.blocks)):
            reason = _check_block(self.blocks[position], position, prev_hash)
            if reason is not None:
                raise ChainCorruptError(
                    f"TAMPER at block {position}: {reason.value}",
                    TamperReport(False, position, reason),
                )
            prev_hash = self.blocks[position].hash
        self._verified_upto = len(self.blocks)

    def find_block(self, session_id: str) -> Block:
        """Most recent block for a session; never matches the genesis block."""
        with self._lock:
            self._verify_suffix()
            for block in reversed(self.blocks[1:]):
                try:
                    payload = BlockPayload.from_bytes(block.payload)
                except EncodingError:
                    continue
                if payload.session_id == session_id:
                    return block
        raise PayloadNotFoundError(f"no block for session {session_id!r}")

    def fetch_payload(self, session_id: str) -> BlockPayload:
        return BlockPayload.from_bytes(self.find_block(session_id).payload)

    def serialize(self) -> bytes:
        with self._lock:
            return b"".join(encode_u32(len(r)) + r for r in (b.to_record() for b in self.blocks))


# Free-function forms of the chain operations.

def append_block(chain: Chain, payload: BlockPayload | bytes, now: int) -> Block:
    return chain.append_block(payload, now)


def verify_chain(chain: Chain) -> TamperReport:
    return chain.verify()


def fetch_payload(chain: Chain, session_id: str) -> BlockPayload:
    return chain.fetch_payload(session_id)


def load_chain(path: str | Path) -> Chain:
    """Load and verify a chain; a missing file yields a fresh genesis-only chain."""
    return Chain(path)
