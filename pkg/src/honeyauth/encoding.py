"""Canonical binary serialization.

Every persisted or hashed structure uses the same bit-exact layout: a
leading format byte 0x01, then fields in declaration order. Variable-length
fields carry a little-endian u64 length prefix; integers are little-endian
u64. Decoding is strict: unknown format bytes, truncation, and trailing
garbage all raise EncodingError.
"""

from __future__ import annotations

import struct

from .errors import EncodingError

FORMAT_V1 = 0x01

_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")


def encode_u64(value: int) -> bytes:
    if not 0 <= value < 2**64:
        raise EncodingError(f"u64 out of range: {value}")
    return _U64.pack(value)


def encode_u32(value: int) -> bytes:
    if not 0 <= value < 2**32:
        raise EncodingError(f"u32 out of range: {value}")
    return _U32.pack(value)


def encode_bytes(value: bytes) -> bytes:
    return _U64.pack(len(value)) + value


def encode_str(value: str) -> bytes:
    return encode_bytes(value.encode("utf-8"))


class Reader:
    """Strict sequential decoder over one buffer."""

    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self._pos + n > len(self._data):
            raise EncodingError("truncated input")
        out = self._data[self._pos : self._pos + n]
        self._pos += n
        return out

    def u64(self) -> int:
        return _U64.unpack(self.take(8))[0]

    def u32(self) -> int:
        return _U32.unpack(self.take(4))[0]

    def bytes_field(self) -> bytes:
        return self.take(self.u64())

    def str_field(self) -> str:
        raw = self.bytes_field()
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError("invalid utf-8 in string field") from exc

    def expect_format(self, version: int = FORMAT_V1) -> None:
        got = self.take(1)[0]
        if got != version:
            raise EncodingError(f"unsupported format byte 0x{got:02x}")

    def expect_end(self) -> None:
        if self._pos != len(self._data):
            raise EncodingError("trailing bytes after structure")

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos
