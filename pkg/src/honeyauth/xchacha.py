"""XChaCha20-Poly1305: an AEAD with 256-bit keys and 192-bit nonces.

The extended-nonce construction (draft-irtf-cfrg-xchacha) derives a
subkey with HChaCha20 from the first 16 nonce bytes, then runs standard
ChaCha20-Poly1305 with a 12-byte nonce of four zero bytes plus the last
8 nonce bytes. The 24-byte nonce is what makes random nonces safe here:
collision probability stays negligible without any persisted counter.

OpenSSL (via the `cryptography` package) does not expose HChaCha20, but
its raw ChaCha20 keystream lets us recover it: a keystream block is the
post-rounds state plus the initial state, and the initial state is fully
known, so subtracting gives the post-rounds words HChaCha20 outputs.
"""

from __future__ import annotations

import struct

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from .errors import SealAuthenticationError

KEY_SIZE = 32
NONCE_SIZE = 24

_SIGMA = (0x61707865, 0x3320646E, 0x79622D32, 0x6B206574)
_MASK32 = 0xFFFFFFFF


def hchacha20(key: bytes, inp: bytes) -> bytes:
    """Derive a 32-byte subkey from a 32-byte key and 16 input bytes."""
    if len(key) != KEY_SIZE:
        raise ValueError("hchacha20 key must be 32 bytes")
    if len(inp) != 16:
        raise ValueError("hchacha20 input must be 16 bytes")
    # cryptography's ChaCha20 nonce parameter is 16 bytes, loaded verbatim
    # into state words 12..15 (counter || nonce), exactly HChaCha20's input.
    block = Cipher(algorithms.ChaCha20(key, inp), mode=None).encryptor().update(b"\x00" * 64)
    words = struct.unpack("<16I", block)
    init = _SIGMA + struct.unpack("<8I", key) + struct.unpack("<4I", inp)
    post = [(w - i) & _MASK32 for w, i in zip(words, init)]
    return struct.pack("<8I", *post[0:4], *post[12:16])


class XChaCha20Poly1305:
    """AEAD interface mirroring cryptography's ChaCha20Poly1305, 24-byte nonces."""

    def __init__(self, key: bytes):
        if len(key) != KEY_SIZE:
            raise ValueError("key must be 32 bytes")
        self._key = key

    def _subcipher(self, nonce: bytes) -> tuple[ChaCha20Poly1305, bytes]:
        if len(nonce) != NONCE_SIZE:
            raise ValueError("nonce must be 24 bytes")
        subkey = hchacha20(self._key, nonce[:16])
        return ChaCha20Poly1305(subkey), b"\x00" * 4 + nonce[16:]

    def encrypt(self, nonce: bytes, data: bytes, associated_data: bytes | None) -> bytes:
        aead, sub_nonce = self._subcipher(nonce)
        return aead.encrypt(sub_nonce, data, associated_data)

    def decrypt(self, nonce: bytes, data: bytes, associated_data: bytes | None) -> bytes:
        aead, sub_nonce = self._subcipher(nonce)
        try:
            return aead.decrypt(sub_nonce, data, associated_data)
        except InvalidTag as exc:
            raise SealAuthenticationError("AEAD tag verification failed") from exc
