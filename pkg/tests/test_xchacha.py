"""The extended-nonce AEAD against published vectors and a from-scratch oracle."""

import os
import struct

import pytest
from hypothesis import given
from hypothesis import strategies as st

from honeyauth.errors import SealAuthenticationError
from honeyauth.xchacha import XChaCha20Poly1305, hchacha20

# Subkey-derivation test vector (key 00..1f, input 00000009...31415927).
HCHACHA_KEY = bytes(range(32))
HCHACHA_IN = bytes.fromhex("000000090000004a0000000031415927")
HCHACHA_OUT = bytes.fromhex("82413b4227b27bfed30e42508a877d73a0f9e4d58a74a853c12ec41326d3ecdc")

# Full AEAD vector: 114-byte pangram plaintext under key 80..9f, 24-byte nonce.
AEAD_KEY = bytes(range(0x80, 0xA0))
AEAD_NONCE = bytes.fromhex("404142434445464748494a4b4c4d4e4f5051525354555657")
AEAD_AAD = bytes.fromhex("50515253c0c1c2c3c4c5c6c7")
AEAD_PLAINTEXT = (
    b"Ladies and Gentlemen of the class of '99: If I could offer you "
    b"only one tip for the future, sunscreen would be it."
)
AEAD_CIPHERTEXT = bytes.fromhex(
    "bd6d179d3e83d43b9576579493c0e939572a1700252bfaccbed2902c21396cbb"
    "731c7f1b0b4aa6440bf3a82f4eda7e39ae64c6708c54c216cb96b72e1213b452"
    "2f8c9ba40db5d945b11b69b982c1bb9e3f3fac2bc369488f76b2383565d3fff9"
    "21f9664c97637da9768812f615c68b13b52ec0875924c1c7987947deafd878"
    "0acf49"
)


def _quarter(s, a, b, c, d):
    s[a] = (s[a] + s[b]) & 0xFFFFFFFF
    s[d] = ((s[d] ^ s[a]) << 16 | (s[d] ^ s[a]) >> 16) & 0xFFFFFFFF
    s[c] = (s[c] + s[d]) & 0xFFFFFFFF
    s[b] = ((s[b] ^ s[c]) << 12 | (s[b] ^ s[c]) >> 20) & 0xFFFFFFFF
    s[a] = (s[a] + s[b]) & 0xFFFFFFFF
    s[d] = ((s[d] ^ s[a]) << 8 | (s[d] ^ s[a]) >> 24) & 0xFFFFFFFF
    s[c] = (s[c] + s[d]) & 0xFFFFFFFF
    s[b] = ((s[b] ^ s[c]) << 7 | (s[b] ^ s[c]) >> 25) & 0xFFFFFFFF


def hchacha20_oracle(key: bytes, inp: bytes) -> bytes:
    """Direct 20-round implementation, no shared code with production."""
    state = [0x61707865, 0x3320646E, 0x79622D32, 0x6B206574]
    state += list(struct.unpack("<8I", key)) + list(struct.unpack("<4I", inp))
    for _ in range(10):
        _quarter(state, 0, 4, 8, 12)
        _quarter(state, 1, 5, 9, 13)
        _quarter(state, 2, 6, 10, 14)
        _quarter(state, 3, 7, 11, 15)
        _quarter(state, 0, 5, 10, 15)
        _quarter(state, 1, 6, 11, 12)
        _quarter(state, 2, 7, 8, 13)
        _quarter(state, 3, 4, 9, 14)
    return struct.pack("<8I", *state[0:4], *state[12:16])


def test_hchacha20_known_vector():
    assert hchacha20(HCHACHA_KEY, HCHACHA_IN) == HCHACHA_OUT
    assert hchacha20_oracle(HCHACHA_KEY, HCHACHA_IN) == HCHACHA_OUT


@given(st.binary(min_size=32, max_size=32), st.binary(min_size=16, max_size=16))
def test_hchacha20_matches_oracle(key, inp):
    assert hchacha20(key, inp) == hchacha20_oracle(key, inp)


def test_aead_known_vector():
    aead = XChaCha20Poly1305(AEAD_KEY)
    assert aead.encrypt(AEAD_NONCE, AEAD_PLAINTEXT, AEAD_AAD) == AEAD_CIPHERTEXT
    assert aead.decrypt(AEAD_NONCE, AEAD_CIPHERTEXT, AEAD_AAD) == AEAD_PLAINTEXT


@given(st.binary(max_size=300), st.binary(max_size=64))
def test_round_trip(plaintext, aad):
    key, nonce = os.urandom(32), os.urandom(24)
    aead = XChaCha20Poly1305(key)
    assert aead.decrypt(nonce, aead.encrypt(nonce, plaintext, aad), aad) == plaintext


def test_tampered_ciphertext_rejected():
    aead = XChaCha20Poly1305(os.urandom(32))
    nonce = os.urandom(24)
    ct = bytearray(aead.encrypt(nonce, b"payload", b"aad"))
    ct[3] ^= 0x01
    with pytest.raises(SealAuthenticationError):
        aead.decrypt(nonce, bytes(ct), b"aad")


def test_wrong_aad_rejected():
    aead = XChaCha20Poly1305(os.urandom(32))
    nonce = os.urandom(24)
    ct = aead.encrypt(nonce, b"payload", b"aad")
    with pytest.raises(SealAuthenticationError):
        aead.decrypt(nonce, ct, b"aad2")


def test_sizes_validated():
    with pytest.raises(ValueError):
        XChaCha20Poly1305(b"short")
    aead = XChaCha20Poly1305(os.urandom(32))
    with pytest.raises(ValueError):
        aead.encrypt(os.urandom(12), b"x", None)
