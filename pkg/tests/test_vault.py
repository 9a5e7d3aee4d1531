import hashlib
import os

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honeyauth.errors import (
    EncodingError,
    SealAuthenticationError,
    UnknownKeyError,
    WeakPasswordError,
)
from honeyauth.vault import (
    CredentialRecord,
    HoneytokenPayload,
    KdfParams,
    Keystore,
    SealedHoneytoken,
    Vault,
    build_payload,
    decoy_digest,
    digest,
    hash_password,
    make_aad,
    verify_password,
)

FAST_KDF = KdfParams(log2_n=10)


def make_vault():
    return Vault(Keystore({"k1": os.urandom(32)}))


def sample_payload(n=3, session_id="s-1"):
    otps = [format(i, "06d") for i in range(100000, 100000 + n)]
    return build_payload(otps[1], tuple(otps[:1] + otps[2:]), session_id)


# -- payload ---------------------------------------------------------------


def test_payload_serialization_round_trip():
    payload = sample_payload()
    assert HoneytokenPayload.from_bytes(payload.to_bytes()) == payload


@given(st.integers(min_value=2, max_value=10), st.text(min_size=1, max_size=30))
def test_payload_round_trip_property(n, session_id):
    payload = sample_payload(n, session_id)
    assert len(payload.decoy_digests) == n - 1
    assert HoneytokenPayload.from_bytes(payload.to_bytes()) == payload


def test_payload_rejects_honeytoken_decoy_collision():
    salt = os.urandom(16)
    with pytest.raises(EncodingError):
        HoneytokenPayload("123456", (decoy_digest("123456", salt),), "s", salt)


def test_payload_rejects_bad_digest_length():
    with pytest.raises(EncodingError):
        HoneytokenPayload("123456", (b"short",), "s", os.urandom(16))


# -- seal / unseal ---------------------------------------------------------


def test_seal_unseal_round_trip():
    vault = make_vault()
    payload = sample_payload()
    aad = make_aad("s-1", os.urandom(32))
    assert vault.unseal(vault.seal(payload, "k1", aad), "k1", aad) == payload


def test_seal_twice_differs():
    vault = make_vault()
    payload = sample_payload()
    aad = make_aad("s-1", b"\x00" * 32)
    first = vault.seal(payload, "k1", aad)
    second = vault.seal(payload, "k1", aad)
    assert first.nonce != second.nonce
    assert first.ciphertext != second.ciphertext


def test_unseal_wrong_aad_fails():
    vault = make_vault()
    sealed = vault.seal(sample_payload(), "k1", make_aad("s-1", b"\x00" * 32))
    with pytest.raises(SealAuthenticationError):
        vault.unseal(sealed, "k1", make_aad("s-2", b"\x00" * 32))


def test_unseal_truncated_ciphertext_fails():
    vault = make_vault()
    aad = make_aad("s-1", b"\x00" * 32)
    sealed = vault.seal(sample_payload(), "k1", aad)
    truncated = SealedHoneytoken(sealed.ciphertext[:-3], sealed.nonce, "k1", sealed.aad_digest)
    with pytest.raises(SealAuthenticationError):
        vault.unseal(truncated, "k1", aad)


def test_unseal_single_byte_mutations_fail():
    vault = make_vault()
    aad = make_aad("s-1", b"\x01" * 32)
    sealed = vault.seal(sample_payload(), "k1", aad)
    rng = __import__("random").Random(7)
    for _ in range(100):
        field = rng.choice(["ciphertext", "nonce", "aad_digest"])
        raw = bytearray(getattr(sealed, field))
        raw[rng.randrange(len(raw))] ^= 1 << rng.randrange(8)
        mutated = SealedHoneytoken(
            bytes(raw) if field == "ciphertext" else sealed.ciphertext,
            bytes(raw) if field == "nonce" else sealed.nonce,
            sealed.key_id,
            bytes(raw) if field == "aad_digest" else sealed.aad_digest,
        )
        with pytest.raises(SealAuthenticationError):
            vault.unseal(mutated, "k1", aad)


def test_unknown_key_rejected():
    vault = make_vault()
    with pytest.raises(UnknownKeyError):
        vault.seal(sample_payload(), "nope", b"aad")


def test_envelope_serialization_round_trip():
    vault = make_vault()
    sealed = vault.seal(sample_payload(), "k1", make_aad("s-1", b"\x02" * 32))
    assert SealedHoneytoken.from_bytes(sealed.to_bytes()) == sealed


def test_ciphertext_hides_plaintext():
    vault = make_vault()
    payload = sample_payload()
    sealed = vault.seal(payload, "k1", make_aad("s-1", b"\x00" * 32))
    assert payload.honeytoken_otp.encode() not in sealed.to_bytes()


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=10), st.data())
def test_seal_round_trip_property(n, data):
    vault = make_vault()
    payload = sample_payload(n)
    user_ref = data.draw(st.binary(min_size=32, max_size=32))
    aad = make_aad(payload.session_id, user_ref)
    assert vault.unseal(vault.seal(payload, "k1", aad), "k1", aad) == payload


# -- passwords ---------------------------------------------------------------


def test_password_round_trip():
    record = hash_password("hunter2hunter2", FAST_KDF)
    assert verify_password("hunter2hunter2", record)
    assert not verify_password("hunter2hunter3", record)


def test_password_hash_salted():
    a = hash_password("same password", FAST_KDF)
    b = hash_password("same password", FAST_KDF)
    assert a.password_digest != b.password_digest
    assert a.salt != b.salt


def test_empty_password_rejected():
    with pytest.raises(WeakPasswordError):
        hash_password("", FAST_KDF)


def test_credential_record_validates():
    with pytest.raises(Exception):
        CredentialRecord(b"x" * 32, b"shortsalt", FAST_KDF)


# -- digest ------------------------------------------------------------------

# Published test vectors for the configured 256-bit hash.
SHA256_VECTORS = [
    (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
    (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
    (
        b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1",
    ),
]


@pytest.mark.parametrize("message,expected", SHA256_VECTORS)
def test_digest_published_vectors(message, expected):
    assert digest(message).hex() == expected


def test_digest_deterministic():
    blob = os.urandom(100)
    assert digest(blob) == digest(blob) == hashlib.sha256(blob).digest()


def test_digest_bit_flip_trials():
    rng = __import__("random").Random(11)
    for _ in range(10_000):
        blob = bytearray(rng.randbytes(rng.randrange(1, 64)))
        original = digest(bytes(blob))
        blob[rng.randrange(len(blob))] ^= 1 << rng.randrange(8)
        assert digest(bytes(blob)) != original


# -- keystore ----------------------------------------------------------------


def test_keystore_from_env():
    key = os.urandom(32)
    ks = Keystore.from_env(environ={"HONEYAUTH_MASTER_KEY": key.hex()})
    assert ks.get("k1") == key


def test_keystore_env_validation():
    from honeyauth.errors import ConfigError

    with pytest.raises(ConfigError):
        Keystore.from_env(environ={})
    with pytest.raises(ConfigError):
        Keystore.from_env(environ={"HONEYAUTH_MASTER_KEY": "zz" * 32})
    with pytest.raises(ConfigError):
        Keystore.from_env(environ={"HONEYAUTH_MASTER_KEY": "ab"})
