import os
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import chain_oracle
from honeyauth.errors import ChainCorruptError, PayloadNotFoundError, StorageError
from honeyauth.ledger import (
    Block,
    BlockPayload,
    Chain,
    TamperReason,
    genesis_block,
    load_chain,
    verify_chain_bytes,
    verify_chain_file,
)

# Frozen constant, derived by hashing the canonical genesis bytes with an
# independent struct-based encoder.
GENESIS_HASH_HEX = "8a7fb7847cebc789824785707bbeac8e224e05009baefb272849626f1678eebb"


def payload(i: int, session: str | None = None) -> BlockPayload:
    return BlockPayload(session or f"session-{i}", os.urandom(32), os.urandom(40))


def build_chain(tmp_path, k: int, name="chain.dat") -> Chain:
    chain = Chain(tmp_path / name)
    for i in range(k):
        chain.append_block(payload(i), now=1000 + i)
    return chain


# -- genesis -----------------------------------------------------------------


def test_genesis_is_a_fixed_constant():
    g = genesis_block()
    assert g.index == 0
    assert g.timestamp == 0
    assert g.payload == b"B2FHA-GENESIS"
    assert g.prev_hash == bytes(32)
    assert g.hash.hex() == GENESIS_HASH_HEX
    assert genesis_block().to_record() == g.to_record()


def test_fresh_chain_is_valid(tmp_path):
    chain = Chain(tmp_path / "chain.dat")
    report = chain.verify()
    assert report.valid and report.first_bad_index is None


# -- append ------------------------------------------------------------------


def test_first_append_links_to_genesis(tmp_path):
    chain = Chain(tmp_path / "chain.dat")
    block = chain.append_block(payload(0), now=1234)
    assert block.index == 1
    assert block.prev_hash == genesis_block().hash
    assert chain.head_hash == block.hash


def test_sequential_appends_hold_invariants(tmp_path):
    chain = build_chain(tmp_path, 10)
    assert [b.index for b in chain.blocks] == list(range(11))
    for prev, block in zip(chain.blocks, chain.blocks[1:]):
        assert block.prev_hash == prev.hash
    assert chain.verify().valid


def test_append_refuses_corrupt_chain(tmp_path):
    chain = build_chain(tmp_path, 3)
    bad = Block(9, 0, b"junk", os.urandom(32), os.urandom(32))
    chain.blocks.append(bad)  # bypasses the appender on purpose
    with pytest.raises(ChainCorruptError):
        chain.append_block(payload(99), now=2000)


def test_append_only_serialization_prefix(tmp_path):
    chain = build_chain(tmp_path, 4)
    before = chain.serialize()
    chain.append_block(payload(50), now=5000)
    after = chain.serialize()
    assert after[: len(before)] == before
    assert (tmp_path / "chain.dat").read_bytes() == after


# -- verify ------------------------------------------------------------------


def flip_bit(data: bytes, byte_index: int, bit: int) -> bytes:
    out = bytearray(data)
    out[byte_index] ^= 1 << bit
    return bytes(out)


def record_span(chain: Chain, block_index: int) -> tuple[int, int]:
    """Byte span of one block's record (sans length header) in the image."""
    offset = 0
    for block in chain.blocks[:block_index]:
        offset += 4 + len(block.to_record())
    start = offset + 4
    return start, start + len(chain.blocks[block_index].to_record())


def test_payload_flip_detected_at_block_3(tmp_path):
    chain = build_chain(tmp_path, 5)
    image = chain.serialize()
    start, _ = record_span(chain, 3)
    # offset 25 is inside the payload field (1 format + 24 header)
    mutated = flip_bit(image, start + 30, 0)
    report = verify_chain_bytes(mutated)
    assert not report.valid
    assert report.first_bad_index == 3
    assert report.reason is TamperReason.HASH_MISMATCH
    assert chain_oracle.verify(mutated) == (False, 3, "hash-mismatch")


def test_prev_hash_overwrite_detected_at_block_4(tmp_path):
    chain = build_chain(tmp_path, 5)
    blocks = list(chain.blocks)
    target = blocks[4]
    blocks[4] = Block(target.index, target.timestamp, target.payload, os.urandom(32), target.hash)
    image = b"".join(
        len(r).to_bytes(4, "little") + r for r in (b.to_record() for b in blocks)
    )
    report = verify_chain_bytes(image)
    assert (report.valid, report.first_bad_index, report.reason) == (
        False,
        4,
        TamperReason.LINK_MISMATCH,
    )
    assert chain_oracle.verify(image) == (False, 4, "link-mismatch")


def test_empty_image_malformed():
    report = verify_chain_bytes(b"")
    assert not report.valid
    assert report.reason is TamperReason.MALFORMED


def test_verifier_matches_oracle_under_random_mutations(tmp_path):
    chain = build_chain(tmp_path, 20)
    image = chain.serialize()
    rng = random.Random(42)
    for _ in range(500):
        mutated = flip_bit(image, rng.randrange(len(image)), rng.randrange(8))
        report = verify_chain_bytes(mutated)
        expected = chain_oracle.verify(mutated)
        got = (
            report.valid,
            report.first_bad_index,
            report.reason.value if report.reason else None,
        )
        assert got == expected
        assert not report.valid


# -- fetch -------------------------------------------------------------------


def test_fetch_single_block(tmp_path):
    chain = Chain(tmp_path / "chain.dat")
    p = payload(0, "session-x")
    chain.append_block(p, now=1)
    assert chain.fetch_payload("session-x") == p


def test_fetch_latest_wins_on_relogin(tmp_path):
    chain = Chain(tmp_path / "chain.dat")
    first = payload(0, "session-x")
    second = payload(1, "session-x")
    chain.append_block(first, now=1)
    chain.append_block(second, now=2)
    assert chain.fetch_payload("session-x") == second


def test_fetch_unknown_session(tmp_path):
    chain = build_chain(tmp_path, 2)
    with pytest.raises(PayloadNotFoundError):
        chain.fetch_payload("no-such-session")


def test_fetch_never_matches_genesis(tmp_path):
    chain = Chain(tmp_path / "chain.dat")
    with pytest.raises(PayloadNotFoundError):
        chain.fetch_payload("B2FHA-GENESIS")


# -- load / persist ----------------------------------------------------------


def test_load_missing_file_yields_genesis_chain(tmp_path):
    chain = load_chain(tmp_path / "fresh.dat")
    assert len(chain) == 1
    assert chain.blocks[0] == genesis_block()
    assert verify_chain_file(tmp_path / "fresh.dat").valid


@settings(max_examples=25, deadline=None)
@given(k=st.integers(min_value=0, max_value=100))
def test_load_round_trip(tmp_path_factory, k):
    tmp = tmp_path_factory.mktemp("roundtrip")
    chain = build_chain(tmp, k)
    reloaded = load_chain(tmp / "chain.dat")
    assert reloaded.blocks == chain.blocks
    assert reloaded.head_hash == chain.head_hash


def test_load_truncated_final_record(tmp_path):
    chain = build_chain(tmp_path, 3)
    path = tmp_path / "chain.dat"
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ChainCorruptError) as exc:
        load_chain(path)
    assert exc.value.report.reason is TamperReason.MALFORMED


def test_load_refuses_mutated_file(tmp_path):
    chain = build_chain(tmp_path, 4)
    path = tmp_path / "chain.dat"
    start, end = record_span(chain, 2)
    path.write_bytes(flip_bit(path.read_bytes(), start + 10, 3))
    with pytest.raises(ChainCorruptError) as exc:
        load_chain(path)
    assert exc.value.report.first_bad_index == 2


def test_append_to_unwritable_path_fails_cleanly(tmp_path):
    chain = build_chain(tmp_path, 1)
    before = list(chain.blocks)
    chain.path = tmp_path / "missing-dir" / "chain.dat"
    with pytest.raises(StorageError):
        chain.append_block(payload(9), now=9)
    assert chain.blocks == before  # no partial in-memory append
