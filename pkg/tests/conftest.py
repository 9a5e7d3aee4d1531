import itertools
import os

import pytest

from honeyauth.config import ServiceConfig
from honeyauth.service import AuthService
from honeyauth.vault import Keystore

# Cheap scrypt cost for tests; production default stays 2**14.
FAST_KDF_LOG2_N = 10

_counter = itertools.count()


@pytest.fixture
def keystore():
    return Keystore({"k1": os.urandom(32)})


@pytest.fixture
def make_service(tmp_path):
    """Factory for isolated services; each call gets its own files."""

    def factory(**overrides):
        workdir = tmp_path / f"svc{next(_counter)}"
        workdir.mkdir()
        kwargs = dict(
            chain_path=str(workdir / "chain.dat"),
            store_path=str(workdir / "accounts.db"),
            kdf_log2_n=FAST_KDF_LOG2_N,
        )
        kwargs.update(overrides)
        config = ServiceConfig(**kwargs)
        return AuthService(config, keystore=Keystore({config.key_id: os.urandom(32)}))

    return factory
