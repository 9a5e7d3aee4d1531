"""Command-line entry point.

Thin adapters only: every verb maps onto a module operation or an HTTP
call against a running service. Exit codes: 0 success, 1 usage error,
2 verification/validation failure, 3 I/O failure. Machine-readable
output (csv, verify verdicts) goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

from .bench import BenchMode, emit_report, run_transfer_bench
from .config import ServiceConfig, load_config
from .errors import (
    ConfigError,
    HoneyauthError,
    InvalidParametersError,
    StorageError,
    UnknownAccountError,
)
from .ledger import iter_records, verify_chain_bytes
from .validator import unlock_account


class CliFailure(Exception):
    """Carries the process exit code; message (if any) goes to stderr."""

    def __init__(self, code: int, message: str | None = None):
        super().__init__(message or "")
        self.code = code
        self.message = message


def _load_config(path: str | None) -> ServiceConfig:
    if path is None:
        return ServiceConfig()
    try:
        return load_config(path)
    except ConfigError as exc:
        raise CliFailure(1, f"config error: {exc}") from exc
    except OSError as exc:
        raise CliFailure(3, f"cannot read config: {exc}") from exc


def _request(method: str, url: str, body: dict | None = None) -> httpx.Response:
    try:
        return httpx.request(method, url, json=body, timeout=30.0)
    except httpx.HTTPError as exc:
        raise CliFailure(3, f"request to {url} failed: {exc}") from exc


@click.group()
def cli():
    """Two-factor honeytoken authentication over a hash-chained ledger."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--demo-ui", "demo_ui", type=click.Path(exists=True, file_okay=False), default=None)
def serve(config_path, demo_ui):
    """Run the HTTP service."""
    import uvicorn

    from .service import AuthService, create_app

    config = _load_config(config_path)
    try:
        service = AuthService(config)
    except ConfigError as exc:
        raise CliFailure(1, str(exc)) from exc
    except (StorageError, HoneyauthError) as exc:
        raise CliFailure(3, str(exc)) from exc
    host, port = config.host_port
    uvicorn.run(create_app(service, demo_ui), host=host, port=port, log_level="info")


@cli.command()
@click.option("--url", default="http://127.0.0.1:8000")
@click.option("--username", required=True)
@click.option("--password", required=True)
@click.option("--position", required=True, type=int)
def register(url, username, password, position):
    """Register an account with its honeytoken position."""
    resp = _request(
        "POST",
        f"{url}/register",
        {"username": username, "password": password, "honeytoken_position": position},
    )
    if resp.status_code == 201:
        click.echo("registered")
        return
    raise CliFailure(2, f"register failed: {resp.json().get('error', resp.status_code)}")


@cli.command()
@click.option("--url", default="http://127.0.0.1:8000")
@click.option("--username", required=True)
@click.option("--password", required=True)
def login(url, username, password):
    """First-factor login; prints the session id on success."""
    resp = _request("POST", f"{url}/login", {"username": username, "password": password})
    if resp.status_code == 200:
        click.echo(resp.json()["session_id"])
        return
    raise CliFailure(2, f"login failed: {resp.json().get('error', resp.status_code)}")


@cli.command()
@click.option("--url", default="http://127.0.0.1:8000")
@click.option("--session", "session_id", required=True)
@click.option("--otp", "otp_value", required=True)
def otp(url, session_id, otp_value):
    """Submit an OTP for a session; prints the validation outcome."""
    resp = _request("POST", f"{url}/otp", {"session_id": session_id, "otp": otp_value})
    body = resp.json()
    outcome = body.get("outcome")
    if outcome is None:
        raise CliFailure(2, f"otp failed: {body.get('error', resp.status_code)}")
    line = outcome
    if body.get("remaining") is not None:
        line += f" (remaining: {body['remaining']})"
    click.echo(line)
    if outcome != "Authenticated":
        raise CliFailure(2)


@cli.command()
@click.option("--url", default="http://127.0.0.1:8000")
@click.option("--username", required=True)
def mailbox(url, username):
    """Read the demo mailbox for a user (demo mode only)."""
    resp = _request("GET", f"{url}/demo/mailbox/{username}")
    if resp.status_code != 200:
        raise CliFailure(2, f"mailbox failed: {resp.json().get('error', resp.status_code)}")
    click.echo(json.dumps(resp.json()["messages"], indent=2))


@cli.group()
def chain():
    """Ledger maintenance."""


@chain.command("verify")
@click.option("--path", required=True, type=click.Path())
def chain_verify(path):
    """Verify the chain record file; exits 0 on valid, 2 on tamper."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliFailure(3, f"cannot read chain file: {exc}") from exc
    report = verify_chain_bytes(data)
    if report.valid:
        count = sum(1 for _ in iter_records(data))
        click.echo(f"OK, {count} blocks")
        return
    click.echo(report.describe())
    raise CliFailure(2)


@cli.command()
@click.option("--username", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--store", "store_path", type=click.Path(), default=None, help="Override store path.")
def unlock(username, config_path, store_path):
    """Admin: clear an account's lock flag (operates on the store file)."""
    from .accounts import AccountStore

    config = _load_config(config_path)
    path = store_path if store_path is not None else config.store_path
    try:
        store = AccountStore(path)
        record = store.get(username)
        if record is None:
            raise UnknownAccountError(f"no account {username!r}")
        unlock_account(record.user_ref, store)
    except UnknownAccountError as exc:
        raise CliFailure(2, str(exc)) from exc
    except StorageError as exc:
        raise CliFailure(3, str(exc)) from exc
    click.echo(f"unlocked {username}")


@cli.command()
@click.option("--mode", type=click.Choice(["both", "with", "without"]), default="both")
@click.option("--iterations", default=1000, type=int)
@click.option("--trials", default=3, type=int)
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table")
def bench(mode, iterations, trials, fmt):
    """Measure honeytoken transfer time with and without the ledger."""
    modes = {
        "both": [BenchMode.WITHOUT_BLOCKCHAIN, BenchMode.WITH_BLOCKCHAIN],
        "without": [BenchMode.WITHOUT_BLOCKCHAIN],
        "with": [BenchMode.WITH_BLOCKCHAIN],
    }[mode]
    try:
        reports = [run_transfer_bench(m, iterations, trials) for m in modes]
        click.echo(emit_report(reports, fmt), nl=False)
    except InvalidParametersError as exc:
        raise click.UsageError(str(exc)) from exc


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def demo(config_path):
    """Scripted end-to-end protocol round against an in-process service."""
    import tempfile

    from fastapi.testclient import TestClient

    from .service import AuthService, create_app
    from .vault import MASTER_KEY_ENV, Keystore

    config = _load_config(config_path)
    with tempfile.TemporaryDirectory(prefix="honeyauth-demo-") as tmp:
        if config_path is None:
            config.chain_path = os.path.join(tmp, "chain.dat")
            config.store_path = os.path.join(tmp, "accounts.db")
        if os.environ.get(MASTER_KEY_ENV):
            keystore = Keystore.from_env(config.key_id)
        else:
            click.echo(f"# {MASTER_KEY_ENV} not set; using an ephemeral demo key", err=True)
            keystore = Keystore({config.key_id: os.urandom(32)})
        service = AuthService(config, keystore=keystore)
        client = TestClient(create_app(service))

        username, password, position = "alice", "correct horse battery", 2
        click.echo(f"[1] register request ({username})")
        resp = client.post(
            "/register",
            json={"username": username, "password": password, "honeytoken_position": position},
        )
        assert resp.status_code == 201, resp.text
        click.echo(f"[2] honeytoken position bound: {position} of {config.n_otps}")
        click.echo("[3] honeytoken will be sealed (authenticated encryption) at each login")

        click.echo(f"[4] first-factor login ({username}, password)")
        resp = client.post("/login", json={"username": username, "password": password})
        assert resp.status_code == 200, resp.text
        session_id = resp.json()["session_id"]
        click.echo(f"[5] sealed honeytoken appended to ledger (chain length {len(service.chain)})")

        resp = client.get(f"/demo/mailbox/{username}")
        message = resp.json()["messages"][-1]
        click.echo(f"[6] mail delivered with {len(message['otps'])} OTPs: {' '.join(message['otps'])}")

        chosen = message["otps"][position - 1]
        click.echo(f"[7] submitting the OTP at position {position}: {chosen}")
        click.echo("[8] validation fetches the sealed honeytoken from the ledger and unseals it")
        resp = client.post("/otp", json={"session_id": session_id, "otp": chosen})
        outcome = resp.json()["outcome"]
        click.echo(f"[9] outcome: {outcome}")
        if outcome != "Authenticated":
            raise CliFailure(2, f"demo expected Authenticated, got {outcome}")


def main(argv: list[str] | None = None) -> int:
    """Dispatch argv and map failures onto the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="honeyauth", standalone_mode=False)
    except CliFailure as exc:
        if exc.message:
            click.echo(exc.message, err=True)
        return exc.code
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 1
    except StorageError as exc:
        click.echo(str(exc), err=True)
        return 3
    except HoneyauthError as exc:
        click.echo(str(exc), err=True)
        return 2
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
