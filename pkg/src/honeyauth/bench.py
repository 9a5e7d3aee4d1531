"""Honeytoken transfer timing: ledger route vs direct in-process hand-off.

Each iteration measures one full transfer on a monotonic clock, from the
start of OTP-set generation until the validation side holds the unsealed
payload. The without-ledger mode hands the sealed envelope across as a
function argument; the with-ledger mode appends a real block (durable
write included) and reads it back. Per-trial figures are per-iteration
means; trials run after a discarded warm-up to exclude cold caches and
lazy initialization.

Absolute numbers are hardware-specific; the report exists so the two
routes can be compared on the machine at hand, which is why it carries
an explicit ratio line.
"""

from __future__ import annotations

import os
import statistics
import tempfile
import time
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParametersError
from .ledger import BlockPayload, Chain
from .otp import OtpConfig, generate_otp_set
from .vault import Keystore, SealedHoneytoken, Vault, build_payload, make_aad

WARMUP_ITERATIONS = 100
MIN_ITERATIONS = 100
MIN_TRIALS = 3


class BenchMode(str, Enum):
    WITHOUT_BLOCKCHAIN = "WithoutBlockchain"
    WITH_BLOCKCHAIN = "WithBlockchain"


@dataclass(frozen=True)
class BenchReport:
    mode: BenchMode
    trials: tuple[float, ...]  # per-iteration mean, milliseconds
    median: float
    iterations_per_trial: int

    def __post_init__(self):
        if not self.trials:
            raise InvalidParametersError("report requires at least one trial")
        if any(t < 0 for t in self.trials):
            raise InvalidParametersError("negative timings are impossible")
        if self.median != statistics.median(self.trials):
            raise InvalidParametersError("median must be the median of trials")


class _Pipeline:
    """Shared issuance/validation halves used by both measured routes."""

    def __init__(self, chain_path=None):
        self.keystore = Keystore({"bench": os.urandom(32)})
        self.vault = Vault(self.keystore)
        self.otp_config = OtpConfig(n=3, otp_digits=6, ttl_seconds=300)
        self.user_ref = os.urandom(32)
        self.chain = Chain(chain_path)
        self.counter = 0

    def issue(self) -> tuple[str, SealedHoneytoken]:
        self.counter += 1
        session_id = f"bench-{self.counter}"
        otp_set = generate_otp_set(self.otp_config, 2, session_id, issued_at=0)
        payload = build_payload(otp_set.honeytoken, otp_set.decoys, session_id)
        sealed = self.vault.seal(payload, "bench", make_aad(session_id, self.user_ref))
        return session_id, sealed

    def validate_direct(self, session_id: str, sealed: SealedHoneytoken):
        return self.vault.unseal(sealed, "bench", make_aad(session_id, self.user_ref))

    def validate_via_chain(self, session_id: str, sealed: SealedHoneytoken):
        self.chain.append_block(BlockPayload(session_id, self.user_ref, sealed.to_bytes()), now=0)
        fetched = self.chain.fetch_payload(session_id)
        envelope = SealedHoneytoken.from_bytes(fetched.envelope)
        return self.vault.unseal(envelope, "bench", make_aad(session_id, self.user_ref))


def _measure_trial(pipeline: _Pipeline, mode: BenchMode, iterations: int) -> float:
    durations_ns = 0
    for _ in range(iterations):
        start = time.perf_counter_ns()
        session_id, sealed = pipeline.issue()
        if mode is BenchMode.WITH_BLOCKCHAIN:
            pipeline.validate_via_chain(session_id, sealed)
        else:
            pipeline.validate_direct(session_id, sealed)
        durations_ns += time.perf_counter_ns() - start
    return durations_ns / iterations / 1e6  # mean, milliseconds


def run_transfer_bench(
    mode: BenchMode | str, iterations: int, trials: int, chain_dir: str | None = None
) -> BenchReport:
    mode = BenchMode(mode)
    if iterations < MIN_ITERATIONS:
        raise InvalidParametersError(f"iterations must be at least {MIN_ITERATIONS}")
    if trials < MIN_TRIALS:
        raise InvalidParametersError(f"trials must be at least {MIN_TRIALS}")

    def run(pipeline_dir: str | None) -> BenchReport:
        chain_path = None
        if mode is BenchMode.WITH_BLOCKCHAIN:
            chain_path = os.path.join(pipeline_dir, "bench-chain.dat") if pipeline_dir else None
        pipeline = _Pipeline(chain_path)
        timings = []
        for _ in range(trials):
            _measure_trial(pipeline, mode, WARMUP_ITERATIONS)  # discarded
            timings.append(_measure_trial(pipeline, mode, iterations))
        return BenchReport(mode, tuple(timings), statistics.median(timings), iterations)

    if mode is BenchMode.WITH_BLOCKCHAIN and chain_dir is None:
        with tempfile.TemporaryDirectory(prefix="honeyauth-bench-") as tmp:
            return run(tmp)
    return run(chain_dir)


def emit_report(reports: list[BenchReport], fmt: str = "table") -> str:
    if not reports:
        raise InvalidParametersError("at least one report is required")
    if fmt == "csv":
        lines = ["mode,trial,ms"]
        for report in reports:
            for i, ms in enumerate(report.trials, start=1):
                lines.append(f"{report.mode.value},{i},{ms:.6f}")
        return "\n".join(lines) + "\n"
    if fmt != "table":
        raise InvalidParametersError(f"unknown format {fmt!r}")

    n_trials = max(len(r.trials) for r in reports)
    header = ["mode"] + [f"trial {i}" for i in range(1, n_trials + 1)] + ["median"]
    rows = [header]
    for report in reports:
        cells = [report.mode.value]
        cells += [f"{ms:.6f} ms" for ms in report.trials]
        cells += [""] * (n_trials - len(report.trials))
        cells.append(f"{report.median:.6f} ms")
        rows.append(cells)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    out = ["Honeytoken transfer time to validation"]
    for row in rows:
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())

    by_mode = {r.mode: r for r in reports}
    without = by_mode.get(BenchMode.WITHOUT_BLOCKCHAIN)
    with_chain = by_mode.get(BenchMode.WITH_BLOCKCHAIN)
    if without and with_chain and with_chain.median > 0:
        ratio = without.median / with_chain.median
        out.append(
            f"ratio: WithoutBlockchain / WithBlockchain medians = {ratio:.4f}x"
        )
    out.append(
        "note: all timings in milliseconds (per-iteration means within a trial);"
        " both rows use the same unit."
    )
    return "\n".join(out) + "\n"
