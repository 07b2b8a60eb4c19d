"""Monte Carlo block-error estimation for component codes and full lattices.

Reproducibility is the organizing constraint.  Every trial owns a private
counter-based random stream keyed on (seed, trial index), so trial i draws
the same randomness no matter which worker runs it or in what order.
Trials are processed in fixed-size chunks and their outcomes folded in by
index, which makes serial and parallel runs byte-identical, trial counts
included: the stop rule (enough errors, or the trial cap) is applied to the
index-ordered prefix exactly as a serial loop would.

Worker count comes from the POLARLATTICE_WORKERS environment variable and
defaults to the machine's CPU count.  Workers are threads; the hot decode
kernels release the GIL when the compiled path is active.
"""

import math
import json
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import llr, sample_observation
from .lattice import ConstructionDLattice, log2_volume, multistage_decode, vnr_db
from .polar import PolarCode, encode, sc_decode

#: 97.5th standard-normal percentile, for two-sided 95% intervals
_Z95 = 1.959963984540054

#: trials per scheduling chunk; fixed so the stop rule lands on the same
#: trial regardless of worker count
_CHUNK = 256

CSV_HEADER = "vnr_db,sigma,n,trials,errors,pe_hat,ci_lo,ci_hi,seed"


def worker_count() -> int:
    """Workers to use: POLARLATTICE_WORKERS if set, else the CPU count."""
    raw = os.environ.get("POLARLATTICE_WORKERS", "").strip()
    if raw:
        count = int(raw)
        if count < 1:
            raise ValueError("POLARLATTICE_WORKERS must be a positive integer")
        return count
    return os.cpu_count() or 1


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion.

    Stays sane at zero or few errors, where the normal interval collapses;
    always brackets errors/trials.
    """
    if trials < 1 or errors < 0 or errors > trials:
        raise ValueError("need 0 <= errors <= trials with trials >= 1")
    p = errors / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    # at the boundaries the score interval is exactly one-sided; rounding in
    # the sqrt otherwise leaves a stray ulp
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class TrialConfig:
    """Stopping rule and seeding for one simulation run.

    ``sigma`` and ``target`` are descriptive extras for run records; the
    run functions take the operating noise level explicitly.
    """

    seed: int
    max_trials: int = 10_000
    min_errors: int = 100
    sigma: float | None = None
    target: str | None = None

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.max_trials < 1:
            raise ValueError("max_trials must be at least 1")
        if self.min_errors < 1:
            raise ValueError("min_errors must be at least 1")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError("sigma, when given, must be positive")


@dataclass(frozen=True)
class SimResult:
    """Aggregate of one run.  ``level_errors`` attributes each block error
    to the first level that decoded wrong (last slot: the integer level);
    it is populated by lattice runs only and always sums to ``errors``."""

    trials: int
    errors: int
    pe_hat: float
    ci95: tuple[float, float]
    wall_time: float
    level_errors: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0 <= self.errors <= self.trials:
            raise ValueError("errors must lie in [0, trials]")
        if self.pe_hat != self.errors / self.trials:
            raise ValueError("estimate must equal errors / trials")
        if not self.ci95[0] <= self.pe_hat <= self.ci95[1]:
            raise ValueError("confidence interval must bracket the estimate")
        if self.level_errors is not None and sum(self.level_errors) != self.errors:
            raise ValueError("per-level attribution must sum to the error count")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Private stream for one trial: the index keys the counter block, so
    streams are disjoint and independent of execution order."""
    bits = np.random.Philox(key=[seed, 0], counter=[0, 0, 0, trial])
    return np.random.Generator(bits)


def _run_trials(trial_fn, config: TrialConfig, n_levels: int) -> SimResult:
    """Drive ``trial_fn(trial_index) -> int`` over the index-ordered trial
    stream.  A return of -1 is a success; any other value is the erring
    level.  Stops after the exact trial where the error quota is met."""
    start = time.perf_counter()
    trials = 0
    errors = 0
    level_counts = [0] * n_levels
    workers = worker_count()
    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        stop = False
        while not stop and trials < config.max_trials:
            hi = min(trials + _CHUNK, config.max_trials)
            indices = range(trials, hi)
            if executor is None:
                outcomes = map(trial_fn, indices)
            else:
                outcomes = executor.map(trial_fn, indices)
            for outcome in outcomes:
                trials += 1
                if outcome >= 0:
                    errors += 1
                    if n_levels:
                        level_counts[outcome] += 1
                    if errors >= config.min_errors:
                        stop = True
                        break
    finally:
        if executor is not None:
            executor.shutdown(wait=False, cancel_futures=True)
    lo, hi_ci = wilson_interval(errors, trials)
    return SimResult(
        trials=trials,
        errors=errors,
        pe_hat=errors / trials,
        ci95=(lo, hi_ci),
        wall_time=time.perf_counter() - start,
        level_errors=tuple(level_counts) if n_levels else None,
    )


def run_code_sim(code: PolarCode, sigma: float, config: TrialConfig) -> SimResult:
    """Block-error rate of one polar code on the folded binary channel.

    Each trial draws fresh information bits, encodes, sends every code bit
    through the channel, decodes from the exact observation likelihoods,
    and scores a block error on any information-bit mismatch.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = code.n

    def one_trial(index: int) -> int:
        rng = _trial_rng(config.seed, index)
        info = rng.integers(0, 2, size=code.k, dtype=np.uint8)
        x = encode(code, info)
        y = sample_observation(x, sigma, rng.standard_normal(n))
        info_hat, _ = sc_decode(code, llr(y, sigma))
        return 0 if not np.array_equal(info_hat, info) else -1

    return _run_trials(one_trial, config, n_levels=0)


def run_lattice_sim(
    lattice: ConstructionDLattice, sigma: float, config: TrialConfig
) -> SimResult:
    """Block-error rate of multistage decoding under Gaussian noise.

    Trials transmit random codewords at every level (never the all-zero
    word) with a zero integer part, add noise, and score a block error on
    any coordinate mismatch of the decoded point.  The first level whose
    decision differs is recorded, the integer level last.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    n = lattice.n
    n_levels = len(lattice.codes) + 1

    def one_trial(index: int) -> int:
        rng = _trial_rng(config.seed, index)
        sent = []
        point = np.zeros(n, dtype=np.int64)
        for lvl, code in enumerate(lattice.codes):
            info = rng.integers(0, 2, size=code.k, dtype=np.uint8)
            word = encode(code, info)
            sent.append(word)
            point += (1 << lvl) * word.astype(np.int64)
        y = point + sigma * rng.standard_normal(n)
        result = multistage_decode(lattice, y, sigma)
        if np.array_equal(result.point, point):
            return -1
        for lvl, word in enumerate(sent):
            if not np.array_equal(result.level_codewords[lvl], word):
                return lvl
        return n_levels - 1

    return _run_trials(one_trial, config, n_levels=n_levels)


@dataclass(frozen=True)
class RunRecord:
    """One simulated operating point, with everything a report row needs."""

    vnr_db: float
    sigma: float
    n: int
    seed: int
    result: SimResult


def sigma_for_vnr(lattice: ConstructionDLattice, point_db: float) -> float:
    """Noise level that puts the lattice at the requested volume-to-noise
    ratio.  At 0 dB this is V^(1/N) / sqrt(2 pi e)."""
    if not math.isfinite(point_db):
        raise ValueError("VNR point must be finite")
    ratio = 10.0 ** (point_db / 10.0)
    vol_per_dim = 2.0 ** (log2_volume(lattice) / lattice.n)
    return vol_per_dim / math.sqrt(2.0 * math.pi * math.e * ratio)


def sweep_vnr(
    lattice: ConstructionDLattice, vnr_points_db, config: TrialConfig
) -> list[RunRecord]:
    """Simulate the lattice across a list of VNR points (dB).

    Every point reuses the same base seed, so points share common random
    numbers; the error-rate trend across increasing VNR should fall, and a
    rise beyond confidence-interval overlap triggers a warning.
    """
    records = []
    for point_db in vnr_points_db:
        sigma = sigma_for_vnr(lattice, float(point_db))
        result = run_lattice_sim(lattice, sigma, config)
        records.append(
            RunRecord(
                vnr_db=float(point_db),
                sigma=sigma,
                n=lattice.n,
                seed=config.seed,
                result=result,
            )
        )
    ordered = sorted(records, key=lambda rec: rec.vnr_db)
    for prev, nxt in zip(ordered, ordered[1:]):
        if nxt.result.ci95[0] > prev.result.ci95[1]:
            warnings.warn(
                f"block-error rate rose from {prev.result.pe_hat:.3e} at "
                f"{prev.vnr_db:g} dB to {nxt.result.pe_hat:.3e} at "
                f"{nxt.vnr_db:g} dB beyond CI overlap",
                stacklevel=2,
            )
    return records


def single_record(
    lattice: ConstructionDLattice, sigma: float, config: TrialConfig
) -> RunRecord:
    """Run one lattice simulation and wrap it as a report row."""
    result = run_lattice_sim(lattice, sigma, config)
    return RunRecord(
        vnr_db=vnr_db(lattice, sigma),
        sigma=sigma,
        n=lattice.n,
        seed=config.seed,
        result=result,
    )


def _row_fields(rec: RunRecord):
    return (
        repr(float(rec.vnr_db)),
        repr(float(rec.sigma)),
        str(rec.n),
        str(rec.result.trials),
        str(rec.result.errors),
        repr(float(rec.result.pe_hat)),
        repr(float(rec.result.ci95[0])),
        repr(float(rec.result.ci95[1])),
        str(rec.seed),
    )


def emit_report(records, format: str, path: str) -> None:
    """Write run records to ``path`` as CSV or JSON.

    Floats are rendered with shortest round-trip precision, so identical
    inputs produce byte-identical files.  Wall time is not serialized.
    """
    if format == "csv":
        lines = [CSV_HEADER]
        lines.extend(",".join(_row_fields(rec)) for rec in records)
        payload = "\n".join(lines) + "\n"
    elif format == "json":
        names = CSV_HEADER.split(",")
        rows = [
            {name: _parse_field(name, field) for name, field in zip(names, _row_fields(rec))}
            for rec in records
        ]
        payload = json.dumps({"results": rows}, indent=2) + "\n"
    else:
        raise ValueError(f"unknown report format {format!r}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _parse_field(name: str, text: str):
    if name in ("n", "trials", "errors", "seed"):
        return int(text)
    return float(text)


def read_report(path: str) -> list[RunRecord]:
    """Parse a CSV report back into run records.

    Wall time and per-level attribution are not serialized; they come back
    as zero and None.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [line.rstrip("\n") for line in fh if line.strip()]
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} is not a simulation report (bad header)")
    names = CSV_HEADER.split(",")
    records = []
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(names):
            raise ValueError(f"{path}: malformed row {line!r}")
        row = {name: _parse_field(name, text) for name, text in zip(names, parts)}
        result = SimResult(
            trials=row["trials"],
            errors=row["errors"],
            pe_hat=row["pe_hat"],
            ci95=(row["ci_lo"], row["ci_hi"]),
            wall_time=0.0,
        )
        records.append(
            RunRecord(
                vnr_db=row["vnr_db"],
                sigma=row["sigma"],
                n=row["n"],
                seed=row["seed"],
                result=result,
            )
        )
    return records
