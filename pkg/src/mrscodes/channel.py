"""Seeded erasure-channel trials, admissibility estimates and capacity sweeps."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from . import exact
from .codec import DecoderSession
from .codes import default_warmup, descriptor, slot_length, spec_to_json, symbol_row
from .gf2 import parity
from .prf import derive, prf_int

MODES = ("random", "fixed")


@dataclass(frozen=True)
class ChannelSpec:
    """Per-transmitter survival probability c_k and symbols per time step s_k.

    ``mode="random"`` erases each symbol independently; ``mode="fixed"``
    keeps exactly floor(j*c) of the first j symbols, a constant-rate link.
    """

    capacities: tuple
    symbol_rates: tuple | None = None
    mode: str = "random"

    def __post_init__(self):
        caps = tuple(exact.num(c) for c in self.capacities)
        if any(not 0 <= c <= 1 for c in caps):
            raise ValueError("capacities must lie in [0, 1]")
        s = tuple(int(x) for x in self.symbol_rates) if self.symbol_rates is not None else (1,) * len(caps)
        if len(s) != len(caps):
            raise ValueError("one symbol rate per transmitter")
        if any(x < 1 for x in s):
            raise ValueError("symbol rates must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "symbol_rates", s)

    @property
    def d(self) -> int:
        return len(self.capacities)

    def link_rates(self) -> tuple:
        return tuple(s * c for s, c in zip(self.symbol_rates, self.capacities))

    def to_json(self) -> dict:
        return {"capacities": [exact.to_json(c) for c in self.capacities],
                "symbol_rates": list(self.symbol_rates), "mode": self.mode}

    @classmethod
    def from_json(cls, obj) -> "ChannelSpec":
        if "capacities" not in obj:
            raise ValueError("channel spec is missing field 'capacities'")
        return cls(tuple(exact.from_json(c) for c in obj["capacities"]),
                   obj.get("symbol_rates"), obj.get("mode", "random"))


@dataclass(frozen=True)
class TrialConfig:
    n: int
    epsilon: float = 0.05
    seed: int = 0
    warmup: int | None = None
    checkpoints: tuple = (Fraction(1, 4), Fraction(1, 2), Fraction(1))

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("N must be >= 1")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.warmup is not None and self.warmup < 0:
            raise ValueError("warmup must be non-negative")

    def checkpoint_steps(self) -> list[int]:
        return sorted({max(1, math.floor(Fraction(f) * self.n)) for f in self.checkpoints})


@dataclass
class TrialResult:
    capacities: tuple
    symbol_rates: tuple
    seed: int
    n: int
    warmup_steps: int
    message_len: int
    received_counts: tuple
    trajectory: list  # (step after warmup, decoded prefix)
    decoded_prefix: int
    prefix_after_warmup: int
    block_times: dict  # block id -> step (after warmup, <= 0 inside warmup)
    resolve_step: np.ndarray = field(repr=False)  # per variable; -1 = never
    message: np.ndarray = field(repr=False)  # uint8 bits

    @property
    def final_rate(self) -> float:
        return (self.decoded_prefix - self.prefix_after_warmup) / self.n

    @property
    def decoded_rate(self) -> float:
        """Bits resolved after warmup per step, counting bits past a stalled prefix."""
        rs = self.resolve_step
        return int(np.count_nonzero(rs > self.warmup_steps)) / self.n

    def errors(self, rate, epsilon, t: int | None = None) -> tuple[int, int]:
        """(bits required, bits wrong) at step ``t``: bits m <= t(r - eps)
        that are unresolved and would be guessed wrong (guess is 0)."""
        t = self.n if t is None else t
        need = max(0, math.floor(t * (Fraction(exact.json_num(rate)) - Fraction(exact.json_num(epsilon)))))
        need = min(need, self.message_len)
        if need == 0:
            return 0, 0
        rs = self.resolve_step[:need]
        msg = self.message[:need]
        ok = (rs >= 0) & (rs <= t + self.warmup_steps)
        return need, int(np.count_nonzero(~ok & (msg == 1)))


def trial_seed(seed: int, trial: int) -> int:
    return seed + trial


def _survivors(ch: ChannelSpec, k: int, count: int, warm: int, seed: int) -> np.ndarray:
    c = ch.capacities[k]
    out = np.ones(count, dtype=bool)
    m = count - warm
    if m <= 0:
        return out
    if ch.mode == "random":
        rng = np.random.Generator(np.random.PCG64(derive(seed, "erasure", k + 1)))
        u = rng.random(count)[warm:]
        out[warm:] = u < float(c)
    else:
        f = Fraction(c)
        j = np.arange(1, m + 1, dtype=object)
        kept = (j * f.numerator) // f.denominator
        prev = ((j - 1) * f.numerator) // f.denominator
        out[warm:] = np.asarray(kept > prev, dtype=bool)
    return out


def run_trial(spec, ch: ChannelSpec, cfg: TrialConfig, record_every: int | None = None) -> TrialResult:
    if spec.d != ch.d:
        raise ValueError(f"code has {spec.d} transmitters but channel has {ch.d}")
    sub_rates = getattr(spec, "symbol_rates", None)
    if sub_rates is not None and tuple(sub_rates) != ch.symbol_rates:
        raise ValueError("channel symbol rates must match the code's symbol rates")
    seed = cfg.seed
    q_key = derive(seed, "Q")
    W = default_warmup(spec) if cfg.warmup is None else cfg.warmup
    warm = W * slot_length(spec)
    T = warm + cfg.n
    s = ch.symbol_rates
    d = ch.d
    K = getattr(spec, "K", 1)
    counts = [T * s[k] for k in range(d)]
    # long enough for any rate a receiver can ask for (one bit per symbol),
    # so bits the code never reaches count as undecoded rather than absent
    reach = max(spec.max_block(k + 1, counts[k]) for k in range(d))
    message_len = K * max(reach, -(-sum(counts) // K))
    msg_int = prf_int(derive(seed, "message"), message_len)
    active = [k for k in range(d) if ch.capacities[k] > 0]
    # plain lists: per-element indexing in the hot loop is faster than numpy
    alive = {k: _survivors(ch, k, counts[k], warm * s[k], seed).tolist() for k in active}

    dec = DecoderSession(spec, q_key, message_len)
    solver = dec.solver
    resolve_step = np.full(message_len, -1, dtype=np.int64)
    received = [0] * d
    checkpoints = set(cfg.checkpoint_steps())
    stride = record_every or max(1, cfg.n // 100)
    trajectory = []
    block_times = {}
    prefix_w = 0
    order = [(j, k) for j in range(max(s)) for k in active if j < s[k]]

    for t in range(1, T + 1):
        for j, k in order:
            i = (t - 1) * s[k] + j + 1
            if not alive[k][i - 1]:
                continue
            received[k] += 1
            row = symbol_row(spec, q_key, k + 1, i)
            done = dec.ingest_row(row, parity(row & msg_int), (k + 1, i))
            if solver.last_resolved:
                resolve_step[solver.last_resolved] = t
                for b in done:
                    block_times[b] = t - warm
        if t == warm:
            prefix_w = dec.decoded_prefix
        tt = t - warm
        if tt > 0 and (tt % stride == 0 or tt in checkpoints or tt == cfg.n):
            trajectory.append((tt, dec.decoded_prefix))

    bits = np.frombuffer(msg_int.to_bytes((message_len + 7) // 8 or 1, "little"), dtype=np.uint8)
    message = np.unpackbits(bits, bitorder="little")[:message_len]
    return TrialResult(ch.capacities, ch.symbol_rates, seed, cfg.n, warm, message_len,
                       tuple(received), trajectory, dec.decoded_prefix, prefix_w,
                       block_times, resolve_step, message)


@dataclass
class AdmissibilityVerdict:
    passed: bool
    rate: object
    epsilon: float
    trials: int
    error_rate: float
    ci: tuple
    checkpoints: list  # (step, bits, errors, frequency)
    mean_final_rate: float
    results: list = field(repr=False, default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "rate": exact.to_json(self.rate),
            "epsilon": self.epsilon,
            "trials": self.trials,
            "error_rate": self.error_rate,
            "wilson_ci": list(self.ci),
            "checkpoints": [{"step": t, "bits": b, "errors": e, "frequency": f}
                            for t, b, e, f in self.checkpoints],
            "mean_final_rate": self.mean_final_rate,
        }


def _run_job(job):
    spec, ch, cfg = job
    return run_trial(spec, ch, cfg)


def run_trials(jobs: list, workers: int = 1) -> list[TrialResult]:
    """Run ``(spec, channel, config)`` jobs; results come back in job order."""
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def judge(results: Sequence[TrialResult], rate, cfg: TrialConfig) -> AdmissibilityVerdict:
    rows = []
    passed = True
    for t in cfg.checkpoint_steps():
        need = errs = 0
        for res in results:
            b, e = res.errors(rate, cfg.epsilon, t)
            need += b
            errs += e
        freq = errs / need if need else 0.0
        passed &= freq <= cfg.epsilon
        rows.append((t, need, errs, freq))
    _, need, errs, freq = rows[-1]
    if need:
        ci = binomtest(errs, need).proportion_ci(confidence_level=0.95, method="wilson")
        ci = (float(ci.low), float(ci.high))
    else:
        ci = (0.0, 1.0)
    mean_rate = float(np.mean([r.final_rate for r in results])) if results else 0.0
    return AdmissibilityVerdict(bool(passed), exact.num(rate) if not isinstance(rate, float) else rate,
                                cfg.epsilon, len(results), freq, ci, rows, mean_rate, list(results))


def estimate_admissibility(spec, ch: ChannelSpec, rate, cfg: TrialConfig, trials: int,
                           workers: int = 1) -> AdmissibilityVerdict:
    """PASS iff at every checkpoint t the pooled frequency of wrong bits
    among m <= t(r - eps) is at most eps."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(spec, ch, _with_seed(cfg, trial_seed(cfg.seed, j))) for j in range(trials)]
    return judge(run_trials(jobs, workers), rate, cfg)


def _with_seed(cfg: TrialConfig, seed: int) -> TrialConfig:
    return TrialConfig(cfg.n, cfg.epsilon, seed, cfg.warmup, cfg.checkpoints)


@dataclass
class SweepResult:
    grid: list
    trials: int
    results: list  # results[point][trial]
    coupled: bool

    def __post_init__(self):
        if not self.grid:
            raise ValueError("sweep grid is empty")

    def mean(self, p: int) -> float:
        return float(np.mean([r.final_rate for r in self.results[p]]))

    def std(self, p: int) -> float:
        return float(np.std([r.final_rate for r in self.results[p]], ddof=1)) if self.trials > 1 else 0.0


def sweep(spec, grid: Sequence[ChannelSpec], cfg: TrialConfig, trials: int,
          coupled: bool = True, workers: int = 1) -> SweepResult:
    """Coupled mode reuses trial seeds across grid points, so every point
    thresholds the same uniforms and curves are monotone per seed."""
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    if any(g.d != grid[0].d for g in grid):
        raise ValueError("grid points have different dimensions")
    jobs = []
    for p, ch in enumerate(grid):
        for j in range(trials):
            s = trial_seed(cfg.seed, j) if coupled else trial_seed(cfg.seed, p * trials + j)
            jobs.append((spec, ch, _with_seed(cfg, s)))
    flat = run_trials(jobs, workers)
    res = [flat[p * trials:(p + 1) * trials] for p in range(len(grid))]
    return SweepResult(grid, trials, res, coupled)


# ---------------------------------------------------------------- CSV output


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(exact.to_json(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def trial_rows(results: Sequence[TrialResult], rate=None, epsilon=0.05, point: int | None = None) -> list[list[str]]:
    rows = []
    for r in results:
        if rate is not None:
            need, err = r.errors(rate, epsilon)
            err_cols = [str(err), repr(err / need if need else 0.0)]
        else:
            err_cols = ["", ""]
        head = [] if point is None else [str(point)]
        rows.append(head + [_fmt(c) for c in r.capacities] + [str(s) for s in r.symbol_rates]
                    + [str(r.seed), str(r.n), str(r.decoded_prefix), repr(r.final_rate)] + err_cols)
    return rows


def trial_header(d: int, with_point: bool = False) -> list[str]:
    return ((["point"] if with_point else []) + [f"c_{k}" for k in range(1, d + 1)]
            + [f"s_{k}" for k in range(1, d + 1)]
            + ["seed", "N", "decoded_prefix", "final_rate", "err_bits", "err_rate"])


def to_csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def sweep_csvs(res: SweepResult, rate=None, epsilon=0.05) -> tuple[str, str]:
    d = res.grid[0].d
    rows = []
    for p, rs in enumerate(res.results):
        rows += trial_rows(rs, rate, epsilon, point=p)
    per_trial = to_csv(trial_header(d, with_point=True), rows)
    agg = [[str(p)] + [_fmt(c) for c in ch.capacities] + [str(s) for s in ch.symbol_rates]
           + [str(res.trials), repr(res.mean(p)), repr(res.std(p))]
           for p, ch in enumerate(res.grid)]
    head = (["point"] + [f"c_{k}" for k in range(1, d + 1)] + [f"s_{k}" for k in range(1, d + 1)]
            + ["trials", "mean_final_rate", "std_final_rate"])
    return per_trial, to_csv(head, agg)


def describe(spec) -> dict:
    return spec_to_json(spec)


__all__ = [
    "ChannelSpec", "TrialConfig", "TrialResult", "AdmissibilityVerdict", "SweepResult",
    "run_trial", "run_trials", "estimate_admissibility", "judge", "sweep", "trial_seed",
    "trial_rows", "trial_header", "to_csv", "sweep_csvs", "descriptor",
]
