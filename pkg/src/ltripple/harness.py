"""Monte Carlo experiments: overhead, block error rate, sweeps, ripple traces.

Every trial gets its own seed derived from ``(master_seed, trial_index)``, so
results do not depend on how trials are split across worker processes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernel
from .degree_dist import DegreeDistribution, RsdParams, ideal_soliton, load_distribution, robust_soliton
from .designer import DesignSolution, RippleTarget, design
from .errors import InvalidParameter

DEFAULT_SEED = 20100
DEFAULT_GRID = tuple(round(0.01 * i, 2) for i in range(51))
SWEEP_TRIALS = 5000
BER_TRIALS = 100_000


@dataclass(frozen=True)
class DistSource:
    """Where an experiment's degree distribution comes from.

    kind is one of ``isd``, ``rsd`` (params c, delta), ``designed``
    (params c1, c2) or ``file`` (path).
    """

    kind: str
    a: float | None = None
    b: float | None = None
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("isd", "rsd", "designed", "file"):
            raise InvalidParameter(f"unknown distribution kind {self.kind!r}")
        if self.kind in ("rsd", "designed") and (self.a is None or self.b is None):
            raise InvalidParameter(f"{self.kind} needs two parameters")
        if self.kind == "file" and not self.path:
            raise InvalidParameter("file source needs a path")

    @classmethod
    def rsd(cls, c, delta):
        return cls("rsd", float(c), float(delta))

    @classmethod
    def designed(cls, c1, c2):
        return cls("designed", float(c1), float(c2))

    @property
    def label(self) -> str:
        if self.kind == "rsd":
            return f"rsd(c={self.a:g},delta={self.b:g})"
        if self.kind == "designed":
            return f"designed(c1={self.a:g},c2={self.b:g})"
        if self.kind == "file":
            return f"file({self.path})"
        return "isd"

    def build(self, k: int) -> DegreeDistribution:
        if self.kind == "isd":
            return ideal_soliton(k)
        if self.kind == "rsd":
            return robust_soliton(k, RsdParams(self.a, self.b))
        if self.kind == "designed":
            return cached_design(k, self.a, self.b).distribution
        dist = load_distribution(self.path)
        if dist.k != k:
            raise InvalidParameter(f"{self.path} is for k={dist.k}, experiment has k={k}")
        return dist


@lru_cache(maxsize=256)
def cached_design(k: int, c1: float, c2: float) -> DesignSolution:
    return design(RippleTarget(k, c1, c2))


@dataclass(frozen=True)
class ExperimentConfig:
    k: int
    source: DistSource
    trials: int = SWEEP_TRIALS
    seed: int = DEFAULT_SEED
    overhead_grid: tuple[float, ...] = DEFAULT_GRID
    cap_multiplier: float = 3.0
    discipline: str = "fifo"

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if self.trials < 1:
            raise InvalidParameter(f"trials must be >= 1, got {self.trials}")
        if any(a < 0 for a in self.overhead_grid):
            raise InvalidParameter("overhead grid values must be >= 0")
        if not self.cap_multiplier > 1:
            raise InvalidParameter(f"cap multiplier must be > 1, got {self.cap_multiplier}")
        if self.discipline not in _kernel.DISCIPLINE_CODES:
            raise InvalidParameter(f"unknown ripple discipline {self.discipline!r}")

    @property
    def cap(self) -> int:
        return math.ceil(self.cap_multiplier * self.k)

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def trial_seeds(master: int, start: int, stop: int) -> np.ndarray:
    """Per-trial 32-bit seeds, a pure function of (master, trial index)."""
    return np.array(
        [np.random.SeedSequence([master, i]).generate_state(1, np.uint32)[0] for i in range(start, stop)],
        dtype=np.int64,
    )


def _run_chunk(k, cdf, master, start, stop, cap, discipline):
    seeds = trial_seeds(master, start, stop)
    n_success = np.empty(stop - start, dtype=np.int64)
    ripple_sum = np.zeros(k + 1, dtype=np.int64)
    redundant = 0
    code = _kernel.DISCIPLINE_CODES[discipline]
    for i, s in enumerate(seeds):
        rip = np.zeros(k + 1, dtype=np.int64)
        n, _, red, _ = _kernel.decode_generated(k, cdf, int(s), cap, True, code, ripple_by_L=rip)
        n_success[i] = n
        ripple_sum += rip
        redundant += red
    return n_success, ripple_sum, redundant


def _chunks(trials, workers):
    size = max(1, math.ceil(trials / (4 * workers))) if workers > 1 else trials
    return [(i, min(i + size, trials)) for i in range(0, trials, size)]


def _map_trials(k, cdf, cfg: ExperimentConfig, workers: int):
    jobs = _chunks(cfg.trials, workers)
    args = [(k, cdf, cfg.seed, a, b, cfg.cap, cfg.discipline) for a, b in jobs]
    if workers <= 1:
        parts = [_run_chunk(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, *zip(*args)))
    n_success = np.concatenate([p[0] for p in parts])
    ripple_sum = np.sum([p[1] for p in parts], axis=0)
    redundant = int(sum(p[2] for p in parts))
    return n_success, ripple_sum, redundant


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    n_success: np.ndarray  # -1 marks a trial that hit the cap
    ripple_mean: np.ndarray  # mean ripple size after the step leaving L unprocessed
    redundant_total: int
    ber: np.ndarray = field(init=False)

    def __post_init__(self):
        self.ber = block_error_rate(self.n_success, self.config.k, self.config.overhead_grid)

    @property
    def k(self):
        return self.config.k

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.n_success < 0))

    @property
    def _ok(self):
        return self.n_success[self.n_success >= 0]

    @property
    def avg_overhead(self) -> float:
        ok = self._ok
        return float(ok.mean() / self.k) if ok.size else float("nan")

    @property
    def overhead_se(self) -> float:
        ok = self._ok
        if ok.size < 2:
            return float("nan")
        return float(ok.std(ddof=1) / math.sqrt(ok.size) / self.k)

    def ber_se(self) -> np.ndarray:
        n = self.n_success.size
        return np.sqrt(self.ber * (1 - self.ber) / n)

    def summary(self) -> dict:
        cfg = self.config
        return {
            "k": cfg.k,
            "source": cfg.source.label,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "cap": cfg.cap,
            "discipline": cfg.discipline,
            "config_hash": cfg.digest(),
            "avg_overhead": self.avg_overhead,
            "overhead_se": self.overhead_se,
            "failures_at_cap": self.n_failed,
            "redundant_total": self.redundant_total,
        }

    def ber_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "overhead", "ber", "ber_se"])
        for a, p, se in zip(self.config.overhead_grid, self.ber, self.ber_se()):
            w.writerow([repr(float(a)), repr(1.0 + float(a)), repr(float(p)), repr(float(se))])
        return buf.getvalue()

    def n_success_csv(self) -> str:
        return "trial,n_success\n" + "".join(f"{i},{int(n)}\n" for i, n in enumerate(self.n_success))


def block_error_rate(n_success: np.ndarray, k: int, grid) -> np.ndarray:
    """Fraction of trials not decodable from ``(1 + alpha) k`` symbols.

    Peeling success is monotone in the received set, so a trial decodes at
    alpha exactly when ``n_success <= floor((1 + alpha) k)``.  Cap failures
    count as errors everywhere.
    """
    n = np.asarray(n_success)
    failed = n < 0
    out = np.empty(len(grid))
    for i, a in enumerate(grid):
        budget = math.floor((1.0 + a) * k + 1e-9)  # 1.16 * 25 is 28.999999999999996
        out[i] = np.mean(failed | (n > budget))
    return out


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    dist = cfg.source.build(cfg.k)
    n_success, ripple_sum, redundant = _map_trials(cfg.k, dist.cdf, cfg, workers)
    return ExperimentResult(cfg, n_success, ripple_sum / cfg.trials, redundant)


@dataclass
class SweepResult:
    family: str
    axis1_name: str
    axis2_name: str
    axis1: list[float]
    axis2: list[float]
    avg_overhead: np.ndarray
    overhead_se: np.ndarray
    errors: dict = field(default_factory=dict)

    @property
    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.nanargmin(self.avg_overhead), self.avg_overhead.shape)
        return self.axis1[i], self.axis2[j]

    def to_csv(self) -> str:
        """Table-shaped CSV: one row per axis-1 value, one column per axis-2 value."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"{self.axis1_name}\\{self.axis2_name}"] + [repr(float(v)) for v in self.axis2])
        for i, a in enumerate(self.axis1):
            w.writerow([repr(float(a))] + [repr(float(v)) for v in self.avg_overhead[i]])
        return buf.getvalue()

    def cells_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.axis1_name, self.axis2_name, "avg_overhead", "overhead_se", "error"])
        for i, a in enumerate(self.axis1):
            for j, b in enumerate(self.axis2):
                w.writerow([repr(float(a)), repr(float(b)), repr(float(self.avg_overhead[i, j])),
                            repr(float(self.overhead_se[i, j])), self.errors.get((i, j), "")])
        return buf.getvalue()


def sweep(k, family, axis1, axis2, trials=SWEEP_TRIALS, seed=DEFAULT_SEED, workers=1, cap_multiplier=3.0) -> SweepResult:
    """Average overhead over a parameter grid; every cell reuses the same trial seeds."""
    if family not in ("designed", "rsd"):
        raise InvalidParameter(f"sweep family must be 'designed' or 'rsd', got {family!r}")
    if not axis1 or not axis2:
        raise InvalidParameter("sweep axes must be nonempty")
    names = ("c1", "c2") if family == "designed" else ("c", "delta")
    avg = np.full((len(axis1), len(axis2)), np.nan)
    se = np.full_like(avg, np.nan)
    errors = {}
    for i, a in enumerate(axis1):
        for j, b in enumerate(axis2):
            cfg = ExperimentConfig(k, DistSource(family, float(a), float(b)), trials, seed,
                                   overhead_grid=(0.0,), cap_multiplier=cap_multiplier)
            try:
                res = run_experiment(cfg, workers)
            except (InvalidParameter, RuntimeError) as exc:
                errors[(i, j)] = f"{type(exc).__name__}: {exc}"
                continue
            avg[i, j] = res.avg_overhead
            se[i, j] = res.overhead_se
    return SweepResult(family, *names, list(axis1), list(axis2), avg, se, errors)


def compare(ks, sources, trials=SWEEP_TRIALS, seed=DEFAULT_SEED, grid=DEFAULT_GRID, workers=1) -> list[ExperimentResult]:
    """Run every source at every k; results ordered by (k, source)."""
    out = []
    for k in ks:
        for src in sources:
            out.append(run_experiment(ExperimentConfig(k, src, trials, seed, tuple(grid)), workers))
    return out


def compare_csv(results: list[ExperimentResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    grid = results[0].config.overhead_grid if results else ()
    w.writerow(["k", "source", "avg_overhead", "overhead_se", "failures"] + [f"ber@{a:g}" for a in grid])
    for r in results:
        w.writerow([r.k, r.config.source.label, repr(r.avg_overhead), repr(r.overhead_se), r.n_failed]
                   + [repr(float(p)) for p in r.ber])
    return buf.getvalue()


@dataclass
class RippleTrajectory:
    mean_running: np.ndarray  # mean over trials still decoding at L
    mean_all: np.ndarray  # stalled trials counted with an empty ripple
    reached: np.ndarray  # number of trials that got down to L
    success_rate: float


def ripple_trajectory(k: int, dist: DegreeDistribution, n_symbols: int, trials: int, seed=DEFAULT_SEED) -> RippleTrajectory:
    """Ripple size by L (index 0..k) when decoding exactly ``n_symbols`` symbols in one batch."""
    total = np.zeros(k + 1, dtype=np.int64)
    reached = np.zeros(k + 1, dtype=np.int64)
    ok = 0
    Ls = np.arange(k + 1)
    for s in trial_seeds(seed, 0, trials):
        rip = np.zeros(k + 1, dtype=np.int64)
        n, _, _, processed = _kernel.decode_generated(k, dist.cdf, int(s), n_symbols, eager=False, ripple_by_L=rip)
        total += rip
        reached += Ls >= k - processed
        ok += n >= 0
    with np.errstate(invalid="ignore", divide="ignore"):
        running = np.where(reached > 0, total / np.maximum(reached, 1), np.nan)
    return RippleTrajectory(running, total / trials, reached, ok / trials)


def release_histogram(k: int, d: int, decodes: int, per_decode: int = 10, seed=DEFAULT_SEED):
    """Empirical distribution of the L at which degree-``d`` symbols are released.

    Each decode receives ``per_decode`` degree-``d`` symbols together with one
    degree-1 symbol for every input (in random order), so the decode always
    runs to completion and every tracked symbol is eventually reduced to
    degree one.  Returns ``counts[L]`` for L = 0..k.
    """
    if not 2 <= d <= k:
        raise InvalidParameter(f"need 2 <= d <= k, got d={d}")
    counts = np.zeros(k + 1, dtype=np.int64)
    n = k + per_decode
    degs = np.empty(n, dtype=np.int64)
    degs[:per_decode] = d
    degs[per_decode:] = 1
    offs = np.concatenate([[0], np.cumsum(degs)])
    rng = np.random.default_rng(np.random.SeedSequence([seed, k, d]))
    batch = 2000
    for start in range(0, decodes, batch):
        m = min(batch, decodes - start)
        # the d smallest of k iid uniforms index a uniform d-subset
        tracked = np.argpartition(rng.random((m, per_decode, k)), d - 1, axis=-1)[..., :d]
        background = rng.permuted(np.tile(np.arange(k), (m, 1)), axis=1)
        flat = np.concatenate([tracked.reshape(m, -1), background], axis=1).astype(np.int64)
        for row in flat:
            rel = np.full(n, -1, dtype=np.int64)
            res = _kernel.decode_given(k, degs, offs, row, release_L=rel)
            if res[0] < 0:
                raise RuntimeError("background decode failed; should be impossible")
            np.add.at(counts, rel[:per_decode], 1)
    return counts
