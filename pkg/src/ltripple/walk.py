"""Random-walk models of the ripple size.

The symmetric walk moves +1/-1 with equal probability.  The biased walk adds
redundancy: with ``p = clip(p_r - p_r0, 0, 1)`` where ``p_r = (R - 1) / L`` and
``p_r0 = (r0 - 1) / k``, a step is +1 w.p. (1-p)^2/2, 0 w.p. p(1-p) and -1
w.p. 1/2 + p^2/2.  The walk starts at ``R(k) = r0`` and takes one step per
processed input, L = k..1, ending at ``R(0)``.  The quantity of interest is
the RMS of ``Delta_L = R(0) - R(L)`` as a function of the number of remaining
steps ``L``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter

BARRIERS = ("none", "absorb", "clamp")


def step_probabilities(p):
    """(P[+1], P[0], P[-1]) for redundancy bias ``p``; vectorized."""
    p = np.asarray(p, dtype=np.float64)
    return 0.5 * (1 - p) ** 2, p * (1 - p), 0.5 + 0.5 * p**2


def redundancy_bias(R, L, k: int, r0: int):
    """``p_r' = clip((R - 1) / L - (r0 - 1) / k, 0, 1)``; zero at the start (R = r0, L = k)."""
    return np.clip((np.asarray(R, dtype=np.float64) - 1) / L - (r0 - 1) / k, 0.0, 1.0)


@dataclass(frozen=True)
class WalkConfig:
    k: int
    r0: int | None = None
    barrier: str = "clamp"
    trials: int = 10_000

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if self.r0 is not None and self.r0 < 1:
            raise InvalidParameter(f"r0 must be >= 1, got {self.r0}")
        if self.trials < 1:
            raise InvalidParameter(f"trials must be >= 1, got {self.trials}")
        if self.barrier not in BARRIERS:
            raise InvalidParameter(f"barrier must be one of {BARRIERS}, got {self.barrier!r}")

    @property
    def start(self) -> int:
        return self.r0 if self.r0 is not None else math.ceil(math.sqrt(self.k))


@dataclass
class WalkResult:
    L: np.ndarray  # remaining steps, ascending
    rms: np.ndarray  # sqrt(mean(Delta_L^2)) for each L
    mean: np.ndarray  # mean(Delta_L)
    trials: int


def walk_symmetric(n_steps: int, trials: int, rng: np.random.Generator, chunk: int = 20_000) -> WalkResult:
    """RMS displacement of the +/-1 walk after N = 1..n_steps steps."""
    sum_sq = np.zeros(n_steps)
    sum_ = np.zeros(n_steps)
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        pos = np.zeros(m, dtype=np.int64)
        for n in range(n_steps):
            pos += 2 * rng.integers(0, 2, size=m, dtype=np.int8) - 1
            sum_sq[n] += np.dot(pos, pos)
            sum_[n] += pos.sum()
        done += m
    return WalkResult(np.arange(1, n_steps + 1), np.sqrt(sum_sq / trials), sum_ / trials, trials)


def simulate_biased(cfg: WalkConfig, rng: np.random.Generator, bias: bool = True) -> np.ndarray:
    """Trajectories ``R[trial, L]`` for L = 0..k (column k is the start r0).

    ``bias=False`` forces ``p_r' = 0`` and gives the symmetric walk.
    """
    k, r0 = cfg.k, cfg.start
    R = np.empty((cfg.trials, k + 1), dtype=np.int64)
    R[:, k] = r0
    cur = np.full(cfg.trials, r0, dtype=np.int64)
    alive = np.ones(cfg.trials, dtype=bool)
    for L in range(k, 0, -1):
        if bias:
            r_eval = np.maximum(cur, 1) if cfg.barrier == "clamp" else cur
            p = redundancy_bias(r_eval, L, k, r0)
        else:
            p = np.zeros(cfg.trials)
        up, stay, _ = step_probabilities(p)
        u = rng.random(cfg.trials)
        step = np.where(u < up, 1, np.where(u < up + stay, 0, -1))
        if cfg.barrier == "absorb":
            step = np.where(alive, step, 0)
        cur = cur + step
        if cfg.barrier == "absorb":
            alive &= cur > 0
        R[:, L - 1] = cur
    return R


def walk_biased(cfg: WalkConfig, rng: np.random.Generator, bias: bool = True) -> WalkResult:
    """RMS of ``R(0) - R(L)`` against the number of remaining steps L = 1..k."""
    R = simulate_biased(cfg, rng, bias=bias)
    delta = R[:, [0]] - R[:, 1:]
    L = np.arange(1, cfg.k + 1)
    return WalkResult(L, np.sqrt(np.mean(delta.astype(np.float64) ** 2, axis=0)), delta.mean(axis=0), cfg.trials)


@dataclass(frozen=True)
class PowerFit:
    c1: float
    c2: float
    fit_error: float

    def __call__(self, L):
        return self.c1 * np.asarray(L, dtype=np.float64) ** (1.0 / self.c2)


def _check_curve(L, rms):
    L = np.asarray(L, dtype=np.float64)
    rms = np.asarray(rms, dtype=np.float64)
    if L.shape != rms.shape or L.size < 10:
        raise InvalidParameter("need at least 10 matching (L, rms) points")
    if np.any(L <= 0) or np.any(rms <= 0):
        raise InvalidParameter("power-law fit needs strictly positive L and rms")
    return np.log(L), np.log(rms)


def fit_power_law(L, rms) -> PowerFit:
    """Least-squares fit of ``log rms = log c1 + log(L) / c2``.

    ``fit_error`` is the residual sum of squares in log space.
    """
    x, y = _check_curve(L, rms)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    return PowerFit(float(np.exp(intercept)), float(1.0 / slope), float(resid @ resid))


def fit_sqrt_law(L, rms) -> PowerFit:
    """Best ``c * sqrt(L)`` in the same log-space metric as :func:`fit_power_law`."""
    x, y = _check_curve(L, rms)
    intercept = float(np.mean(y - 0.5 * x))
    resid = y - (intercept + 0.5 * x)
    return PowerFit(float(np.exp(intercept)), 2.0, float(resid @ resid))


def fit_window(k: int) -> tuple[int, int]:
    """Range of L used for fits: [k/100, k]."""
    return max(1, k // 100), k
