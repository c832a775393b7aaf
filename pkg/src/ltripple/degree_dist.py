"""Degree distributions: construction, sampling and file interchange.

A distribution over degrees 1..k is stored densely as ``mass[d - 1]``.
Files use a sparse JSON layout::

    {"k": 256, "entries": [{"d": 1, "p": 0.0534}, ...]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidParameter

# Constructors normalize to this tolerance; loaded files only need LOAD_TOL so
# that files written by other tools load despite float round-off.
BUILD_TOL = 1e-9
LOAD_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class DegreeDistribution:
    k: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=np.float64)
        if self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if mass.shape != (self.k,):
            raise InvalidParameter(f"mass must have length k={self.k}, got {mass.shape}")
        if np.any(~np.isfinite(mass)) or np.any(mass < 0):
            raise InvalidParameter("mass entries must be finite and nonnegative")
        total = mass.sum()
        if abs(total - 1.0) > LOAD_TOL:
            raise InvalidParameter(f"mass sums to {total!r}, not 1")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        cdf = np.cumsum(mass)
        cdf /= cdf[-1]
        cdf.setflags(write=False)
        object.__setattr__(self, "cdf", cdf)

    def __eq__(self, other):
        if not isinstance(other, DegreeDistribution):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.mass, other.mass)

    def __hash__(self):
        return hash((self.k, self.mass.tobytes()))

    def __getitem__(self, d: int) -> float:
        """Probability of degree ``d`` (1-based)."""
        if not 1 <= d <= self.k:
            return 0.0
        return float(self.mass[d - 1])

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.mass) + 1

    @property
    def mean_degree(self) -> float:
        return float(np.dot(np.arange(1, self.k + 1), self.mass))

    @classmethod
    def from_sparse(cls, k: int, entries: dict[int, float]) -> "DegreeDistribution":
        mass = np.zeros(k)
        for d, p in entries.items():
            mass[d - 1] = p
        return cls(k, mass)

    @classmethod
    def point_mass(cls, k: int, d: int) -> "DegreeDistribution":
        return cls.from_sparse(k, {d: 1.0})


def ideal_soliton(k: int) -> DegreeDistribution:
    if k < 1:
        raise InvalidParameter(f"k must be >= 1, got {k}")
    mass = np.empty(k)
    mass[0] = 1.0 / k
    d = np.arange(2, k + 1, dtype=np.float64)
    mass[1:] = 1.0 / (d * (d - 1.0))
    return DegreeDistribution(k, mass)


@dataclass(frozen=True)
class RsdParams:
    c: float
    delta: float

    def __post_init__(self):
        if not (self.c > 0 and self.delta > 0):
            raise InvalidParameter(f"RSD needs c > 0 and delta > 0, got {self}")


def rsd_spike(k: int, params: RsdParams) -> tuple[float, int]:
    """Return ``(S, spike_degree)`` for the Robust Soliton construction."""
    if k < 2:
        raise InvalidParameter(f"RSD needs k >= 2, got {k}")
    if params.delta >= k:
        raise InvalidParameter(f"delta={params.delta} >= k={k} makes S <= 0")
    S = params.c * math.log(k / params.delta) * math.sqrt(k)
    spike = math.ceil(k / S)
    if spike > k:
        raise InvalidParameter(f"spike degree {spike} lies outside 1..{k}")
    return S, spike


def robust_soliton(k: int, params: RsdParams) -> DegreeDistribution:
    S, spike = rsd_spike(k, params)
    rho = ideal_soliton(k).mass
    tau = np.zeros(k)
    d = np.arange(1, spike, dtype=np.float64)
    tau[: spike - 1] = S / (k * d)
    # ln(S/delta) < 0 is possible for delta >= 1; negative mass is clamped away
    tau[spike - 1] = max(S * math.log(S / params.delta) / k, 0.0)
    mu = rho + tau
    return DegreeDistribution(k, mu / mu.sum())


def sample_degree(dist: DegreeDistribution, rng: np.random.Generator) -> int:
    """Draw one degree by inverse-CDF lookup."""
    u = rng.random()
    return min(int(np.searchsorted(dist.cdf, u, side="right")) + 1, dist.k)


def sample_degrees(dist: DegreeDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    u = rng.random(size)
    return np.minimum(np.searchsorted(dist.cdf, u, side="right") + 1, dist.k)


def dumps(dist: DegreeDistribution) -> str:
    entries = [{"d": int(d), "p": float(dist.mass[d - 1])} for d in dist.support]
    # json writes floats with repr(), i.e. 17 significant digits
    return json.dumps({"k": dist.k, "entries": entries}, indent=1) + "\n"


def loads(text: str) -> DegreeDistribution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "k" not in doc or "entries" not in doc:
        raise FormatError("expected an object with 'k' and 'entries'")
    k = doc["k"]
    if not isinstance(k, int) or isinstance(k, bool) or k < 1:
        raise FormatError(f"k must be a positive integer, got {k!r}")
    entries = doc["entries"]
    if not isinstance(entries, list) or not entries:
        raise FormatError("entries must be a nonempty list")
    mass = np.zeros(k)
    seen = set()
    for i, entry in enumerate(entries):
        try:
            d, p = entry["d"], float(entry["p"])
        except (TypeError, KeyError, ValueError) as exc:
            raise FormatError(f"entry {i}: expected {{'d': int, 'p': float}}, got {entry!r}") from exc
        if not isinstance(d, int) or isinstance(d, bool) or not 1 <= d <= k:
            raise FormatError(f"entry {i}: degree {d!r} outside 1..{k}")
        if d in seen:
            raise FormatError(f"entry {i}: degree {d} listed twice")
        if not math.isfinite(p) or p < 0:
            raise FormatError(f"entry {i}: degree {d} has invalid probability {p!r}")
        seen.add(d)
        mass[d - 1] = p
    total = mass.sum()
    if abs(total - 1.0) > LOAD_TOL:
        raise FormatError(f"probabilities sum to {total!r}, outside 1 +/- {LOAD_TOL}")
    return DegreeDistribution(k, mass)


def save_distribution(dist: DegreeDistribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(dist))


def load_distribution(path) -> DegreeDistribution:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
