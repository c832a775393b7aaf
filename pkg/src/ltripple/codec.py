"""LT encoder and an instrumented peeling decoder.

This is the reference implementation: readable, supports payloads and all
ripple disciplines, and records a full per-step trace.  Monte Carlo volume
runs go through :mod:`ltripple._kernel`, which is checked against this module.
"""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .degree_dist import DegreeDistribution, sample_degree
from .errors import InvalidParameter, SessionError

DISCIPLINES = ("fifo", "lifo", "random")


@dataclass(frozen=True)
class EncodedSymbol:
    neighbors: tuple[int, ...]
    payload: bytes | None = None

    @property
    def degree(self) -> int:
        return len(self.neighbors)


def iter_encode(k: int, dist: DegreeDistribution, rng: np.random.Generator, data=None) -> Iterator[EncodedSymbol]:
    """Endless stream of encoded symbols.

    ``data`` is an optional ``(k, block_len)`` uint8 array; without it symbols
    carry neighbour sets only.  The random draws are the same either way.
    """
    if dist.k != k:
        raise InvalidParameter(f"distribution is over k={dist.k}, encoder has k={k}")
    if data is not None:
        data = np.asarray(data, dtype=np.uint8)
        if data.ndim != 2 or data.shape[0] != k:
            raise InvalidParameter(f"data must have shape (k, block_len), got {data.shape}")
    while True:
        d = sample_degree(dist, rng)
        nbrs = tuple(int(i) for i in rng.choice(k, size=d, replace=False))
        payload = None
        if data is not None:
            payload = np.bitwise_xor.reduce(data[list(nbrs)], axis=0).tobytes()
        yield EncodedSymbol(nbrs, payload)


def encode(k: int, dist: DegreeDistribution, rng: np.random.Generator, count: int, data=None) -> list[EncodedSymbol]:
    stream = iter_encode(k, dist, rng, data)
    return [next(stream) for _ in range(count)]


@dataclass(frozen=True)
class StepRecord:
    L: int  # unprocessed inputs left after this step
    R: int  # ripple size after this step's releases
    releases: int
    redundant: int


@dataclass
class DecoderTrace:
    k: int
    steps: list[StepRecord] = field(default_factory=list)
    consumed: int = 0
    redundant: int = 0
    success: bool = False
    n_success: int | None = None
    initial_ripple: int = 0
    symbols: list[EncodedSymbol] = field(default_factory=list)
    recovered_data: np.ndarray | None = None

    def ripple_by_L(self) -> np.ndarray:
        """Ripple size indexed by L = 0..k; L values never reached stay 0."""
        out = np.zeros(self.k + 1, dtype=np.int64)
        out[self.k] = self.initial_ripple
        for s in self.steps:
            out[s.L] = s.R
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "L", "R", "releases", "redundant"])
            for i, s in enumerate(self.steps, start=1):
                w.writerow([i, s.L, s.R, s.releases, s.redundant])


class DecoderState:
    """Mutable peeling-decoder state for one session.

    Input indices move unrecovered -> ripple (recovered, unprocessed) ->
    processed.  Buffered symbols only ever reference unprocessed inputs.
    """

    def __init__(self, k: int, block_len: int | None = None, discipline: str = "fifo", rng=None):
        if k < 1:
            raise InvalidParameter(f"k must be >= 1, got {k}")
        if discipline not in DISCIPLINES:
            raise InvalidParameter(f"unknown ripple discipline {discipline!r}")
        if discipline == "random" and rng is None:
            raise InvalidParameter("random ripple discipline needs an rng")
        self.k = k
        self.block_len = block_len
        self.discipline = discipline
        self.rng = rng
        self.recovered = np.zeros(k, dtype=bool)
        self.processed = np.zeros(k, dtype=bool)
        self.data = None if block_len is None else np.zeros((k, block_len), dtype=np.uint8)
        self.ripple: deque[int] = deque()
        self.buffer: dict[int, list] = {}
        self.incident: list[set[int]] = [set() for _ in range(k)]
        self.n_recovered = 0
        self.n_processed = 0
        self._next_id = 0
        self.trace = DecoderTrace(k)

    @property
    def L(self) -> int:
        return self.k - self.n_processed

    @property
    def done(self) -> bool:
        return self.n_recovered == self.k

    def _payload(self, symbol: EncodedSymbol):
        if self.block_len is None:
            return None
        if symbol.payload is None or len(symbol.payload) != self.block_len:
            raise SessionError(f"payload must be {self.block_len} bytes")
        return np.frombuffer(symbol.payload, dtype=np.uint8).copy()

    def _recover(self, i: int, payload) -> None:
        self.recovered[i] = True
        self.n_recovered += 1
        if payload is not None:
            self.data[i] = payload
        self.ripple.append(i)

    def push(self, symbol: EncodedSymbol) -> None:
        nbrs = set(symbol.neighbors)
        if not nbrs or len(nbrs) != len(symbol.neighbors) or min(nbrs) < 0 or max(nbrs) >= self.k:
            raise SessionError(f"symbol neighbours {symbol.neighbors} invalid for k={self.k}")
        payload = self._payload(symbol)
        self.trace.consumed += 1
        self.trace.symbols.append(symbol)
        for i in [i for i in nbrs if self.processed[i]]:
            nbrs.discard(i)
            if payload is not None:
                payload ^= self.data[i]
        if not nbrs:
            self.trace.redundant += 1
            return
        if len(nbrs) == 1:
            (i,) = nbrs
            if self.recovered[i]:
                self.trace.redundant += 1
            else:
                self._recover(i, payload)
            return
        sid = self._next_id
        self._next_id += 1
        self.buffer[sid] = [nbrs, payload]
        for i in nbrs:
            self.incident[i].add(sid)

    def _pop_ripple(self) -> int:
        if self.discipline == "fifo":
            return self.ripple.popleft()
        if self.discipline == "lifo":
            return self.ripple.pop()
        j = int(self.rng.integers(len(self.ripple)))
        self.ripple[j], self.ripple[-1] = self.ripple[-1], self.ripple[j]
        return self.ripple.pop()

    def process_step(self) -> StepRecord:
        if not self.ripple:
            raise RuntimeError("process_step called with an empty ripple")
        v = self._pop_ripple()
        self.processed[v] = True
        self.n_processed += 1
        releases = redundant = 0
        for sid in sorted(self.incident[v]):
            entry = self.buffer[sid]
            nbrs = entry[0]
            nbrs.discard(v)
            if entry[1] is not None:
                entry[1] ^= self.data[v]
            if len(nbrs) == 1:
                (u,) = nbrs
                del self.buffer[sid]
                self.incident[u].discard(sid)
                releases += 1
                if self.recovered[u]:
                    redundant += 1
                else:
                    self._recover(u, entry[1])
        self.incident[v] = set()
        self.trace.redundant += redundant
        rec = StepRecord(self.L, len(self.ripple), releases, redundant)
        self.trace.steps.append(rec)
        return rec

    def run(self, stop_when_done: bool = False) -> None:
        """Process the ripple until it empties (or, optionally, until all inputs are recovered)."""
        while self.ripple and not (stop_when_done and self.done):
            self.process_step()


def decode_stream(
    k: int,
    symbols: Iterable[EncodedSymbol],
    cap: int | None = None,
    block_len: int | None = None,
    discipline: str = "fifo",
    rng=None,
) -> DecoderTrace:
    """Feed symbols one at a time, peeling eagerly, until every input is recovered.

    ``n_success`` is the number of symbols consumed at that moment.
    """
    state = DecoderState(k, block_len, discipline, rng)
    for count, sym in enumerate(symbols, start=1):
        if cap is not None and count > cap:
            break
        state.push(sym)
        state.run(stop_when_done=True)
        if state.done:
            state.trace.success = True
            state.trace.n_success = state.trace.consumed
            break
    if state.data is not None:
        state.trace.recovered_data = state.data
    return state.trace


def decode_incremental(
    k: int,
    dist: DegreeDistribution,
    rng: np.random.Generator,
    cap: int,
    data=None,
    discipline: str = "fifo",
    order_rng=None,
) -> DecoderTrace:
    if cap < k:
        raise InvalidParameter(f"cap={cap} must be >= k={k}")
    block_len = None if data is None else np.asarray(data).shape[1]
    return decode_stream(k, iter_encode(k, dist, rng, data), cap, block_len, discipline, order_rng)


def decode_batch(
    k: int,
    symbols: Sequence[EncodedSymbol],
    block_len: int | None = None,
    discipline: str = "fifo",
    rng=None,
) -> DecoderTrace:
    """Receive every symbol first, then peel until the ripple is empty."""
    state = DecoderState(k, block_len, discipline, rng)
    for sym in symbols:
        state.push(sym)
    state.trace.initial_ripple = len(state.ripple)
    state.run()
    state.trace.success = state.done
    if state.done:
        state.trace.n_success = state.trace.consumed
    if state.data is not None:
        state.trace.recovered_data = state.data
    return state.trace


def n_success_monotone_check(k: int, realizations: Iterable[Sequence[EncodedSymbol]]) -> bool:
    """Check that peeling success is monotone in the received prefix.

    For each symbol sequence, the eager threshold ``n_success`` must be the
    exact boundary: every batch decode of a shorter prefix fails and every
    longer prefix (up to the whole sequence) succeeds.
    """
    for seq in realizations:
        seq = list(seq)
        trace = decode_stream(k, seq)
        if not trace.success:
            if decode_batch(k, seq).success:
                return False
            continue
        n = trace.n_success
        for m in range(len(seq) + 1):
            if decode_batch(k, seq[:m]).success != (m >= n):
                return False
    return True
