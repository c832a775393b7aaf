"""Release, ripple-addition and redundancy probabilities of the peeling decoder.

Notation: ``k`` input symbols, an output symbol of original degree ``d``,
``L`` input symbols still unprocessed after the current step, and ``R`` the
ripple size at the point of release.  The processing order is modelled as a
uniformly random permutation of the inputs.
"""
from __future__ import annotations

import math
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameter

_TINY = 1e-300
_ORACLE_MAX_K = 16


class ReleaseQuery(NamedTuple):
    k: int
    d: int
    L: int
    R: float


def _admissible(k, d, L, R) -> bool:
    # For integer R this is exactly 1 <= R <= L; real R (design targets) keeps
    # the eligible count L - R + 1 positive.
    return 2 <= d <= k and R > 0 and L - R + 1 > 0 and 1 <= L <= k - d + 1


def _scaled_tail(k: int, d: int, L: int, lead: float) -> float:
    """``lead * prod_{j=0}^{d-3} (k-L-1-j) / (k-2-j)``.

    Each numerator factor is paired with one denominator factor so the running
    product stays in [0, lead]; it drops to log space if it nears underflow.
    """
    val = lead
    for j in range(d - 2):
        num = k - L - 1 - j
        if num <= 0:
            return 0.0
        val *= num / (k - 2 - j)
        if val < _TINY:
            logval = math.log(lead)
            for i in range(d - 2):
                logval += math.log(k - L - 1 - i) - math.log(k - 2 - i)
            return math.exp(logval)
    return val


def q(k: int, d: int, L: int, R: float) -> float:
    """Probability that a degree-``d`` symbol is released at ``L`` and joins a ripple of size ``R``."""
    if d == 1:
        return 1.0 if (L == k and R == 0) else 0.0
    if not _admissible(k, d, L, R):
        return 0.0
    lead = d * (d - 1) * (L - R + 1) / (k * (k - 1))
    return _scaled_tail(k, d, L, lead)


def release_prob(k: int, d: int, L: int) -> float:
    """Probability that a degree-``d`` symbol is released when ``L`` inputs remain unprocessed.

    This ignores the ripple entirely: the last neighbour may be any of the
    ``L`` unprocessed inputs.
    """
    if not 1 <= d <= k:
        raise InvalidParameter(f"need 1 <= d <= k, got d={d}, k={k}")
    if d == 1:
        return 1.0 if L == k else 0.0
    return q(k, d, L, 1)


def release_curve(k: int, d: int) -> np.ndarray:
    """``release_prob(k, d, L)`` for L = 0..k."""
    return np.array([release_prob(k, d, L) for L in range(k + 1)])


def r(k: int, d: int, R: int) -> float:
    """Probability that a degree-``d`` symbol is redundant under a constant ripple ``R``."""
    if not (1 <= R <= k - 1 and 2 <= d <= k - R + 1):
        raise InvalidParameter(f"r undefined for k={k}, d={d}, R={R}")
    total = 0.0
    for L in range(R, k - d + 2):
        total += q(k, d, L, R)
    return min(max(1.0 - total, 0.0), 1.0)


def tail_products(k: int) -> np.ndarray:
    """Matrix ``T[L, d] = C(k-L-1, d-2) / C(k-2, d-2)`` for L = 0..k, d = 0..k.

    Built column by column with the ratio recurrence in ``d``; entries
    outside the admissible band come out as exact zeros.  Columns 0 and 1 are
    unused and left at zero.
    """
    T = np.zeros((k + 1, k + 1))
    if k < 2:
        return T
    L = np.arange(k + 1, dtype=np.float64)
    col = np.where(L <= k - 1, 1.0, 0.0)
    T[:, 2] = col
    for d in range(2, k):
        factor = np.maximum(k - L - d + 1, 0.0) / (k - d)
        col = col * factor
        T[:, d + 1] = col
    return T


def redundancy_surface(k: int) -> np.ndarray:
    """Table of ``r(k, d, R)`` indexed ``[d, R]`` with NaN outside the valid domain.

    Shape is ``(k + 1, k)`` so that rows and columns are addressed by the
    actual degree and ripple size.
    """
    if k < 2:
        raise InvalidParameter(f"need k >= 2, got {k}")
    T = tail_products(k)
    out = np.full((k + 1, k), np.nan)
    Ls = np.arange(k + 1, dtype=np.float64)
    for d in range(2, k + 1):
        w = d * (d - 1) / (k * (k - 1)) * T[:, d]
        w[0] = 0.0
        w[k - d + 2:] = 0.0
        # suffix sums give sum_{L>=R} (L - R + 1) w_L for every R at once
        s0 = np.cumsum(w[::-1])[::-1]
        s1 = np.cumsum((Ls * w)[::-1])[::-1]
        for R in range(1, k - d + 2):
            added = s1[R] - (R - 1) * s0[R]
            out[d, R] = min(max(1.0 - added, 0.0), 1.0)
    return out


def q_oracle(k: int, d: int, L: int, R: int) -> float:
    """Brute-force counterpart of :func:`q` for small ``k``.

    Inputs are processed in the fixed order 0, 1, ..., k-1.  Every d-subset
    of inputs is enumerated and counted if d-2 members are processed in the
    first k-L-1 steps, one is processed at step k-L, and the last lies among
    the L-R+1 unprocessed inputs that are not in the ripple (taken to be the
    next L-R+1 positions in processing order).
    """
    if k > _ORACLE_MAX_K:
        raise InvalidParameter(f"oracle enumerates C(k, d) subsets; k={k} exceeds {_ORACLE_MAX_K}")
    if d == 1:
        return 1.0 if (L == k and R == 0) else 0.0
    if R < 1 or R > L:
        return 0.0
    hits = 0
    total = 0
    for subset in combinations(range(k), d):
        total += 1
        release_pos, last = subset[d - 2], subset[d - 1]
        if release_pos != k - L - 1:
            continue
        if k - L <= last <= k - R:
            hits += 1
    return hits / total


def release_oracle(k: int, d: int, L: int) -> float:
    """Enumeration counterpart of :func:`release_prob` (no ripple condition)."""
    if k > _ORACLE_MAX_K:
        raise InvalidParameter(f"k={k} exceeds oracle limit {_ORACLE_MAX_K}")
    if d == 1:
        return 1.0 if L == k else 0.0
    hits = sum(1 for s in combinations(range(k), d) if s[d - 2] == k - L - 1 and s[d - 1] > k - L - 1)
    return hits / math.comb(k, d)
