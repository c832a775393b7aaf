"""Degree distributions that realise a prescribed decreasing ripple.

The target ripple is ``R(L) = min(c1 * L**(1/c2), L)``.  The expected number
of ripple additions in the step that leaves ``L`` inputs unprocessed must be
``Q(L) = R(L) - R(L+1) + 1`` (``Q(k) = R(k)``), and a distribution achieves

    Q(L) = sum_d n * Omega(d) * q(k, d, L, R(L+1)).

Stacking the rows L = k..1 gives a linear system in ``x = n * Omega`` that is
solved with nonnegative least squares; ``n = sum(x)`` then normalizes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .degree_dist import DegreeDistribution
from .errors import DegenerateDesign, InvalidParameter
from .nnls import nnls
from .release import tail_products

CLEANUP_RTOL = 1e-12


@dataclass(frozen=True)
class RippleTarget:
    k: int
    c1: float
    c2: float

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParameter(f"k must be >= 1, got {self.k}")
        if not self.c1 > 0:
            raise InvalidParameter(f"c1 must be > 0, got {self.c1}")
        if not self.c2 >= 2:
            raise InvalidParameter(f"c2 must be >= 2, got {self.c2}")

    def ripple(self, L):
        return ripple_target(self, L)

    def ripple_curve(self) -> np.ndarray:
        """Target ripple for L = 0..k+1 (the last entry is R(k+1) = 0)."""
        R = np.append(ripple_target(self, np.arange(self.k + 1)), 0.0)
        return R


def ripple_target(t: RippleTarget, L):
    """``min(c1 * L**(1/c2), L)``; accepts scalars or arrays, R(k+1) = 0."""
    L_arr = np.asarray(L, dtype=np.float64)
    R = np.minimum(t.c1 * L_arr ** (1.0 / t.c2), L_arr)
    R = np.where(L_arr > t.k, 0.0, R)
    return float(R) if np.ndim(R) == 0 else R


def additions_from_ripple(R: np.ndarray, clamp: bool = True) -> np.ndarray:
    """Required additions ``Q`` ordered L = k..0 from a ripple curve ``R[L]``, L = 0..k+1."""
    R = np.asarray(R, dtype=np.float64)
    k = len(R) - 2
    L = np.arange(k, -1, -1)
    Q = R[L] - R[L + 1] + 1.0
    Q[0] = R[k]
    if clamp:
        Q = np.maximum(Q, 0.0)
    return Q


def target_additions(t: RippleTarget, clamp: bool = True) -> np.ndarray:
    """Q(L) for L = k..0."""
    return additions_from_ripple(t.ripple_curve(), clamp=clamp)


def release_matrix(R: np.ndarray) -> np.ndarray:
    """Design matrix for a ripple curve ``R[L]``, L = 0..k+1.

    Row ``i`` corresponds to L = k - i (L = k..1), column ``j`` to degree
    d = j + 1, and the entry is ``q(k, d, L, R(L+1))``.
    """
    R = np.asarray(R, dtype=np.float64)
    k = len(R) - 2
    A = np.zeros((k, k))
    Ls = np.arange(k, 0, -1)
    Rprev = R[Ls + 1]
    if R[k + 1] == 0:
        A[0, 0] = 1.0
    if k < 2:
        return A
    T = tail_products(k)[Ls]
    eligible = Ls - Rprev + 1.0
    ok_R = (Rprev > 0) & (eligible > 0)
    for d in range(2, k + 1):
        col = d * (d - 1) / (k * (k - 1)) * eligible * T[:, d]
        col[~ok_R | (Ls > k - d + 1)] = 0.0
        A[:, d - 1] = col
    return A


def build_release_matrix(t: RippleTarget) -> np.ndarray:
    return release_matrix(t.ripple_curve())


@dataclass(frozen=True)
class DesignSolution:
    target: RippleTarget
    distribution: DegreeDistribution
    n_expected: float
    residual_sq_norm: float
    achieved_Q: np.ndarray
    target_Q: np.ndarray
    raw: np.ndarray

    @property
    def overhead_expected(self) -> float:
        return self.n_expected / self.target.k


def design_from_ripple(R: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solve for ``x = n * Omega``; returns ``(x, A, b)``."""
    A = release_matrix(R)
    b = additions_from_ripple(R)[:-1]
    return nnls(A, b), A, b


def design(t: RippleTarget) -> DesignSolution:
    x, A, b = design_from_ripple(t.ripple_curve())
    n = float(x.sum())
    if n <= 0:
        raise DegenerateDesign(f"NNLS returned the zero vector for {t}")
    achieved = A @ x
    mass = np.where(x < CLEANUP_RTOL * n, 0.0, x)
    dist = DegreeDistribution(t.k, mass / mass.sum())
    return DesignSolution(
        target=t,
        distribution=dist,
        n_expected=n,
        residual_sq_norm=float(np.sum((achieved - b) ** 2)),
        achieved_Q=achieved,
        target_Q=b,
        raw=x,
    )
