"""Active-set nonnegative least squares (Lawson-Hanson)."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameter, SolverFailure

KKT_RTOL = 1e-12


def _solve_passive(A, b, passive):
    z = np.zeros(A.shape[1])
    idx = np.flatnonzero(passive)
    if idx.size:
        z[idx] = np.linalg.lstsq(A[:, idx], b, rcond=None)[0]
    return z


def nnls(A, b, maxiter=None):
    """Solve ``min ||A x - b||^2`` subject to ``x >= 0``.

    Parameters
    ----------
    A : (m, n) array_like
    b : (m,) array_like
    maxiter : int, optional
        Cap on outer (column-adding) iterations. Defaults to ``3 * n``.

    Returns
    -------
    x : (n,) ndarray
        Nonnegative minimizer. At return the gradient ``g = A.T (A x - b)``
        satisfies ``|g_j| <= tol`` where ``x_j > 0`` and ``g_j >= -tol``
        where ``x_j = 0``, with ``tol = KKT_RTOL * ||A.T b||_inf``.

    Raises
    ------
    SolverFailure
        If the cap is hit; ``exc.best`` holds the last feasible iterate.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise InvalidParameter(f"shape mismatch: A {A.shape}, b {b.shape}")
    m, n = A.shape
    if maxiter is None:
        maxiter = 3 * n
    tol = KKT_RTOL * max(np.abs(A.T @ b).max(initial=0.0), np.finfo(float).tiny)

    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = A.T @ (b - A @ x)
    it = 0
    while not passive.all():
        candidates = np.where(passive, -np.inf, w)
        j = int(np.argmax(candidates))
        if candidates[j] <= tol:
            break
        if it >= maxiter:
            raise SolverFailure(f"nnls did not converge in {maxiter} iterations", best=x)
        it += 1
        passive[j] = True
        z = _solve_passive(A, b, passive)
        # back off along x -> z until every passive coordinate is positive
        while passive.any() and z[passive].min() <= 0:
            neg = passive & (z <= 0)
            gap = x[neg] - z[neg]
            # gap == 0 only when x_j = z_j = 0 (an entering column that solved to zero)
            alpha = np.min(np.divide(x[neg], gap, out=np.zeros_like(gap), where=gap > 0))
            x = x + alpha * (z - x)
            passive &= x > 0
            # the entering column can fail to improve when it is numerically dependent
            x[~passive] = 0.0
            z = _solve_passive(A, b, passive)
        x = z
        w = A.T @ (b - A @ x)
        if not passive[j]:
            # column j was dropped immediately; stop it from re-entering forever
            w[j] = min(w[j], 0.0)
    return x


def nnls_brute_force(A, b):
    """Exhaustive reference: best unconstrained fit over every feasible support.

    Exponential in ``n``; for tests only.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[1]
    best_x = np.zeros(n)
    best_obj = float(b @ b)
    for mask in range(1, 1 << n):
        cols = [j for j in range(n) if mask >> j & 1]
        sol = np.linalg.lstsq(A[:, cols], b, rcond=None)[0]
        if sol.min() < 0:
            continue
        x = np.zeros(n)
        x[cols] = sol
        obj = float(np.sum((A @ x - b) ** 2))
        if obj < best_obj:
            best_obj, best_x = obj, x
    return best_x, best_obj
