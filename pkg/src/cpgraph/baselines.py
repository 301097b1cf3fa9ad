"""Graph-only core scores: k-core numbers and the MINRES product model."""
import numpy as np
from scipy import linalg

from . import kernels


def binarize(theta, tau=None):
    """Unweighted graph with an edge wherever ``|theta_ij| > tau`` (``i != j``).

    ``tau`` defaults to the median of the nonzero off-diagonal magnitudes.
    """
    A = np.abs(np.asarray(theta, dtype=float))
    off = ~np.eye(A.shape[0], dtype=bool)
    if tau is None:
        nz = A[off & (A > 0)]
        tau = float(np.median(nz)) if nz.size else 0.0
    if tau < 0:
        raise ValueError("tau must be non-negative")
    adj = ((A > tau) & off).astype(np.int8)
    # symmetric input gives a symmetric graph; enforce it for slightly asymmetric ones
    return np.maximum(adj, adj.T)


def k_core(adj):
    """Core number of every node (Batagelj-Zaversnik peeling)."""
    adj = np.ascontiguousarray(np.asarray(adj) != 0, dtype=np.int8)
    np.fill_diagonal(adj, 0)
    return kernels.core_numbers(adj)


def minres_objective(A, c):
    """``sum_{i != j} (A_ij - c_i c_j)^2``."""
    R = A - np.outer(c, c)
    np.fill_diagonal(R, 0.0)
    return float(np.sum(R * R))


def minres_gradient(A, c):
    R = A - np.outer(c, c)
    np.fill_diagonal(R, 0.0)
    return -4.0 * R @ c


def minres_scores(theta, max_iter=5000, tol=1e-9):
    """MINRES core scores: fit ``|theta_ij| ~ c_i c_j`` off the diagonal.

    Projected gradient descent on ``c >= 0`` with backtracking, started from
    the scaled magnitude of the leading eigenvector. The result is divided
    by its maximum so it lies in ``[0, 1]``.

    Returns
    -------
    c : ndarray
    """
    A = np.abs(np.asarray(theta, dtype=float))
    A = 0.5 * (A + A.T)
    np.fill_diagonal(A, 0.0)
    n = A.shape[0]
    if not np.any(A):
        return np.zeros(n)
    vals, vecs = linalg.eigh(A)
    c = np.abs(vecs[:, -1]) * np.sqrt(max(vals[-1], 0.0))
    f = minres_objective(A, c)
    step = 1.0
    for _ in range(max_iter):
        g = minres_gradient(A, c)
        # projected-gradient stationarity
        if np.abs(c - np.maximum(c - g, 0.0)).max() <= tol * max(1.0, np.abs(c).max()):
            break
        while step > 1e-16:
            trial = np.maximum(c - step * g, 0.0)
            ft = minres_objective(A, trial)
            if ft <= f - 1e-4 * np.sum(g * (c - trial)):
                break
            step *= 0.5
        else:
            break
        c, f = trial, ft
        step = min(1.0, 2.0 * step)
    top = c.max()
    return c / top if top > 0 else c
