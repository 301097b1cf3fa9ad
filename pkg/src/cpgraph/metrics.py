"""Evaluation metrics for core scores and learned graphs."""
import warnings

import numpy as np

from .errors import ShapeMismatch, ZeroGraphWarning, ZeroVector


def cosine_similarity(a, b):
    a = np.ravel(np.asarray(a, dtype=float))
    b = np.ravel(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ShapeMismatch(f"length mismatch: {a.size} vs {b.size}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def ideal_cp(n, a):
    """Block matrix with an ``a x a`` block of ones in the top-left corner."""
    if not 0 <= a <= n:
        raise ValueError(f"need 0 <= a <= n, got a={a}, n={n}")
    M = np.zeros((n, n))
    M[:a, :a] = 1.0
    return M


def core_order(c):
    """Node order by decreasing score, ties broken by ascending index."""
    c = np.asarray(c, dtype=float)
    return np.lexsort((np.arange(c.size), -c))


def ordered_adjacency(theta, c):
    """``|theta|`` permuted by :func:`core_order` and scaled into ``[0, 1]``."""
    A = np.abs(np.asarray(theta, dtype=float))
    if A.shape != (len(c), len(c)):
        raise ShapeMismatch(f"graph {A.shape} does not match {len(c)} scores")
    order = core_order(c)
    A = A[np.ix_(order, order)]
    top = A.max(initial=0.0)
    if top == 0:
        warnings.warn("graph has no nonzero entries; left unnormalized", ZeroGraphWarning, stacklevel=2)
        return A
    return A / top


def cp_frobenius(theta_true, c):
    """Distance between the score-ordered, max-normalized ``|theta|`` and the
    ideal core-periphery block with ``floor(N / 4)`` core nodes."""
    A = ordered_adjacency(theta_true, c)
    n = A.shape[0]
    return float(np.linalg.norm(ideal_cp(n, n // 4) - A))


def edge_cosine(theta_a, theta_b):
    """Cosine similarity of the off-diagonal magnitudes of two graphs."""
    A = np.asarray(theta_a, dtype=float)
    B = np.asarray(theta_b, dtype=float)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"graphs must be square and equal in shape: {A.shape} vs {B.shape}")
    off = ~np.eye(A.shape[0], dtype=bool)
    return cosine_similarity(np.abs(A[off]), np.abs(B[off]))
