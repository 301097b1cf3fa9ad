"""Maximum-likelihood core scores under the affine attribute models.

Both models share the graph term ``sum_ij (c_i + c_j)|theta_ij|`` and differ
in how attributes depend on the score: a logistic link for binary features
and a Gaussian with affine mean for real ones. The score vector ``c`` and
the per-feature ``[slope, intercept]`` matrix ``F`` are updated in turn.
"""
from dataclasses import dataclass, field

import numpy as np

from ._ascent import projected_ascent
from .errors import DataValidationError, NonBinaryAttributes, ShapeMismatch
from .model import Hyperparams
from .numerics import project_simplex_box

INNER_STEPS = 100
INNER_TOL = 1e-6


@dataclass
class AffineFitResult:
    c: np.ndarray
    F: np.ndarray
    objective_trace: list = field(default_factory=list)
    outer_iters: int = 0
    converged: bool = False


def design(c):
    """``C = [c, 1]``."""
    c = np.asarray(c, dtype=float)
    return np.column_stack([c, np.ones_like(c)])


def logistic_probs(c, F):
    """``P_ik = 1 / (1 + exp(-a_k c_i - b_k))``."""
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    z = np.outer(np.asarray(c, dtype=float), F[:, 0]) + F[:, 1]
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def degree_gain(theta):
    """``2 |theta| 1``, the gradient of the graph term."""
    return 2.0 * np.abs(theta).sum(axis=1)


def objective_bool(theta, X, c, F, alpha=0.0):
    c = np.asarray(c, dtype=float)
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    z = np.outer(c, F[:, 0]) + F[:, 1]
    # x log(pi) + (1 - x) log(1 - pi), written to stay finite for large |z|
    loglik = -(X * np.logaddexp(0.0, -z) + (1 - X) * np.logaddexp(0.0, z)).sum()
    return float(degree_gain(theta) @ c + loglik - alpha * np.sum(F * F))


def grad_c_bool(theta, X, P, F):
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    return degree_gain(theta) + (X - P) @ F[:, 0]


def grad_F_bool(X, P, c, F, alpha=0.0):
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    return (X - P).T @ design(c) - 2.0 * alpha * F


def objective_real(theta, X, c, F, alpha=0.0):
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    R = X - design(c) @ F.T
    return float(degree_gain(theta) @ np.asarray(c, dtype=float) - np.sum(R * R) - alpha * np.sum(F * F))


def grad_c_real(theta, X, c, F):
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    R = X - design(c) @ F.T
    return degree_gain(theta) + 2.0 * R @ F[:, 0]


def grad_F_real(X, c, F, alpha=0.0):
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    C = design(c)
    return 2.0 * (X - C @ F.T).T @ C - 2.0 * alpha * F


def _validate(theta, X):
    theta = np.asarray(theta, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if theta.ndim != 2 or theta.shape[0] != theta.shape[1]:
        raise ShapeMismatch(f"graph must be square, got {theta.shape}")
    if X.ndim != 2 or X.shape[0] != theta.shape[0]:
        raise ShapeMismatch(f"attributes {X.shape} do not match a {theta.shape[0]}-node graph")
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(X))):
        raise DataValidationError("inputs contain non-finite values")
    if np.abs(theta - theta.T).max(initial=0.0) > 1e-10 * max(1.0, np.abs(theta).max()):
        raise DataValidationError("graph is not symmetric")
    return theta, X


def initial_scores(theta, mass):
    """Projection of the max-normalized weighted degrees onto the feasible set."""
    deg = np.abs(theta).sum(axis=1)
    top = deg.max(initial=0.0)
    start = deg / top if top > 0 else np.zeros_like(deg)
    return project_simplex_box(start, mass)


def _alternate(objective, grad_c, grad_F, c0, F0, mass, hyper):
    project = lambda v: project_simplex_box(v, mass)  # noqa: E731
    c, F = c0, F0
    fval = objective(c, F)
    trace = [fval]
    converged = False
    outer = 0
    for outer in range(1, hyper.max_outer + 1):
        c, fval, _, _ = projected_ascent(
            lambda v: objective(v, F),
            lambda v: grad_c(v, F),
            c,
            project=project,
            f0=fval,
            max_steps=INNER_STEPS,
            tol=INNER_TOL,
        )
        if F.size:
            F, fval, _, _ = projected_ascent(
                lambda G: objective(c, G),
                lambda G: grad_F(c, G),
                F,
                f0=fval,
                max_steps=INNER_STEPS,
                tol=INNER_TOL,
            )
        trace.append(fval)
        if abs(trace[-1] - trace[-2]) < hyper.tol:
            converged = True
            break
    return AffineFitResult(c=c, F=F, objective_trace=trace, outer_iters=outer, converged=converged)


def fit_bool(theta, X, hyper=None):
    """Fit the binary-attribute model.

    Parameters
    ----------
    theta : ndarray, shape (N, N)
        Symmetric weighted graph.
    X : ndarray, shape (N, D)
        0/1 node attributes. ``D`` may be zero.
    hyper : Hyperparams, optional
        Uses ``mass``, ``alpha``, ``tol`` and ``max_outer``.
    """
    hyper = hyper or Hyperparams()
    theta, X = _validate(theta, X)
    if not np.all((X == 0) | (X == 1)):
        raise NonBinaryAttributes("binary model needs attributes in {0, 1}")
    mass = hyper.resolve_mass(theta.shape[0])
    alpha = hyper.alpha
    c0 = initial_scores(theta, mass)
    F0 = np.zeros((X.shape[1], 2))
    return _alternate(
        lambda c, F: objective_bool(theta, X, c, F, alpha),
        lambda c, F: grad_c_bool(theta, X, logistic_probs(c, F), F),
        lambda c, F: grad_F_bool(X, logistic_probs(c, F), c, F, alpha),
        c0,
        F0,
        mass,
        hyper,
    )


def fit_real(theta, X, hyper=None):
    """Fit the real-attribute model (Gaussian with affine mean in the score)."""
    hyper = hyper or Hyperparams()
    theta, X = _validate(theta, X)
    mass = hyper.resolve_mass(theta.shape[0])
    alpha = hyper.alpha
    c0 = initial_scores(theta, mass)
    C0 = design(c0)
    F0 = np.linalg.lstsq(C0, X, rcond=None)[0].T if X.shape[1] else np.zeros((0, 2))
    return _alternate(
        lambda c, F: objective_real(theta, X, c, F, alpha),
        lambda c, F: grad_c_real(theta, X, c, F),
        lambda c, F: grad_F_real(X, c, F, alpha),
        c0,
        F0,
        mass,
        hyper,
    )
