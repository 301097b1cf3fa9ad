"""Core scores from a graph and Gaussian attributes whose precision depends on the scores.

The log-likelihood ``log det K(c) - tr(S K(c)) + sum_ij (c_i + c_j)|theta_ij|``
is concave in ``c`` and maximized over ``{sum(c) = M, 0 <= c <= 1}`` by
projected gradient ascent. Iterates stay inside the cone where ``K(c)`` is
positive definite because infeasible trial steps are rejected by the line
search.
"""
from dataclasses import dataclass, field

import numpy as np

from ._ascent import projected_ascent
from .errors import EmptyData, InfeasibleStart, NotPD
from .infer_affine import _validate, degree_gain, initial_scores
from .model import Hyperparams, build_precision, default_kappa
from .numerics import chol_logdet_inverse, is_pd, project_simplex_box

MAX_STEPS = 500
KAPPA_DOUBLINGS = 8


@dataclass
class NonlinearFitResult:
    c: np.ndarray
    kappa: float
    objective_trace: list = field(default_factory=list)
    iters: int = 0
    converged: bool = False


def sample_covariance(X, center=False):
    """``S = X X^T / d`` for an ``N x d`` attribute matrix (rows are nodes)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:
        raise EmptyData("need at least one attribute column")
    if center:
        X = X - X.mean(axis=1, keepdims=True)
    S = X @ X.T / X.shape[1]
    return 0.5 * (S + S.T)


def objective_nonlinear(theta, S, c, d=None, e=0.0, eps=1e-5, kappa=None):
    K = build_precision(c, d, e, eps, kappa)
    logdet, _ = chol_logdet_inverse(K)
    return float(logdet - np.sum(S * K) + degree_gain(theta) @ np.asarray(c, dtype=float))


def grad_c_nonlinear(theta, S, c, d=None, e=0.0, eps=1e-5, kappa=None):
    """``2|theta|1 - 2 K(c)^{-1} 1 + 2 S 1``; raises NotPD off the PD cone."""
    K = build_precision(c, d, e, eps, kappa)
    _, Kinv = chol_logdet_inverse(K)
    return degree_gain(theta) - 2.0 * Kinv.sum(axis=1) + 2.0 * np.asarray(S).sum(axis=1)


def start_kappa(c0, d, e, eps, kappa=None):
    """Starting from ``kappa`` (or the default rule), double until ``K(c0)`` is PD."""
    n = len(c0)
    k = default_kappa(n, float(np.sum(c0)), d, e, eps) if kappa is None else float(kappa)
    for _ in range(KAPPA_DOUBLINGS + 1):
        if is_pd(build_precision(c0, d, e, eps, k)):
            return k
        k *= 2.0
    raise InfeasibleStart(f"K(c0) is not PD for any kappa up to {k / 2:.4g}")


def fit_nonlinear(theta, X, d=None, hyper=None, center=False, max_steps=MAX_STEPS):
    """Projected gradient ascent on the nonlinear-model likelihood.

    Parameters
    ----------
    theta : ndarray (N, N)
    X : ndarray (N, D)
        Real attributes; only ``S = X X^T / D`` enters.
    d : ndarray (N, N), optional
        Distances. ``hyper.e`` must be 0 without them.
    hyper : Hyperparams, optional
    center : bool
        Subtract each node's attribute mean before forming ``S``.
    """
    hyper = hyper or Hyperparams()
    theta, X = _validate(theta, X)
    if d is None and hyper.e != 0:
        hyper = hyper.with_(e=0.0)
    S = sample_covariance(X, center=center)
    n = theta.shape[0]
    mass = hyper.resolve_mass(n)
    e, eps = hyper.e, hyper.eps
    c0 = initial_scores(theta, mass)
    kappa = start_kappa(c0, d, e, eps, hyper.kappa)

    def f(c):
        return objective_nonlinear(theta, S, c, d, e, eps, kappa)

    def grad(c):
        return grad_c_nonlinear(theta, S, c, d, e, eps, kappa)

    f0 = f(c0)
    trace = [f0]
    c, _, steps, _ = projected_ascent(
        f,
        grad,
        c0,
        project=lambda v: project_simplex_box(v, mass),
        f0=f0,
        max_steps=max_steps,
        tol=hyper.tol,
        trace=trace,
    )
    if not is_pd(build_precision(c, d, e, eps, kappa)):  # pragma: no cover - guarded by line search
        raise NotPD("final iterate left the PD cone")
    return NonlinearFitResult(c=c, kappa=kappa, objective_trace=trace, iters=steps, converged=steps < max_steps)
