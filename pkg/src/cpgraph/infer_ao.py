"""Joint estimation of a sparse precision graph and core scores from attributes only.

The objective is ``log det T - tr(S T) - lam * sum_ij w_ij(c) |T_ij|`` with
``w_ij(c) = 1 - c_i - c_j + e*log(d_ij + eps)``. For fixed ``c`` this is a
weighted graphical lasso; for fixed ``T`` it is a linear program in ``c``.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from . import kernels
from .errors import (
    DataValidationError,
    Infeasible,
    InvalidWeights,
    NotPD,
    NotPSD,
    NumericalError,
    ShapeMismatch,
    SingularAtZeroPenalty,
)
from .infer_nonlinear import sample_covariance
from .model import Hyperparams, compute_weights, log_distance_term
from .numerics import chol_logdet_inverse, is_pd

MARGIN = 1e-6
GLASSO_TOL = 1e-8
MAX_NEWTON = 100
INNER_SWEEPS = 50
MAX_POLISH = 20
CG_MAX = 500


@dataclass
class AOFitResult:
    theta: np.ndarray
    c: np.ndarray
    objective_trace: list = field(default_factory=list)
    outer_iters: int = 0
    converged: bool = False


def _check_cov(S):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ShapeMismatch(f"covariance must be square, got {S.shape}")
    scale = max(np.abs(S).max(initial=0.0), 1e-300)
    if np.abs(S - S.T).max(initial=0.0) > 1e-10 * scale:
        raise NotPSD("covariance is not symmetric")
    S = 0.5 * (S + S.T)
    if linalg.eigvalsh(S, subset_by_index=[0, 0])[0] < -1e-10 * scale:
        raise NotPSD("covariance has a negative eigenvalue")
    return S


def _kkt_from_inverse(theta, Tinv, S, pen):
    R = Tinv - S
    nz = theta != 0
    viol = np.where(nz, np.abs(R - pen * np.sign(theta)), np.maximum(np.abs(R) - pen, 0.0))
    return float(viol.max(initial=0.0))


def kkt_residual(theta, S, pen):
    """Largest violation of the weighted-lasso optimality conditions.

    At the optimum ``[inv(T) - S]_ij`` equals ``pen_ij * sign(T_ij)`` where
    ``T_ij != 0`` and lies in ``[-pen_ij, pen_ij]`` where ``T_ij == 0``.
    """
    theta = 0.5 * (theta + theta.T)
    _, Tinv = chol_logdet_inverse(theta)
    return _kkt_from_inverse(theta, Tinv, S, pen)


def _glasso_loss(theta, S, pen):
    """Minimization form ``-log det T + tr(S T) + sum pen |T|`` and ``inv(T)``."""
    logdet, Tinv = chol_logdet_inverse(theta)
    return float(-logdet + np.sum(S * theta) + np.sum(pen * np.abs(theta))), Tinv


def _line_search(theta, D, fval, decrease, S, pen, orthant=None, grad=None):
    """Backtrack from a unit step until PD with sufficient decrease.

    With ``orthant`` given, trial points are clipped to it (entries that
    would change sign are set to zero) and the decrease is measured along
    the clipped step with ``grad``. Returns None if no step is accepted.
    """
    step = 1.0
    while step > 1e-12:
        trial = theta + step * D
        expected = step * decrease
        if orthant is not None:
            trial = np.where(trial * orthant < 0, 0.0, trial)
            expected = float(np.sum(grad * (trial - theta)))
        try:
            ft, Tt = _glasso_loss(trial, S, pen)
        except NotPD:
            ft = np.inf
        if ft <= fval + 1e-4 * expected:
            return trial, ft, Tt, step
        step *= 0.5
    return None


def _support_newton(theta, Tinv, fval, S, pen, target, max_iter=MAX_POLISH, cg_max=CG_MAX):
    """Projected Newton-CG on the current sign pattern of ``theta``.

    On a fixed support with fixed signs the penalty is linear, so the
    restricted problem is smooth. Entries that would change sign are
    clipped to zero and drop out of the support. Returns the updated
    ``(theta, fval, Tinv)``.
    """
    n = theta.shape[0]
    eye = np.eye(n, dtype=bool)
    for _ in range(max_iter):
        mask = (theta != 0) | eye
        z = np.sign(theta)
        g = np.where(mask, S - Tinv + pen * z, 0.0)
        gmax = np.abs(g).max()
        if gmax <= 0.1 * target:
            break
        # conjugate gradient on W D W = -g over the support
        D = np.zeros_like(g)
        r = -g
        q = r.copy()
        rr = np.sum(r * r)
        for _ in range(cg_max):
            Hq = np.where(mask, Tinv @ q @ Tinv, 0.0)
            qHq = np.sum(q * Hq)
            if qHq <= 0:
                break
            a = rr / qHq
            D += a * q
            r -= a * Hq
            rr_new = np.sum(r * r)
            if np.sqrt(rr_new) <= min(0.1, np.sqrt(gmax)) * gmax:
                break
            q = r + (rr_new / rr) * q
            rr = rr_new
        D = 0.5 * (D + D.T)
        decrease = float(np.sum(g * D))
        if not decrease < 0:
            break
        orthant = np.where(eye, 1.0, z)
        out = _line_search(theta, D, fval, decrease, S, pen, orthant=orthant, grad=g)
        if out is None:
            break
        theta, fval, Tinv, _ = out
    return theta, fval, Tinv


def weighted_glasso(S, W, lam, tol=1e-6, theta0=None, max_newton=MAX_NEWTON):
    """Maximize ``log det T - tr(S T) - lam * sum_ij W_ij |T_ij|`` over PD ``T``.

    Proximal Newton in the style of QUIC: each step solves the lasso on the
    second-order model by coordinate descent over the free set, then
    backtracks until the iterate is PD and the objective decreases enough.
    Coordinate descent finds the support quickly but converges slowly on
    ill-conditioned problems, so every step is followed by Newton-CG on
    the current sign pattern. Stops when the KKT residual
    (:func:`kkt_residual`) is at most ``tol * max(1, max|S_ii|)``.

    Parameters
    ----------
    S : ndarray (N, N)
        Symmetric PSD sample covariance.
    W : ndarray (N, N)
        Non-negative penalty weights. A zero diagonal leaves the diagonal
        unpenalized; off-diagonal weights must be positive unless ``S`` is PD.
    lam : float
        Overall penalty strength, ``>= 0``.
    theta0 : ndarray, optional
        Warm start, used when PD.
    """
    S = _check_cov(S)
    n = S.shape[0]
    W = np.asarray(W, dtype=float)
    if W.shape != S.shape:
        raise ShapeMismatch(f"weights {W.shape} do not match covariance {S.shape}")
    if lam < 0 or np.any(W < 0) or not np.all(np.isfinite(W)):
        raise InvalidWeights("penalty weights must be finite and non-negative")
    pen = lam * 0.5 * (W + W.T)
    if not np.any(pen):
        if not is_pd(S):
            raise SingularAtZeroPenalty("zero penalty needs a positive definite covariance")
        return chol_logdet_inverse(S)[1]
    off = ~np.eye(n, dtype=bool)
    if not is_pd(S):
        if np.any(pen[off] <= 0):
            raise SingularAtZeroPenalty("singular covariance needs positive off-diagonal penalties")
        if np.any(np.diag(S) + np.diag(pen) <= 0):
            raise SingularAtZeroPenalty("zero variance node with unpenalized diagonal")

    theta = None
    if theta0 is not None:
        theta0 = 0.5 * (np.asarray(theta0, dtype=float) + np.asarray(theta0, dtype=float).T)
        if theta0.shape == S.shape and is_pd(theta0):
            theta = theta0
    if theta is None:
        theta = np.diag(1.0 / (np.diag(S) + np.diag(pen)))
    theta = np.ascontiguousarray(theta)
    fval, Tinv = _glasso_loss(theta, S, pen)
    target = tol * max(1.0, float(np.abs(np.diag(S)).max()))
    iu = np.triu_indices(n)
    for _ in range(max_newton):
        res = _kkt_from_inverse(theta, Tinv, S, pen)
        if res <= target:
            return theta
        G = S - Tinv
        free = (theta[iu] != 0) | (np.abs(G[iu]) > pen[iu]) | (iu[0] == iu[1])
        fi = np.ascontiguousarray(iu[0][free])
        fj = np.ascontiguousarray(iu[1][free])
        D, _ = kernels.quic_direction(S, pen, Tinv, theta, fi, fj, INNER_SWEEPS, 0.05 * res)
        decrease = float(np.sum(G * D) + np.sum(pen * np.abs(theta + D)) - np.sum(pen * np.abs(theta)))
        if decrease < 0:
            out = _line_search(theta, D, fval, decrease, S, pen)
            if out is not None:
                theta, fval, Tinv, _ = out
        theta, fval, Tinv = _support_newton(theta, Tinv, fval, S, pen, target)
    res = _kkt_from_inverse(theta, Tinv, S, pen)
    if res <= target:
        return theta
    raise NumericalError(f"glasso stopped with KKT residual {res:.3e} (target {target:.3e})")


def lambda_max(S):
    """Largest off-diagonal ``|S_ij|``: the smallest uniform penalty (diagonal
    unpenalized) at which the graphical lasso returns an empty graph."""
    S = np.asarray(S, dtype=float)
    off = ~np.eye(S.shape[0], dtype=bool)
    return float(np.abs(S[off]).max(initial=0.0))


def pair_caps(n, d=None, e=0.0, eps=1e-5, margin=MARGIN):
    """Upper bounds on ``c_i + c_j`` that keep every pair weight >= margin."""
    return 1.0 + log_distance_term(n, d, e, eps) - margin


def _knapsack(gains, mass):
    n = gains.shape[0]
    order = np.lexsort((np.arange(n), -gains))
    c = np.zeros(n)
    whole = int(np.floor(mass + 1e-12))
    c[order[:whole]] = 1.0
    rest = mass - whole
    if rest > 1e-12 and whole < n:
        c[order[whole]] = rest
    return c


def solve_c_lp(theta, d=None, e=0.0, mass=1.0, margin=MARGIN, eps=1e-5, include_diagonal=True):
    """Maximize ``sum_ij |T_ij| (c_i + c_j)`` over ``{sum(c) = M, 0 <= c <= 1}``
    subject to ``c_i + c_j <= 1 + e*log(d_ij + eps) - margin`` for ``i != j``.

    Ties prefer lower node indices. Uses a sort when no pair cap can bind
    and HiGHS (dual simplex) otherwise.

    Raises
    ------
    Infeasible
        If no feasible point exists.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[0]
    if not 0 < mass <= n:
        raise Infeasible(f"mass {mass} outside (0, {n}]")
    A = np.abs(theta)
    if not include_diagonal:
        A = A.copy()
        np.fill_diagonal(A, 0.0)
    gains = A.sum(axis=0) + A.sum(axis=1)
    caps = pair_caps(n, d, e, eps, margin)
    iu = np.triu_indices(n, k=1)
    binding = caps[iu] < 2.0
    if not np.any(binding):
        return _knapsack(gains, mass)
    if np.any(caps[iu][binding] < 0):
        raise Infeasible("a pair cap is negative")
    rows = np.flatnonzero(binding)
    m = rows.size
    A_ub = np.zeros((m, n))
    A_ub[np.arange(m), iu[0][rows]] = 1.0
    A_ub[np.arange(m), iu[1][rows]] = 1.0
    b_ub = caps[iu][rows]
    A_eq = np.ones((1, n))
    bounds = [(0.0, 1.0)] * n
    res = optimize.linprog(-gains, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[mass], bounds=bounds, method="highs-ds")
    if res.status == 2:
        raise Infeasible("no core-score vector satisfies the sum and pair constraints")
    if res.status != 0:
        raise NumericalError(f"LP solver failed: {res.message}")
    best = -res.fun
    # second pass: among optimal points prefer mass on low indices
    tie = (n - np.arange(n)) / n
    A2 = np.vstack([A_ub, -gains[None, :]])
    b2 = np.append(b_ub, -(best - 1e-9 * max(1.0, abs(best))))
    res2 = optimize.linprog(-tie, A_ub=A2, b_ub=b2, A_eq=A_eq, b_eq=[mass], bounds=bounds, method="highs-ds")
    c = res2.x if res2.status == 0 and gains @ res2.x >= best - 1e-9 * max(1.0, abs(best)) else res.x
    return np.clip(c, 0.0, 1.0)


def ao_penalty_weights(c, d=None, e=0.0, eps=1e-5, penalize_diagonal=False):
    W = compute_weights(c, d, e, eps)
    if not penalize_diagonal:
        np.fill_diagonal(W, 0.0)
    return W


def ao_objective(theta, S, W, lam):
    logdet, _ = chol_logdet_inverse(0.5 * (theta + theta.T))
    return float(logdet - np.sum(S * theta) - lam * np.sum(W * np.abs(theta)))


def fit_ao(
    X,
    d=None,
    hyper=None,
    margin=MARGIN,
    penalize_diagonal=False,
    center=False,
    fixed_weights=None,
    glasso_tol=GLASSO_TOL,
):
    """Alternate a weighted graphical lasso step and a linear-program score step.

    Parameters
    ----------
    X : ndarray (N, D)
        Real attributes, rows are nodes.
    d : ndarray (N, N), optional
        Distances; without them ``e`` is taken as 0.
    hyper : Hyperparams
        Uses ``lam``, ``e``, ``eps``, ``mass``, ``tol`` and ``max_outer``.
    penalize_diagonal : bool
        Penalize ``|T_ii|`` with ``w_ii``; off by default (``w_ii`` involves
        ``log(eps)`` and is typically negative).
    fixed_weights : ndarray (N, N), optional
        Freeze the penalty weights; with all ones the graph step is the
        classical graphical lasso.
    """
    hyper = hyper or Hyperparams()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ShapeMismatch("need an N x D attribute matrix with N >= 2")
    if not np.all(np.isfinite(X)):
        raise DataValidationError("attributes contain non-finite values")
    n = X.shape[0]
    if d is None and hyper.e != 0:
        hyper = hyper.with_(e=0.0)
    e, eps, lam = hyper.e, hyper.eps, hyper.lam
    S = sample_covariance(X, center=center)
    mass = hyper.resolve_mass(n)
    if not 0 < mass <= n:
        raise Infeasible(f"mass {mass} outside (0, {n}]")

    def weights(c):
        if fixed_weights is not None:
            return np.asarray(fixed_weights, dtype=float)
        W = ao_penalty_weights(c, d, e, eps, penalize_diagonal)
        off = ~np.eye(n, dtype=bool) if not penalize_diagonal else np.ones((n, n), dtype=bool)
        if np.any(W[off] < margin * (1 - 1e-9)):
            raise InvalidWeights("core scores give non-positive penalty weights")
        return W

    c = np.full(n, mass / n)
    Wt = weights(c)
    theta = chol_logdet_inverse(S + 0.1 * np.eye(n))[1]
    fval = ao_objective(theta, S, Wt, lam)
    trace = [fval]
    converged = False
    outer = 0
    prev_W = None
    for outer in range(1, hyper.max_outer + 1):
        if prev_W is None or not np.array_equal(Wt, prev_W):
            cand = weighted_glasso(S, Wt, lam, tol=glasso_tol, theta0=None if prev_W is None else theta)
            f_cand = ao_objective(cand, S, Wt, lam)
            if prev_W is None or f_cand >= ao_objective(theta, S, Wt, lam):
                theta = cand
        prev_W = Wt
        c = solve_c_lp(theta, d, e, mass, margin, eps, include_diagonal=penalize_diagonal)
        Wt = weights(c)
        fval = ao_objective(theta, S, Wt, lam)
        trace.append(fval)
        if abs(trace[-1] - trace[-2]) < hyper.tol:
            converged = True
            break
    return AOFitResult(theta=theta, c=c, objective_trace=trace, outer_iters=outer, converged=converged)
