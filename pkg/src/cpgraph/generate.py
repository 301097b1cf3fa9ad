"""Synthetic core-periphery data for the four generative models."""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DataValidationError, InvalidVariance, InvalidWeights, NotPD
from .model import Hyperparams, build_precision, compute_weights, default_kappa
from .numerics import is_pd, sample_laplace

MODELS = ("ga-affine-bool", "ga-affine-real", "ga-nonlinear", "ao")


def _interval(name, r):
    lo, hi = (float(x) for x in r)
    if not lo <= hi:
        raise DataValidationError(f"{name} is not a valid interval: {r}")
    return (lo, hi)


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 60
    frac_core: float = 0.5
    core_range: tuple = (0.9, 1.0)
    periph_range: tuple = (0.0, 0.01)
    logdist_core: tuple = (1.0, 1.05)
    logdist_periph: tuple = (1.2, 1.205)
    e: float = 1.0
    d_attr: int = 30
    pd_delta: float = 1e-3
    pd_rel: float = 0.1

    def __post_init__(self):
        if self.n < 1:
            raise DataValidationError("n must be positive")
        if not 0.0 <= self.frac_core <= 1.0:
            raise DataValidationError(f"frac_core must lie in [0, 1], got {self.frac_core}")
        if self.d_attr < 0:
            raise DataValidationError("d_attr must be >= 0")
        if self.e < 0:
            raise DataValidationError("e must be >= 0")
        if not self.pd_delta > 0:
            raise DataValidationError("pd_delta must be positive")
        if not self.pd_rel >= 0:
            raise DataValidationError("pd_rel must be >= 0")
        for name in ("core_range", "periph_range", "logdist_core", "logdist_periph"):
            object.__setattr__(self, name, _interval(name, getattr(self, name)))

    @property
    def n_core(self):
        return int(np.floor(self.frac_core * self.n + 1e-9))


def gen_core_scores(spec, rng):
    """Ground-truth core scores and a symmetric distance matrix.

    The first ``n_core`` nodes are core. Core-periphery pairs take their
    log-distance from the periphery range.
    """
    n, nc = spec.n, spec.n_core
    c = np.empty(n)
    c[:nc] = rng.uniform(*spec.core_range, size=nc)
    c[nc:] = rng.uniform(*spec.periph_range, size=n - nc)
    iu = np.triu_indices(n, k=1)
    both_core = (iu[0] < nc) & (iu[1] < nc)
    logd = np.where(
        both_core,
        rng.uniform(*spec.logdist_core, size=iu[0].size),
        rng.uniform(*spec.logdist_periph, size=iu[0].size),
    )
    d = np.zeros((n, n))
    d[iu] = np.exp(logd)
    d = d + d.T
    return c, d


def gen_graph(c, d, hyper, rng):
    """Symmetric weighted graph with Laplace entries of rate ``lam * w_ij``."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    w = compute_weights(c, d, hyper.e, hyper.eps)
    iu = np.triu_indices(n, k=1)
    wu = w[iu]
    if np.any(wu <= 0):
        raise InvalidWeights(f"{int(np.sum(wu <= 0))} pair weights are non-positive")
    theta = np.zeros((n, n))
    if wu.size:
        theta[iu] = sample_laplace(hyper.lam * wu, rng)
    return theta + theta.T


def logistic(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def gen_attr_bool(c, F, rng):
    c = np.asarray(c, dtype=float)
    F = np.asarray(F, dtype=float)
    P = logistic(np.outer(c, F[:, 0]) + F[:, 1])
    return (rng.random(P.shape) < P).astype(np.int8)


def gen_attr_real(c, F, sigma2, rng):
    if not sigma2 > 0:
        raise InvalidVariance(f"sigma2 must be positive, got {sigma2}")
    c = np.asarray(c, dtype=float)
    F = np.asarray(F, dtype=float)
    mean = np.outer(c, F[:, 0]) + F[:, 1]
    return mean + np.sqrt(sigma2) * rng.standard_normal(mean.shape)


def _gaussian_columns(precision, d_attr, rng):
    try:
        L = linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPD("precision matrix is not positive definite") from exc
    Z = rng.standard_normal((precision.shape[0], d_attr))
    # K = L L^T, so L^{-T} z has covariance K^{-1}
    return linalg.solve_triangular(L, Z, lower=True, trans="T")


def feasible_kappa(c, d=None, e=0.0, eps=1e-5, kappa=None, max_doublings=8):
    """First of ``kappa, 2 kappa, 4 kappa, ...`` making ``K(c)`` PD, or None."""
    c = np.asarray(c, dtype=float)
    if kappa is None:
        kappa = default_kappa(c.shape[0], float(c.sum()), d, e, eps)
    for _ in range(max_doublings + 1):
        if is_pd(build_precision(c, d, e, eps, kappa)):
            return kappa
        kappa *= 2.0
    return None


def gen_attr_nonlinear(c, d, hyper, d_attr, rng):
    """Columns i.i.d. ``N(0, K(c)^{-1})``; raises NotPD if ``K(c)`` is not PD."""
    K = build_precision(c, d, hyper.e, hyper.eps, hyper.kappa)
    return _gaussian_columns(K, d_attr, rng)


def repair_pd(theta, delta=1e-3, rel=0.0):
    """Symmetrize and shift the diagonal so the smallest eigenvalue is at least
    ``max(delta, rel * |lambda_min|)``.

    With ``rel = 0`` the floor is the absolute ``delta``. A floor of a few
    parts in 10^3 of the spectrum leaves one direction with enormous
    variance, so the synthetic protocol scales it with ``rel``.
    """
    sym = 0.5 * (np.asarray(theta, dtype=float) + np.asarray(theta, dtype=float).T)
    lmin = float(linalg.eigvalsh(sym, subset_by_index=[0, 0])[0])
    floor = max(delta, rel * abs(lmin))
    if lmin < floor:
        sym = sym + (floor - lmin) * np.eye(sym.shape[0])
    return sym


def gen_attr_ao(theta, d_attr, rng, delta=1e-3, rel=0.0):
    """Gaussian attributes with the PD-repaired graph as precision.

    Returns ``(X, theta_pd)``; ``theta_pd`` is the ground truth to score
    learned graphs against.
    """
    theta_pd = repair_pd(theta, delta, rel)
    return _gaussian_columns(theta_pd, d_attr, rng), theta_pd


@dataclass
class SyntheticData:
    model: str
    c: np.ndarray
    d: np.ndarray
    theta: np.ndarray
    X: np.ndarray
    F: np.ndarray | None = None
    theta_pd: np.ndarray | None = None
    kappa: float | None = None
    hyper: Hyperparams = field(default_factory=Hyperparams)


def make_dataset(model, spec, rng, hyper=None):
    """Run the full synthetic protocol for one model.

    ``hyper.e`` is overridden by ``spec.e``. For the nonlinear model a PD
    ``kappa`` is searched for when ``hyper.kappa`` is unset.
    """
    if model not in MODELS:
        raise DataValidationError(f"unknown model {model!r}")
    hyper = (hyper or Hyperparams()).with_(e=spec.e)
    c, d = gen_core_scores(spec, rng)
    theta = gen_graph(c, d, hyper, rng)
    data = SyntheticData(model=model, c=c, d=d, theta=theta, X=None, hyper=hyper)
    if model in ("ga-affine-bool", "ga-affine-real"):
        F = rng.standard_normal((spec.d_attr, 2))
        data.F = F
        if model == "ga-affine-bool":
            data.X = gen_attr_bool(c, F, rng)
        else:
            data.X = gen_attr_real(c, F, hyper.sigma2, rng)
    elif model == "ga-nonlinear":
        kappa = hyper.kappa
        if kappa is None:
            kappa = feasible_kappa(c, d, hyper.e, hyper.eps)
            if kappa is None:
                raise NotPD("no kappa in the doubling sequence makes K(c) PD")
        data.kappa = kappa
        data.hyper = hyper = hyper.with_(kappa=kappa)
        data.X = gen_attr_nonlinear(c, d, hyper, spec.d_attr, rng)
    else:
        data.X, data.theta_pd = gen_attr_ao(theta, spec.d_attr, rng, spec.pd_delta, spec.pd_rel)
    return data
