"""Shared numerical kernels.

Projection onto ``{c : sum(c) = M, 0 <= c <= 1}``, a Laplace sampler,
Cholesky-based log-determinant/inverse, a central-difference gradient and
seeded random streams.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import kernels
from .errors import EmptySet, InvalidScale, NoConvergence, NonFinite, NotPD

RNG_ALGORITHM = "PCG64"


def rng_stream(seed):
    """Return a generator for ``seed``.

    All randomness in the package flows through generators created here, so
    the same seed reproduces the same draws on every platform numpy supports.
    ``seed`` may be an int or a sequence of ints (hashed by ``SeedSequence``).
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class SimplexBoxSet:
    """The set ``{c in [0, 1]^n : sum(c) = mass}``."""

    n: int
    mass: float

    def __post_init__(self):
        if self.n < 1:
            raise EmptySet(f"dimension must be positive, got {self.n}")
        if not (0.0 < self.mass <= self.n):
            raise EmptySet(f"mass {self.mass} outside (0, {self.n}]")

    def contains(self, c, tol=1e-8):
        c = np.asarray(c, dtype=float)
        return (
            c.shape == (self.n,)
            and bool(np.all(c >= 0.0) and np.all(c <= 1.0))
            and abs(c.sum() - self.mass) <= tol
        )


def box_mass(v, lam):
    """``phi(lam) + M``: total mass left after shifting by ``lam`` and clipping."""
    return float(np.clip(np.asarray(v, dtype=float) - lam, 0.0, 1.0).sum())


def project_simplex_box(v, mass, tol=1e-10, max_iter=200):
    """Euclidean projection of ``v`` onto ``{sum(c) = mass, 0 <= c <= 1}``.

    The projection is ``clip(v - lam, 0, 1)`` where ``lam`` solves
    ``sum(clip(v - lam, 0, 1)) = mass``; the left side is non-increasing
    in ``lam`` so bisection on ``[min(v) - 1, max(v)]`` finds it.

    Parameters
    ----------
    v : array_like, shape (n,)
    mass : float or SimplexBoxSet
        Target sum, ``0 < mass <= n``.
    tol : float
        Tolerance on ``|sum(c) - mass|``.

    Returns
    -------
    ndarray, shape (n,)
    """
    v = np.ascontiguousarray(v, dtype=float)
    if isinstance(mass, SimplexBoxSet):
        if mass.n != v.shape[0]:
            raise EmptySet(f"set dimension {mass.n} != vector length {v.shape[0]}")
        mass = mass.mass
    else:
        SimplexBoxSet(v.shape[0], float(mass))
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not np.all(np.isfinite(v)):
        raise NonFinite("cannot project a vector with non-finite entries")
    # pad below min(v) - 1 so rounding cannot leave v - lo just under 1
    vmin = float(v.min())
    lo = vmin - 1.0 - 1e-12 * max(1.0, abs(vmin))
    hi = float(v.max())
    if box_mass(v, lo) < mass or box_mass(v, hi) > mass:
        raise NoConvergence("bisection bracket does not straddle the root")
    lam = kernels.bisect_shift(v, float(mass), lo, hi, float(tol), int(max_iter))
    c = np.clip(v - lam, 0.0, 1.0)
    # Bisection stalls at float resolution on flat-sloped segments; finish
    # by solving the linear piece for the free coordinates exactly.
    err = c.sum() - mass
    if abs(err) > tol:
        free = (c > 0.0) & (c < 1.0)
        if free.any():
            c[free] -= err / free.sum()
            c = np.clip(c, 0.0, 1.0)
    if abs(c.sum() - mass) > max(tol, 1e-8):
        raise NoConvergence(f"projection residual {c.sum() - mass:.3e}")
    return c


def sample_laplace(inv_diversity, rng, size=None):
    """Zero-mean Laplace draws with density ``~ exp(-inv_diversity * |x|)``.

    Inverse-CDF sampling from one uniform per draw. ``inv_diversity`` may be
    an array; it broadcasts against ``size``.
    """
    rate = np.asarray(inv_diversity, dtype=float)
    if not np.all(rate > 0) or not np.all(np.isfinite(rate)):
        raise InvalidScale("inverse diversity must be positive and finite")
    shape = rate.shape if size is None else size
    u = rng.random(shape) - 0.5
    x = -np.sign(u) * np.log1p(-2.0 * np.abs(u)) / rate
    if x.ndim == 0:
        return float(x)
    return x


def chol_logdet_inverse(K, sym_rtol=1e-12):
    """Log-determinant and inverse of a symmetric positive definite matrix.

    Raises
    ------
    NotPD
        If the Cholesky factorization hits a non-positive pivot.
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K.shape}")
    scale = max(np.abs(K).max(initial=0.0), 1.0)
    if np.abs(K - K.T).max(initial=0.0) > sym_rtol * scale:
        raise ValueError("matrix is not symmetric")
    try:
        L = linalg.cholesky(K, lower=True, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise NotPD(str(exc)) from exc
    d = np.diag(L)
    if np.any(d <= 0):
        raise NotPD("non-positive Cholesky pivot")
    logdet = 2.0 * np.log(d).sum()
    inv = linalg.cho_solve((L, True), np.eye(K.shape[0]))
    inv = 0.5 * (inv + inv.T)
    return float(logdet), inv


def is_pd(K):
    try:
        linalg.cholesky(np.asarray(K, dtype=float), lower=True)
    except (linalg.LinAlgError, ValueError):
        return False
    return True


def finite_diff_grad(f, x, h=1e-5):
    """Central-difference gradient of a scalar function."""
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.array(x, dtype=float)
    shape = x.shape
    flat = x.ravel()
    grad = np.empty(flat.size)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(flat.reshape(shape))
        flat[i] = orig - h
        fm = f(flat.reshape(shape))
        flat[i] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NonFinite(f"non-finite evaluation at coordinate {i}")
        grad[i] = (fp - fm) / (2.0 * h)
    return grad.reshape(shape)
