"""Model hyperparameters, the edge-weight map and the precision builder."""
from dataclasses import asdict, dataclass, replace

import numpy as np

from .errors import DataValidationError, ShapeMismatch


@dataclass(frozen=True)
class Hyperparams:
    """User-set model constants.

    ``lam`` is the Laplace strength on edge weights, ``e`` couples edge
    sparsity to log-distance, ``alpha`` is the ridge weight on the affine
    parameters, ``mass`` the required sum of core scores (``None`` means a
    quarter of the node count) and ``kappa`` the diagonal offset of the
    precision ``K(c)`` (``None`` means :func:`default_kappa`).
    """

    lam: float = 0.1
    e: float = 0.0
    eps: float = 1e-5
    alpha: float = 0.1
    sigma2: float = 0.01
    mass: float | None = None
    kappa: float | None = None
    tol: float = 1e-4
    max_outer: int = 200

    def __post_init__(self):
        if not self.lam > 0:
            raise DataValidationError("lam must be > 0")
        if not self.eps > 0:
            raise DataValidationError("eps must be > 0")
        if not self.sigma2 > 0:
            raise DataValidationError("sigma2 must be > 0")
        if self.alpha < 0 or self.e < 0:
            raise DataValidationError("alpha and e must be >= 0")
        if not self.tol > 0:
            raise DataValidationError("tol must be > 0")
        if self.max_outer < 1:
            raise DataValidationError("max_outer must be >= 1")
        if self.mass is not None and not self.mass > 0:
            raise DataValidationError("mass must be > 0")

    def resolve_mass(self, n):
        return 0.25 * n if self.mass is None else float(self.mass)

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


def as_distances(d, n=None, self_distance=0.0):
    """Validate a distance matrix and set its diagonal to ``self_distance``."""
    if d is None:
        return None
    d = np.array(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ShapeMismatch(f"distance matrix must be square, got {d.shape}")
    if n is not None and d.shape[0] != n:
        raise ShapeMismatch(f"distance matrix is {d.shape[0]}x{d.shape[0]}, expected {n}")
    if self_distance < 0:
        raise DataValidationError("self_distance must be >= 0")
    np.fill_diagonal(d, self_distance)
    if np.any(d < 0) or not np.all(np.isfinite(d)):
        raise DataValidationError("distances must be finite and non-negative")
    if np.abs(d - d.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(d).max()):
        raise DataValidationError("distance matrix is not symmetric")
    return d


def log_distance_term(n, d, e, eps):
    """``e * log(d + eps)`` as an n x n matrix (zeros without distances)."""
    if d is None:
        if e != 0:
            raise DataValidationError("e must be 0 when no distances are given")
        return np.zeros((n, n))
    d = np.asarray(d, dtype=float)
    if d.shape != (n, n):
        raise ShapeMismatch(f"distance matrix {d.shape} does not match {n} nodes")
    if e == 0:
        return np.zeros((n, n))
    return e * np.log(d + eps)


def compute_weights(c, d=None, e=0.0, eps=1e-5):
    """Inverse-diversity weights ``w_ij = 1 - c_i - c_j + e*log(d_ij + eps)``.

    Positivity is not checked here; the graph-given likelihoods never need it.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    return 1.0 - (c[:, None] + c[None, :]) + log_distance_term(n, d, e, eps)


def precision_offdiag(c, d=None, e=0.0, eps=1e-5):
    """``K(c)`` with the diagonal set to zero."""
    c = np.asarray(c, dtype=float)
    K = -c[:, None] - c[None, :] + log_distance_term(c.shape[0], d, e, eps)
    np.fill_diagonal(K, 0.0)
    return K


def default_kappa(n, mass, d=None, e=0.0, eps=1e-5):
    """``2 + 2 max_{i!=j} |K_ij|`` evaluated at the uniform score ``mass / n``."""
    c = np.full(n, mass / n)
    off = precision_offdiag(c, d, e, eps)
    return 2.0 + 2.0 * float(np.abs(off).max(initial=0.0))


def build_precision(c, d=None, e=0.0, eps=1e-5, kappa=None, mass=None):
    """Precision ``K(c)`` of the nonlinear attribute model.

    Off-diagonal ``K_ij = -c_i - c_j + e*log(d_ij + eps)`` and diagonal
    ``K_ii = kappa - 2 c_i``, so ``dK/dc_i`` is -1 on row/column ``i`` and
    -2 at ``(i, i)``. ``kappa=None`` uses :func:`default_kappa` at
    ``mass`` (default ``sum(c)``).
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if kappa is None:
        kappa = default_kappa(n, float(c.sum()) if mass is None else mass, d, e, eps)
    K = precision_offdiag(c, d, e, eps)
    K[np.diag_indices(n)] = kappa - 2.0 * c
    return K
