"""Loop kernels compiled with numba.

Each function mirrors one in :mod:`cpgraph.kernels._numpy` and must agree
with it to rounding.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def _box_mass(v, lam):
    total = 0.0
    for i in range(v.shape[0]):
        x = v[i] - lam
        if x > 1.0:
            total += 1.0
        elif x > 0.0:
            total += x
    return total


@njit(cache=True)
def bisect_shift(v, mass, lo, hi, tol, max_iter):
    """Root of ``sum(clip(v - lam, 0, 1)) - mass`` on ``[lo, hi]``."""
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        phi = _box_mass(v, mid) - mass
        if abs(phi) <= tol:
            return mid
        if phi > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 0.0:
            break
    return mid


@njit(cache=True)
def quic_direction(S, pen, W, X, fi, fj, max_sweeps, stop):
    """Coordinate descent for the proximal Newton direction of the weighted
    graphical lasso (minimization form).

    ``W = inv(X)``; ``(fi, fj)`` lists the free pairs with ``fi <= fj``.
    Sweeps end once the largest scaled update ``|mu| * a`` falls below
    ``stop`` or ``max_sweeps`` is hit. Returns ``(D, sweeps)``.
    """
    p = S.shape[0]
    D = np.zeros((p, p))
    U = np.zeros((p, p))
    m = fi.shape[0]
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        biggest = 0.0
        for t in range(m):
            i = fi[t]
            j = fj[t]
            wdw = 0.0
            for k in range(p):
                wdw += W[i, k] * U[k, j]
            if i == j:
                a = W[i, i] * W[i, i]
            else:
                a = W[i, j] * W[i, j] + W[i, i] * W[j, j]
            b = S[i, j] - W[i, j] + wdw
            c = X[i, j] + D[i, j]
            z = c - b / a
            r = pen[i, j] / a
            if z > r:
                mu = z - r - c
            elif z < -r:
                mu = z + r - c
            else:
                mu = -c
            if mu != 0.0:
                D[i, j] += mu
                if i != j:
                    D[j, i] += mu
                    for k in range(p):
                        U[i, k] += mu * W[j, k]
                        U[j, k] += mu * W[i, k]
                else:
                    for k in range(p):
                        U[i, k] += mu * W[i, k]
                s = abs(mu) * a
                if s > biggest:
                    biggest = s
        if biggest <= stop:
            break
    return D, sweeps


@njit(cache=True)
def core_numbers(adj):
    """Batagelj-Zaversnik bucket peeling on a dense 0/1 adjacency."""
    n = adj.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    ptr = np.zeros(n + 1, dtype=np.int64)
    nbr = np.empty(n * n, dtype=np.int64)
    m = 0
    for i in range(n):
        row = adj[i]
        for j in range(n):
            if row[j] != 0 and i != j:
                nbr[m] = j
                m += 1
        ptr[i + 1] = m
        deg[i] = m - ptr[i]
    md = 0
    for i in range(n):
        if deg[i] > md:
            md = deg[i]
    bin_ = np.zeros(md + 2, dtype=np.int64)
    for i in range(n):
        bin_[deg[i]] += 1
    start = 0
    for d in range(md + 1):
        num = bin_[d]
        bin_[d] = start
        start += num
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = bin_[deg[v]]
        vert[pos[v]] = v
        bin_[deg[v]] += 1
    for d in range(md, 0, -1):
        bin_[d] = bin_[d - 1]
    bin_[0] = 0
    for i in range(n):
        v = vert[i]
        for k in range(ptr[v], ptr[v + 1]):
            u = nbr[k]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_[du] += 1
                deg[u] -= 1
    return deg
