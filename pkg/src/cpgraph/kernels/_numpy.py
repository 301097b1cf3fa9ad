"""Vectorized numpy fallbacks for the numba kernels."""
import numpy as np


def bisect_shift(v, mass, lo, hi, tol, max_iter):
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        phi = np.clip(v - mid, 0.0, 1.0).sum() - mass
        if abs(phi) <= tol:
            return mid
        if phi > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 0.0:
            break
    return mid


def quic_direction(S, pen, W, X, fi, fj, max_sweeps, stop):
    p = S.shape[0]
    D = np.zeros((p, p))
    U = np.zeros((p, p))
    sweeps = 0
    pairs = list(zip(fi.tolist(), fj.tolist()))
    for sweep in range(max_sweeps):
        sweeps = sweep + 1
        biggest = 0.0
        for i, j in pairs:
            if i == j:
                a = W[i, i] ** 2
            else:
                a = W[i, j] ** 2 + W[i, i] * W[j, j]
            b = S[i, j] - W[i, j] + W[i] @ U[:, j]
            c = X[i, j] + D[i, j]
            z = c - b / a
            mu = np.sign(z) * max(abs(z) - pen[i, j] / a, 0.0) - c
            if mu != 0.0:
                D[i, j] += mu
                if i != j:
                    D[j, i] += mu
                    U[i] += mu * W[j]
                    U[j] += mu * W[i]
                else:
                    U[i] += mu * W[i]
                biggest = max(biggest, abs(mu) * a)
        if biggest <= stop:
            break
    return D, sweeps


def core_numbers(adj):
    adj = adj != 0
    np.fill_diagonal(adj, False)
    n = adj.shape[0]
    deg = adj.sum(axis=1).astype(np.int64)
    core = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    k = 0
    while alive.any():
        peel = alive & (deg <= k)
        if not peel.any():
            k = int(deg[alive].min())
            continue
        while peel.any():
            core[peel] = k
            alive &= ~peel
            deg -= adj[:, peel].sum(axis=1)
            peel = alive & (deg <= k)
    return core
