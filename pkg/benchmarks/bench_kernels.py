#!/usr/bin/env python3
"""Compare the numba and numpy backends of the hot kernels.

Times the projection bisection, one QUIC coordinate-descent direction and
the k-core peeling on both backends, checks that they agree, and prints
one line per kernel. Numba compile time is excluded by a warm-up call.

    python3 benchmarks/bench_kernels.py [--n 60] [--repeats 5]
"""
import argparse
import time

import numpy as np

from cpgraph.generate import SyntheticSpec, make_dataset
from cpgraph.infer_ao import ao_penalty_weights, lambda_max
from cpgraph.infer_nonlinear import sample_covariance
from cpgraph.kernels import numba_backend, numpy_backend
from cpgraph.numerics import rng_stream


def best_of(fn, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(n, rng):
    v = rng.normal(size=50 * n)
    mass = 0.25 * v.size
    bisect = lambda be: be.bisect_shift(v, mass, v.min() - 1.0, v.max(), 1e-12, 200)  # noqa: E731

    data = make_dataset("ao", SyntheticSpec(n=n, frac_core=0.5), rng)
    S = sample_covariance(data.X)
    lam = 0.5 * lambda_max(S)
    pen = lam * ao_penalty_weights(np.full(n, 0.5), data.d, 1.0)
    X = np.diag(1.0 / np.diag(S))
    W = np.diag(np.diag(S)).copy()
    iu = np.triu_indices(n)
    G = S - W
    free = (np.abs(G[iu]) > pen[iu]) | (iu[0] == iu[1])
    fi, fj = np.ascontiguousarray(iu[0][free]), np.ascontiguousarray(iu[1][free])
    quic = lambda be: be.quic_direction(S, pen, W, X, fi, fj, 20, 0.0)[0]  # noqa: E731

    A = (rng.random((20 * n, 20 * n)) < 0.05).astype(np.int8)
    A = np.triu(A, 1)
    A = np.ascontiguousarray(A + A.T)
    cores = lambda be: be.core_numbers(A)  # noqa: E731
    return {"bisect_shift": bisect, "quic_direction": quic, "core_numbers": cores}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if numba_backend is None:
        raise SystemExit("numba is not installed")

    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}  agree")
    for name, run in cases(args.n, rng_stream(args.seed)).items():
        run(numba_backend)  # compile
        t_np, out_np = best_of(lambda: run(numpy_backend), args.repeats)
        t_nb, out_nb = best_of(lambda: run(numba_backend), args.repeats)
        agree = np.allclose(out_np, out_nb, rtol=1e-9, atol=1e-12)
        print(f"{name:<16}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
