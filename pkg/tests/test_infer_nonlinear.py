import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpgraph.errors import EmptyData
from cpgraph.generate import SyntheticSpec, feasible_kappa, make_dataset
from cpgraph.infer_nonlinear import (
    fit_nonlinear,
    grad_c_nonlinear,
    objective_nonlinear,
    sample_covariance,
)
from cpgraph.metrics import cosine_similarity
from cpgraph.model import Hyperparams, build_precision
from cpgraph.numerics import finite_diff_grad, rng_stream
from oracles import rel_err


def random_instance(r):
    n = int(r.integers(2, 21))
    dd = int(r.integers(1, 11))
    A = r.laplace(size=(n, n))
    theta = np.triu(A, 1) + np.triu(A, 1).T
    c = r.uniform(0, 1, n)
    use_d = bool(r.integers(0, 2))
    if use_d:
        L = r.uniform(1.0, 1.2, size=(n, n))
        d = np.exp(np.triu(L, 1) + np.triu(L, 1).T)
        e = float(r.uniform(0, 1))
    else:
        d, e = None, 0.0
    # twice the first PD kappa leaves room for the finite-difference steps
    kappa = 2.0 * feasible_kappa(c, d, e, 1e-5)
    X = r.normal(size=(n, dd))
    return theta, sample_covariance(X), c, d, e, kappa


def test_sample_covariance_examples():
    x = np.array([[1.0], [2.0], [-1.0]])
    np.testing.assert_allclose(sample_covariance(x), np.outer(x, x))
    r = rng_stream(0)
    X = r.normal(size=(6, 9))
    S = sample_covariance(X)
    assert np.linalg.eigvalsh(S).min() >= -1e-10
    np.testing.assert_allclose(sample_covariance(X[:, r.permutation(9)]), S, atol=1e-14)
    with pytest.raises(EmptyData):
        sample_covariance(np.zeros((3, 0)))
    np.testing.assert_allclose(sample_covariance(X, center=True), np.cov(X, bias=True), atol=1e-12)


def test_gradient_vanishes_at_population_covariance():
    c = np.array([0.9, 0.5, 0.1, 0.3])
    K = build_precision(c, kappa=6.0)
    S = np.linalg.inv(K)
    g = grad_c_nonlinear(np.zeros((4, 4)), S, c, kappa=6.0)
    np.testing.assert_allclose(g, 0.0, atol=1e-12)


def test_gradient_linear_in_covariance():
    r = rng_stream(1)
    theta, S, c, d, e, kappa = random_instance(r)
    n = c.size
    shift = 0.3 * np.ones((n, n))
    diff = grad_c_nonlinear(theta, S + shift, c, d, e, 1e-5, kappa) - grad_c_nonlinear(theta, S, c, d, e, 1e-5, kappa)
    np.testing.assert_allclose(diff, 2 * 0.3 * n * np.ones(n), atol=1e-10)


@pytest.mark.parametrize("seed", range(100))
def test_gradient_matches_finite_differences(seed):
    r = rng_stream([2, seed])
    theta, S, c, d, e, kappa = random_instance(r)
    fd = finite_diff_grad(lambda v: objective_nonlinear(theta, S, v, d, e, 1e-5, kappa), c)
    assert rel_err(grad_c_nonlinear(theta, S, c, d, e, 1e-5, kappa), fd) <= 1e-5


@given(st.integers(0, 2**31))
def test_objective_concave_along_segments(seed):
    r = np.random.default_rng(seed)
    theta, S, c, d, e, kappa = random_instance(r)
    c2 = r.uniform(0, 1, c.size)
    k = 2.0 * max(kappa, feasible_kappa(c2, d, e, 1e-5))
    f = lambda v: objective_nonlinear(theta, S, v, d, e, 1e-5, k)  # noqa: E731
    mid = 0.5 * (c + c2)
    assert f(mid) >= 0.5 * (f(c) + f(c2)) - 1e-9 * max(1.0, abs(f(mid)))


def test_population_limit_recovers_scores():
    spec = SyntheticSpec(n=60, frac_core=0.5)
    data = make_dataset("ga-nonlinear", spec, rng_stream(3))
    K = build_precision(data.c, data.d, data.hyper.e, data.hyper.eps, data.kappa)
    X = np.linalg.cholesky(np.linalg.inv(K)) * np.sqrt(60)
    np.testing.assert_allclose(sample_covariance(X), np.linalg.inv(K), atol=1e-10)
    res = fit_nonlinear(data.theta, X, data.d, data.hyper.with_(mass=spec.n_core))
    assert cosine_similarity(res.c, data.c) >= 0.999


def test_stationary_point_without_graph():
    n, mass = 8, 3.0
    c0 = np.array([0.6, 0.5, 0.4, 0.3, 0.35, 0.25, 0.3, 0.3])
    assert abs(c0.sum() - mass) < 1e-12
    kappa = 10.0
    S = np.linalg.inv(build_precision(c0, kappa=kappa))
    X = np.linalg.cholesky(S) * np.sqrt(n)
    res = fit_nonlinear(np.zeros((n, n)), X, None, Hyperparams(mass=mass, kappa=kappa, tol=1e-12))
    assert np.linalg.norm(res.c - c0) <= 1e-3


@pytest.mark.parametrize("frac", [0.1, 0.5, 0.9])
def test_fit_on_synthetic_data(frac):
    spec = SyntheticSpec(n=60, frac_core=frac)
    data = make_dataset("ga-nonlinear", spec, rng_stream([4, int(frac * 10)]))
    res = fit_nonlinear(data.theta, data.X, data.d, data.hyper.with_(mass=spec.n_core))
    assert cosine_similarity(res.c, data.c) >= 0.99
    assert res.iters <= 500 and res.converged
    assert np.all(np.diff(res.objective_trace) >= -1e-9)
    assert abs(res.c.sum() - spec.n_core) <= 1e-8


def test_kappa_found_by_doubling():
    # the default rule is too small here; fitting doubles it until K(c0) is PD
    theta = np.zeros((4, 4))
    theta[0, 1] = theta[1, 0] = 5.0
    X = rng_stream(5).normal(size=(4, 6))
    res = fit_nonlinear(theta, X, None, Hyperparams(mass=3.5, kappa=0.5))
    assert res.kappa > 0.5 and res.kappa / 0.5 == 2 ** round(np.log2(res.kappa / 0.5))
