"""Synthetic benchmark harness for the core-score and graph-recovery tables.

Every (core fraction, seed index) pair draws its data from its own stream
keyed by ``[seed, percent, index]``, so results do not depend on the order
or the thread in which cells run. All four models see the same scores,
distances and graph for a given key; only the attributes differ.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .baselines import binarize, k_core, minres_scores
from .generate import MODELS, SyntheticSpec, make_dataset
from .infer_affine import fit_bool, fit_real
from .infer_ao import fit_ao, lambda_max, weighted_glasso
from .infer_nonlinear import fit_nonlinear, sample_covariance
from .metrics import cosine_similarity, edge_cosine
from .model import Hyperparams
from .numerics import rng_stream

FRACTIONS = (0.1, 0.5, 0.9)
AO_LAM_REL = 0.5
T2_METHODS = MODELS + ("k-core", "minres")
T5_METHODS = ("ao", "glasso")


def _stream(seed, frac, index):
    return rng_stream([int(seed), int(round(100 * frac)), int(index)])


def ao_lambda(S, lam_rel=AO_LAM_REL):
    """Penalty as a fraction of :func:`lambda_max`."""
    return lam_rel * lambda_max(S)


def fit_model(model, data, n_core, lam_rel=AO_LAM_REL):
    """Fit ``model`` on a synthetic dataset with ``M`` set to the core size.

    Returns the solver's result object.
    """
    if model == "ga-affine-bool":
        return fit_bool(data.theta, data.X, Hyperparams(mass=n_core))
    if model == "ga-affine-real":
        return fit_real(data.theta, data.X, Hyperparams(mass=n_core))
    if model == "ga-nonlinear":
        return fit_nonlinear(data.theta, data.X, data.d, data.hyper.with_(mass=n_core))
    S = sample_covariance(data.X)
    hyper = Hyperparams(lam=ao_lambda(S, lam_rel), e=data.hyper.e, mass=n_core)
    return fit_ao(data.X, data.d, hyper)


def t2_cell(frac, index, seed=0, n=60, lam_rel=AO_LAM_REL):
    """Core-score cosine to the truth for every method on one dataset."""
    spec = SyntheticSpec(n=n, frac_core=frac)
    out = {}
    truth = None
    for model in MODELS:
        data = make_dataset(model, spec, _stream(seed, frac, index))
        truth = data
        out[model] = cosine_similarity(fit_model(model, data, spec.n_core, lam_rel).c, data.c)
    out["k-core"] = cosine_similarity(k_core(binarize(truth.theta)), truth.c)
    out["minres"] = cosine_similarity(minres_scores(truth.theta), truth.c)
    return out


def t5_cell(frac, index, seed=0, n=60, lam_rel=AO_LAM_REL):
    """Edge cosine of the AO graph and of the uniform graphical lasso."""
    spec = SyntheticSpec(n=n, frac_core=frac)
    data = make_dataset("ao", spec, _stream(seed, frac, index))
    S = sample_covariance(data.X)
    lam = ao_lambda(S, lam_rel)
    fit = fit_ao(data.X, data.d, Hyperparams(lam=lam, e=data.hyper.e, mass=spec.n_core))
    ones = np.ones_like(S)
    np.fill_diagonal(ones, 0.0)
    glasso = weighted_glasso(S, ones, lam)
    return {"ao": edge_cosine(fit.theta, data.theta_pd), "glasso": edge_cosine(glasso, data.theta_pd)}


def summarize(values):
    v = np.asarray(values, dtype=float)
    return {"mean": float(v.mean()), "std": float(v.std(ddof=0)), "values": [float(x) for x in v]}


def run(table, seeds, seed=0, n=60, workers=1, lam_rel=AO_LAM_REL):
    """Run a table over ``seeds`` datasets per core fraction.

    Returns a JSON-ready report with mean, population std and the raw
    values of every (method, fraction) cell.
    """
    if table not in ("t2", "t5"):
        raise ValueError(f"unknown table {table!r}")
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    cell = t2_cell if table == "t2" else t5_cell
    methods = T2_METHODS if table == "t2" else T5_METHODS
    tasks = [(f, i) for f in FRACTIONS for i in range(seeds)]

    def work(task):
        return cell(task[0], task[1], seed=seed, n=n, lam_rel=lam_rel)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    cells = {m: {} for m in methods}
    for f in FRACTIONS:
        rows = [r for (tf, _), r in zip(tasks, results) if tf == f]
        for m in methods:
            cells[m][str(int(round(100 * f)))] = summarize([r[m] for r in rows])
    return {
        "table": table,
        "seeds": int(seeds),
        "seed": int(seed),
        "n": int(n),
        "ao_lam_rel": float(lam_rel),
        "metric": "core_cosine" if table == "t2" else "edge_cosine",
        "cells": cells,
    }
