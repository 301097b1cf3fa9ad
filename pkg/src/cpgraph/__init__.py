"""Core-periphery structure from graphs and node attributes.

Four generative models tie latent core scores ``c`` to a weighted graph
and to node attributes. Given data, the matching solver recovers ``c``
(and, for the attributes-only model, a sparse precision graph).
"""
from .baselines import binarize, k_core, minres_scores
from .errors import (
    CPGraphError,
    DataValidationError,
    NumericalError,
    UsageError,
)
from .generate import MODELS, SyntheticData, SyntheticSpec, make_dataset
from .infer_affine import AffineFitResult, fit_bool, fit_real
from .infer_ao import AOFitResult, fit_ao, solve_c_lp, weighted_glasso
from .infer_nonlinear import NonlinearFitResult, fit_nonlinear
from .metrics import cosine_similarity, cp_frobenius, edge_cosine, ideal_cp
from .model import Hyperparams, build_precision, compute_weights
from .numerics import project_simplex_box, rng_stream

__version__ = "0.1.0"

__all__ = [
    "AOFitResult",
    "AffineFitResult",
    "CPGraphError",
    "DataValidationError",
    "Hyperparams",
    "MODELS",
    "NonlinearFitResult",
    "NumericalError",
    "SyntheticData",
    "SyntheticSpec",
    "UsageError",
    "binarize",
    "build_precision",
    "compute_weights",
    "cosine_similarity",
    "cp_frobenius",
    "edge_cosine",
    "fit_ao",
    "fit_bool",
    "fit_nonlinear",
    "fit_real",
    "ideal_cp",
    "k_core",
    "make_dataset",
    "minres_scores",
    "project_simplex_box",
    "rng_stream",
    "solve_c_lp",
    "weighted_glasso",
]
