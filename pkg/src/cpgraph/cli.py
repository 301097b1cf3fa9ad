"""Command line: ``cpgraph generate | infer | bench``.

Exit codes: 0 success, 2 usage, 3 data validation, 4 numerical failure,
5 no convergence within ``max_outer`` (outputs are still written).
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench, io, kernels
from .errors import CPGraphError, DataValidationError, UsageError
from .generate import MODELS, SyntheticSpec, make_dataset
from .infer_affine import fit_bool, fit_real
from .infer_ao import fit_ao, lambda_max
from .infer_nonlinear import fit_nonlinear, sample_covariance
from .metrics import core_order, ordered_adjacency
from .model import Hyperparams
from .numerics import RNG_ALGORITHM, rng_stream

EXIT_NO_CONVERGENCE = 5

# flags whose defaults may come from a --config file
INFER_DEFAULTS = {
    "model": None,
    "attributes": None,
    "graph": None,
    "edges": None,
    "distances": None,
    "out": None,
    "lam": 0.1,
    "lam_rel": None,
    "e": None,
    "eps": 1e-5,
    "alpha": 0.1,
    "sigma2": 0.01,
    "mass": None,
    "kappa": None,
    "tol": 1e-4,
    "max_outer": 200,
    "center": False,
    "penalize_diagonal": False,
    "order_output": False,
    "seed": 0,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_generate(sub):
    p = sub.add_parser("generate", help="write a synthetic dataset")
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--frac-core", type=float, default=0.5)
    p.add_argument("--d-attr", type=int, default=30)
    p.add_argument("--e", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.1, help="Laplace strength of the graph prior")
    p.add_argument("--sigma2", type=float, default=0.01)
    p.add_argument("--pd-rel", type=float, default=0.1, help="relative eigenvalue floor of the AO precision")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")


def _add_infer(sub):
    p = sub.add_parser("infer", help="estimate core scores")
    p.add_argument("--config", help="JSON file of defaults; flags win")
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--attributes", help="N x D attribute CSV")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--graph", help="N x N graph CSV (GA models)")
    g.add_argument("--edges", help="edge list 'i j weight' (GA models)")
    p.add_argument("--distances", help="N x N distance CSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("--lam", type=float)
    p.add_argument("--lam-rel", type=float, help="AO penalty as a fraction of max off-diagonal |S_ij|")
    p.add_argument("--e", type=float, help="distance coupling (default 1 with --distances, else 0)")
    p.add_argument("--eps", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma2", type=float)
    p.add_argument("--mass", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-outer", type=int)
    p.add_argument("--center", action="store_const", const=True)
    p.add_argument("--penalize-diagonal", action="store_const", const=True)
    p.add_argument("--order-output", action="store_const", const=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--json", action="store_true")


def _add_bench(sub):
    p = sub.add_parser("bench", help="run a synthetic benchmark table")
    p.add_argument("table", choices=("t2", "t5"))
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--lam-rel", type=float, default=bench.AO_LAM_REL)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--json", action="store_true")


def build_parser():
    parser = _Parser(prog="cpgraph", description="Core-periphery inference from graphs and node attributes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_generate(sub)
    _add_infer(sub)
    _add_bench(sub)
    return parser


def _emit(args, record):
    if args.json:
        sys.stdout.write(io.dumps_json(record))


def cmd_generate(args):
    spec = SyntheticSpec(n=args.n, frac_core=args.frac_core, e=args.e, d_attr=args.d_attr, pd_rel=args.pd_rel)
    hyper = Hyperparams(lam=args.lam, sigma2=args.sigma2)
    data = make_dataset(args.model, spec, rng_stream(args.seed), hyper)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_vector(out / "core_scores.txt", data.c)
    io.write_matrix(out / "distances.csv", data.d)
    io.write_matrix(out / "theta.csv", data.theta)
    io.write_edges(out / "edges.txt", data.theta)
    io.write_matrix(out / "X.csv", data.X)
    files = ["core_scores.txt", "distances.csv", "theta.csv", "edges.txt", "X.csv"]
    if data.F is not None:
        io.write_matrix(out / "F.csv", data.F)
        files.append("F.csv")
    if data.theta_pd is not None:
        io.write_matrix(out / "theta_pd.csv", data.theta_pd)
        files.append("theta_pd.csv")
    record = {
        "command": "generate",
        "model": args.model,
        "seed": args.seed,
        "rng": RNG_ALGORITHM,
        "spec": {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(spec).items()},
        "n_core": spec.n_core,
        "hyper": data.hyper.to_dict(),
        "files": files,
    }
    io.write_json(out / "meta.json", record)
    _emit(args, record)
    return 0


def _infer_config(args):
    conf = dict(INFER_DEFAULTS)
    if args.config:
        extra = io.read_json(args.config)
        unknown = sorted(set(extra) - set(conf))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        conf.update(extra)
    for key in conf:
        val = getattr(args, key, None)
        if val is not None:
            conf[key] = val
    if conf["graph"] is not None and conf["edges"] is not None:
        raise UsageError("give at most one of graph and edges")
    for key in ("model", "attributes", "out"):
        if conf[key] is None:
            raise UsageError(f"--{key} is required")
    if conf["model"] not in MODELS:
        raise UsageError(f"unknown model {conf['model']!r}")
    has_graph = conf["graph"] is not None or conf["edges"] is not None
    if conf["model"] == "ao" and has_graph:
        raise UsageError("the ao model learns the graph; do not pass --graph/--edges")
    if conf["model"] != "ao" and not has_graph:
        raise UsageError(f"{conf['model']} needs --graph or --edges")
    if conf["e"] is None:
        conf["e"] = 1.0 if conf["distances"] is not None else 0.0
    return conf


def cmd_infer(args):
    conf = _infer_config(args)
    model = conf["model"]
    X = io.read_matrix(conf["attributes"])
    n = X.shape[0]
    d = io.read_square(conf["distances"]) if conf["distances"] else None
    if d is not None and d.shape[0] != n:
        raise DataValidationError(f"distances are {d.shape}, attributes have {n} rows")
    theta = None
    if conf["graph"]:
        theta = io.read_square(conf["graph"])
    elif conf["edges"]:
        theta = io.read_edges(conf["edges"], n)
    lam = conf["lam"]
    if model == "ao" and conf["lam_rel"] is not None:
        lam = conf["lam_rel"] * lambda_max(sample_covariance(X, conf["center"]))
    hyper = Hyperparams(
        lam=lam,
        e=conf["e"] if d is not None else 0.0,
        eps=conf["eps"],
        alpha=conf["alpha"],
        sigma2=conf["sigma2"],
        mass=conf["mass"],
        kappa=conf["kappa"],
        tol=conf["tol"],
        max_outer=conf["max_outer"],
    )
    out = Path(conf["out"])
    out.mkdir(parents=True, exist_ok=True)
    summary = {"command": "infer", "model": model, "n": n, "backend": kernels.BACKEND_NAME, "seed": conf["seed"]}
    if model == "ga-affine-bool":
        res = fit_bool(theta, X, hyper)
        iters = res.outer_iters
        io.write_matrix(out / "F.csv", res.F)
    elif model == "ga-affine-real":
        res = fit_real(theta, X, hyper)
        iters = res.outer_iters
        io.write_matrix(out / "F.csv", res.F)
    elif model == "ga-nonlinear":
        res = fit_nonlinear(theta, X, d, hyper, center=conf["center"])
        iters = res.iters
        summary["kappa"] = res.kappa
    else:
        res = fit_ao(X, d, hyper, penalize_diagonal=conf["penalize_diagonal"], center=conf["center"])
        iters = res.outer_iters
        theta = res.theta
        io.write_matrix(out / "theta_hat.csv", res.theta)
        io.write_edges(out / "edges_hat.txt", res.theta)
    io.write_vector(out / "core_scores.txt", res.c)
    io.write_vector(out / "trace.txt", np.asarray(res.objective_trace, dtype=float))
    if conf["order_output"]:
        io.write_matrix(out / "ordered_adjacency.csv", ordered_adjacency(theta, res.c))
        io.write_vector(out / "order.txt", core_order(res.c).astype(np.int64))
    key = "iters" if model == "ga-nonlinear" else "outer_iters"
    summary.update(
        {
            "converged": bool(res.converged),
            key: int(iters),
            "objective": float(res.objective_trace[-1]),
            "mass": hyper.resolve_mass(n),
            "hyper": hyper.to_dict(),
        }
    )
    io.write_json(out / "summary.json", summary)
    _emit(args, summary)
    return 0 if res.converged else EXIT_NO_CONVERGENCE


def cmd_bench(args):
    if args.seeds < 1 or args.workers < 1:
        raise UsageError("--seeds and --workers must be >= 1")
    report = bench.run(args.table, args.seeds, seed=args.seed, n=args.n, workers=args.workers, lam_rel=args.lam_rel)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    io.write_json(out, report)
    _emit(args, report)
    return 0


COMMANDS = {"generate": cmd_generate, "infer": cmd_infer, "bench": cmd_bench}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CPGraphError as exc:
        print(f"cpgraph: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"cpgraph: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
