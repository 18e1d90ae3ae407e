"""Command-line front end.

``blockdual run`` trains one configuration and writes a CSV trace;
``blockdual compare`` runs several algorithms on the same data and
summarizes communication rounds to a target relative dual gap.
``reference`` and ``generate`` write f* files and synthetic data.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys

import numpy as np
import scipy.sparse as sp

from . import __version__
from .dataio import ParseError, load_libsvm, make_synthetic, save_libsvm
from .engine import (ALGOS, ALGO_ALIASES, SolverConfig, Solver, canonical_algo, relative_suboptimality,
                     write_trace_csv)
from .model import KINDS, LossSpec
from .oracle import read_fstar, reference_optimum, write_fstar

EXIT_OK, EXIT_ERROR, EXIT_MAX_ITER = 0, 1, 2
DEFAULT_LATENCY = 5e-5
DEFAULT_BANDWIDTH = 1.25e9

log = logging.getLogger("blockdual")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(f"{self.prog}: {message}")


class CliError(Exception):
    pass


def _add_problem_flags(p):
    p.add_argument("--data", required=True, help="training data in LIBSVM format")
    p.add_argument("--loss", required=True, choices=sorted(KINDS))
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.0, help="insensitivity width for svr / l2-svr")


def _add_solver_flags(p):
    p.add_argument("--K", type=int, default=1, help="number of simulated workers")
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--tau", type=float, default=1e-2)
    p.add_argument("--beta", type=float, default=0.5)
    p.add_argument("--local-epochs", type=int, default=1)
    p.add_argument("--stop-eps", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--max-backtracks", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shuffle", action="store_true", help="shuffle columns before partitioning")
    p.add_argument("--scheduler", choices=("sequential", "threads"), default="sequential")
    p.add_argument("--fstar", help="file holding the dual optimum f*")
    p.add_argument("--latency", type=float, default=DEFAULT_LATENCY, help="seconds per round")
    p.add_argument("--bandwidth", type=float, default=DEFAULT_BANDWIDTH, help="bytes per second")
    p.add_argument("--debug", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    algo_choices = list(ALGOS) + sorted(ALGO_ALIASES)
    ap = _Parser(prog="blockdual", description="Distributed dual ERM solvers on a simulated cluster.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="train one configuration and write its trace")
    _add_problem_flags(run)
    _add_solver_flags(run)
    run.add_argument("--algo", default="bda-backtrack", choices=algo_choices)
    run.add_argument("--trace", required=True, help="output CSV trace")
    run.add_argument("--test", help="held-out LIBSVM file for accuracy / error reporting")

    cmp_ = sub.add_parser("compare", help="run several algorithms and summarize rounds to a target gap")
    _add_problem_flags(cmp_)
    _add_solver_flags(cmp_)
    cmp_.add_argument("--algos", required=True,
                      help="comma-separated list, e.g. bda-exact-ls,disdca,dsvm-ave")
    cmp_.add_argument("--out-dir", required=True)
    cmp_.add_argument("--target", type=float, default=1e-4,
                      help="relative dual suboptimality at which each run stops")
    cmp_.set_defaults(stop_eps=0.0)

    ref = sub.add_parser("reference", help="compute a certified dual optimum and write it")
    _add_problem_flags(ref)
    ref.add_argument("--tol", type=float, default=1e-10)
    ref.add_argument("--max-iter", type=int, default=200_000)
    ref.add_argument("--out", required=True)

    gen = sub.add_parser("generate", help="write a synthetic LIBSVM data set")
    gen.add_argument("--features", type=int, required=True)
    gen.add_argument("--instances", type=int, required=True)
    gen.add_argument("--density", type=float, required=True)
    gen.add_argument("--task", choices=("classification", "regression"), default="classification")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sort-labels", action="store_true")
    gen.add_argument("--correlated", action="store_true")
    gen.add_argument("--out", required=True)
    return ap


def _config(args, algo: str) -> SolverConfig:
    return SolverConfig(algo=algo, K=args.K, a1=args.a1, a2=args.a2, tau=args.tau, beta=args.beta,
                        local_epochs=args.local_epochs, stop_eps=args.stop_eps,
                        max_iter=args.max_iter, max_backtracks=args.max_backtracks, seed=args.seed,
                        shuffle=args.shuffle, scheduler=args.scheduler, debug=args.debug)


def _load(args):
    y, X = load_libsvm(args.data)
    if X.n_cols == 0:
        raise CliError(f"{args.data}: no instances")
    return y, X, LossSpec(args.loss, args.C, args.eps)


def _solve(args, algo, y, X, loss, callback=None):
    cfg = _config(args, algo)
    solver = Solver(cfg, loss, X, y, latency=args.latency, bandwidth=args.bandwidth)
    return solver.run(callback)


def _echo_config(path, args, res, loss, data_path) -> None:
    doc = {
        "data": os.path.abspath(data_path),
        "loss": loss.to_dict(),
        "config": res.config.to_dict(),
        "resolved": {"a1": res.plan.a1, "a2": res.plan.a2, "rule": res.plan.rule, "eta": res.plan.eta},
        "latency": args.latency,
        "bandwidth": args.bandwidth,
        "partition_sizes": [len(b) for b in res.partition.blocks],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_path(trace_path: str) -> str:
    root, _ = os.path.splitext(trace_path)
    return root + ".config.json"


def evaluate_test(path, w, loss: LossSpec) -> tuple[str, float]:
    y, Xt = load_libsvm(path)
    n = len(w)
    csc = Xt.csc
    if csc.shape[0] < n:
        csc = sp.vstack([csc, sp.csc_matrix((n - csc.shape[0], csc.shape[1]))], format="csc")
    z = csc[:n].T @ w
    if loss.is_classification:
        return "accuracy", float(np.mean(np.where(z >= 0, 1.0, -1.0) == y))
    return "mse", float(np.mean((z - y) ** 2))


def rounds_to_target(trace, fstar: float, target: float):
    for r in trace:
        rd, _ = relative_suboptimality(r.f_dual, r.f_primal, fstar)
        if rd <= target:
            return r.comm_rounds
    return None


def cmd_run(args) -> int:
    y, X, loss = _load(args)
    fstar = read_fstar(args.fstar) if args.fstar else None
    res = _solve(args, args.algo, y, X, loss)
    write_trace_csv(args.trace, res.trace, fstar)
    _echo_config(config_path(args.trace), args, res, loss, args.data)
    last = res.trace[-1]
    print(f"iterations={res.state.t} converged={res.converged}")
    print(f"f_dual={res.f_dual!r} f_primal_pocket={res.f_primal_pocket!r}")
    print(f"rounds={last.comm_rounds} bytes={last.comm_bytes} sim_time_s={last.sim_time:.6g} "
          f"wall_time_s={last.wall_time:.3f}")
    if fstar is not None:
        rd, rp = relative_suboptimality(res.f_dual, res.f_primal_pocket, fstar)
        print(f"rel_dual={rd:.6e} rel_primal={rp:.6e}")
    if args.test:
        name, val = evaluate_test(args.test, res.w, loss)
        print(f"test_{name}={val:.6f}")
    return EXIT_OK if res.converged else EXIT_MAX_ITER


def cmd_compare(args) -> int:
    y, X, loss = _load(args)
    try:
        algos = [canonical_algo(a.strip()) for a in args.algos.split(",") if a.strip()]
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if not algos:
        raise CliError("--algos is empty")
    os.makedirs(args.out_dir, exist_ok=True)
    if args.fstar:
        fstar = read_fstar(args.fstar)
    else:
        fstar = reference_optimum(X, y, loss)
        write_fstar(os.path.join(args.out_dir, "fstar.txt"), fstar)
    def reached(_solver, rec):
        return relative_suboptimality(rec.f_dual, rec.f_primal, fstar)[0] <= args.target

    rows = []
    for algo in algos:
        res = _solve(args, algo, y, X, loss, callback=reached)
        trace_path = os.path.join(args.out_dir, f"{algo}.csv")
        write_trace_csv(trace_path, res.trace, fstar)
        _echo_config(config_path(trace_path), args, res, loss, args.data)
        rows.append((algo, rounds_to_target(res.trace, fstar, args.target), res.state.t,
                     res.f_dual, res.converged))
    rows.sort(key=lambda r: (math.inf if r[1] is None else r[1], r[0]))
    summary = os.path.join(args.out_dir, "summary.csv")
    with open(summary, "w") as fh:
        fh.write("algo,rounds_to_target,iterations,f_dual,converged\n")
        for algo, rounds, iters, fd, conv in rows:
            fh.write(f"{algo},{'' if rounds is None else rounds},{iters},{fd!r},{int(conv)}\n")
    print(f"f*={fstar!r} target={args.target:g}")
    print(f"{'algo':<18} {'rounds':>8} {'iters':>6}")
    for algo, rounds, iters, _, _ in rows:
        print(f"{algo:<18} {'-' if rounds is None else rounds:>8} {iters:>6}")
    return EXIT_OK


def cmd_reference(args) -> int:
    y, X, loss = _load(args)
    fstar = reference_optimum(X, y, loss, tol=args.tol, max_iter=args.max_iter)
    write_fstar(args.out, fstar)
    print(f"f*={fstar!r}")
    return EXIT_OK


def cmd_generate(args) -> int:
    y, X = make_synthetic(args.features, args.instances, args.density, args.seed, args.task,
                          sort_labels=args.sort_labels, correlated=args.correlated)
    save_libsvm(args.out, y, X)
    print(f"wrote {X.n_cols} instances, {X.n_rows} features, {X.nnz} nonzeros to {args.out}")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "reference": cmd_reference, "generate": cmd_generate}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CliError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (CliError, ParseError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
