"""Distributed block-diagonal approximation (BDA) solver for the dual ERM problem.

One outer iteration:

1. every worker approximately minimizes its block of the quadratic model
   ``grad^T d + 1/2 d^T (a1*H_block + a2*I) d + xi*(-alpha - d)`` with
   random-permuted cyclic coordinate descent,
2. ``dv = X @ dalpha`` is summed across workers (one n-vector allreduce),
3. a step size is chosen by exact line search (quadratic duals),
   backtracking with a modified Armijo rule, or a fixed baseline rule,
4. ``alpha += eta*dalpha`` on each worker and ``v += eta*dv`` everywhere.

The squared-L2 regularizer makes ``w(alpha) = v = X @ alpha``, so the
primal iterate comes for free and the line search needs only scalars.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import _kernels as K
from .cluster import Cluster, CommStats, WorkerContext, simulated_time
from .dataio import Partition, SparseColumnMatrix, partition_by_nnz, partition_rows, spectral_norm_sq
from .model import LossSpec, conjugate_diff_sum, conjugate_sum, dual_bounds, primal_loss

log = logging.getLogger(__name__)

ALGOS = ("bda-exact-ls", "bda-backtrack", "disdca-practical", "dsvm-ave", "prox-grad")
ALGO_ALIASES = {"disdca": "disdca-practical", "proxgrad": "prox-grad", "bda": "bda-backtrack"}
# predicted decreases smaller than this times (1 + |f|) are treated as rounding noise
NOISE_RTOL = 4.0 * np.finfo(np.float64).eps
TRACE_HEADER = ["iter", "time_s", "rounds", "bytes", "f_dual", "f_primal",
                "f_primal_pocket", "eta", "backtracks", "delta_t"]


class ConfigError(ValueError):
    pass


class LineSearchError(RuntimeError):
    pass


class UnsupportedLossError(ValueError):
    pass


def canonical_algo(algo: str) -> str:
    algo = ALGO_ALIASES.get(algo, algo)
    if algo not in ALGOS:
        raise ConfigError(f"unknown algorithm {algo!r}; expected one of {ALGOS}")
    return algo


@dataclass(frozen=True)
class StepPlan:
    a1: float
    a2: float
    rule: str  # "exact" | "backtrack" | "fixed"
    eta: float | None = None  # only for "fixed"


def baseline_config(algo: str, K: int = 1, loss: LossSpec | None = None,
                    X: SparseColumnMatrix | None = None, xtx_norm: float | None = None) -> StepPlan:
    """Default (a1, a2, step rule) for each algorithm.

    BDA uses a1 = 1 and damps with a2 = 1e-3 only when the conjugate is not
    strongly convex.  DSVM-AVE keeps a1 = 1 with the fixed step 1/K; the
    DisDCA practical variant scales a1 = K and steps by 1.  The proximal
    gradient case drops the Hessian (a1 = 0) and uses a2 = ||X^T X||.
    """
    algo = canonical_algo(algo)
    damping = 1e-3 if (loss is not None and loss.conj_curvature == 0.0) else 0.0
    if algo == "bda-exact-ls":
        if loss is not None and not loss.quadratic_dual:
            raise UnsupportedLossError(f"exact line search needs a quadratic dual; {loss.kind} is not")
        return StepPlan(1.0, damping, "exact")
    if algo == "bda-backtrack":
        return StepPlan(1.0, damping, "backtrack")
    if algo == "dsvm-ave":
        return StepPlan(1.0, 0.0, "fixed", 1.0 / K)
    if algo == "disdca-practical":
        return StepPlan(float(K), 0.0, "fixed", 1.0)
    if xtx_norm is None:
        if X is None:
            raise ConfigError("prox-grad needs the data matrix to estimate ||X^T X||")
        xtx_norm = spectral_norm_sq(X)
    return StepPlan(0.0, max(xtx_norm, 1e-12), "backtrack")


@dataclass
class SolverConfig:
    algo: str = "bda-backtrack"
    K: int = 1
    a1: float | None = None
    a2: float | None = None
    tau: float = 1e-2
    beta: float = 0.5
    local_epochs: int = 1
    stop_eps: float = 1e-3
    max_iter: int = 1000
    max_backtracks: int = 50
    seed: int = 0
    shuffle: bool = False
    scheduler: str = "sequential"
    debug: bool = False

    def __post_init__(self):
        self.algo = canonical_algo(self.algo)
        if self.K < 1:
            raise ConfigError("K must be >= 1")
        if not (0 < self.tau < 1 and 0 < self.beta < 1):
            raise ConfigError("tau and beta must lie in (0, 1)")
        if self.local_epochs < 0 or self.max_iter < 0 or self.max_backtracks < 0:
            raise ConfigError("counts must be non-negative")
        if self.stop_eps < 0:
            raise ConfigError("stop_eps must be >= 0")
        for name in ("a1", "a2"):
            val = getattr(self, name)
            if val is not None and not (val >= 0 and math.isfinite(val)):
                raise ConfigError(f"{name} must be a finite non-negative number")

    def plan(self, loss: LossSpec, X: SparseColumnMatrix | None = None) -> StepPlan:
        need_norm = self.algo == "prox-grad" and self.a2 is None
        base = baseline_config(self.algo, self.K, loss, X if need_norm else None,
                               xtx_norm=None if need_norm else 1.0)
        a1 = base.a1 if self.a1 is None else float(self.a1)
        a2 = base.a2 if self.a2 is None else float(self.a2)
        if a1 + a2 <= 0:
            raise ConfigError("a1 and a2 must not both be zero")
        return StepPlan(a1, a2, base.rule, base.eta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class IterateState:
    alpha: list  # per-worker dual blocks
    v: np.ndarray  # X @ alpha, replicated
    f_dual: float
    conj_sum: float
    f_primal: float = math.inf
    pocket_f_primal: float = math.inf
    pocket_w: np.ndarray | None = None
    t: int = 0


@dataclass
class Direction:
    anew: list  # alpha + dalpha per worker
    dalpha: list
    dv: np.ndarray
    delta_t: float
    # Q(dalpha) - Q(0) for the local quadratic model; <= 0 by construction
    model_decrease: float = math.nan


@dataclass
class TraceRecord:
    iter: int
    wall_time: float
    comm_rounds: int
    comm_bytes: int
    f_dual: float
    f_primal: float
    f_primal_pocket: float
    eta: float
    backtracks: int
    delta_t: float
    vector_rounds: int = 0
    scalar_rounds: int = 0
    sim_time: float = 0.0
    model_decrease: float = math.nan
    rule: str = ""


@dataclass
class LocalStep:
    anew: np.ndarray
    dalpha: np.ndarray
    dv: np.ndarray
    conj_diff: float  # change of this block's conjugate sum


@dataclass
class WorkerData:
    ctx: WorkerContext
    y: np.ndarray
    sqnorm: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    Xk: object  # scipy csc, columns of this block


def dual_objective(v: np.ndarray, conj_sum: float) -> float:
    """f(alpha) = 0.5*||X alpha||^2 + sum_i xi_i*(-alpha_i)."""
    return 0.5 * float(v @ v) + conj_sum


def dual_objective_alpha(alpha: np.ndarray, X: SparseColumnMatrix, y: np.ndarray, loss: LossSpec) -> float:
    """Serial dual objective from scratch (+inf if any coordinate is infeasible)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    c = conjugate_sum(loss, y, alpha)
    if not math.isfinite(c):
        return math.inf
    return dual_objective(X.matvec(alpha), c)


def primal_objective(v: np.ndarray, X: SparseColumnMatrix, y: np.ndarray, loss: LossSpec) -> float:
    """f^P(w) with w = v (serial version)."""
    z = X.rmatvec(v)
    return 0.5 * float(v @ v) + float(np.sum(primal_loss(loss, y, z)))


def compute_delta_t(v: np.ndarray, dv: np.ndarray, conj_sum: float, conj_sum_new: float) -> float:
    """Delta_t = grad g*(v)^T dv + xi*(-alpha-dalpha) - xi*(-alpha), with grad g*(v) = v."""
    return float(v @ dv) + (conj_sum_new - conj_sum)


def local_subproblem_rpcd(worker: WorkerData, alpha_k: np.ndarray, v: np.ndarray,
                          X: SparseColumnMatrix, loss: LossSpec, a1: float, a2: float,
                          epochs: int, rng: np.random.Generator | None = None) -> LocalStep:
    """Approximately solve one worker's block of the quadratic model.

    Each epoch visits the block's columns in a fresh random permutation.
    Every coordinate step is an exact 1-D minimization, so the model value
    never increases.
    """
    rng = worker.ctx.rng if rng is None else rng
    n = X.n_rows
    m = len(alpha_k)
    anew = alpha_k.copy()
    dv = np.zeros(n)
    if m:
        csc = X.csc
        for _ in range(epochs):
            perm = rng.permutation(m)
            K.rpcd_epoch(csc.indptr, csc.indices, csc.data, worker.ctx.block, perm,
                         worker.y, worker.sqnorm, alpha_k, anew, v, dv,
                         loss.code, loss.C, loss.eps, a1, a2)
    diff = conjugate_diff_sum(loss, worker.y, alpha_k, anew) if m else 0.0
    return LocalStep(anew, anew - alpha_k, dv, diff)


def _f_diff(eta: float, vdv: float, dvdv: float, conj_diff: float) -> float:
    """f(alpha + eta*dalpha) - f(alpha), with g* expanded around v."""
    return eta * vdv + 0.5 * eta * eta * dvdv + conj_diff


def backtracking_line_search(delta_t: float, vdv: float, dvdv: float, trial_diff,
                             tau: float, beta: float, max_backtracks: int,
                             first_diff: float | None = None, scale: float = 1.0):
    """Modified Armijo backtracking along a fixed direction.

    ``trial_diff(eta)`` returns the change of the conjugate sum between
    alpha and alpha + eta*dalpha (one scalar allreduce per call).  The
    change of g* comes from the cached v^T dv and ||dv||^2, so the test
    ``f(alpha + eta*dalpha) - f(alpha) <= eta*tau*Delta_t`` is evaluated on
    differences and does not lose precision near the optimum.
    ``first_diff`` replaces the eta = 1 call when it is already known.

    Returns (eta, f_change, conj_change, n_backtracks).
    """
    if delta_t > 1e-12 * scale:
        raise LineSearchError(f"direction is not a descent direction (Delta_t={delta_t:.3e})")
    eta = 1.0
    cd = first_diff if first_diff is not None else trial_diff(eta)
    fd = _f_diff(eta, vdv, dvdv, cd)
    if delta_t >= -NOISE_RTOL * scale:
        # predicted decrease below the resolution of f: take the step only if f does not go up
        if fd <= 0.0:
            return eta, fd, cd, 0
        return 0.0, 0.0, 0.0, 0
    i = 0
    while not fd <= eta * tau * delta_t:
        i += 1
        if i > max_backtracks:
            raise LineSearchError(f"Armijo condition not met after {max_backtracks} backtracks")
        eta *= beta
        cd = trial_diff(eta)
        fd = _f_diff(eta, vdv, dvdv, cd)
    return eta, fd, cd, i


def exact_step(num: float, den: float) -> float:
    """Minimizer over [0, 1] of eta*num + eta^2*den/2."""
    if den <= 0.0:
        return 1.0 if num < 0.0 else 0.0
    return min(max(-num / den, 0.0), 1.0)


def _quad_and_crossing(loss: LossSpec, alpha: np.ndarray, dalpha: np.ndarray) -> float:
    """Worker partial of the eta^2 coefficient of the conjugate sum.

    +inf flags an SVR coordinate whose sign flips, where |alpha| is not
    quadratic along the segment.
    """
    if len(alpha) == 0:
        return 0.0
    if loss.eps > 0.0 and np.any(alpha * (alpha + dalpha) < 0.0):
        return math.inf
    return K.conj_quad_coef(loss.code, loss.C) * float(dalpha @ dalpha)


def exact_line_search_quadratic(loss: LossSpec, v: np.ndarray, dv: np.ndarray, y: np.ndarray,
                                alpha: np.ndarray, dalpha: np.ndarray) -> float | None:
    """Exact minimizer of f(alpha + eta*dalpha) over eta in [0, 1] (serial form).

    Along the segment f changes by ``eta*num + eta^2*den/2`` with
    ``num = Delta_t - quad`` and ``den = ||dv||^2 + 2*quad``, where ``quad``
    is the eta^2 coefficient of the conjugate sum.  Returns None when an SVR
    coordinate changes sign; callers fall back to backtracking.
    """
    if not loss.quadratic_dual:
        raise UnsupportedLossError(f"exact line search is not available for {loss.kind}")
    if not np.any(dalpha):
        return 0.0
    quad = _quad_and_crossing(loss, alpha, dalpha)
    if math.isinf(quad):
        return None
    delta_t = float(v @ dv) + conjugate_diff_sum(loss, y, alpha, alpha + dalpha)
    return exact_step(delta_t - quad, float(dv @ dv) + 2.0 * quad)


@dataclass
class SolveResult:
    w: np.ndarray
    trace: list
    converged: bool
    state: IterateState
    stats: CommStats
    plan: StepPlan
    config: SolverConfig
    partition: Partition
    alpha: np.ndarray
    descent_violations: int = 0

    @property
    def f_dual(self) -> float:
        return self.state.f_dual

    @property
    def f_primal_pocket(self) -> float:
        return self.state.pocket_f_primal


class Solver:
    """Owns the simulated cluster, the per-worker data and the iterate."""

    def __init__(self, config: SolverConfig, loss: LossSpec, X: SparseColumnMatrix, y,
                 partition: Partition | None = None, latency: float = 0.0, bandwidth: float = 1e9):
        self.config = config
        self.loss = loss
        self.X = X
        self.y = np.asarray(y, dtype=np.float64)
        if len(self.y) != X.n_cols:
            raise ValueError(f"{len(self.y)} labels for {X.n_cols} columns")
        if loss.is_classification and not np.all(np.isin(self.y, (-1.0, 1.0))):
            raise ValueError(f"{loss.kind} needs labels in {{-1, +1}}")
        self.plan = config.plan(loss, X)
        if self.plan.rule == "exact" and not loss.quadratic_dual:
            raise UnsupportedLossError(f"exact line search is not available for {loss.kind}")
        if partition is None:
            partition = partition_by_nnz(X.column_nnz(), config.K, config.shuffle, config.seed)
        if partition.K != config.K:
            raise ConfigError(f"partition has {partition.K} blocks, config says K={config.K}")
        self.partition = partition
        self.latency = latency
        self.bandwidth = bandwidth
        n = X.n_rows
        rows = partition_rows(n, config.K)
        sqn = X.column_sqnorms()
        lo, hi = dual_bounds(loss, self.y)
        self.workers = []
        for k, block in enumerate(partition.blocks):
            ctx = WorkerContext(k, np.ascontiguousarray(block, dtype=np.int64), rows[k],
                                np.random.default_rng(config.seed ^ k))
            self.workers.append(WorkerData(ctx, np.ascontiguousarray(self.y[block]),
                                           np.ascontiguousarray(sqn[block]),
                                           lo[block], hi[block], X.csc[:, block]))
        self.cluster = Cluster(config.K, n, config.scheduler)
        self.state = self._initial_state()
        self.descent_violations = 0
        self._t0 = time.perf_counter()

    # -- distributed pieces -------------------------------------------------

    def _initial_state(self) -> IterateState:
        # alpha^0 = 0: v^0 = 0 and xi*(0) = 0 are known on every worker without communication
        alpha = [np.zeros(len(w.ctx.block)) for w in self.workers]
        v = np.zeros(self.X.n_rows)
        return IterateState(alpha, v, 0.0, 0.0, pocket_w=v.copy())

    def primal_objective(self, v: np.ndarray) -> float:
        """f^P(w(alpha)): each worker sums its losses plus its slice of g(w)."""
        def part(w: WorkerData):
            g = 0.5 * float(v[w.ctx.rows] @ v[w.ctx.rows])
            if w.Xk.shape[1] == 0:
                return g
            z = w.Xk.T @ v
            return g + float(np.sum(primal_loss(self.loss, w.y, z)))
        return self.cluster.allreduce_scalar(self.cluster.map(part, self.workers), monitor=True)

    def compute_direction(self) -> Direction:
        st = self.state
        a1, a2 = self.plan.a1, self.plan.a2
        epochs = self.config.local_epochs
        v = st.v

        def work(args):
            w, alpha_k = args
            return local_subproblem_rpcd(w, alpha_k, v, self.X, self.loss, a1, a2, epochs)

        steps = self.cluster.map(work, zip(self.workers, st.alpha))
        dv = self.cluster.allreduce_vector([s.dv for s in steps])
        partials = [float(v[w.ctx.rows] @ dv[w.ctx.rows]) + s.conj_diff
                    for w, s in zip(self.workers, steps)]
        delta_t = self.cluster.allreduce_scalar(partials)
        model = math.fsum(0.5 * (a1 * float(s.dv @ s.dv) + a2 * float(s.dalpha @ s.dalpha))
                          for s in steps) + delta_t
        return Direction([s.anew for s in steps], [s.dalpha for s in steps], dv, delta_t, model)

    def _trial_diff(self, d: Direction):
        st = self.state

        def at(eta: float) -> float:
            def part(args):
                w, a, da = args
                if len(a) == 0:
                    return 0.0
                return conjugate_diff_sum(self.loss, w.y, a, np.clip(a + eta * da, w.lo, w.hi))
            return self.cluster.allreduce_scalar(
                self.cluster.map(part, zip(self.workers, st.alpha, d.dalpha)))
        return at

    def choose_step(self, d: Direction):
        """Returns (eta, f_change, conj_change, backtracks, rule_used)."""
        st = self.state
        cfg = self.config
        vdv = float(st.v @ d.dv)
        dvdv = float(d.dv @ d.dv)
        trial = self._trial_diff(d)
        rule = self.plan.rule
        scale = 1.0 + abs(st.f_dual)
        if rule == "fixed":
            eta = self.plan.eta
            cd = trial(eta)
            return eta, _f_diff(eta, vdv, dvdv, cd), cd, 0, rule
        if rule == "exact":
            parts = self.cluster.map(lambda args: _quad_and_crossing(self.loss, args[0], args[1]),
                                     zip(st.alpha, d.dalpha))
            quad = self.cluster.allreduce_scalar(parts)
            if math.isinf(quad):
                eta, fd, cd, b = backtracking_line_search(
                    d.delta_t, vdv, dvdv, trial, cfg.tau, cfg.beta, cfg.max_backtracks,
                    first_diff=d.delta_t - vdv, scale=scale)
                return eta, fd, cd, b, "exact->backtrack"
            num = d.delta_t - quad
            den = dvdv + 2.0 * quad
            eta = exact_step(num, den)
            cd = eta * (num - vdv) + eta * eta * quad
            return eta, eta * num + 0.5 * eta * eta * den, cd, 0, rule
        eta, fd, cd, b = backtracking_line_search(
            d.delta_t, vdv, dvdv, trial, cfg.tau, cfg.beta, cfg.max_backtracks, scale=scale)
        return eta, fd, cd, b, rule

    def outer_step(self) -> TraceRecord:
        st = self.state
        d = self.compute_direction()
        eta, f_change, conj_change, backtracks, rule = self.choose_step(d)
        if eta > 0.0:
            if eta == 1.0:
                alpha = [a.copy() for a in d.anew]
            else:
                alpha = [np.clip(a + eta * da, w.lo, w.hi)
                         for a, da, w in zip(st.alpha, d.dalpha, self.workers)]
            v = st.v + eta * d.dv
        else:
            alpha, v, f_change, conj_change = st.alpha, st.v, 0.0, 0.0
        if f_change > 1e-12 * (1.0 + abs(st.f_dual)):
            self.descent_violations += 1
            log.warning("iteration %d: dual objective increased by %.3e (rule %s, eta %g)",
                        st.t + 1, f_change, rule, eta)
        self.state = IterateState(alpha, v, st.f_dual + f_change, st.conj_sum + conj_change,
                                  st.f_primal, st.pocket_f_primal, st.pocket_w, st.t + 1)
        self._observe()
        if self.config.debug and self.state.t % 100 == 0:
            self.check_consistency()
        return self._record(eta, backtracks, d.delta_t, d.model_decrease, rule)

    # -- bookkeeping --------------------------------------------------------

    def _observe(self):
        st = self.state
        st.f_primal = self.primal_objective(st.v)
        if st.f_primal < st.pocket_f_primal:
            st.pocket_f_primal = st.f_primal
            st.pocket_w = st.v.copy()

    def _record(self, eta, backtracks, delta_t, model_decrease=math.nan, rule="") -> TraceRecord:
        st = self.state
        s = self.cluster.stats
        return TraceRecord(st.t, time.perf_counter() - self._t0, s.rounds, s.bytes_total,
                           st.f_dual, st.f_primal, st.pocket_f_primal, eta, backtracks, delta_t,
                           s.vector_allreduce_rounds, s.scalar_allreduce_rounds,
                           simulated_time(s, self.latency, self.bandwidth), model_decrease, rule)

    def full_alpha(self) -> np.ndarray:
        out = np.zeros(self.X.n_cols)
        for w, a in zip(self.workers, self.state.alpha):
            out[w.ctx.block] = a
        return out

    def check_consistency(self, rtol: float = 1e-6):
        """Recompute X @ alpha and the conjugate sum from scratch and compare."""
        st = self.state
        alpha = self.full_alpha()
        v_ref = self.X.matvec(alpha)
        drift = float(np.linalg.norm(st.v - v_ref))
        if drift > rtol * (1.0 + float(np.linalg.norm(st.v))):
            raise AssertionError(f"v drifted from X @ alpha by {drift:.3e}")
        lo, hi = dual_bounds(self.loss, self.y)
        if np.any(alpha < lo) or np.any(alpha > hi):
            raise AssertionError("dual iterate left its feasible interval")
        c_ref = conjugate_sum(self.loss, self.y, alpha)
        if abs(c_ref - st.conj_sum) > rtol * (1.0 + abs(c_ref)):
            raise AssertionError(f"conjugate sum drifted: {st.conj_sum} vs {c_ref}")
        return drift

    def run(self, callback=None) -> SolveResult:
        """Iterate until the relative gap test, ``max_iter``, or ``callback(solver, record)``
        returns True (checked at every iterate, including the initial one)."""
        cfg = self.config
        self._t0 = time.perf_counter()
        self._observe()
        gap0 = self.state.f_dual + self.state.f_primal
        rec = self._record(0.0, 0, 0.0)
        trace = [rec]
        converged = False
        while True:
            st = self.state
            if st.f_dual + st.f_primal <= cfg.stop_eps * gap0:
                converged = True
                break
            if callback is not None and callback(self, rec):
                break
            if st.t >= cfg.max_iter:
                break
            rec = self.outer_step()
            trace.append(rec)
        st = self.state
        self.cluster.close()
        return SolveResult(st.pocket_w, trace, converged, st, self.cluster.stats.snapshot(),
                           self.plan, cfg, self.partition, self.full_alpha(), self.descent_violations)


def solve(config: SolverConfig, loss: LossSpec, X: SparseColumnMatrix, y,
          partition: Partition | None = None, **kw) -> SolveResult:
    return Solver(config, loss, X, y, partition, **kw).run()


def write_trace_csv(path, trace, fstar: float | None = None, time_column: str = "sim") -> None:
    """Write a trace; with ``fstar`` (dual optimum) append relative suboptimality columns."""
    header = list(TRACE_HEADER)
    if fstar is not None:
        header += ["rel_dual", "rel_primal"]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for r in trace:
            t = r.sim_time if time_column == "sim" else r.wall_time
            row = [r.iter, repr(float(t)), r.comm_rounds, r.comm_bytes, repr(r.f_dual),
                   repr(r.f_primal), repr(r.f_primal_pocket), repr(float(r.eta)), r.backtracks,
                   repr(float(r.delta_t))]
            if fstar is not None:
                rd, rp = relative_suboptimality(r.f_dual, r.f_primal, fstar)
                row += [repr(rd), repr(rp)]
            wr.writerow(row)


def read_trace_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def relative_suboptimality(f_dual: float, f_primal: float, fstar: float) -> tuple[float, float]:
    """(|f(alpha) - f*| / |f*|, |f^P(w) + f*| / |f*|) with f* the dual optimum."""
    denom = abs(fstar) if fstar != 0 else 1.0
    return abs(f_dual - fstar) / denom, abs(f_primal + fstar) / denom


def with_overrides(config: SolverConfig, **kw) -> SolverConfig:
    return replace(config, **kw)
