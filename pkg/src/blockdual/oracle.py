"""Reference solutions used by the tests and the acceptance suite.

Three independent routes to an answer: a tightly converged single-worker
run with a duality-gap certificate, a nested grid search for problems with
at most three dual coordinates, and central finite differences.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .dataio import SparseColumnMatrix
from .engine import SolverConfig, Solver
from .model import LossSpec, conjugate, dual_bounds, primal_loss


class OracleError(RuntimeError):
    pass


def reference_optimum(X: SparseColumnMatrix, y, loss: LossSpec, tol: float = 1e-10,
                      max_iter: int = 200_000, local_epochs: int = 1) -> float:
    """Dual optimum f* certified by the duality gap.

    Runs one worker until ``|f^P_pocket + f| <= tol * (1 + |f|)`` and returns
    the midpoint of the dual value and minus the pocket primal value.
    """
    algo = "bda-exact-ls" if loss.quadratic_dual else "bda-backtrack"
    cfg = SolverConfig(algo=algo, K=1, stop_eps=0.0, max_iter=max_iter, local_epochs=local_epochs)

    def certified(solver, _rec):
        st = solver.state
        return abs(st.pocket_f_primal + st.f_dual) <= tol * (1.0 + abs(st.f_dual))

    res = Solver(cfg, loss, X, y).run(callback=certified)
    st = res.state
    if not abs(st.pocket_f_primal + st.f_dual) <= tol * (1.0 + abs(st.f_dual)):
        raise OracleError(f"gap {st.pocket_f_primal + st.f_dual:.3e} not certified "
                          f"after {st.t} iterations")
    return 0.5 * (st.f_dual - st.pocket_f_primal)


def dual_values(X: SparseColumnMatrix, y, loss: LossSpec, alphas: np.ndarray) -> np.ndarray:
    """Dual objective at each row of ``alphas`` (shape (m, N)); +inf if infeasible."""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=np.float64))
    V = X.csc @ alphas.T  # (n, m)
    conj = conjugate(loss, np.asarray(y, dtype=np.float64)[None, :], alphas).sum(axis=1)
    return 0.5 * np.einsum("ij,ij->j", V, V) + conj


def brute_force_dual(X: SparseColumnMatrix, y, loss: LossSpec, resolution: float = 1e-6,
                     points: int = 41, truncate: float = 10.0):
    """Nested grid search for problems with at most three dual coordinates.

    Unbounded directions are cut at ``truncate * C``.  Each pass re-centres a
    box of +-3 grid steps on the incumbent until the step is below
    ``resolution``.  Returns ``(alpha_star, f_star)``.
    """
    y = np.asarray(y, dtype=np.float64)
    N = X.n_cols
    if not 1 <= N <= 3:
        raise ValueError(f"brute_force_dual handles 1..3 dual coordinates, got {N}")
    lo, hi = dual_bounds(loss, y)
    cap = truncate * loss.C
    if np.any(np.isinf(lo)) or np.any(np.isinf(hi)):
        warnings.warn(f"unbounded dual interval truncated to |alpha| <= {cap:g}", stacklevel=2)
    lo = np.maximum(lo, -cap)
    hi = np.minimum(hi, cap)
    box_lo, box_hi = lo.copy(), hi.copy()
    best_a, best_f = None, math.inf
    while True:
        axes = [np.linspace(box_lo[i], box_hi[i], points) for i in range(N)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, N)
        f = dual_values(X, y, loss, grid)
        k = int(np.argmin(f))
        if f[k] <= best_f:
            best_a, best_f = grid[k].copy(), float(f[k])
        step = float(np.max((box_hi - box_lo) / (points - 1)))
        if step <= resolution:
            break
        box_lo = np.maximum(best_a - 3 * step, lo)
        box_hi = np.minimum(best_a + 3 * step, hi)
    return best_a, best_f


def finite_diff_grad(f, x, h: float | None = None):
    """Central-difference gradient.

    The step per coordinate is ``1e-6 * (1 + |x_i|)`` unless ``h`` is given.
    Returns ``(grad, ok)``; coordinates where ``f`` is not finite on either
    side are skipped, left as NaN and flagged False in ``ok``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    grad = np.full(x.shape, np.nan)
    ok = np.zeros(x.shape, dtype=bool)
    for i in range(x.size):
        hi_ = 1e-6 * (1.0 + abs(x[i])) if h is None else h
        xp, xm = x.copy(), x.copy()
        xp[i] += hi_
        xm[i] -= hi_
        fp, fm = float(f(xp)), float(f(xm))
        if math.isfinite(fp) and math.isfinite(fm):
            grad[i] = (fp - fm) / (2.0 * hi_)
            ok[i] = True
    return grad, ok


def lsq_optimum(X: SparseColumnMatrix, y, C: float) -> tuple[np.ndarray, float]:
    """Least-squares primal solution by a dense solve; returns (w*, dual f*).

    Minimizes ``0.5*||w||^2 + C*||X^T w - y||^2``.
    """
    A = X.toarray()
    y = np.asarray(y, dtype=np.float64)
    w = np.linalg.solve(np.eye(A.shape[0]) + 2.0 * C * A @ A.T, 2.0 * C * A @ y)
    fp = 0.5 * float(w @ w) + float(np.sum(primal_loss(LossSpec("lsq", C), y, A.T @ w)))
    return w, -fp


def write_fstar(path, fstar: float) -> None:
    with open(path, "w") as fh:
        fh.write(repr(float(fstar)) + "\n")


def read_fstar(path) -> float:
    with open(path) as fh:
        text = fh.read().strip()
    try:
        val = float(text)
    except ValueError:
        raise ValueError(f"{path}: expected a single real number, got {text[:40]!r}") from None
    if not math.isfinite(val):
        raise ValueError(f"{path}: f* must be finite")
    return val
