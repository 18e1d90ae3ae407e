"""Losses of the dual ERM problem and the squared-L2 regularizer.

Every loss is described by a :class:`LossSpec`.  Dual coordinates are kept
in raw form ``alpha`` (not label-folded) on the public surface; the
classification formulas work on ``beta = alpha * y`` internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K

KINDS = {
    "l1-svm": K.L1_SVM,
    "l2-svm": K.L2_SVM,
    "logistic": K.LOGISTIC,
    "svr": K.SVR,
    "l2-svr": K.L2_SVR,
    "lsq": K.LSQ,
}
ALIASES = {
    "hinge": "l1-svm",
    "squared-hinge": "l2-svm",
    "lr": "logistic",
    "least-squares": "lsq",
}
CLASSIFICATION = frozenset({"l1-svm", "l2-svm", "logistic"})
# losses whose dual objective is quadratic on the feasible set (exact line search)
QUADRATIC_DUAL = frozenset({"l1-svm", "l2-svm", "svr", "l2-svr", "lsq"})


@dataclass(frozen=True)
class LossSpec:
    kind: str
    C: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        kind = ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown loss {self.kind!r}; expected one of {sorted(KINDS)}")
        object.__setattr__(self, "kind", kind)
        if not (self.C > 0 and math.isfinite(self.C)):
            raise ValueError(f"C must be positive and finite, got {self.C}")
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be non-negative, got {self.eps}")
        if kind not in ("svr", "l2-svr"):
            object.__setattr__(self, "eps", 0.0)

    @property
    def code(self) -> int:
        return KINDS[self.kind]

    @property
    def is_classification(self) -> bool:
        return self.kind in CLASSIFICATION

    @property
    def quadratic_dual(self) -> bool:
        return self.kind in QUADRATIC_DUAL

    @property
    def conj_curvature(self) -> float:
        """Strong-convexity modulus of alpha -> xi*(-alpha), i.e. 1/rho.

        Zero for the Lipschitz (non-smooth) losses.  For logistic the
        conjugate's second derivative is C/(b(C-b)) >= 4/C.
        """
        if self.kind in ("l2-svm", "l2-svr", "lsq"):
            return 1.0 / (2.0 * self.C)
        if self.kind == "logistic":
            return 4.0 / self.C
        return 0.0

    @property
    def rho(self) -> float | None:
        """Lipschitz constant of the loss gradient; None if the loss is not smooth."""
        c = self.conj_curvature
        return 1.0 / c if c > 0 else None

    @property
    def lipschitz(self) -> float | None:
        """Lipschitz constant of the loss itself (hinge and SVR only)."""
        return self.C if self.kind in ("l1-svm", "svr") else None

    def to_dict(self) -> dict:
        return {"loss": self.kind, "C": self.C, "eps": self.eps}

    @classmethod
    def from_dict(cls, d: dict) -> "LossSpec":
        return cls(d["loss"], float(d.get("C", 1.0)), float(d.get("eps", 0.0)))


@dataclass(frozen=True)
class RegularizerSpec:
    """g(w) = 0.5 * ||w||**2, the only regularizer shipped."""

    kind: str = "squared-l2"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind != "squared-l2" or self.sigma != 1.0:
            raise ValueError("only the squared-L2 regularizer (sigma=1) is implemented")


@dataclass(frozen=True)
class DualInterval:
    lo: float
    hi: float

    def __contains__(self, a) -> bool:
        return self.lo <= a <= self.hi


def primal_loss(spec: LossSpec, y, z):
    """xi(z) for label y.  Vectorized over array inputs."""
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    C = spec.C
    k = spec.kind
    if k == "l1-svm":
        out = C * np.maximum(1.0 - y * z, 0.0)
    elif k == "l2-svm":
        out = C * np.maximum(1.0 - y * z, 0.0) ** 2
    elif k == "logistic":
        out = C * np.logaddexp(0.0, -y * z)
    elif k == "svr":
        out = C * np.maximum(np.abs(z - y) - spec.eps, 0.0)
    elif k == "l2-svr":
        out = C * np.maximum(np.abs(z - y) - spec.eps, 0.0) ** 2
    else:
        out = C * (z - y) ** 2
    return out[()] if out.ndim == 0 else out


def conjugate(spec: LossSpec, y, a):
    """xi*(-a), +inf when a is outside the dual interval."""
    if np.ndim(a) == 0 and np.ndim(y) == 0:
        return K.conj_scalar(spec.code, spec.C, spec.eps, float(y), float(a))
    y, a = np.broadcast_arrays(np.asarray(y, dtype=np.float64), np.asarray(a, dtype=np.float64))
    C, eps, k = spec.C, spec.eps, spec.kind
    if k in ("l1-svm", "l2-svm", "logistic"):
        b = a * y
        feasible = (b >= 0.0) & (b <= C) if k != "l2-svm" else b >= 0.0
        if k == "l1-svm":
            val = -b
        elif k == "l2-svm":
            val = -b + a * a / (4.0 * C)
        else:
            val = _xlogx(b) + _xlogx(C - b) - _xlogx(np.float64(C))
        return np.where(feasible, val, np.inf)
    val = eps * np.abs(a) - a * y
    if k == "svr":
        return np.where(np.abs(a) <= C, val, np.inf)
    return val + a * a / (4.0 * C)


def _xlogx(x):
    x = np.asarray(x, dtype=np.float64)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


def conjugate_sum(spec: LossSpec, y: np.ndarray, a: np.ndarray) -> float:
    return K.conj_sum(spec.code, spec.C, spec.eps,
                      np.ascontiguousarray(y, dtype=np.float64),
                      np.ascontiguousarray(a, dtype=np.float64))


def conjugate_diff_sum(spec: LossSpec, y, a, b) -> float:
    """sum xi*(-b) - sum xi*(-a), accurate when b is close to a."""
    return K.conj_diff_sum(spec.code, spec.C, spec.eps,
                           np.ascontiguousarray(y, dtype=np.float64),
                           np.ascontiguousarray(a, dtype=np.float64),
                           np.ascontiguousarray(b, dtype=np.float64))


def dual_interval(spec: LossSpec, y: float) -> DualInterval:
    C = spec.C
    k = spec.kind
    if k in ("l1-svm", "logistic"):
        return DualInterval(0.0, C) if y > 0 else DualInterval(-C, 0.0)
    if k == "l2-svm":
        return DualInterval(0.0, math.inf) if y > 0 else DualInterval(-math.inf, 0.0)
    if k == "svr":
        return DualInterval(-C, C)
    return DualInterval(-math.inf, math.inf)


def dual_bounds(spec: LossSpec, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`dual_interval` returning (lo, hi) arrays."""
    y = np.asarray(y, dtype=np.float64)
    lo = np.full(y.shape, -np.inf)
    hi = np.full(y.shape, np.inf)
    C = spec.C
    k = spec.kind
    pos = y > 0
    if k in ("l1-svm", "logistic"):
        lo = np.where(pos, 0.0, -C)
        hi = np.where(pos, C, 0.0)
    elif k == "l2-svm":
        lo = np.where(pos, 0.0, -np.inf)
        hi = np.where(pos, np.inf, 0.0)
    elif k == "svr":
        lo[:] = -C
        hi[:] = C
    return lo, hi


def coordinate_solve(spec: LossSpec, y: float, a_old: float, grad_q: float, hess_q: float) -> float:
    """Minimize ``grad_q*d + hess_q/2*d**2 + xi*(-(a_old + d))`` and return a_old + d.

    ``hess_q`` must be positive.  A zero curvature is tolerated only when
    the conjugate itself is strongly convex.
    """
    if not hess_q > 0 and not (hess_q == 0 and spec.conj_curvature > 0):
        raise ValueError(f"coordinate_solve needs hess_q > 0, got {hess_q}")
    return K.coord_solve(spec.code, spec.C, spec.eps, float(y), float(a_old),
                         float(grad_q), float(hess_q))


def reg_value(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=np.float64)
    return 0.5 * float(w @ w)


def reg_conj_value(v: np.ndarray) -> float:
    """g*(v) = 0.5 * ||v||**2."""
    v = np.asarray(v, dtype=np.float64)
    return 0.5 * float(v @ v)


def reg_conj_grad(v: np.ndarray) -> np.ndarray:
    """grad g*(v) = v, which is also the primal iterate w(alpha)."""
    return np.array(v, dtype=np.float64, copy=True)
