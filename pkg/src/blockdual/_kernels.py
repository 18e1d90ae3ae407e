"""Compiled scalar kernels shared by the loss model and the local solver.

Loss kinds are passed as small integers so the RPCD loop can run inside a
single jitted function.  All arithmetic is float64.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

L1_SVM = 0
L2_SVM = 1
LOGISTIC = 2
SVR = 3
L2_SVR = 4
LSQ = 5

LOGIT_CLAMP = 1e-12
LOGIT_DERIV_TOL = 1e-12
LOGIT_MAX_ITER = 100


@njit(cache=True)
def _xlogx(x):
    if x <= 0.0:
        return 0.0
    return x * math.log(x)


@njit(cache=True)
def primal_loss_scalar(kind, C, eps, y, z):
    if kind == L1_SVM:
        return C * max(1.0 - y * z, 0.0)
    if kind == L2_SVM:
        m = max(1.0 - y * z, 0.0)
        return C * m * m
    if kind == LOGISTIC:
        t = -y * z
        # log(1 + exp(t)) without overflow
        if t > 0.0:
            return C * (t + math.log1p(math.exp(-t)))
        return C * math.log1p(math.exp(t))
    if kind == SVR:
        return C * max(abs(z - y) - eps, 0.0)
    if kind == L2_SVR:
        m = max(abs(z - y) - eps, 0.0)
        return C * m * m
    d = z - y
    return C * d * d


@njit(cache=True)
def conj_scalar(kind, C, eps, y, a):
    """xi*(-a); +inf outside the feasible interval."""
    if kind == L1_SVM:
        b = a * y
        if b < 0.0 or b > C:
            return np.inf
        return -b
    if kind == L2_SVM:
        b = a * y
        if b < 0.0:
            return np.inf
        return -b + a * a / (4.0 * C)
    if kind == LOGISTIC:
        b = a * y
        if b < 0.0 or b > C:
            return np.inf
        return _xlogx(b) + _xlogx(C - b) - _xlogx(C)
    if kind == SVR:
        if a < -C or a > C:
            return np.inf
        return eps * abs(a) - a * y
    if kind == L2_SVR:
        return eps * abs(a) - a * y + a * a / (4.0 * C)
    return -a * y + a * a / (4.0 * C)


@njit(cache=True)
def conj_sum(kind, C, eps, y, a):
    s = 0.0
    for i in range(a.shape[0]):
        s += conj_scalar(kind, C, eps, y[i], a[i])
    return s


@njit(cache=True)
def _xlogx_diff(p, q):
    """q*log(q) - p*log(p) without cancellation when q is close to p."""
    if p <= 0.0 or q <= 0.0:
        return _xlogx(q) - _xlogx(p)
    d = q - p
    return d * math.log(q) + p * math.log1p(d / p)


@njit(cache=True)
def conj_diff_sum(kind, C, eps, y, a, b):
    """sum_i xi*(-b_i) - xi*(-a_i), formed per coordinate to avoid cancellation.

    ``a`` must be feasible; +inf if any ``b_i`` is not.
    """
    s = 0.0
    q = 1.0 / (4.0 * C)
    for i in range(a.shape[0]):
        ai = a[i]
        bi = b[i]
        d = bi - ai
        if d == 0.0:
            continue
        if kind == LOGISTIC:
            pb = bi * y[i]
            if pb < 0.0 or pb > C:
                return np.inf
            pa = ai * y[i]
            s += _xlogx_diff(pa, pb) + _xlogx_diff(C - pa, C - pb)
            continue
        if kind == L1_SVM:
            t = bi * y[i]
            if t < 0.0 or t > C:
                return np.inf
            s += -y[i] * d
        elif kind == L2_SVM:
            if bi * y[i] < 0.0:
                return np.inf
            s += -y[i] * d + d * (bi + ai) * q
        elif kind == SVR:
            if bi < -C or bi > C:
                return np.inf
            s += eps * (abs(bi) - abs(ai)) - y[i] * d
        elif kind == L2_SVR:
            s += eps * (abs(bi) - abs(ai)) - y[i] * d + d * (bi + ai) * q
        else:
            s += -y[i] * d + d * (bi + ai) * q
    return s


@njit(cache=True)
def conj_quad_coef(kind, C):
    """Coefficient of a**2 in the conjugate (0 for the piecewise-linear ones)."""
    if kind == L2_SVM or kind == L2_SVR or kind == LSQ:
        return 1.0 / (4.0 * C)
    return 0.0


@njit(cache=True)
def _soft(u, t):
    if u > t:
        return u - t
    if u < -t:
        return u + t
    return 0.0


@njit(cache=True)
def _logistic_solve(C, y, a_old, g, h):
    lo = LOGIT_CLAMP
    hi = C - LOGIT_CLAMP
    if hi <= lo:
        return y * 0.5 * C
    gy = g * y
    b_old = a_old * y

    def dphi(b):
        return gy + h * (b - b_old) + math.log(b) - math.log(C - b)

    dlo = dphi(lo)
    if dlo >= 0.0:
        return y * lo
    dhi = dphi(hi)
    if dhi <= 0.0:
        return y * hi
    left = lo
    right = hi
    b = min(max(b_old, lo), hi)
    if b == lo or b == hi:
        b = 0.5 * C
    for _ in range(LOGIT_MAX_ITER):
        d = dphi(b)
        if abs(d) <= LOGIT_DERIV_TOL:
            break
        if d > 0.0:
            right = b
        else:
            left = b
        if right - left <= 4e-16 * max(1.0, right):
            break
        step = b - d / (h + C / (b * (C - b)))
        if step <= left or step >= right:
            step = 0.5 * (left + right)
        b = step
    return y * b


@njit(cache=True)
def coord_solve(kind, C, eps, y, a_old, g, h):
    """argmin_a  g*(a - a_old) + h/2*(a - a_old)**2 + xi*(-a)."""
    if kind == L1_SVM:
        b = y * (a_old + (y - g) / h)
        b = min(max(b, 0.0), C)
        return y * b
    if kind == L2_SVM:
        D = 1.0 / (2.0 * C)
        b = y * (a_old + (y - g - a_old * D) / (h + D))
        return y * max(b, 0.0)
    if kind == LOGISTIC:
        return _logistic_solve(C, y, a_old, g, h)
    if kind == SVR:
        u = a_old - (g - y) / h
        a = _soft(u, eps / h)
        return min(max(a, -C), C)
    D = 1.0 / (2.0 * C)
    hh = h + D
    u = (h * a_old - g + y) / hh
    if kind == L2_SVR:
        return _soft(u, eps / hh)
    return u


@njit(cache=True, nogil=True)
def rpcd_epoch(indptr, indices, data, cols, perm, y, sqnorm, alpha, anew,
               v, dv, kind, C, eps, a1, a2):
    """One pass of coordinate descent on the local quadratic model.

    ``anew`` holds alpha + dalpha for the block and ``dv`` the local
    X_k @ dalpha; both are updated in place.
    """
    strong = conj_quad_coef(kind, C) > 0.0 or kind == LOGISTIC
    for p in perm:
        j = cols[p]
        s = indptr[j]
        e = indptr[j + 1]
        h = a1 * sqnorm[p] + a2
        if h <= 0.0 and not strong:
            continue
        xv = 0.0
        for q in range(s, e):
            r = indices[q]
            xv += data[q] * (v[r] + a1 * dv[r])
        a_old = anew[p]
        g = xv + a2 * (a_old - alpha[p])
        a_new = coord_solve(kind, C, eps, y[p], a_old, g, h)
        d = a_new - a_old
        if d != 0.0:
            anew[p] = a_new
            for q in range(s, e):
                dv[indices[q]] += d * data[q]
