from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy import integrate, optimize

from blockdual import _kernels as K
from blockdual.model import (
    LossSpec,
    RegularizerSpec,
    conjugate,
    conjugate_diff_sum,
    conjugate_sum,
    coordinate_solve,
    dual_bounds,
    dual_interval,
    primal_loss,
    reg_conj_grad,
    reg_conj_value,
    reg_value,
)

LOSSES = ("l1-svm", "l2-svm", "logistic", "svr", "l2-svr", "lsq")

Cs = st.floats(0.1, 5.0)
epss = st.floats(0.0, 1.0)


@st.composite
def loss_and_label(draw, kinds=LOSSES):
    spec = LossSpec(draw(st.sampled_from(kinds)), draw(Cs), draw(epss))
    if spec.is_classification:
        y = draw(st.sampled_from([-1.0, 1.0]))
    else:
        y = draw(st.floats(-3.0, 3.0))
    return spec, y


def feasible_point(spec, y, u):
    """Map u in [0, 1] to a point of the (truncated) dual interval."""
    iv = dual_interval(spec, y)
    lo = max(iv.lo, -5 * spec.C)
    hi = min(iv.hi, 5 * spec.C)
    return lo + u * (hi - lo)


def legendre_conjugate(spec, y, a):
    """Numerical xi*(-a) = sup_z (-a z - xi(z)) by bounded scalar maximization."""
    res = optimize.minimize_scalar(lambda z: a * z + primal_loss(spec, y, z),
                                   bounds=(-60, 60), method="bounded",
                                   options={"xatol": 1e-12})
    return -res.fun


class TestLossSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            LossSpec("hinge-ish")
        with pytest.raises(ValueError):
            LossSpec("l1-svm", C=0.0)
        with pytest.raises(ValueError):
            LossSpec("svr", C=1.0, eps=-0.1)

    def test_aliases_and_eps_only_for_svr(self):
        assert LossSpec("hinge").kind == "l1-svm"
        assert LossSpec("l1-svm", eps=0.3).eps == 0.0
        assert LossSpec("svr", eps=0.3).eps == 0.3

    def test_serialization(self):
        spec = LossSpec("svr", 2.0, 0.1)
        assert spec.to_dict() == {"loss": "svr", "C": 2.0, "eps": 0.1}
        assert LossSpec.from_dict(spec.to_dict()) == spec

    def test_smoothness_metadata(self):
        assert LossSpec("l1-svm", 2.0).lipschitz == 2.0
        assert LossSpec("l1-svm").rho is None
        assert LossSpec("l2-svm", 2.0).rho == pytest.approx(4.0)
        assert LossSpec("logistic", 2.0).rho == pytest.approx(0.5)
        assert LossSpec("lsq", 1.0).conj_curvature == pytest.approx(0.5)

    def test_regularizer_is_fixed(self):
        assert RegularizerSpec().sigma == 1.0
        with pytest.raises(ValueError):
            RegularizerSpec(sigma=2.0)


class TestPrimalLoss:
    def test_examples(self):
        assert primal_loss(LossSpec("l1-svm"), 1.0, 1.0) == 0.0
        assert primal_loss(LossSpec("logistic"), 1.0, 0.0) == pytest.approx(math.log(2))
        assert primal_loss(LossSpec("svr", 2.0, 0.5), 1.0, 2.0) == pytest.approx(1.0)

    def test_all_formulas(self):
        y, z = -1.0, 0.3
        assert primal_loss(LossSpec("l2-svm", 2.0), y, z) == pytest.approx(2 * 1.3 ** 2)
        assert primal_loss(LossSpec("l2-svr", 2.0, 0.1), 0.5, -0.1) == pytest.approx(2 * 0.5 ** 2)
        assert primal_loss(LossSpec("lsq", 3.0), 0.5, -0.1) == pytest.approx(3 * 0.36)

    def test_logistic_large_margins_do_not_overflow(self):
        spec = LossSpec("logistic")
        assert primal_loss(spec, 1.0, -1000.0) == pytest.approx(1000.0)
        assert primal_loss(spec, 1.0, 1000.0) == pytest.approx(0.0, abs=1e-300)

    @given(loss_and_label(), st.floats(-5, 5))
    def test_vector_and_compiled_scalar_agree(self, ly, z):
        spec, y = ly
        ref = K.primal_loss_scalar(spec.code, spec.C, spec.eps, y, z)
        assert primal_loss(spec, y, z) == pytest.approx(ref, rel=1e-12, abs=1e-12)


class TestConjugate:
    def test_examples(self):
        assert conjugate(LossSpec("l1-svm"), 1.0, 0.0) == 0.0
        assert conjugate(LossSpec("l1-svm"), 1.0, 1.5) == math.inf
        assert conjugate(LossSpec("logistic"), 1.0, 0.5) == pytest.approx(-math.log(2))

    @pytest.mark.parametrize("kind", LOSSES)
    def test_zero_dual_has_zero_conjugate(self, kind):
        for y in (-1.0, 1.0):
            assert conjugate(LossSpec(kind, 3.0, 0.2), y, 0.0) == 0.0

    @pytest.mark.parametrize("kind, y, a", [
        ("l1-svm", 1.0, 0.4), ("l2-svm", -1.0, -0.7), ("logistic", 1.0, 0.3),
        ("logistic", -1.0, -1.6), ("svr", 0.4, -0.8), ("l2-svr", -0.3, 1.2), ("lsq", 0.7, 0.9),
    ])
    def test_matches_numerical_legendre_transform(self, kind, y, a):
        spec = LossSpec(kind, 2.0, 0.25)
        assert conjugate(spec, y, a) == pytest.approx(legendre_conjugate(spec, y, a), abs=1e-7)

    @given(loss_and_label(), st.floats(0, 1), st.floats(-20, 20))
    def test_fenchel_young(self, ly, u, z):
        spec, y = ly
        a = feasible_point(spec, y, u)
        assert primal_loss(spec, y, z) + conjugate(spec, y, a) + a * z >= -1e-9

    @given(loss_and_label(), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_midpoint_convexity(self, ly, u1, u2, lam):
        spec, y = ly
        a, b = feasible_point(spec, y, u1), feasible_point(spec, y, u2)
        m = lam * a + (1 - lam) * b
        lhs = conjugate(spec, y, m)
        rhs = lam * conjugate(spec, y, a) + (1 - lam) * conjugate(spec, y, b)
        assert lhs <= rhs + 1e-12 * (1 + abs(rhs))

    @given(loss_and_label(), st.lists(st.floats(0, 1), min_size=1, max_size=6))
    def test_vectorized_matches_compiled_scalar(self, ly, us):
        spec, y = ly
        a = np.array([feasible_point(spec, y, u) for u in us] + [10 * spec.C, -10 * spec.C])
        ys = np.full(a.shape, y)
        ref = np.array([K.conj_scalar(spec.code, spec.C, spec.eps, y, ai) for ai in a])
        np.testing.assert_allclose(conjugate(spec, ys, a), ref, rtol=1e-12, atol=1e-12)
        finite = np.isfinite(ref)
        assert conjugate_sum(spec, ys[finite], a[finite]) == pytest.approx(ref[finite].sum(), abs=1e-10)

    @given(loss_and_label(), st.lists(st.tuples(st.floats(0, 1), st.floats(-1e-3, 1e-3)),
                                      min_size=1, max_size=6))
    def test_difference_sum_matches_plain_difference(self, ly, pairs):
        spec, y = ly
        a = np.array([feasible_point(spec, y, u) for u, _ in pairs])
        b = np.clip(a + np.array([d for _, d in pairs]), *dual_bounds(spec, np.full(a.shape, y)))
        ys = np.full(a.shape, y)
        plain = conjugate_sum(spec, ys, b) - conjugate_sum(spec, ys, a)
        assert conjugate_diff_sum(spec, ys, a, b) == pytest.approx(plain, abs=1e-10)

    def test_difference_sum_flags_infeasible_target(self):
        spec = LossSpec("l1-svm")
        assert conjugate_diff_sum(spec, np.array([1.0]), np.array([0.5]), np.array([1.5])) == math.inf

    @given(st.floats(0.1, 5.0), st.sampled_from([-1.0, 1.0]), st.floats(0.01, 0.99))
    def test_logistic_derivative(self, C, y, frac):
        spec = LossSpec("logistic", C)
        a = y * frac * C
        h = 1e-6 * (1 + abs(a))
        fd = (conjugate(spec, y, a + h) - conjugate(spec, y, a - h)) / (2 * h)
        exact = y * math.log(a * y / (C - a * y))
        assert fd == pytest.approx(exact, abs=1e-5 * (1 + abs(exact)))


class TestDualInterval:
    def test_examples(self):
        iv = dual_interval(LossSpec("l1-svm"), -1.0)
        assert (iv.lo, iv.hi) == (-1.0, 0.0)
        iv = dual_interval(LossSpec("svr", 3.0), 0.2)
        assert (iv.lo, iv.hi) == (-3.0, 3.0)
        iv = dual_interval(LossSpec("lsq"), 0.2)
        assert (iv.lo, iv.hi) == (-math.inf, math.inf)
        iv = dual_interval(LossSpec("l2-svm"), 1.0)
        assert (iv.lo, iv.hi) == (0.0, math.inf)

    @given(loss_and_label())
    def test_contains_zero_and_matches_bounds(self, ly):
        spec, y = ly
        iv = dual_interval(spec, y)
        assert 0.0 in iv
        lo, hi = dual_bounds(spec, np.array([y]))
        assert (lo[0], hi[0]) == (iv.lo, iv.hi)

    @given(loss_and_label(), st.floats(-20, 20))
    def test_conjugate_finite_exactly_inside(self, ly, a):
        spec, y = ly
        assert math.isfinite(conjugate(spec, y, a)) == (a in dual_interval(spec, y))


def one_d_objective(spec, y, a_old, g, h):
    return lambda t: g * (t - a_old) + 0.5 * h * (t - a_old) ** 2 + conjugate(spec, y, t)


class TestCoordinateSolve:
    def test_stationary_at_boundary(self):
        assert coordinate_solve(LossSpec("l1-svm"), 1.0, 0.0, 1.0, 1.0) == 0.0

    def test_clipped_at_c(self):
        spec = LossSpec("l1-svm")
        got = coordinate_solve(spec, 1.0, 0.0, 0.0, 1.0)
        grid = np.linspace(0.0, 1.0, 1_000_001)
        assert got == 1.0
        assert grid[np.argmin(one_d_objective(spec, 1.0, 0.0, 0.0, 1.0)(grid))] == pytest.approx(1.0, abs=1e-6)

    def test_logistic_interior_stationarity(self):
        spec = LossSpec("logistic")
        phi = one_d_objective(spec, 1.0, 0.5, 0.0, 1.0)
        got = coordinate_solve(spec, 1.0, 0.5, 0.0, 1.0)
        golden = optimize.minimize_scalar(phi, bounds=(1e-12, 1 - 1e-12), method="bounded",
                                          options={"xatol": 1e-12}).x
        deriv = (got - 0.5) + math.log(got / (1 - got))
        assert abs(deriv) <= 1e-10
        assert got == pytest.approx(golden, abs=1e-6)

    def test_l2_svm_closed_form(self):
        # derivative g + h(a - a_old) - y + a/(2C) = 0 solved by hand: a = (h a_old - g + y)/(h + 1/(2C))
        spec = LossSpec("l2-svm", 2.0)
        got = coordinate_solve(spec, 1.0, 0.3, -0.2, 1.5)
        assert got == pytest.approx((1.5 * 0.3 + 0.2 + 1.0) / (1.5 + 0.25))
        assert coordinate_solve(spec, -1.0, -0.3, 5.0, 1.0) == 0.0 or \
            coordinate_solve(spec, -1.0, -0.3, 5.0, 1.0) <= 0.0

    def test_lsq_closed_form(self):
        spec = LossSpec("lsq", 0.5)
        got = coordinate_solve(spec, 0.7, 0.2, 0.1, 2.0)
        assert got == pytest.approx(0.2 + (0.7 - 0.1 - 0.2 / 1.0) / (2.0 + 1.0))

    def test_svr_soft_threshold_stays_at_zero(self):
        spec = LossSpec("svr", 1.0, 0.5)
        # |y - g| < eps keeps the coordinate at zero
        assert coordinate_solve(spec, 0.3, 0.0, 0.1, 1.0) == 0.0

    def test_rejects_non_positive_curvature(self):
        with pytest.raises(ValueError):
            coordinate_solve(LossSpec("l1-svm"), 1.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            coordinate_solve(LossSpec("lsq"), 1.0, 0.0, 0.0, -1.0)
        # strongly convex conjugates tolerate zero curvature
        assert coordinate_solve(LossSpec("lsq", 1.0), 1.0, 0.0, 0.0, 0.0) == pytest.approx(2.0)

    @given(loss_and_label(), st.floats(0, 1), st.floats(-3, 3), st.floats(0.05, 5.0))
    def test_grid_optimality(self, ly, u, g, h):
        spec, y = ly
        a_old = feasible_point(spec, y, u)
        a_new = coordinate_solve(spec, y, a_old, g, h)
        iv = dual_interval(spec, y)
        assert a_new in iv
        phi = one_d_objective(spec, y, a_old, g, h)
        lo, hi = max(iv.lo, a_new - 2.0), min(iv.hi, a_new + 2.0)
        grid = np.append(np.arange(lo, hi, 1e-4), hi)
        assert phi(a_new) <= np.min(phi(grid)) + 1e-8

    @given(loss_and_label(("logistic",)), st.floats(0, 1), st.floats(-50, 50), st.floats(1e-4, 1e3))
    def test_logistic_extreme_inputs_stay_feasible(self, ly, u, g, h):
        spec, y = ly
        a_old = feasible_point(spec, y, u)
        a_new = coordinate_solve(spec, y, a_old, g, h)
        assume(math.isfinite(a_new))
        b = a_new * y
        assert K.LOGIT_CLAMP <= b <= spec.C - K.LOGIT_CLAMP


class TestRegularizer:
    def test_examples(self):
        assert reg_conj_value(np.zeros(3)) == 0.0
        np.testing.assert_array_equal(reg_conj_grad(np.zeros(3)), np.zeros(3))
        assert reg_conj_value(np.array([3.0, 4.0])) == 12.5
        np.testing.assert_array_equal(reg_conj_grad(np.array([3.0, 4.0])), [3.0, 4.0])
        assert reg_value(np.array([3.0, 4.0])) == 12.5

    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=5))
    def test_value_is_integral_of_gradient_along_ray(self, vals):
        v = np.array(vals)
        integral, _ = integrate.quad(lambda t: float(reg_conj_grad(t * v) @ v), 0.0, 1.0,
                                     epsabs=1e-12, epsrel=1e-12)
        assert reg_conj_value(v) == pytest.approx(integral, abs=1e-8)
