import numpy as np
import pytest

from edgeworth.errors import InvalidModelError, ModelEvaluationError, ResolutionError
from edgeworth.models import make_builtin, models
from edgeworth.models.base import (
    PARTIAL_NAMES,
    GFunction,
    GModel,
    analytic_partials,
    constant,
    eval_coefficients,
    finite_diff_partials,
)

BUILTINS = [
    ("brownian_identity", {}),
    ("exp_pair", {"a": 0.5, "b": 0.0, "c": 0.5, "d": 0.0}),
    ("exp_pair", {"a": -0.3, "b": 0.2, "c": 0.7, "d": -0.245}),
    ("linear_pair", {"gx": 1.0, "kx": 0.5, "gy": 2.0, "ky": -0.4}),
    ("bs_delta_hedge", {}),
    ("bs_delta_hedge", {"s0": 1.1, "vol": 0.3, "strike": 0.9, "maturity": 1.5}),
]

T = np.array([0.0, 0.2, 0.5, 0.8, 1.0])
W = np.array([0.0, -0.6, 0.4, 1.2, -1.0])


class TestEvalCoefficients:
    def test_exp_pair_at_origin(self, exp_pair_model, derived):
        point = eval_coefficients(exp_pair_model, 0.0, 0.0)
        assert point.xi == derived["exp_pair(0.5,0,0.5,0)@(0,0).xi"]["value"]
        assert point.d1_gs == derived["exp_pair(0.5,0,0.5,0)@(0,0).d1_gs"]["value"]
        assert point.theta == 0.125
        assert point.gamma == point.sigma == 0.5
        assert point.d_plus_theta == 0.0625
        assert point.d_plus_sigma == 0.25
        assert point.d2_gs == 0.25

    def test_brownian_identity_is_constant(self, brownian_model):
        point = eval_coefficients(brownian_model, T, W)
        np.testing.assert_array_equal(point.gamma, 1.0)
        np.testing.assert_array_equal(point.sigma, 1.0)
        for name in ("xi", "theta", "d_plus_theta", "d_plus_sigma", "d1_gs", "d2_gs"):
            np.testing.assert_array_equal(getattr(point, name), 0.0)
        np.testing.assert_array_equal(point.x_val, W)

    def test_exp_pair_swap_symmetry(self):
        """Swapping (a, b) with (c, d) swaps Gamma with Sigma and Xi with Theta bit for bit."""
        one = eval_coefficients(make_builtin("exp_pair", {"a": 0.3, "b": 0.1, "c": -0.7, "d": 0.4}), T, W)
        two = eval_coefficients(make_builtin("exp_pair", {"a": -0.7, "b": 0.4, "c": 0.3, "d": 0.1}), T, W)
        np.testing.assert_array_equal(one.gamma, two.sigma)
        np.testing.assert_array_equal(one.sigma, two.gamma)
        np.testing.assert_array_equal(one.xi, two.theta)
        np.testing.assert_array_equal(one.theta, two.xi)
        np.testing.assert_allclose(one.d1_gs, two.d1_gs, rtol=1e-14)

    def test_martingale_exp_pair_has_no_drift(self):
        c = 0.6
        model = make_builtin("exp_pair", {"a": 0.4, "b": 0.0, "c": c, "d": -c * c / 2})
        np.testing.assert_allclose(eval_coefficients(model, T, W).theta, 0.0, atol=1e-15)

    def test_constant_slope_linear_pair(self):
        model = make_builtin("linear_pair", {"gx": 1.5, "kx": 0.0, "gy": 0.5, "ky": 0.0})
        point = eval_coefficients(model, T, W)
        np.testing.assert_array_equal(point.gamma * point.sigma, 0.75)
        for name in ("xi", "theta", "d_plus_theta", "d1_gs", "d2_gs"):
            np.testing.assert_array_equal(getattr(point, name), 0.0)

    def test_non_finite_partial_names_the_partial(self):
        bad = GFunction(
            value=lambda t, w: np.log(w + 0.0 * t),
            d_t=constant(0.0),
            d_w=lambda t, w: 1.0 / w,
            d_ww=lambda t, w: -1.0 / (w * w),
            d_www=lambda t, w: 2.0 / w**3,
            d_tw=constant(0.0),
        )
        model = GModel("log_pair", g_x=bad, g_y=bad)
        with pytest.raises(ModelEvaluationError, match="g_x.value"):
            with np.errstate(all="ignore"):
                eval_coefficients(model, T, W)


class TestFiniteDifferences:
    @pytest.mark.parametrize("name,params", BUILTINS)
    def test_analytic_partials_match(self, name, params):
        model = make_builtin(name, params)
        fd = finite_diff_partials(model, T[1:-1], W[1:-1])
        for which in ("g_x", "g_y"):
            exact = analytic_partials(model, which, T[1:-1], W[1:-1])
            for partial in PARTIAL_NAMES:
                np.testing.assert_allclose(
                    getattr(getattr(fd, which), partial),
                    getattr(exact, partial),
                    rtol=1e-5,
                    atol=1e-5,
                    err_msg=f"{name}.{which}.{partial}",
                )

    def test_uniform_step(self, exp_pair_model):
        fd = finite_diff_partials(exp_pair_model, 0.3, 0.2, step=1e-4)
        exact = analytic_partials(exp_pair_model, "g_y", 0.3, 0.2)
        assert fd.g_y.d_w == pytest.approx(exact.d_w, rel=1e-7)

    def test_rejects_bad_step(self, exp_pair_model):
        with pytest.raises(ValueError):
            finite_diff_partials(exp_pair_model, 0.0, 0.0, step=0.0)


class TestRegistry:
    def test_builtins(self):
        assert set(models) == {"brownian_identity", "exp_pair", "bs_delta_hedge", "linear_pair"}

    @pytest.mark.parametrize("name,params", BUILTINS)
    def test_builtins_are_not_user_supplied(self, name, params):
        assert not make_builtin(name, params).user_supplied

    def test_direct_construction_is_user_supplied(self, odd_error_model):
        assert odd_error_model.user_supplied

    def test_unknown_model(self):
        with pytest.raises(ResolutionError):
            make_builtin("heston")

    def test_unknown_parameter(self):
        with pytest.raises(InvalidModelError, match="unknown parameters"):
            make_builtin("exp_pair", {"a": 1, "b": 0, "c": 1, "d": 0, "e": 2})

    def test_missing_parameter(self):
        with pytest.raises(InvalidModelError):
            make_builtin("exp_pair", {"a": 1})

    @pytest.mark.parametrize(
        "name,params",
        [
            ("exp_pair", {"a": 0.0, "b": 0.0, "c": 1.0, "d": 0.0}),
            ("linear_pair", {"gx": 0.0, "kx": 0.0, "gy": 1.0, "ky": 0.0}),
            ("linear_pair", {"gx": 1.0, "kx": -1.0, "gy": 1.0, "ky": 0.0}),
            ("bs_delta_hedge", {"vol": -0.2}),
        ],
    )
    def test_degenerate_parameters(self, name, params):
        with pytest.raises(InvalidModelError):
            make_builtin(name, params)

    def test_delta_singular_at_maturity(self):
        with pytest.raises(InvalidModelError, match="delta singular at maturity"):
            make_builtin("bs_delta_hedge", {"maturity": 1.0}, horizon=1.0)
        assert make_builtin("bs_delta_hedge", {"maturity": 1.0}, horizon=0.5).name == "bs_delta_hedge"

    def test_describe(self):
        assert make_builtin("brownian_identity").describe() == "brownian_identity"
        assert make_builtin("exp_pair", {"a": 0.5, "b": 0, "c": 0.5, "d": 0}).describe() == "exp_pair(a=0.5,b=0,c=0.5,d=0)"

    def test_bs_delta_is_call_delta(self):
        from scipy.stats import norm

        model = make_builtin("bs_delta_hedge", {"s0": 1.0, "vol": 0.2, "strike": 1.0, "maturity": 2.0})
        point = eval_coefficients(model, 0.0, 0.0)
        assert point.x_val == pytest.approx(norm.cdf(0.5 * 0.2 * np.sqrt(2.0)), rel=1e-14)
        assert point.y_val == 1.0

    @pytest.mark.parametrize("value", ["x", None, True, float("inf")])
    def test_non_numeric_parameter(self, value):
        with pytest.raises(InvalidModelError, match="parameter 'a'"):
            make_builtin("exp_pair", {"a": value, "b": 0.0, "c": 0.5, "d": 0.0})
