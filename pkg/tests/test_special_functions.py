import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlpoisson import (
    DEFAULT_CONTROL,
    InvalidParams,
    MLParams,
    NonConvergence,
    SeriesControl,
    ml_asymptotic,
    ml_derivative,
    ml_eval,
    ml_eval_signed_log,
    ml_factorial_sums,
    reciprocal_gamma,
)

from _oracles import mp_ml, mp_ml_derivative

# frozen from scripts/oracle_values.py (50-digit mpmath summation of the series)
ML_0755_1040_AT_5 = 4.7885724112996479e-06
LN_ML_ORACLE = {
    (0.6, 1.0, 200.0): 6840.4146123305539,
    (0.6, 3.0, 200.0): 6822.7535544420605,
    (1.0, 1.0, 200.0): 200.0,
    (1.0, 3.0, 200.0): 189.40336526690393,
    (1.4, 1.0, 200.0): 43.677731968998531,
    (1.4, 3.0, 200.0): 36.108707159644193,
}
LN_ML_HALF_1_AT_30 = 900.69314718055995


class TestReciprocalGamma:
    def test_known_values(self):
        assert reciprocal_gamma(1.0) == pytest.approx(1.0, rel=1e-13)
        assert reciprocal_gamma(0.5) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-13)
        assert reciprocal_gamma(5.0) == pytest.approx(1.0 / 24.0, rel=1e-13)

    def test_poles_are_exact_zero(self):
        for x in (0.0, -1.0, -2.0, -3.0, -25.0):
            assert reciprocal_gamma(x) == 0.0

    def test_negative_noninteger_sign(self):
        # Gamma alternates sign between consecutive negative integers
        assert reciprocal_gamma(-0.5) < 0.0
        assert reciprocal_gamma(-1.5) > 0.0
        assert reciprocal_gamma(-2.5) < 0.0

    def test_large_argument_underflows_cleanly(self):
        small = reciprocal_gamma(170.0)
        assert 0.0 < small < 1e-300
        assert reciprocal_gamma(500.0) == 0.0

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidParams):
            reciprocal_gamma(math.inf)
        with pytest.raises(InvalidParams):
            reciprocal_gamma(math.nan)

    @settings(deadline=None, max_examples=80)
    @given(st.floats(min_value=-25.0, max_value=25.0))
    def test_matches_oracle(self, x):
        # stay away from the poles, where relative comparison is meaningless
        if x <= 0.5 and abs(x - round(x)) < 1e-2:
            return
        from mpmath import mp

        with mp.workdps(40):
            expected = float(mp.rgamma(x))
        assert reciprocal_gamma(x) == pytest.approx(expected, rel=1e-11, abs=1e-300)


class TestMlEval:
    def test_exponential(self):
        p = MLParams(1.0, 1.0)
        assert ml_eval(p, 2.0) == pytest.approx(math.exp(2.0), rel=1e-13)

    def test_cosh(self):
        assert ml_eval(MLParams(2.0, 1.0), 4.0) == pytest.approx(math.cosh(2.0), rel=1e-13)

    def test_expm1_form(self):
        # E_{1,2}(x) = (e^x - 1)/x
        assert ml_eval(MLParams(1.0, 2.0), 1.0) == pytest.approx(math.e - 1.0, rel=1e-13)

    def test_frozen_value(self):
        assert ml_eval(MLParams(0.755, 10.40), 5.0) == pytest.approx(
            ML_0755_1040_AT_5, rel=5e-13
        )

    def test_exponential_identity_sweep(self):
        # includes the alternating region, where the precision escalation kicks in
        p = MLParams(1.0, 1.0)
        xs = [x / 2.0 for x in range(-20, 61)]
        for x in xs:
            assert abs(ml_eval(p, x) - math.exp(x)) / math.exp(x) < 1e-12

    def test_cosh_identity_sweep(self):
        p = MLParams(2.0, 1.0)
        for x in [0.0, 0.5, 1.0, 5.0, 20.0, 50.0, 77.7, 100.0]:
            ref = math.cosh(math.sqrt(x))
            assert abs(ml_eval(p, x) - ref) / ref < 1e-12

    @settings(deadline=None, max_examples=60)
    @given(st.floats(min_value=-10.0, max_value=30.0))
    def test_exponential_identity_property(self, x):
        assert ml_eval(MLParams(1.0, 1.0), x) == pytest.approx(math.exp(x), rel=1e-12)

    def test_at_zero(self):
        assert ml_eval(MLParams(0.7, 3.0), 0.0) == pytest.approx(
            reciprocal_gamma(3.0), rel=1e-14
        )

    def test_pole_safety(self):
        # beta = -4, alpha = 1: arguments -4..0 all sit on gamma poles, so the
        # series is x^5 e^x and the first terms contribute exactly nothing
        p = MLParams(1.0, -4.0)
        for k in range(4):
            assert reciprocal_gamma(-4.0 + k) == 0.0
        assert ml_eval(p, 5.0) == pytest.approx(5.0**5 * math.exp(5.0), rel=1e-12)

    def test_negative_beta_mixed_signs(self):
        val = ml_eval(MLParams(0.5, -2.0), 3.0)
        assert val == pytest.approx(float(mp_ml(0.5, -2.0, 3.0)), rel=1e-11)

    def test_severe_cancellation_matches_oracle(self):
        val = ml_eval(MLParams(0.5, 1.0), -8.0)
        assert val == pytest.approx(float(mp_ml(0.5, 1.0, -8.0)), rel=1e-11)

    def test_nonconvergence_budget(self):
        with pytest.raises(NonConvergence):
            ml_eval(MLParams(1.0, 1.0), 30.0, SeriesControl(max_terms=10))

    def test_invalid_alpha(self):
        with pytest.raises(InvalidParams):
            MLParams(0.0, 1.0)
        with pytest.raises(InvalidParams):
            MLParams(-1.0, 1.0)

    def test_nonfinite_x(self):
        with pytest.raises(InvalidParams):
            ml_eval(MLParams(1.0, 1.0), math.inf)

    def test_signed_log_beyond_float_range(self):
        sign, lg = ml_eval_signed_log(MLParams(1.0, 1.0), 800.0)
        assert sign == 1.0
        assert lg == pytest.approx(800.0, rel=1e-13)

    def test_signed_log_windowed_path(self):
        ctl = SeriesControl(max_terms=100_000)
        sign, lg = ml_eval_signed_log(MLParams(1.0, 1.0), 5000.0, ctl)
        assert sign == 1.0
        assert lg == pytest.approx(5000.0, rel=1e-12)

    def test_series_control_validation(self):
        with pytest.raises(InvalidParams):
            SeriesControl(rel_tol=0.0)
        with pytest.raises(InvalidParams):
            SeriesControl(max_terms=5)
        with pytest.raises(InvalidParams):
            SeriesControl(consecutive_small=0)


class TestMlDerivative:
    def test_first_derivative_of_exp(self):
        assert ml_derivative(MLParams(1.0, 1.0), 1.0, 1) == pytest.approx(math.e, rel=1e-13)

    def test_zeroth_order_is_eval(self):
        p = MLParams(0.7, 2.5)
        assert ml_derivative(p, 3.0, 0) == pytest.approx(ml_eval(p, 3.0), rel=1e-14)

    def test_second_derivative_of_exp(self):
        assert ml_derivative(MLParams(1.0, 1.0), 3.0, 2) == pytest.approx(
            math.exp(3.0), rel=1e-13
        )

    def test_order_cap(self):
        with pytest.raises(InvalidParams):
            ml_derivative(MLParams(1.0, 1.0), 1.0, 21)
        with pytest.raises(InvalidParams):
            ml_derivative(MLParams(1.0, 1.0), 1.0, -1)

    def test_unknown_method(self):
        with pytest.raises(InvalidParams):
            ml_derivative(MLParams(1.0, 1.0), 1.0, 1, method="magic")

    def test_high_order(self):
        assert ml_derivative(MLParams(1.0, 1.0), 2.0, 20) == pytest.approx(
            math.exp(2.0), rel=1e-12
        )

    @pytest.mark.parametrize("alpha", [0.5, 0.75, 1.0, 1.5])
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 10.0])
    def test_strategies_agree(self, alpha, beta):
        p = MLParams(alpha, beta)
        for x in (0.1, 1.0, 5.0):
            for n in (1, 2, 3):
                direct = ml_derivative(p, x, n)
                folded = ml_derivative(p, x, n, method="recurrence")
                assert abs(direct - folded) / abs(direct) < 1e-9

    @pytest.mark.parametrize("alpha", [0.5, 0.75, 1.0, 1.5])
    @pytest.mark.parametrize("beta", [0.5, 1.0, 2.0, 10.0])
    def test_finite_difference(self, alpha, beta):
        p = MLParams(alpha, beta)
        for x in (0.1, 1.0, 5.0):
            h = 1e-6 * max(1.0, abs(x))
            fd = (ml_eval(p, x + h) - ml_eval(p, x - h)) / (2.0 * h)
            direct = ml_derivative(p, x, 1)
            assert abs(fd - direct) / abs(direct) < 1e-5

    def test_against_oracle(self):
        p = MLParams(0.755, 10.40)
        for n in (1, 2, 4):
            assert ml_derivative(p, 5.0, n) == pytest.approx(
                float(mp_ml_derivative(0.755, 10.40, 5.0, n)), rel=1e-11
            )


class TestFactorialSums:
    def test_orders_match_derivatives(self):
        p = MLParams(0.755, 10.40)
        x = 5.0
        sums = ml_factorial_sums(p, x, 3)
        for m in range(4):
            expected = x**m * ml_derivative(p, x, m)
            assert sums.value(m) == pytest.approx(expected, rel=1e-11)

    def test_at_zero(self):
        sums = ml_factorial_sums(MLParams(1.0, 2.0), 0.0, 2)
        assert sums.value(0) == pytest.approx(1.0, rel=1e-14)  # 1/Gamma(2)
        assert sums.value(1) == 0.0
        assert sums.value(2) == 0.0


class TestMlAsymptotic:
    def test_reduces_to_exp(self):
        out = ml_asymptotic(MLParams(1.0, 1.0), 50.0)
        assert out.log_value == pytest.approx(50.0, rel=1e-14)
        assert out.value == pytest.approx(math.exp(50.0), rel=1e-12)

    def test_plugin_small_x(self):
        # outside the validity region, still the literal formula
        out = ml_asymptotic(MLParams(1.0, 1.0), 1e-3)
        assert out.value == pytest.approx(math.exp(1e-3), rel=1e-12)

    def test_log_agreement_moderate_x(self):
        out = ml_asymptotic(MLParams(0.5, 1.0), 30.0)
        assert abs(out.log_value - LN_ML_HALF_1_AT_30) / LN_ML_HALF_1_AT_30 < 1e-3

    def test_log_agreement_at_200(self):
        ctl = SeriesControl(max_terms=100_000)
        for (alpha, beta, x), ln_oracle in LN_ML_ORACLE.items():
            out = ml_asymptotic(MLParams(alpha, beta), x)
            assert abs(out.log_value - ln_oracle) / abs(ln_oracle) < 1e-2
            # and the series evaluation itself reproduces the oracle logs
            sign, lg = ml_eval_signed_log(MLParams(alpha, beta), x, ctl)
            assert sign == 1.0
            assert lg == pytest.approx(ln_oracle, rel=1e-10)

    def test_alpha_domain(self):
        with pytest.raises(InvalidParams):
            ml_asymptotic(MLParams(2.0, 1.0), 10.0)
        with pytest.raises(InvalidParams):
            ml_asymptotic(MLParams(2.5, 1.0), 10.0)

    def test_x_domain(self):
        with pytest.raises(InvalidParams):
            ml_asymptotic(MLParams(1.0, 1.0), 0.0)
        with pytest.raises(InvalidParams):
            ml_asymptotic(MLParams(1.0, 1.0), -5.0)


def test_overflowing_linear_value_is_inf():
    assert ml_eval(MLParams(1.0, 1.0), 800.0) == math.inf
    out = ml_asymptotic(MLParams(0.5, 1.0), 100.0)
    assert out.value == math.inf
    assert out.log_value == pytest.approx(10000.0 + math.log(2.0), rel=1e-12)
