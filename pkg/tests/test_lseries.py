import numpy as np
import pytest
import sympy

from app.engine.curves import make_twist_field, validate
from app.engine.lseries import (
    an_coefficients,
    auto_truncation,
    l_derivative_at_1,
    l_value_at_1,
    tail_bound,
    twisted_l_value,
)
from app.engine.rootnumber import (
    heegner_congruence,
    iwasawa_e_n,
    iwasawa_prediction,
    parity_check,
    rank_one_witness,
    root_number,
    root_number_constructive,
    twisted_root_number,
)
from app.config.settings import load_settings
from app.models.entities import ParityOutcome
from app.models.errors import DomainError, RangeError, UnsupportedError


class TestCoefficients:
    """Dirichlet coefficients from the Euler product."""

    def test_small_coefficients(self, base_curve_11_13):
        a = an_coefficients(base_curve_11_13, 150)
        assert a[1] == 1
        assert a[2] == a[4] == 0
        assert a[3] == 0
        assert a[9] == -3
        assert a[11] == a[13] == -1
        assert a[143] == 1

    @pytest.mark.parametrize("eps, p", [(1, 3), (-1, 3), (1, 11), (-1, 17)])
    def test_divisor_bound(self, eps, p):
        spec = validate(eps, p, p + 2)
        a = an_coefficients(spec, 10_000)
        n = np.arange(10_001)
        divisors = np.array([0] + [int(sympy.divisor_count(k)) for k in range(1, 10_001)], dtype=np.int64)
        assert np.all(a[1:] ** 2 <= divisors[1:] ** 2 * n[1:])
        assert np.all(np.abs(a[1:]) <= n[1:])

    def test_read_only(self, base_curve_3_5):
        a = an_coefficients(base_curve_3_5, 20)
        with pytest.raises(ValueError):
            a[1] = 5

    def test_budget(self, base_curve_3_5):
        load_settings(overrides={"series_truncation_budget": 50})
        with pytest.raises(RangeError):
            an_coefficients(base_curve_3_5, 51)


class TestLValues:
    """L(E, 1), its derivatives and the twisted series."""

    def test_vanishes_when_root_number_is_minus_one(self, base_curve_3_5):
        approx = l_value_at_1(base_curve_3_5)
        assert approx.value == 0.0
        assert approx.formula_tag.startswith("vanishing")
        assert abs(l_derivative_at_1(base_curve_3_5, 0).value) <= 1e-12

    def test_cauchy_stable(self):
        spec = validate(1, 5, 7)
        n_max = auto_truncation(spec)
        first = l_value_at_1(spec, n_max)
        second = l_value_at_1(spec, 2 * n_max)
        assert abs(first.value - second.value) <= first.tail_bound + 1e-15

    def test_quadrature_matches_series(self):
        """The r = 0 integral, integrated numerically, reproduces the series."""
        spec = validate(-1, 3, 5)
        series = l_derivative_at_1(spec, 0, 200)
        quadrature = l_derivative_at_1(spec, 0, 200, method="quadrature")
        assert quadrature.formula_tag == "integral:gauss-legendre"
        assert quadrature.value == pytest.approx(series.value, rel=1e-9, abs=1e-12)

    def test_first_derivative(self, base_curve_3_5):
        approx = l_derivative_at_1(base_curve_3_5, 1, 200)
        assert approx.derivative == 1
        assert approx.tail_bound > 0

    def test_derivative_arguments(self, base_curve_3_5, twisted_11_13_by_5):
        with pytest.raises(DomainError):
            l_derivative_at_1(base_curve_3_5, 3)
        with pytest.raises(DomainError):
            l_derivative_at_1(base_curve_3_5, 0, method="simpson")
        with pytest.raises(UnsupportedError):
            l_derivative_at_1(twisted_11_13_by_5, 0)

    def test_tail_bound_decreasing(self, base_curve_11_13):
        bounds = [tail_bound(base_curve_11_13, n) for n in (10, 100, 1000)]
        assert bounds[0] > bounds[1] > bounds[2]
        assert tail_bound(base_curve_11_13, 100, r=2) > tail_bound(base_curve_11_13, 100)

    def test_twisted_vanishing(self, base_curve_11_13, field_sqrt_5):
        assert twisted_root_number(base_curve_11_13, field_sqrt_5) == -1
        assert twisted_l_value(base_curve_11_13, field_sqrt_5).formula_tag == "vanishing:twisted-prefactor"

    def test_twisted_needs_one_mod_four(self, base_curve_11_13):
        with pytest.raises(DomainError):
            twisted_l_value(base_curve_11_13, make_twist_field(1, 7))
        with pytest.raises(UnsupportedError):
            twisted_root_number(base_curve_11_13, make_twist_field(1, 7))


class TestRootNumbers:
    """Root number table, local product and parity."""

    def test_table(self):
        assert root_number(validate(1, 3, 5)) == -1
        assert root_number(validate(-1, 3, 5)) == 1
        assert root_number(validate(1, 5, 7)) == 1
        assert root_number(validate(1, 17, 19)) == -1

    def test_constructive_agrees(self, twin_specs):
        for spec in twin_specs:
            for source in ("table", "tate"):
                data = root_number_constructive(spec, source)
                assert data.global_sign == root_number(spec), (spec, source)
                assert data.omega_inf == -1

    def test_unknown_tamagawa_source(self, base_curve_3_5):
        with pytest.raises(DomainError):
            root_number_constructive(base_curve_3_5, "guess")

    def test_rank_one_witness(self):
        assert rank_one_witness(5) == (-2, 1, 1, -1, 1)
        assert rank_one_witness(3) is None

    def test_parity_check(self, base_curve_3_5):
        verdict = parity_check(base_curve_3_5)
        assert verdict.outcome is ParityOutcome.CONSISTENT
        assert verdict.rank == 1
        assert parity_check(validate(-1, 3, 5)).rank == 0
        assert parity_check(validate(1, 17, 19)).outcome is ParityOutcome.RANK_UNKNOWN

    def test_heegner(self, base_curve_3_5):
        """61^2 = 3721 == -119 (mod 1920)."""
        assert heegner_congruence(base_curve_3_5, -119)
        assert not heegner_congruence(base_curve_3_5, -1)
        with pytest.raises(DomainError):
            heegner_congruence(base_curve_3_5, 5)


class TestIwasawa:
    """Growth of the l-part of Sha up the cyclotomic tower."""

    @pytest.mark.parametrize("l,n,expected", [(3, 0, 0), (3, 1, 0), (3, 2, 2), (7, 1, 0), (7, 2, 6)])
    def test_e_n(self, l, n, expected):
        assert iwasawa_e_n(l, n) == expected

    def test_e_n_arguments(self):
        with pytest.raises(DomainError):
            iwasawa_e_n(1, 2)
        with pytest.raises(DomainError):
            iwasawa_e_n(3, -1)

    def test_prediction(self, base_curve_11_13):
        prediction = iwasawa_prediction(base_curve_11_13, 3, 2)
        assert (prediction.e_n, prediction.predicted_order) == (2, 9)
        assert prediction.hypotheses_hold
        assert not iwasawa_prediction(base_curve_11_13, 7, 2).hypotheses_hold
