import math

import pytest

from app.config.settings import load_settings
from app.engine.arith import twin_prime_pairs
from app.engine.curves import invariants, minus_twist, validate
from app.engine.localdata import predicted_count, reduced_point_count, reduction_data
from app.engine.lseries import auto_truncation, l_value_at_1
from app.engine.rootnumber import iwasawa_e_n, root_number
from app.engine.sweep import SweepParams, run_sweep
from app.models.errors import RangeError, UnsupportedError


class TestEdgeCases:
    """Test edge cases and boundary conditions."""

    def test_smallest_pair(self):
        """p = 3 is both a bad prime and one of the table primes."""
        spec = validate(1, 3, 5)
        assert predicted_count(spec, 3) == reduced_point_count(spec, 3)
        assert reduction_data(spec, 3).kodaira == "I2"

    def test_shared_prime_between_pairs(self):
        """5 is q for (3, 5) and p for (5, 7)."""
        assert reduction_data(validate(1, 3, 5), 5).kodaira == "I2"
        assert reduction_data(validate(1, 5, 7), 5).kodaira == "I2"

    def test_minus_one_twist(self):
        """E_{-1} is E with eps flipped: same conductor, root number only via D = 1."""
        spec = validate(1, 3, 5, -1)
        assert spec.n == 0
        assert invariants(spec).conductor == 480
        with pytest.raises(UnsupportedError):
            root_number(spec)
        assert root_number(validate(-1, 3, 5)) == 1

    def test_many_twist_primes(self):
        """D = 7 * 11 * 13 * 17 over p = 3."""
        spec = validate(1, 3, 5, 17017)
        assert spec.bad_primes == (2, 3, 5, 7, 11, 13, 17)
        assert invariants(spec).conductor == 32 * 15 * 17017 ** 2
        for l in spec.d_primes:
            assert reduction_data(spec, l).kodaira == "I0*"

    def test_width_overflow(self):
        load_settings(overrides={"integer_bit_width": 32})
        with pytest.raises(RangeError):
            invariants(validate(1, 3, 5, 17017))

    def test_minus_twist_of_base_curve(self, base_curve_3_5):
        flipped = minus_twist(base_curve_3_5)
        assert flipped.epsilon == -1
        assert root_number(flipped) == -root_number(base_curve_3_5)

    def test_single_term_series(self):
        """N_max = 1 keeps only a(1) = 1."""
        approx = l_value_at_1(validate(-1, 3, 5), 1)
        assert approx.value == pytest.approx(2 * math.exp(-2 * math.pi / math.sqrt(480)))

    def test_unreachable_tolerance(self, base_curve_11_13):
        """The truncation is capped by the budget when the tolerance cannot be met."""
        load_settings(overrides={"series_truncation_budget": 5})
        assert auto_truncation(base_curve_11_13, tolerance=1e-30) == 5

    def test_empty_ranges(self):
        assert twin_prime_pairs(3) == []
        result = run_sweep(["counts"], SweepParams(p_max=3), workers=1)
        assert result.rows == [] and result.ok

    def test_zeroth_layer(self):
        assert iwasawa_e_n(3, 0) == 0
        assert iwasawa_e_n(2, 0) == 0
