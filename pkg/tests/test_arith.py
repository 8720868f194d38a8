import pytest

from app.config.settings import load_settings
from app.engine.arith import (
    factor,
    hilbert_symbol_bruteforce,
    hilbert_symbol_local,
    is_fundamental_discriminant,
    is_prime,
    jacobi_symbol,
    kronecker_character,
    kronecker_symbol,
    next_twin_prime_pair,
    twin_prime_pairs,
    valuation,
)
from app.models.errors import DomainError, ExhaustionError, RangeError


class TestPrimality:
    """Primality and factorisation."""

    def test_small_values(self):
        """2 is prime, 1 is not."""
        assert is_prime(2)
        assert not is_prime(1)

    def test_serre_bound_is_composite(self):
        """3105 = 3^3 * 5 * 23."""
        assert not is_prime(3105)
        assert factor(3105).factors == ((3, 3), (5, 1), (23, 1))

    def test_nonpositive_is_range_error(self):
        with pytest.raises(RangeError):
            is_prime(0)

    def test_width_overflow(self):
        """Values beyond the signed bit width are rejected."""
        with pytest.raises(RangeError):
            is_prime(1 << 130)
        load_settings(overrides={"integer_bit_width": 16})
        with pytest.raises(RangeError):
            factor(40_000)

    def test_factor_sign_and_value(self):
        f = factor(-35)
        assert f.sign == -1
        assert f.primes == (5, 7)
        assert f.value == -35
        assert f.is_squarefree
        assert not factor(9).is_squarefree

    def test_factor_zero(self):
        with pytest.raises(DomainError):
            factor(0)


class TestTwinPrimes:
    """Twin prime enumeration."""

    def test_first_pairs(self):
        assert next_twin_prime_pair(3) == (3, 5)
        assert next_twin_prime_pair(6) == (11, 13)
        assert next_twin_prime_pair(60) == (71, 73)

    def test_range(self):
        assert twin_prime_pairs(20) == [(3, 5), (5, 7), (11, 13), (17, 19)]
        assert twin_prime_pairs(20, p_min=6) == [(11, 13), (17, 19)]

    def test_start_below_three(self):
        with pytest.raises(DomainError):
            next_twin_prime_pair(2)

    def test_search_limit_exhausted(self):
        """No twin pair in [94, 95]: the next one is (101, 103)."""
        load_settings(overrides={"twin_search_limit": 1})
        with pytest.raises(ExhaustionError):
            next_twin_prime_pair(94)


class TestQuadraticSymbols:
    """Jacobi, Kronecker and the field characters."""

    def test_jacobi_values(self):
        assert jacobi_symbol(2, 7) == 1
        assert jacobi_symbol(3, 7) == -1
        assert jacobi_symbol(14, 7) == 0
        assert jacobi_symbol(5, 1) == 1

    def test_jacobi_even_modulus(self):
        with pytest.raises(DomainError):
            jacobi_symbol(3, 8)

    def test_kronecker_at_two(self):
        """(d/2) = 1 for d == 1, 7 mod 8 and -1 for d == 3, 5 mod 8."""
        assert kronecker_symbol(-7, 2) == 1
        assert kronecker_symbol(5, 2) == -1
        assert kronecker_symbol(-4, 2) == 0

    def test_kronecker_negative_modulus(self):
        assert kronecker_symbol(-1, -1) == -1
        assert kronecker_symbol(3, -1) == 1

    def test_fundamental_discriminants(self):
        assert [d for d in range(-12, 14) if is_fundamental_discriminant(d) and d != 1] == [
            -11, -8, -7, -4, -3, 5, 8, 12, 13,
        ]

    def test_character_requires_fundamental(self):
        with pytest.raises(DomainError):
            kronecker_character(-16, 3)


class TestHilbertSymbol:
    """Closed formulas against the brute-force oracle."""

    @pytest.mark.parametrize("l", [2, 3, 5, 7])
    def test_matches_bruteforce(self, l):
        values = [-15, -6, -3, -2, -1, 1, 2, 3, 5, 6, 10, 14]
        for a in values:
            for b in values:
                assert hilbert_symbol_local(a, b, l) == hilbert_symbol_bruteforce(a, b, l), (a, b, l)

    def test_known_values(self):
        """(-1, -1)_2 = -1 (the quaternions ramify at 2), (2, 3)_3 = -1."""
        assert hilbert_symbol_local(-1, -1, 2) == -1
        assert hilbert_symbol_local(2, 3, 3) == -1
        assert hilbert_symbol_local(5, 7, 3) == 1

    def test_zero_argument(self):
        with pytest.raises(DomainError):
            hilbert_symbol_local(0, 3, 3)

    def test_valuation(self):
        assert valuation(14400, 2) == 6
        assert valuation(-45, 3) == 2
        with pytest.raises(DomainError):
            valuation(0, 3)
