from fractions import Fraction

import pytest

from app.engine.curves import (
    add_points,
    base_curve,
    invariants,
    isogenous_curve,
    make_twist_field,
    minus_twist,
    torsion_group,
    twisted_spec,
    validate,
    weierstrass,
)
from app.models.errors import DomainError, PrimalityError, TwinError, TwistError, UnsupportedError


class TestValidation:
    """Family parameters are checked before any computation."""

    def test_valid_spec(self):
        spec = validate(1, 11, 13, 5)
        assert spec.d == 5
        assert spec.d_primes == (5,)
        assert spec.bad_primes == (2, 5, 11, 13)

    def test_negative_d(self):
        spec = validate(-1, 11, 13, -15)
        assert spec.d == -15
        assert spec.n == 2

    def test_epsilon(self):
        with pytest.raises(DomainError):
            validate(0, 3, 5)

    def test_not_twins(self):
        with pytest.raises(TwinError):
            validate(1, 3, 7)

    def test_composite(self):
        with pytest.raises(PrimalityError):
            validate(1, 7, 9)
        with pytest.raises(PrimalityError):
            validate(1, 1, 3)

    def test_d_not_squarefree(self):
        """D = 9 is rejected (exit 2 at the command line)."""
        with pytest.raises(TwistError):
            validate(1, 3, 5, 9)

    def test_d_not_coprime(self):
        with pytest.raises(TwistError):
            validate(1, 3, 5, 15)
        with pytest.raises(TwistError):
            validate(1, 3, 5, 2)

    def test_twist_field(self):
        field = make_twist_field(-1, 7)
        assert field.value == -7
        assert field.disc == -7
        assert field.mu0 == 1
        assert make_twist_field(1, 7).disc == 28
        with pytest.raises(TwistError):
            make_twist_field(1, 1)
        with pytest.raises(TwistError):
            make_twist_field(1, 4)


class TestInvariants:
    """Discriminant, conductor and j-invariant."""

    def test_conductor_480(self, base_curve_3_5):
        inv = invariants(base_curve_3_5)
        assert inv.conductor == 480
        assert inv.discriminant == 14400
        assert (inv.j_numerator, inv.j_denominator) == (438976, 225)

    def test_twist_scaling(self, twisted_11_13_by_5):
        inv = invariants(twisted_11_13_by_5)
        assert inv.discriminant == 64 * 11 ** 2 * 13 ** 2 * 5 ** 6
        assert inv.conductor == 32 * 11 * 13 * 25

    def test_weierstrass_discriminant(self, twin_specs):
        for spec in twin_specs:
            coeffs = weierstrass(spec)
            assert coeffs.discriminant == invariants(spec).discriminant
            assert coeffs.a2 == spec.epsilon * (spec.p + spec.q)

    def test_minus_twist_flips_epsilon(self, twisted_11_13_by_5):
        flipped = minus_twist(twisted_11_13_by_5)
        assert flipped.epsilon == -1
        assert invariants(flipped) == invariants(twisted_11_13_by_5)
        assert base_curve(flipped).d == 1

    def test_twisted_spec(self, base_curve_11_13):
        twist = twisted_spec(base_curve_11_13, make_twist_field(-1, 5))
        assert twist.d == -5
        with pytest.raises(UnsupportedError):
            twisted_spec(twist, make_twist_field(1, 5))

    def test_isogenous_curve(self, base_curve_3_5):
        coeffs = isogenous_curve(base_curve_3_5)
        assert coeffs.as_tuple() == (0, -16, 0, 4, 0)
        assert coeffs.discriminant == 2 ** 12 * 15


class TestTorsion:
    """Rational torsion is Z/2 x Z/2 throughout the family."""

    def test_klein_four(self, base_curve_3_5):
        torsion = torsion_group(base_curve_3_5)
        assert torsion.invariants == (2, 2)
        assert torsion.order == 4
        assert set(torsion.points) == {(0, 0), (-3, 0), (-5, 0)}

    def test_twists(self):
        for spec in (validate(-1, 11, 13, 5), validate(1, 17, 19, -7)):
            assert torsion_group(spec).invariants == (2, 2)

    def test_two_torsion_sum(self, base_curve_3_5):
        """The three points of order 2 add up to the identity."""
        a2, a4 = weierstrass(base_curve_3_5).a2, weierstrass(base_curve_3_5).a4
        first = add_points((Fraction(0), Fraction(0)), (Fraction(-3), Fraction(0)), a2, a4)
        assert first == (-5, 0)
        assert add_points(first, (Fraction(-5), Fraction(0)), a2, a4) is None
