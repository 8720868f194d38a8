import pytest
import sympy

from app.config.settings import load_settings
from app.engine.arith import twin_prime_pairs
from app.engine.curves import isogenous_curve, validate, weierstrass
from app.engine.galois import (
    SERRE_BOUND,
    rho_surjective,
    torsion_ramified_at,
    torsion_ramified_closed_form,
)
from app.engine.localdata import (
    anomalous_scan,
    count_points,
    is_split_at,
    is_supersingular,
    isogenous_local_data,
    ordinary_at_seven,
    predicted_count,
    reduced_point_count,
    reduction_data,
    tate_check,
)
from app.engine.pointcount import count_weierstrass
from app.engine.tate import tate_oracle
from app.models.entities import ReductionClass, SurjectivityStatus, WeierstrassCoeffs
from app.models.errors import DomainError, RangeError, UnsupportedError


class TestReductionTables:
    """Closed-form reduction data at the bad primes."""

    def test_at_two(self, base_curve_3_5):
        data = reduction_data(base_curve_3_5, 2)
        assert (data.kodaira, data.tamagawa, data.conductor_exponent, data.disc_valuation) == ("III", 2, 5, 6)

    def test_multiplicative(self, base_curve_3_5):
        """(2/3) = -1 and (-2/5) = -1: nonsplit at both 3 and 5."""
        for l in (3, 5):
            data = reduction_data(base_curve_3_5, l)
            assert data.kodaira == "I2"
            assert data.tamagawa == 2
            assert data.reduction_class is ReductionClass.NONSPLIT_MULTIPLICATIVE

    def test_split_depends_on_twist(self):
        """(2/17) = 1, so E splits at 17; twisting by D = 3 flips it since (3/17) = -1."""
        assert is_split_at(validate(1, 17, 19), 17)
        assert not is_split_at(validate(1, 17, 19, 3), 17)

    def test_twist_prime(self, twisted_11_13_by_5):
        data = reduction_data(twisted_11_13_by_5, 5)
        assert (data.kodaira, data.tamagawa, data.conductor_exponent) == ("I0*", 4, 2)

    def test_good_prime(self, base_curve_11_13):
        """#E~(F_3) = 4, so a_3 = 0 and 3 is supersingular whenever it is good."""
        data = reduction_data(base_curve_11_13, 3)
        assert data.reduction_class is ReductionClass.GOOD_SUPERSINGULAR
        assert data.conductor_exponent == 0

    def test_isogenous_curve_tables(self, base_curve_3_5):
        assert isogenous_local_data(base_curve_3_5, 2).kodaira == "I3*"
        assert isogenous_local_data(base_curve_3_5, 5).kodaira == "I1"
        with pytest.raises(DomainError):
            isogenous_local_data(base_curve_3_5, 7)


class TestPointCounts:
    """Closed-form counts against the brute-force x-loop."""

    def test_counts_at_table_primes(self, twin_specs):
        for spec in twin_specs:
            for l in (2, 3, 5, 7):
                assert predicted_count(spec, l) == reduced_point_count(spec, l), (spec, l)

    def test_twisted_counts(self):
        for spec in (validate(1, 11, 13, 35), validate(-1, 29, 31, 17), validate(1, 41, 43, -5)):
            for l in sorted({2, 3, 5, 7, *spec.d_primes}):
                assert predicted_count(spec, l) == reduced_point_count(spec, l), (spec, l)

    def test_nonsplit_count_at_p(self, base_curve_3_5):
        """Nonsplit node at 3: 3 + 2 points including the singular one."""
        assert reduced_point_count(base_curve_3_5, 3) == 5

    def test_general_count_agrees(self, base_curve_11_13):
        coeffs = weierstrass(base_curve_11_13)
        for l in (3, 5, 7, 17, 19, 23):
            assert count_weierstrass(coeffs, l) == reduced_point_count(base_curve_11_13, l)

    def test_uncovered_prime(self, base_curve_11_13):
        with pytest.raises(UnsupportedError):
            predicted_count(base_curve_11_13, 17)

    def test_count_points_rejects_bad_primes(self, base_curve_3_5):
        with pytest.raises(DomainError):
            count_points(base_curve_3_5, 5)

    def test_count_points_budget(self, base_curve_3_5):
        load_settings(overrides={"prime_enumeration_budget": 100})
        with pytest.raises(RangeError):
            count_points(base_curve_3_5, 101)

    def test_hasse_and_torsion(self, base_curve_11_13):
        point_count = count_points(base_curve_11_13, 101)
        assert point_count.count % 4 == 0
        assert abs(point_count.trace) <= 2 * 101 ** 0.5


class TestSupersingular:
    """Supersingular primes and the anomalous-prime scan."""

    def test_seven(self):
        for p, q in twin_prime_pairs(500):
            spec = validate(1, p, q)
            if (p * q) % 7 == 0:
                continue
            assert is_supersingular(spec, 7) == (not ordinary_at_seven(spec)), p

    @pytest.mark.parametrize("eps, p, q, d", [(1, 3, 5, 1), (-1, 11, 13, 7), (1, 17, 19, -5), (-1, 29, 31, 35)])
    def test_supersingular_iff_trace_zero(self, eps, p, q, d):
        spec = validate(eps, p, q, d)
        primes = [l for l in sympy.primerange(5, 201) if l not in spec.bad_primes]
        supersingular = [l for l in primes if is_supersingular(spec, l)]
        assert supersingular == [l for l in primes if count_points(spec, l).trace == 0]

    def test_no_anomalous_primes(self):
        for spec in (validate(1, 3, 5), validate(-1, 11, 13, 7), validate(1, 11, 13, 35)):
            assert anomalous_scan(spec, 1000) == []


class TestTateOracle:
    """The general Tate algorithm reproduces every table."""

    def test_family_tables(self, twin_specs):
        for spec in twin_specs:
            for l in spec.bad_primes:
                assert tate_check(spec, l) == reduction_data(spec, l)

    def test_twisted_tables(self):
        for spec in (validate(1, 11, 13, 5), validate(-1, 17, 19, -21), validate(1, 29, 31, 3)):
            for l in spec.bad_primes:
                assert tate_oracle(weierstrass(spec), l) == reduction_data(spec, l), (spec, l)

    def test_isogenous_tables(self, twin_specs):
        for spec in twin_specs:
            coeffs = isogenous_curve(spec)
            for l in (2, spec.p, spec.q):
                assert tate_oracle(coeffs, l) == isogenous_local_data(spec, l), (spec, l)

    def test_curve_of_conductor_eleven(self):
        """y^2 + y = x^3 - x^2 has discriminant -11: I1 at 11, good at 3."""
        coeffs = WeierstrassCoeffs(0, -1, 1, 0, 0)
        at_eleven = tate_oracle(coeffs, 11)
        assert (at_eleven.kodaira, at_eleven.tamagawa, at_eleven.conductor_exponent) == ("I1", 1, 1)
        assert tate_oracle(coeffs, 3).conductor_exponent == 0

    def test_composite_rejected(self, base_curve_3_5):
        with pytest.raises(DomainError):
            tate_oracle(weierstrass(base_curve_3_5), 9)


class TestGalois:
    """Ramification of E_D[l] and surjectivity of rho_l."""

    def test_ramified_at_p(self, base_curve_11_13):
        assert torsion_ramified_at(base_curve_11_13, 5, 11).ramified
        assert not torsion_ramified_at(base_curve_11_13, 2, 11).ramified
        assert not torsion_ramified_at(base_curve_11_13, 11, 11).ramified

    def test_closed_form_agrees(self, twin_specs):
        for spec in twin_specs:
            for l in (2, 3, 5, 7, 11, 13):
                for at in (spec.p, spec.q):
                    assert torsion_ramified_at(spec, l, at).ramified == torsion_ramified_closed_form(spec, l, at)

    def test_ramification_place(self, base_curve_11_13):
        with pytest.raises(DomainError):
            torsion_ramified_at(base_curve_11_13, 5, 7)

    def test_surjective_clauses(self, base_curve_11_13):
        assert rho_surjective(base_curve_11_13, 3).clause == 1
        assert rho_surjective(validate(1, 17, 19), 7).clause == 2
        assert rho_surjective(base_curve_11_13, 7).status is SurjectivityStatus.UNKNOWN
        large = int(sympy.nextprime(SERRE_BOUND))
        assert rho_surjective(base_curve_11_13, large).clause == 3

    def test_three_dividing_pq(self, base_curve_3_5):
        assert rho_surjective(base_curve_3_5, 3).status is SurjectivityStatus.UNKNOWN
