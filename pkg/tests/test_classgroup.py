import math

import pytest

from app.config.settings import load_settings
from app.engine.arith import is_fundamental_discriminant
from app.engine.classgroup import (
    class_group,
    class_number_analytic,
    class_number_reduced_ideals,
    continued_fraction_unit,
    elementary_divisors,
    narrow_class_number,
    prime_form,
    rank_bound,
    s_class_group,
)
from app.engine.curves import make_twist_field, validate
from app.engine.forms import Form, FormClassGroup, reduce_definite, reduce_indefinite
from app.models.errors import DomainError, RangeError, UnsupportedError
from app.storage.cache import ClassGroupCache


class TestForms:
    """Reduction and composition of binary quadratic forms."""

    def test_reduce_definite(self):
        assert reduce_definite(Form(6, 11, 6)) == Form(1, 1, 6)
        with pytest.raises(DomainError):
            reduce_definite(Form(1, 5, 1))

    def test_reduce_indefinite(self):
        reduced = reduce_indefinite(Form(1, 0, -10))
        assert reduced.disc == 40
        assert 0 < reduced.b <= math.isqrt(40)

    def test_group_law_disc_minus_23(self):
        """Cl(-23) is cyclic of order 3, generated by (2, 1, 3)."""
        group = FormClassGroup(-23)
        assert len(group) == 3
        g = Form(2, 1, 3)
        assert group.compose(g, g) == Form(2, -1, 3)
        assert group.inverse(g) == Form(2, -1, 3)
        assert group.power(g, 3) == group.identity == Form(1, 1, 6)

    def test_prime_form(self):
        f = prime_form(-15, 2)
        assert (f.a, f.disc) == (2, -15)
        with pytest.raises(DomainError):
            prime_form(-15, 7)


class TestClassGroups:
    """Structure, unit norms and the analytic cross-check."""

    def test_imaginary(self):
        data = class_group(-15)
        assert (data.h, data.elementary_divisors, data.two_rank) == (2, (2,), 1)
        assert class_group(-4).h == 1
        assert class_group(-84).elementary_divisors == (2, 2)

    def test_real_norm_minus_one(self):
        """Q(sqrt(10)): eps = 3 + sqrt(10) has norm -1."""
        data = class_group(40)
        assert (data.h, data.unit_norm, data.narrow_h) == (2, -1, 2)

    def test_real_norm_plus_one(self):
        """Q(sqrt(3)): eps = 2 + sqrt(3) has norm +1, so h+ = 2h."""
        data = class_group(12)
        assert (data.h, data.unit_norm, data.narrow_h) == (1, 1, 2)
        assert narrow_class_number(12) == 2

    def test_golden_ratio(self):
        unit = continued_fraction_unit(5)
        assert unit.norm == -1
        assert unit.log == pytest.approx(math.log((1 + math.sqrt(5)) / 2))

    def test_analytic_formula_agrees(self):
        for disc in [d for d in range(-400, 0) if is_fundamental_discriminant(d)]:
            assert class_number_analytic(disc) == class_group(disc).h, disc
        for disc in [d for d in range(2, 250) if is_fundamental_discriminant(d)]:
            assert class_number_analytic(disc) == class_group(disc).h, disc

    @pytest.mark.parametrize("disc, h", [(-3, 1), (-4, 1), (-15, 2), (-23, 3), (-84, 4), (5, 1), (12, 1), (40, 2), (229, 3)])
    def test_reduced_ideal_count(self, disc, h):
        assert class_number_reduced_ideals(disc) == h

    def test_reduced_ideals_agree(self):
        for disc in [d for d in range(-1500, 0) if is_fundamental_discriminant(d)]:
            assert class_number_reduced_ideals(disc) == class_group(disc).h, disc
        for disc in [d for d in range(2, 500) if is_fundamental_discriminant(d)]:
            assert class_number_reduced_ideals(disc) == class_group(disc).h, disc

    def test_reduced_ideals_not_fundamental(self):
        with pytest.raises(DomainError):
            class_number_reduced_ideals(-12)

    def test_not_fundamental(self):
        with pytest.raises(DomainError):
            class_group(-16)
        with pytest.raises(DomainError):
            class_group(1)

    def test_bound(self):
        load_settings(overrides={"classgroup_imaginary_bound": 100})
        with pytest.raises(RangeError):
            class_group(-103)

    def test_elementary_divisors(self):
        assert elementary_divisors([1]) == ()
        assert elementary_divisors([1, 2, 2, 2]) == (2, 2)
        assert elementary_divisors([1, 4, 2, 4]) == (4,)
        assert elementary_divisors([1, 6, 3, 2, 3, 6]) == (6,)


class TestSClassAndRankBound:
    """S-class 2-rank and the descent bounds."""

    def test_s_class_imaginary(self):
        """The prime above 2 generates Cl(-15), so the S-class group is trivial."""
        data = s_class_group(-15, 3, 5)
        assert data.s_two_rank == 0
        assert data.s_set_size == 5

    def test_rank_bound(self, base_curve_11_13, field_sqrt_5):
        bound = rank_bound(base_curve_11_13, field_sqrt_5)
        assert (bound.s_set_size, bound.s_two_rank) == (6, 0)
        assert (bound.headline, bound.sharp) == (14, 10)

    def test_rank_bound_domain(self, base_curve_11_13, twisted_11_13_by_5, field_sqrt_5):
        with pytest.raises(DomainError):
            rank_bound(base_curve_11_13, make_twist_field(-1, 5))
        with pytest.raises(UnsupportedError):
            rank_bound(twisted_11_13_by_5, field_sqrt_5)

    def test_set_size_at_most_eight(self):
        for p, q in [(3, 5), (11, 13), (29, 31)]:
            spec = validate(1, p, q)
            for d in (7, 17, 23):
                assert rank_bound(spec, make_twist_field(1, d)).s_set_size <= 8


class TestClassGroupCache:
    """Memory backend of the class-group cache."""

    def test_set_get_delete(self):
        cache = ClassGroupCache(backend="memory")
        data = class_group(-15)
        assert cache.get(-15) is None
        cache.set(data)
        assert cache.get(-15) == data
        cache.delete(-15)
        assert cache.get(-15) is None
        assert cache.health_check()

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            ClassGroupCache(backend="memcached")
