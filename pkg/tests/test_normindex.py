import pytest

from app.engine.arith import is_squarefree, twin_prime_pairs
from app.engine.curves import make_twist_field, validate
from app.engine.normindex import (
    MIXED,
    NORM_INDEX_CLAUSES,
    PARITY_CLAUSES,
    closed_form_delta2,
    delta_case,
    delta_components,
    kramer_tunnell_delta2,
    matching_clauses,
    parity_clause,
    parity_relation,
    selmer_parity_shift,
    symbol_pattern,
    two_adic_data,
)
from app.models.errors import DomainError, TwistError, UnsupportedError


def _fields(p, q, d_max):
    for d in range(1, d_max + 1, 2):
        if d % p == 0 or d % q == 0 or not is_squarefree(d):
            continue
        for mu in (1, -1):
            if mu * d != 1:
                yield make_twist_field(mu, d)


class TestNormIndex:
    """Place-by-place norm index against the clause classifier."""

    def test_real_quadratic_example(self, base_curve_11_13, field_sqrt_5):
        """K = Q(sqrt(5)) over p = 11: (5/11) = 1, (5/13) = -1."""
        assert symbol_pattern(base_curve_11_13, field_sqrt_5) == MIXED
        breakdown = delta_components(base_curve_11_13, field_sqrt_5)
        assert (breakdown.delta_inf, breakdown.delta_g, breakdown.delta_m, breakdown.delta_a) == (0, 2, 1, 1)
        assert breakdown.total == 4
        assert breakdown.case_label == "3c"

    def test_gaussian_field(self, base_curve_3_5):
        """K = Q(i) over p = 3: one infinite, one multiplicative and one 2-adic contribution."""
        field = make_twist_field(-1, 1)
        breakdown = delta_components(base_curve_3_5, field)
        assert (breakdown.delta_inf, breakdown.delta_g, breakdown.delta_m, breakdown.delta_a) == (1, 0, 1, 1)
        assert delta_case(base_curve_3_5, field).label == "3d"
        assert parity_clause(base_curve_3_5, field).label == "1f"

    def test_two_splits(self, base_curve_11_13):
        """mu D = -7 == 1 mod 8: 2 splits and contributes nothing."""
        field = make_twist_field(-1, 7)
        assert delta_components(base_curve_11_13, field).delta_a == 0
        with pytest.raises(DomainError):
            two_adic_data(base_curve_11_13, field)

    def test_kramer_tunnell_matches_closed_form(self):
        for spec in (validate(1, 3, 5), validate(1, 5, 7), validate(-1, 17, 19), validate(1, 29, 31)):
            for field in _fields(spec.p, spec.q, 31):
                if field.value % 8 == 1:
                    continue
                assert kramer_tunnell_delta2(spec, field) == closed_form_delta2(spec, field), (spec, field)

    def test_exactly_one_clause(self):
        for p, q in twin_prime_pairs(60):
            spec = validate(1, p, q)
            for field in _fields(p, q, 45):
                assert len(matching_clauses(spec, field)) == 1, (p, field)
                assert delta_components(spec, field).total == delta_case(spec, field).total

    def test_clause_labels(self):
        labels = [clause.label for clause in NORM_INDEX_CLAUSES]
        assert len(labels) == len(set(labels)) == 18
        assert sorted(c.label for c in PARITY_CLAUSES) == [
            "1a", "1b", "1c", "1d", "1e", "1f", "2a", "2b", "2c", "2d", "2e", "2f",
        ]

    def test_twisted_curve_rejected(self, twisted_11_13_by_5, field_sqrt_5):
        with pytest.raises(UnsupportedError):
            delta_components(twisted_11_13_by_5, field_sqrt_5)

    def test_field_sharing_a_prime(self, base_curve_11_13):
        with pytest.raises(TwistError):
            delta_components(base_curve_11_13, make_twist_field(1, 33))


class TestParity:
    """delta mod 2 and the parity clause table agree."""

    def test_parity_relation(self, base_curve_11_13, field_sqrt_5):
        relation = parity_relation(base_curve_11_13, field_sqrt_5)
        assert relation.beta == 0
        assert relation.clause_label == "1d"
        assert selmer_parity_shift(base_curve_11_13, field_sqrt_5) == 0

    def test_both_signs_consistent(self):
        for p, q in twin_prime_pairs(45):
            for eps in (1, -1):
                spec = validate(eps, p, q)
                for field in _fields(p, q, 25):
                    relation = parity_relation(spec, field)
                    assert relation.beta == delta_components(spec, field).total % 2
