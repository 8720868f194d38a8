"""
Local Norm Indices for Quadratic Twists

For the base curve E (D = 1) and K = Q(sqrt(mu D)) the global norm index

    delta(E, Q, K) = delta_inf + delta_g + delta_m + delta_a

is assembled place by place:

- delta_inf: mu0 = (1 - mu) / 2 (K imaginary)
- delta_g:   sum over D_i of dim_2 E~(F_{D_i})[2]  (= 2n, full 2-torsion)
- delta_m:   multiplicative places p, q that do not split in K
- delta_a:   the additive place 2 when 2 does not split in K, evaluated
             with the Kramer-Tunnell formula

    delta_2 = log2(c_2 c_{D,2} / c_w)
              + (1/12) * ord_2(N(Delta_w) / (Delta_2 Delta_{D,2} d^-6))

The component total is cross-checked against a clause classifier keyed on
(mu D mod 8, p mod 4, symbol pattern); the clauses partition the parameter
space and carry the labels 1, 2a-2d, 3a-3f, 4a-4e, 5a-5b. A second table
(labels 1a-1f, 2a-2f) turns delta mod 2 into the parity prediction
rank E(K) == beta + dim_2 Sha(E/K)[2] (mod 2).

The 2-adic rows for the completion K_w over Q_2:
    mu D == 5 mod 8  Q2(sqrt(-3)) unramified, III,  ord 6,  f 5, c_w 2
    mu D == 7 mod 8  Q2(sqrt(-1)) ramified,   I2*,  ord 12, f 6, c_w 2 (p == 1 mod 4) else 4
    mu D == 3 mod 8  Q2(sqrt(3))  ramified,   I2*,  ord 12, f 6, c_w 4 (p == 1 mod 4) else 2
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

from app.engine.arith import hilbert_symbol_local, jacobi_symbol, valuation
from app.engine.curves import check_field_coprime, invariants, twisted_spec
from app.engine.localdata import reduction_data
from app.models.entities import (
    CurveSpec,
    DeltaCase,
    NormIndexBreakdown,
    ParityRelation,
    ReductionClass,
    TwistField,
    TwoAdicLocalData,
)
from app.models.errors import DomainError, InternalInconsistencyError, UnsupportedError

logger = logging.getLogger(__name__)

BOTH_PLUS = "both+1"
MIXED = "mixed"
BOTH_MINUS = "both-1"
EQUAL = "equal"


@dataclass(frozen=True)
class NormIndexClause:
    label: str
    residue: int  # mu D mod 8
    p_mod_4: Optional[int]
    pattern: str
    offset: int  # delta - 2n - mu0


NORM_INDEX_CLAUSES: List[NormIndexClause] = [
    NormIndexClause("1", 1, None, BOTH_PLUS, 0),
    NormIndexClause("2a", 5, None, BOTH_PLUS, 1),
    NormIndexClause("2b", 7, 3, BOTH_PLUS, 1),
    NormIndexClause("2c", 3, 1, BOTH_PLUS, 1),
    NormIndexClause("2d", 1, None, MIXED, 1),
    NormIndexClause("3a", 7, 1, BOTH_PLUS, 2),
    NormIndexClause("3b", 3, 3, BOTH_PLUS, 2),
    NormIndexClause("3c", 5, None, MIXED, 2),
    NormIndexClause("3d", 7, 3, MIXED, 2),
    NormIndexClause("3e", 3, 1, MIXED, 2),
    NormIndexClause("3f", 1, None, BOTH_MINUS, 2),
    NormIndexClause("4a", 7, 1, MIXED, 3),
    NormIndexClause("4b", 3, 3, MIXED, 3),
    NormIndexClause("4c", 5, None, BOTH_MINUS, 3),
    NormIndexClause("4d", 7, 3, BOTH_MINUS, 3),
    NormIndexClause("4e", 3, 1, BOTH_MINUS, 3),
    NormIndexClause("5a", 7, 1, BOTH_MINUS, 4),
    NormIndexClause("5b", 3, 3, BOTH_MINUS, 4),
]


@dataclass(frozen=True)
class ParityClause:
    label: str
    residue: int
    p_mod_4: Optional[int]
    pattern: str  # EQUAL or MIXED
    group: int  # 1: beta == mu0, 2: beta == mu0 + 1


PARITY_CLAUSES: List[ParityClause] = [
    ParityClause("1a", 1, None, EQUAL, 1),
    ParityClause("1b", 3, 3, EQUAL, 1),
    ParityClause("1c", 3, 1, MIXED, 1),
    ParityClause("1d", 5, None, MIXED, 1),
    ParityClause("1e", 7, 1, EQUAL, 1),
    ParityClause("1f", 7, 3, MIXED, 1),
    ParityClause("2a", 1, None, MIXED, 2),
    ParityClause("2b", 3, 1, EQUAL, 2),
    ParityClause("2c", 3, 3, MIXED, 2),
    ParityClause("2d", 5, None, EQUAL, 2),
    ParityClause("2e", 7, 3, EQUAL, 2),
    ParityClause("2f", 7, 1, MIXED, 2),
]


def _check_inputs(spec: CurveSpec, field: TwistField) -> None:
    if spec.d != 1:
        raise UnsupportedError(f"norm indices are computed for the base curve (D = 1), got D = {spec.d}")
    check_field_coprime(spec, field)


def symbol_pattern(spec: CurveSpec, field: TwistField) -> str:
    """Pattern of ((mu D / p), (mu D / q)) as Jacobi symbols of the integer mu D."""
    symbols = (jacobi_symbol(field.value, spec.p), jacobi_symbol(field.value, spec.q))
    if symbols == (1, 1):
        return BOTH_PLUS
    if symbols == (-1, -1):
        return BOTH_MINUS
    return MIXED


def two_adic_data(spec: CurveSpec, field: TwistField) -> TwoAdicLocalData:
    """
    Reduction data of E over the completion K_w at the place above 2.

    Raises:
        DomainError: mu D == 1 mod 8 (2 splits in K; no row applies)
    """
    _check_inputs(spec, field)
    residue = field.value % 8
    p_is_1_mod_4 = spec.p % 4 == 1
    if residue == 5:
        return TwoAdicLocalData("Q2(sqrt(-3))", "III", 6, 5, 2, residue_degree=2, ramified=False)
    if residue == 7:
        return TwoAdicLocalData("Q2(sqrt(-1))", "I2*", 12, 6, 2 if p_is_1_mod_4 else 4, residue_degree=1, ramified=True)
    if residue == 3:
        return TwoAdicLocalData("Q2(sqrt(3))", "I2*", 12, 6, 4 if p_is_1_mod_4 else 2, residue_degree=1, ramified=True)
    raise DomainError(f"mu D = {field.value} == 1 mod 8: 2 splits in K, no 2-adic row")


def _log2_exact(x: Fraction) -> int:
    numerator, denominator = x.numerator, x.denominator
    for value in (numerator, denominator):
        if value & (value - 1):
            raise InternalInconsistencyError(f"{x} is not a power of two")
    return numerator.bit_length() - denominator.bit_length()


def kramer_tunnell_delta2(spec: CurveSpec, field: TwistField) -> int:
    """delta_2 from Tamagawa numbers and discriminants of E, E_{mu D} and E/K_w."""
    local = two_adic_data(spec, field)
    twist = twisted_spec(spec, field)
    c_2 = reduction_data(spec, 2).tamagawa
    c_d2 = reduction_data(twist, 2).tamagawa
    ord_delta = valuation(invariants(spec).discriminant, 2)
    ord_delta_twist = valuation(invariants(twist).discriminant, 2)
    ord_field_disc = valuation(field.disc, 2)
    exponent = Fraction(
        local.residue_degree * local.ord_disc_w - ord_delta - ord_delta_twist + 6 * ord_field_disc,
        12,
    )
    delta = _log2_exact(Fraction(c_2 * c_d2, local.c_w)) + exponent
    if delta.denominator != 1:
        raise InternalInconsistencyError(f"Kramer-Tunnell delta_2 = {delta} is not an integer")
    return int(delta)


def closed_form_delta2(spec: CurveSpec, field: TwistField) -> int:
    residue = field.value % 8
    p_is_1_mod_4 = spec.p % 4 == 1
    if residue == 5:
        return 1
    if residue == 7:
        return 2 if p_is_1_mod_4 else 1
    if residue == 3:
        return 1 if p_is_1_mod_4 else 2
    raise DomainError(f"mu D = {field.value} == 1 mod 8: 2 splits in K")


def _two_torsion_dimension(spec: CurveSpec, l: int) -> int:
    roots = {0, (-spec.epsilon * spec.p) % l, (-spec.epsilon * spec.q) % l}
    return (len(roots) + 1).bit_length() - 1  # |E(F_l)[2]| = 1 + #roots


def _multiplicative_index(spec: CurveSpec, l: int, field: TwistField) -> int:
    """delta_l at a multiplicative place l that is inert in K."""
    data = reduction_data(spec, l)
    disc = invariants(spec).discriminant
    if data.reduction_class is ReductionClass.SPLIT_MULTIPLICATIVE:
        return (1 + hilbert_symbol_local(disc, field.value, l)) // 2
    return (1 + (-1) ** data.disc_valuation) // 2


def delta_components(spec: CurveSpec, field: TwistField) -> NormIndexBreakdown:
    """
    Place-by-place norm index delta(E, Q, K).

    Raises:
        InternalInconsistencyError: the Kramer-Tunnell delta_2 disagrees with
            the closed table, or no classifier clause matches
    """
    _check_inputs(spec, field)
    delta_inf = field.mu0
    delta_g = sum(_two_torsion_dimension(spec, l) for l in field.D.primes)
    delta_m = sum(
        _multiplicative_index(spec, l, field)
        for l in (spec.p, spec.q)
        if jacobi_symbol(field.value, l) == -1
    )
    if field.value % 8 == 1:
        delta_a = 0
    else:
        delta_a = kramer_tunnell_delta2(spec, field)
        expected = closed_form_delta2(spec, field)
        if delta_a != expected:
            raise InternalInconsistencyError(
                f"Kramer-Tunnell delta_2 = {delta_a} but closed form gives {expected} for {spec}, {field}"
            )
    case = delta_case(spec, field)
    breakdown = NormIndexBreakdown(
        delta_inf=delta_inf,
        delta_g=delta_g,
        delta_m=delta_m,
        delta_a=delta_a,
        total=delta_inf + delta_g + delta_m + delta_a,
        case_label=case.label,
    )
    if breakdown.total != case.total:
        raise InternalInconsistencyError(
            f"components give delta = {breakdown.total}, clause {case.label} gives {case.total}"
        )
    logger.debug(f"Norm index for {spec} over Q(sqrt({field.value})): {breakdown}")
    return breakdown


def matching_clauses(spec: CurveSpec, field: TwistField) -> List[NormIndexClause]:
    residue = field.value % 8
    pattern = symbol_pattern(spec, field)
    p_mod_4 = spec.p % 4
    return [
        clause
        for clause in NORM_INDEX_CLAUSES
        if clause.residue == residue
        and clause.pattern == pattern
        and clause.p_mod_4 in (None, p_mod_4)
    ]


def delta_case(spec: CurveSpec, field: TwistField) -> DeltaCase:
    _check_inputs(spec, field)
    matches = matching_clauses(spec, field)
    if len(matches) != 1:
        raise InternalInconsistencyError(
            f"expected exactly one norm-index clause for {spec}, {field}, got {[c.label for c in matches]}"
        )
    clause = matches[0]
    return DeltaCase(label=clause.label, total=2 * field.n + field.mu0 + clause.offset)


def parity_clause(spec: CurveSpec, field: TwistField) -> ParityClause:
    _check_inputs(spec, field)
    residue = field.value % 8
    pattern = EQUAL if symbol_pattern(spec, field) in (BOTH_PLUS, BOTH_MINUS) else MIXED
    p_mod_4 = spec.p % 4
    matches = [
        clause
        for clause in PARITY_CLAUSES
        if clause.residue == residue and clause.pattern == pattern and clause.p_mod_4 in (None, p_mod_4)
    ]
    if len(matches) != 1:
        raise InternalInconsistencyError(f"expected exactly one parity clause, got {[c.label for c in matches]}")
    return matches[0]


def parity_relation(spec: CurveSpec, field: TwistField) -> ParityRelation:
    """beta with rank E(K) == beta + dim_2 Sha(E/K)[2] (mod 2)."""
    beta = delta_components(spec, field).total % 2
    clause = parity_clause(spec, field)
    if beta != (field.mu0 + clause.group - 1) % 2:
        raise InternalInconsistencyError(f"parity clause {clause.label} contradicts delta mod 2 = {beta}")
    return ParityRelation(beta=beta, clause_label=clause.label)


def selmer_parity_shift(spec: CurveSpec, field: TwistField) -> int:
    """s with dim_2 Sel_2(E_{mu D}/Q) == s + dim_2 Sel_2(E/Q) (mod 2)."""
    return delta_components(spec, field).total % 2
