"""
Local Reduction Data

Closed-form reduction tables for the family, brute-force point counts over
F_l, the supersingularity criterion and the anomalous-prime scan.

Bad primes of E_D:
    2        Kodaira III,  c = 2, f = 5, ord(disc) = 6
    p, q     Kodaira I2,   c = 2, f = 1, split iff (2 eps D / p) = 1, resp. (-2 eps D / q) = 1
    D_i      Kodaira I0*,  c = 4, f = 2, ord(disc) = 6

Bad primes of the 2-isogenous curve E' (D = 1):
    2        Kodaira I3*, c in {2, 4} by p mod 8 and eps
    p, q     Kodaira I1,  c = 1

Good reduction at an odd l is supersingular iff
    sum_m C(h, m)^2 p^m q^(h-m) == 0 (mod l),  h = (l - 1) / 2,
the Hasse invariant of the Legendre-type cubic (twist-independent).

The general Tate algorithm in app.engine.tate is the independent oracle for
every table here.
"""

import logging
import math
from typing import List

import sympy

from app.config.settings import get_settings
from app.engine.arith import is_prime, jacobi_symbol
from app.engine.curves import weierstrass
from app.engine.pointcount import count_two_torsion_cubic
from app.engine.tate import tate_oracle
from app.models.entities import CurveSpec, LocalReductionData, PointCount, ReductionClass
from app.models.errors import (
    DomainError,
    InternalInconsistencyError,
    RangeError,
    UnsupportedError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "anomalous_scan",
    "count_points",
    "is_split_at",
    "is_supersingular",
    "isogenous_local_data",
    "ordinary_at_seven",
    "predicted_count",
    "reduced_point_count",
    "reduction_data",
    "tate_oracle",
]


def _require_prime(l: int) -> None:
    if not is_prime(l):
        raise DomainError(f"{l} is not prime")


def _require_good_odd(spec: CurveSpec, l: int) -> None:
    _require_prime(l)
    if l in spec.bad_primes:
        raise DomainError(f"l = {l} is a bad prime for {spec}")


def _require_budget(l: int) -> None:
    budget = get_settings().prime_enumeration_budget
    if l > budget:
        raise RangeError(f"l = {l} exceeds the prime enumeration budget {budget}")


def is_split_at(spec: CurveSpec, l: int) -> bool:
    """Split multiplicative reduction at l in {p, q}."""
    if l == spec.p:
        return jacobi_symbol(2 * spec.epsilon * spec.d, spec.p) == 1
    if l == spec.q:
        return jacobi_symbol(-2 * spec.epsilon * spec.d, spec.q) == 1
    raise DomainError(f"l = {l} is not a multiplicative prime of {spec}")


def is_supersingular(spec: CurveSpec, l: int) -> bool:
    _require_good_odd(spec, l)
    h = (l - 1) // 2
    total = 0
    binomial = 1  # C(h, m) mod l
    for m in range(h + 1):
        total = (total + binomial * binomial * pow(spec.p, m, l) * pow(spec.q, h - m, l)) % l
        if m < h:
            binomial = binomial * (h - m) * pow(m + 1, -1, l) % l
    return total == 0


def ordinary_at_seven(spec: CurveSpec) -> bool:
    """Good ordinary reduction at 7 (7 not dividing pqD) iff p == 1 or 4 mod 7."""
    return spec.p % 7 in (1, 4)


def reduction_data(spec: CurveSpec, l: int) -> LocalReductionData:
    _require_prime(l)
    if l == 2:
        return LocalReductionData(l, ReductionClass.ADDITIVE, "III", 2, 5, 6)
    if l in (spec.p, spec.q):
        cls = (
            ReductionClass.SPLIT_MULTIPLICATIVE
            if is_split_at(spec, l)
            else ReductionClass.NONSPLIT_MULTIPLICATIVE
        )
        return LocalReductionData(l, cls, "I2", 2, 1, 2)
    if l in spec.d_primes:
        return LocalReductionData(l, ReductionClass.ADDITIVE, "I0*", 4, 2, 6)
    cls = ReductionClass.GOOD_SUPERSINGULAR if is_supersingular(spec, l) else ReductionClass.GOOD_ORDINARY
    return LocalReductionData(l, cls, "I0", 1, 0, 0)


def reduced_point_count(spec: CurveSpec, l: int) -> int:
    """Solutions of the reduced family equation over F_l (singular point included) plus infinity."""
    _require_prime(l)
    _require_budget(l)
    e = spec.epsilon * spec.d
    return count_two_torsion_cubic(e * spec.p, e * spec.q, l)


def count_points(spec: CurveSpec, l: int) -> PointCount:
    """
    Exact #E~(F_l) at a good odd prime by an exhaustive x-loop.

    Raises:
        DomainError: l bad or not prime
        RangeError: l above the enumeration budget
    """
    _require_good_odd(spec, l)
    _require_budget(l)
    count = reduced_point_count(spec, l)
    trace = l + 1 - count
    if abs(trace) > 2 * math.isqrt(l) + 1:
        raise InternalInconsistencyError(f"trace {trace} at l={l} violates the Hasse bound")
    if count % 4:
        raise InternalInconsistencyError(f"count {count} at l={l} not divisible by 4")
    return PointCount(l=l, count=count, trace=trace)


def predicted_count(spec: CurveSpec, l: int) -> int:
    """
    Point count over F_l read from the closed-form tables.

    Raises:
        UnsupportedError: no table clause covers (spec, l)
    """
    p, d, eps = spec.p, spec.d, spec.epsilon
    if l == 2:
        return 3
    if l == p:
        return p if is_split_at(spec, p) else p + 2
    if l == spec.q:
        return spec.q if is_split_at(spec, spec.q) else spec.q + 2
    if l in spec.d_primes:
        return l + 1
    if l == 3:
        return 4
    if l == 5:
        if p % 5 in (1, 2):
            return 4 if d % 5 in (1, 4) else 8
        if p % 5 == 4:
            return 8 if d % 5 in (1, 4) else 4
    if l == 7:
        if p % 7 in (2, 3, 6):
            return 8
        residue = d % 7 in (1, 2, 4)
        if (eps == 1 and p % 7 == 1) or (eps == -1 and p % 7 == 4):
            return 12 if residue else 4
        if (eps == 1 and p % 7 == 4) or (eps == -1 and p % 7 == 1):
            return 4 if residue else 12
    raise UnsupportedError(f"no point-count table covers l = {l} for {spec}")


def anomalous_scan(spec: CurveSpec, bound: int) -> List[int]:
    """Good odd primes l <= bound with l | #E~(F_l)."""
    _require_budget(bound)
    anomalous = []
    for l in sympy.primerange(3, bound + 1):
        if l in spec.bad_primes:
            continue
        if count_points(spec, l).count % l == 0:
            anomalous.append(int(l))
    logger.debug(f"Anomalous scan of {spec} up to {bound}: {anomalous}")
    return anomalous


def isogenous_local_data(spec: CurveSpec, l: int) -> LocalReductionData:
    """Reduction data of E' at its bad primes 2, p, q."""
    if spec.d != 1:
        raise UnsupportedError(f"E' is defined for D = 1 only, got D = {spec.d}")
    if l == 2:
        residue = spec.p % 8
        if residue == 3 or (spec.epsilon, residue) in ((1, 1), (-1, 5)):
            tamagawa = 2
        elif residue == 7 or (spec.epsilon, residue) in ((1, 5), (-1, 1)):
            tamagawa = 4
        else:
            raise InternalInconsistencyError(f"p = {spec.p} has no 2-adic row")
        return LocalReductionData(2, ReductionClass.ADDITIVE, "I3*", tamagawa, 5, 12)
    if l in (spec.p, spec.q):
        # Isogenous curves share a_l, hence the split/nonsplit type
        cls = (
            ReductionClass.SPLIT_MULTIPLICATIVE
            if is_split_at(spec, l)
            else ReductionClass.NONSPLIT_MULTIPLICATIVE
        )
        return LocalReductionData(l, cls, "I1", 1, 1, 1)
    raise DomainError(f"l = {l} is a good prime of E'")


def tate_check(spec: CurveSpec, l: int) -> LocalReductionData:
    """Tate-algorithm data for E_D at l, asserted equal to the table."""
    expected = reduction_data(spec, l)
    actual = tate_oracle(weierstrass(spec), l)
    if actual != expected:
        raise InternalInconsistencyError(f"Tate oracle {actual} disagrees with table {expected}")
    return actual
