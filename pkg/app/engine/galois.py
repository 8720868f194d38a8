"""
Mod-l Galois Representation Predicates

Ramification of E_D[l] at the multiplicative places p and q, and sufficient
conditions for surjectivity of rho_l: G_Q -> GL2(F_l).

At a place v of multiplicative reduction, E[l] is unramified at v (l != v)
exactly when l divides ord_v of the minimal discriminant; for the family
ord_p = ord_q = 2, so E_D[l] is ramified at p iff l > 2 and l != p.

Surjectivity is reported as {surjective, unknown}: only sufficient
conditions are available, so "not surjective" is never claimed.
"""

import logging
import math

from app.engine.arith import is_prime, valuation
from app.engine.curves import invariants
from app.models.entities import (
    CurveSpec,
    RamificationVerdict,
    SurjectivityStatus,
    SurjectivityVerdict,
)
from app.models.errors import DomainError

logger = logging.getLogger(__name__)

# Above this bound and away from pqD every rho_l is surjective when 3 does not divide pqD.
SERRE_BOUND = 3105


def torsion_ramified_at(spec: CurveSpec, l: int, at: int) -> RamificationVerdict:
    """
    Whether E_D[l] is ramified at the multiplicative place `at`.

    Derived from the discriminant valuation rather than from the closed form:
    ramified iff l != at and l does not divide ord_at(discriminant).
    """
    if at not in (spec.p, spec.q):
        raise DomainError(f"ramification is defined at p or q only, got {at}")
    if not is_prime(l):
        raise DomainError(f"{l} is not prime")
    if l == at:
        return RamificationVerdict(l=l, at=at, ramified=False)
    ord_disc = valuation(invariants(spec).discriminant, at)
    return RamificationVerdict(l=l, at=at, ramified=ord_disc % l != 0)


def torsion_ramified_closed_form(spec: CurveSpec, l: int, at: int) -> bool:
    if at not in (spec.p, spec.q):
        raise DomainError(f"ramification is defined at p or q only, got {at}")
    return l > 2 and l != at


def rho_surjective(spec: CurveSpec, l: int) -> SurjectivityVerdict:
    if not is_prime(l):
        raise DomainError(f"{l} is not prime")
    pqd = spec.p * spec.q * abs(spec.d)
    if l == 3 and pqd % 3 != 0:
        return SurjectivityVerdict(l=l, status=SurjectivityStatus.SURJECTIVE, clause=1)
    if l == 7 and pqd % 7 != 0 and spec.p % 7 in (2, 3, 6):
        return SurjectivityVerdict(l=l, status=SurjectivityStatus.SURJECTIVE, clause=2)
    if pqd % 3 != 0 and math.gcd(l, pqd) == 1 and l > SERRE_BOUND:
        return SurjectivityVerdict(l=l, status=SurjectivityStatus.SURJECTIVE, clause=3)
    return SurjectivityVerdict(l=l, status=SurjectivityStatus.UNKNOWN)
