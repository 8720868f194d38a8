"""
Twin-Prime Curve Family

E_D: y^2 = x(x + epsilon*p*D)(x + epsilon*q*D) with q = p + 2 and D square-free,
odd and coprime to pq. The family equation is a global minimal model with

    discriminant = 64 p^2 q^2 D^6
    conductor    = 2^5 p q D^2
    j            = 64 (p^2 + 2q)^3 / (p^2 q^2)

Twisting by -D stays inside the family by flipping epsilon, and the curve
with D = 1 has the 2-isogenous partner y^2 = x^3 - 2 epsilon (p + q) x^2 + 4x
of discriminant 2^12 p q.

The rational torsion group is always Z/2 x Z/2; torsion_group() re-verifies
that claim with point counts and a Nagell-Lutz bounded search instead of
assuming it.
"""

import logging
import math
from fractions import Fraction
from functools import reduce
from typing import List, Optional, Tuple

import numpy as np
import sympy

from app.engine.arith import check_width, factor, is_prime, is_square
from app.engine.pointcount import count_two_torsion_cubic
from app.models.entities import (
    CurveInvariants,
    CurveSpec,
    FactoredInteger,
    TorsionGroup,
    TwistField,
    WeierstrassCoeffs,
)
from app.models.errors import (
    DomainError,
    InternalInconsistencyError,
    PrimalityError,
    TwinError,
    TwistError,
    UnsupportedError,
)

logger = logging.getLogger(__name__)

# Rational point on a curve with a1 = a3 = 0; None is the point at infinity.
Point = Optional[Tuple[Fraction, Fraction]]


def validate(epsilon: int, p: int, q: int, d_raw: int = 1) -> CurveSpec:
    """
    Build a CurveSpec, rejecting every violation of the family's invariants.

    Raises:
        DomainError: epsilon not in {1, -1}
        TwinError: q != p + 2
        PrimalityError: p or q composite (or p = 2)
        TwistError: D zero, not square-free, or sharing a factor with 2pq
    """
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    if q != p + 2:
        raise TwinError(f"q must equal p + 2, got p={p}, q={q}")
    for label, value in (("p", p), ("q", q)):
        if value < 3 or not is_prime(value):
            raise PrimalityError(f"{label} = {value} is not an odd prime")
    if d_raw == 0:
        raise TwistError("D must be nonzero")
    d_factored = factor(d_raw)
    if not d_factored.is_squarefree:
        raise TwistError(f"D = {d_raw} is not square-free")
    if math.gcd(abs(d_raw), 2 * p * q) != 1:
        raise TwistError(f"D = {d_raw} is not coprime to 2pq = {2 * p * q}")
    return CurveSpec(epsilon=epsilon, p=p, q=q, D=d_factored)


def weierstrass(spec: CurveSpec) -> WeierstrassCoeffs:
    """Long Weierstrass coefficients (0, eps D (p+q), 0, p q D^2, 0)."""
    d = spec.d
    return WeierstrassCoeffs(
        a1=0,
        a2=check_width(spec.epsilon * d * (spec.p + spec.q), "a2"),
        a3=0,
        a4=check_width(spec.p * spec.q * d * d, "a4"),
        a6=0,
    )


def invariants(spec: CurveSpec) -> CurveInvariants:
    p, q, d = spec.p, spec.q, spec.d
    discriminant = check_width(64 * p * p * q * q * d ** 6, "discriminant")
    conductor = check_width(2 ** 5 * p * q * d * d, "conductor")
    j = Fraction(64 * (p * p + 2 * q) ** 3, p * p * q * q)
    check_width(j.numerator, "j numerator")
    return CurveInvariants(
        discriminant=discriminant,
        j_numerator=j.numerator,
        j_denominator=j.denominator,
        conductor=conductor,
    )


def minus_twist(spec: CurveSpec) -> CurveSpec:
    """The (-D)-twist written inside the family: E^eps_{-D} = E^{-eps}_D."""
    return CurveSpec(epsilon=-spec.epsilon, p=spec.p, q=spec.q, D=spec.D)


def base_curve(spec: CurveSpec) -> CurveSpec:
    return CurveSpec(epsilon=spec.epsilon, p=spec.p, q=spec.q, D=FactoredInteger(sign=1))


def twisted_spec(base: CurveSpec, field: TwistField) -> CurveSpec:
    """E_{mu D} for the base curve E (D = 1) and K = Q(sqrt(mu D))."""
    _require_base(base, "twisted_spec")
    signed = field.D if field.mu == 1 else -field.D
    return CurveSpec(epsilon=base.epsilon, p=base.p, q=base.q, D=signed)


def make_twist_field(mu: int, d: int) -> TwistField:
    """Validate mu and the positive square-free odd D of K = Q(sqrt(mu D))."""
    if mu not in (1, -1):
        raise DomainError(f"mu must be +1 or -1, got {mu}")
    if d < 1 or d % 2 == 0:
        raise TwistError(f"D must be a positive odd integer, got {d}")
    d_factored = factor(d)
    if not d_factored.is_squarefree:
        raise TwistError(f"D = {d} is not square-free")
    if mu * d == 1:
        raise TwistError("Q(sqrt(1)) is not a quadratic field")
    return TwistField(mu=mu, D=d_factored)


def check_field_coprime(spec: CurveSpec, field: TwistField) -> None:
    if math.gcd(field.D.value, 2 * spec.p * spec.q) != 1:
        raise TwistError(f"D = {field.D.value} is not coprime to 2pq = {2 * spec.p * spec.q}")


def isogenous_curve(spec: CurveSpec) -> WeierstrassCoeffs:
    """E': y^2 = x^3 - 2 eps (p + q) x^2 + 4x, checked to have discriminant 2^12 p q."""
    _require_base(spec, "isogenous_curve")
    coeffs = WeierstrassCoeffs(a1=0, a2=-2 * spec.epsilon * (spec.p + spec.q), a3=0, a4=4, a6=0)
    expected = 2 ** 12 * spec.p * spec.q
    if coeffs.discriminant != expected:
        raise InternalInconsistencyError(
            f"E' discriminant {coeffs.discriminant} != 2^12 p q = {expected}"
        )
    return coeffs


def _require_base(spec: CurveSpec, operation: str) -> None:
    if spec.d != 1:
        raise UnsupportedError(f"{operation} requires D = 1, got D = {spec.d}")


# ---------------------------------------------------------------------------
# Torsion
# ---------------------------------------------------------------------------

def add_points(P: Point, Q: Point, a2: int, a4: int) -> Point:
    """Group law on y^2 = x^3 + a2 x^2 + a4 x."""
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 + y2 == 0:
            return None
        slope = (3 * x1 * x1 + 2 * a2 * x1 + a4) / (2 * y1)
    else:
        slope = (y2 - y1) / (x2 - x1)
    x3 = slope * slope - a2 - x1 - x2
    y3 = -(y1 + slope * (x3 - x1))
    return (x3, y3)


def torsion_order(P: Point, a2: int, a4: int, max_order: int = 12) -> Optional[int]:
    """Order of P if it is at most max_order; None once a multiple leaves the integers."""
    multiple = P
    for k in range(1, max_order + 1):
        if multiple is None:
            return k
        if multiple[0].denominator != 1 or multiple[1].denominator != 1:
            return None  # Nagell-Lutz: non-integral multiple means infinite order
        multiple = add_points(multiple, P, a2, a4)
    return None


def _good_small_primes(spec: CurveSpec, limit: int = 100, needed: int = 5) -> List[int]:
    bad = set(spec.bad_primes)
    primes = [l for l in sympy.primerange(3, limit) if l not in bad]
    extra = limit
    while len(primes) < needed:
        extra = int(sympy.nextprime(extra))
        if extra not in bad:
            primes.append(extra)
    return primes


def _integral_points_nagell_lutz(spec: CurveSpec, bound: int) -> List[Tuple[int, int]]:
    """Integral points with y > 0, y^2 | discriminant and |x| <= bound."""
    coeffs = weierstrass(spec)
    a2, a4 = coeffs.a2, coeffs.a4
    y_cap = 8 * spec.p * spec.q * abs(spec.d) ** 3  # y^2 | 64 p^2 q^2 D^6  <=>  y | 8 p q D^3
    found = []
    for y in sympy.divisors(y_cap):
        roots = np.roots([1, float(a2), float(a4), -float(y) ** 2])
        candidates = set()
        for root in roots:
            if abs(root.imag) <= 1e-6 * max(1.0, abs(root.real)):
                centre = int(round(root.real))
                candidates.update(range(centre - 2, centre + 3))
        for x in sorted(candidates):
            if abs(x) <= bound and x * (x * x + a2 * x + a4) == y * y:
                found.append((x, y))
    return found


def torsion_group(spec: CurveSpec) -> TorsionGroup:
    """
    Klein four-group E_D(Q)_tors, verified rather than assumed.

    Checks:
        (a) the three 2-torsion points lie on the curve
        (b) 4 divides the point count at every sampled good prime
        (c) the gcd of those counts has no odd prime factor, and no integral
            point with y^2 | discriminant and |x| <= 4 p q |D| has order 4 or 8

    Raises:
        InternalInconsistencyError: if any check fails
    """
    coeffs = weierstrass(spec)
    a2, a4 = coeffs.a2, coeffs.a4
    e = spec.epsilon * spec.d
    two_torsion = ((0, 0), (-e * spec.p, 0), (-e * spec.q, 0))
    for x, y in two_torsion:
        if y * y != x * (x * x + a2 * x + a4):
            raise InternalInconsistencyError(f"({x}, {y}) is not on {spec}")

    primes = _good_small_primes(spec)
    counts = [count_two_torsion_cubic(e * spec.p, e * spec.q, l) for l in primes]
    for l, count in zip(primes, counts):
        if count % 4:
            raise InternalInconsistencyError(f"point count {count} at l={l} not divisible by 4")
    common = reduce(math.gcd, counts)
    while common % 2 == 0:
        common //= 2
    if common != 1:
        raise InternalInconsistencyError(f"point counts share odd factor {common}: {counts}")

    bound = 4 * spec.p * spec.q * abs(spec.d)
    for x, y in _integral_points_nagell_lutz(spec, bound):
        order = torsion_order((Fraction(x), Fraction(y)), a2, a4)
        if order is not None:
            raise InternalInconsistencyError(f"point ({x}, {y}) of order {order} on {spec}")

    # Halving criterion: (e_i, 0) lies in 2E(Q) iff both differences to the other roots are squares
    roots = [0, -e * spec.p, -e * spec.q]
    for i, root in enumerate(roots):
        others = [roots[j] for j in range(3) if j != i]
        if all(is_square(root - other) for other in others):
            raise InternalInconsistencyError(f"2-torsion point ({root}, 0) is divisible by 2")

    logger.debug(f"Torsion verified for {spec} with primes {primes} and bound {bound}")
    return TorsionGroup(
        invariants=(2, 2),
        points=two_torsion,
        checked_primes=tuple(primes),
        search_bound=bound,
    )
