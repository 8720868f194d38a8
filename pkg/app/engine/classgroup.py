"""
Class Groups of Quadratic Fields

Cl(K) for K = Q(sqrt(d)) from binary quadratic forms of the fundamental
discriminant d:

- d < 0: the group of reduced positive definite forms
- d > 0: the narrow group of rho-cycles, divided by the class of the form
  (-1, b, c) when the fundamental unit has norm +1

Structure (elementary divisors d_1 | d_2 | ...) is read off from the orders
of all elements, and genus theory is asserted on every result.

S-class groups quotient Cl(K) by the classes of the primes above 2, p, q;
the descent bound for rank E(K) uses the 2-rank of that quotient together
with the exact number of places in S_K.

Class numbers are cross-checked against an enumeration of reduced ideals
(weighted by shortest vectors for d < 0, counted in continued-fraction
cycles for d > 0) and against the analytic class number formula.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Hashable, Iterable, List, Sequence, Set, Tuple

import mpmath
import sympy

from app.config.settings import get_settings
from app.engine.arith import factor, is_fundamental_discriminant, kronecker_symbol
from app.engine.forms import Form, FormClassGroup, minus_principal_form
from app.models.entities import (
    ClassGroupData,
    CurveSpec,
    RankBound,
    SClassData,
    TwistField,
)
from app.models.errors import (
    DomainError,
    InternalInconsistencyError,
    NumericError,
    RangeError,
    UnsupportedError,
)
from app.storage.cache import get_cache

logger = logging.getLogger(__name__)

# Descent constant in rank E(K) <= HEADLINE_CONSTANT + 2 dim Cl_S(K)[2]
HEADLINE_CONSTANT = 14


@dataclass(frozen=True)
class FundamentalUnit:
    norm: int
    log: float
    period: int


@dataclass
class _GroupView:
    """A finite abelian group given by hashable elements and a composition."""

    elements: List[Hashable]
    compose: Callable[[Hashable, Hashable], Hashable]
    identity: Hashable

    def power(self, g: Hashable, k: int) -> Hashable:
        result, base = self.identity, g
        while k:
            if k & 1:
                result = self.compose(result, base)
            base = self.compose(base, base)
            k >>= 1
        return result

    def order(self, g: Hashable) -> int:
        order = len(self.elements)
        for l in sympy.factorint(order):
            while order % l == 0 and self.power(g, order // l) == self.identity:
                order //= l
        return order

    def subgroup(self, generators: Iterable[Hashable]) -> Set[Hashable]:
        generators = list(set(generators))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in generators:
                    y = self.compose(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen


def _check_disc(disc: int) -> None:
    if disc == 1 or not is_fundamental_discriminant(disc):
        raise DomainError(f"{disc} is not the discriminant of a quadratic field")
    settings = get_settings()
    bound = settings.classgroup_imaginary_bound if disc < 0 else settings.classgroup_real_bound
    if abs(disc) > bound:
        raise RangeError(f"|disc| = {abs(disc)} exceeds the class-group bound {bound}")


def elementary_divisors(orders: Sequence[int]) -> Tuple[int, ...]:
    """
    Invariant factors of a finite abelian group from the multiset of element orders.

    Args:
        orders: Order of every element of the group

    Returns:
        (d_1, ..., d_k) with d_1 | d_2 | ... | d_k, d_1 > 1; () for the trivial group
    """
    h = len(orders)
    per_prime: Dict[int, List[int]] = {}
    for l in sympy.factorint(h):
        # ranks[k] = log_l |G[l^k]|
        ranks = [0]
        k = 1
        while True:
            size = sum(1 for m in orders if (l ** k) % m == 0)
            rank = int(sympy.multiplicity(l, size))
            if rank == ranks[-1]:
                break
            ranks.append(rank)
            k += 1
        # factors of exponent >= k: ranks[k] - ranks[k-1]
        at_least = [ranks[k] - ranks[k - 1] for k in range(1, len(ranks))] + [0]
        exponents = []
        for k in range(1, len(at_least)):
            exponents.extend([k] * (at_least[k - 1] - at_least[k]))
        per_prime[l] = sorted(exponents, reverse=True)
    width = max((len(v) for v in per_prime.values()), default=0)
    divisors = []
    for i in range(width):
        value = 1
        for l, exponents in per_prime.items():
            if i < len(exponents):
                value *= l ** exponents[i]
        divisors.append(value)
    return tuple(sorted(divisors))


def _two_rank(divisors: Tuple[int, ...]) -> int:
    return sum(1 for value in divisors if value % 2 == 0)


@lru_cache(maxsize=64)
def form_class_group(disc: int) -> FormClassGroup:
    _check_disc(disc)
    return FormClassGroup(disc)


def continued_fraction_unit(disc: int) -> FundamentalUnit:
    """
    Norm and logarithm of the fundamental unit of Q(sqrt(disc)), disc > 0.

    Expands omega = (b + sqrt(disc)) / 2 with b == disc (mod 2); the norm is
    (-1)^period and epsilon is the product of the complete quotients over
    one period.
    """
    if disc <= 0:
        raise DomainError(f"fundamental unit needs a real field, got disc {disc}")
    s = math.isqrt(disc)
    P, Q = disc % 2, 2
    a = (P + s) // Q
    P = a * Q - P
    Q = (disc - P * P) // Q
    start = (P, Q)
    root = mpmath.sqrt(disc)
    log_eps = mpmath.mpf(0)
    period = 0
    while True:
        log_eps += mpmath.log((P + root) / Q)
        a = (P + s) // Q
        P = a * Q - P
        Q = (disc - P * P) // Q
        period += 1
        if (P, Q) == start:
            break
    return FundamentalUnit(norm=-1 if period % 2 else 1, log=float(log_eps), period=period)


def fundamental_unit_norm(disc: int) -> int:
    return continued_fraction_unit(disc).norm


def _wide_view(group: FormClassGroup) -> Tuple[_GroupView, Callable[[Form], Form], int]:
    """
    Cl(K) as a view on the form group.

    Returns:
        (view, map from any form of the discriminant to its Cl(K) element, unit norm)
    """
    if group.d < 0:
        return _GroupView(list(group.elements), group.compose, group.identity), group.canonical, -1
    minus_class = group.canonical(minus_principal_form(group.d))
    if minus_class == group.identity:
        return _GroupView(list(group.elements), group.compose, group.identity), group.canonical, -1

    def to_wide(f: Form) -> Form:
        g = group.canonical(f)
        return min(g, group.compose(g, minus_class))

    elements = sorted({to_wide(f) for f in group.elements})
    view = _GroupView(elements, lambda x, y: to_wide(group.compose(x, y)), to_wide(group.identity))
    return view, to_wide, 1


def _genus_check(disc: int, two_rank: int, narrow_two_rank: int) -> None:
    t = len(factor(disc).primes)
    if disc < 0:
        if two_rank != t - 1:
            raise InternalInconsistencyError(f"genus theory: 2-rank {two_rank} != {t - 1} for disc {disc}")
        return
    if narrow_two_rank != t - 1 or two_rank not in (t - 1, t - 2):
        raise InternalInconsistencyError(
            f"genus theory: narrow 2-rank {narrow_two_rank}, 2-rank {two_rank}, t = {t} for disc {disc}"
        )


def class_group(disc: int) -> ClassGroupData:
    """
    Class group of the quadratic field of fundamental discriminant disc.

    Raises:
        DomainError: disc not fundamental (or 1)
        RangeError: |disc| above the configured bound
    """
    _check_disc(disc)
    cache = get_cache()
    cached = cache.get(disc)
    if cached is not None:
        return cached

    group = form_class_group(disc)
    wide, _, norm = _wide_view(group)
    divisors = elementary_divisors([wide.order(g) for g in wide.elements])
    narrow_h = None
    unit_norm = None
    narrow_two_rank = 0
    if disc > 0:
        narrow = _GroupView(list(group.elements), group.compose, group.identity)
        narrow_divisors = elementary_divisors([narrow.order(g) for g in narrow.elements])
        narrow_two_rank = _two_rank(narrow_divisors)
        narrow_h = len(group)
        unit_norm = fundamental_unit_norm(disc)
        if unit_norm != norm:
            raise InternalInconsistencyError(
                f"unit norm {unit_norm} from the continued fraction, {norm} from the form (-1, b, c)"
            )
    data = ClassGroupData(
        disc=disc,
        h=len(wide.elements),
        elementary_divisors=divisors,
        two_rank=_two_rank(divisors),
        narrow_h=narrow_h,
        unit_norm=unit_norm,
    )
    _genus_check(disc, data.two_rank, narrow_two_rank)
    logger.debug(f"Class group of disc {disc}: {data}")
    cache.set(data)
    return data


def narrow_class_number(disc: int) -> int:
    if disc <= 0:
        raise DomainError(f"narrow class number needs disc > 0, got {disc}")
    return len(form_class_group(disc))


def class_number_analytic(disc: int) -> int:
    """
    Class number from the analytic class number formula.

    d < 0:  h = -(w / 2|d|) * sum_{a < |d|} chi(a) a
    d > 0:  h log(eps) = -1/2 * sum_{a < d} chi(a) log sin(pi a / d)
    """
    _check_disc(disc)
    if disc < 0:
        w = {-3: 6, -4: 4}.get(disc, 2)
        total = sum(kronecker_symbol(disc, a) * a for a in range(1, -disc))
        h = Fraction(-w * total, 2 * -disc)
        if h.denominator != 1 or h <= 0:
            raise InternalInconsistencyError(f"analytic class number {h} for disc {disc}")
        return int(h)
    with mpmath.workdps(30):
        total = mpmath.fsum(
            kronecker_symbol(disc, a) * mpmath.log(mpmath.sin(mpmath.pi * a / disc))
            for a in range(1, disc)
        )
        value = -total / 2 / continued_fraction_unit(disc).log
    h = int(mpmath.nint(value))
    if abs(value - h) > 1e-6 or h <= 0:
        raise NumericError(
            "analytic class number is not close to a positive integer",
            diagnostics={"disc": disc, "value": float(value)},
        )
    return h


# ---------------------------------------------------------------------------
# Reduced ideals
# ---------------------------------------------------------------------------
#
# A primitive ideal of norm a is I = a Z + (b + sqrt(d))/2 Z with
# b^2 == d (mod 4a), b determined modulo 2a. Its elements have norms
# a * (a x^2 + b x y + c y^2), c = (b^2 - d) / 4a.

def _primitive_ideal(d: int, a: int, b: int) -> bool:
    if (b * b - d) % (4 * a):
        return False
    c = (b * b - d) // (4 * a)
    return math.gcd(math.gcd(a, b), c) == 1


def _minimal_vectors(d: int, a: int, b: int) -> int:
    """
    Number of elements of norm a^2 in I, or 0 if I has a smaller nonzero element.

    Needs a <= sqrt(|d| / 3): then a x^2 + b x y + c y^2 <= a forces |y| <= 1.
    """
    c = (b * b - d) // (4 * a)
    # y = +-1: a x^2 + b x + c over the two integers nearest -b / 2a
    center = -b // (2 * a)
    values = [a * x * x + b * x + c for x in range(center - 1, center + 3)]
    if min(values) < a:
        return 0
    return 2 + 2 * values.count(a)


def _imaginary_reduced_ideal_count(d: int) -> int:
    """
    h(d), d < 0, from the reduced ideals.

    I is reduced when a = N(I) is the least norm of a nonzero element of I
    divided by N(I). A class whose lattice has s shortest vectors holds
    s / w reduced ideals (w roots of unity), so h = sum over reduced I of w / s(I).
    """
    w = {-3: 6, -4: 4}.get(d, 2)
    total = Fraction(0)
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if not _primitive_ideal(d, a, b):
                continue
            shortest = _minimal_vectors(d, a, b)
            if shortest:
                total += Fraction(w, shortest)
        a += 1
    if total.denominator != 1:
        raise InternalInconsistencyError(f"reduced-ideal weights sum to {total} for disc {d}")
    return int(total)


def _real_reduced_ideals(d: int) -> Set[Tuple[int, int]]:
    """(a, b) with |sqrt(d) - 2a| < b < sqrt(d): beta = (b + sqrt(d)) / 2a is reduced."""
    s = math.isqrt(d)
    ideals = set()
    for a in range(1, s + 1):
        # |sqrt(d) - 2a| < b  <=>  b > s - 2a and b > 2a - s - 1 (d not a square)
        low = max(s - 2 * a, 2 * a - s - 1) + 1
        for b in range(max(low, 1), s + 1):
            if _primitive_ideal(d, a, b):
                ideals.add((a, b))
    return ideals


def _next_reduced_ideal(d: int, a: int, b: int) -> Tuple[int, int]:
    """One continued-fraction step beta -> 1 / (beta - floor(beta)) on the ideal side."""
    k = (b + math.isqrt(d)) // (2 * a)
    b_next = 2 * a * k - b
    return (d - b_next * b_next) // (4 * a), b_next


def _real_reduced_ideal_count(d: int) -> int:
    """h(d), d > 0, as the number of cycles of reduced ideals."""
    remaining = _real_reduced_ideals(d)
    cycles = 0
    while remaining:
        start = min(remaining)
        ideal = start
        while True:
            remaining.discard(ideal)
            ideal = _next_reduced_ideal(d, *ideal)
            if ideal == start:
                break
            if ideal not in remaining:
                raise InternalInconsistencyError(f"reduction step left the reduced ideals of disc {d} at {ideal}")
        cycles += 1
    return cycles


def class_number_reduced_ideals(disc: int) -> int:
    """
    Class number from an enumeration of reduced ideals of the maximal order.

    d < 0: weighted count of reduced ideals (one per class up to the
    automorphisms of the shortest vectors). d > 0: number of cycles of
    reduced ideals under the continued-fraction step, which gives the wide
    class number directly.
    """
    _check_disc(disc)
    return _imaginary_reduced_ideal_count(disc) if disc < 0 else _real_reduced_ideal_count(disc)


# ---------------------------------------------------------------------------
# S-class groups and the rank bound
# ---------------------------------------------------------------------------

def prime_form(disc: int, l: int) -> Form:
    """
    Form (l, b, c) attached to a prime ideal above l (l split or ramified).

    Raises:
        DomainError: l inert in K
    """
    if kronecker_symbol(disc, l) == -1:
        raise DomainError(f"{l} is inert in Q(sqrt({disc}))")
    if l == 2:
        b = next(b for b in range(4) if (b * b - disc) % 8 == 0)
    else:
        b = int(sympy.sqrt_mod(disc % l, l) or 0)
        if (b - disc) % 2:
            b += l
    return Form(l, b, (b * b - disc) // (4 * l))


def places_above(disc: int, l: int) -> int:
    return 2 if kronecker_symbol(disc, l) == 1 else 1


def s_class_group(disc: int, p: int, q: int) -> SClassData:
    """Cl(K) modulo the classes of the primes above 2, p, q."""
    base = class_group(disc)
    group = form_class_group(disc)
    wide, to_wide, _ = _wide_view(group)
    s_primes = []
    generators = []
    for l in sorted({2, p, q}):
        s_primes.append((l, places_above(disc, l)))
        if kronecker_symbol(disc, l) != -1:
            generators.append(to_wide(prime_form(disc, l)))
    squares = {wide.compose(g, g) for g in wide.elements}
    closure = wide.subgroup(list(generators) + list(squares))
    index = len(wide.elements) // len(closure)
    s_two_rank = index.bit_length() - 1
    if 1 << s_two_rank != index:
        raise InternalInconsistencyError(f"index {index} of H + 2Cl is not a power of two")
    s_set_size = (1 if disc < 0 else 2) + sum(count for _, count in s_primes)
    data = SClassData(base=base, s_primes=tuple(s_primes), s_two_rank=s_two_rank, s_set_size=s_set_size)
    if data.s_two_rank > base.two_rank or data.s_set_size > 8:
        raise InternalInconsistencyError(f"S-class data out of range: {data}")
    return data


def rank_bound(spec: CurveSpec, field: TwistField) -> RankBound:
    """
    Upper bounds for rank E(K), K = Q(sqrt(D)) real.

    headline = 14 + 2 dim Cl_S(K)[2]; sharp = 2 (#S_K + dim Cl_S(K)[2]) - 2.
    """
    if spec.d != 1:
        raise UnsupportedError(f"rank_bound applies to the base curve (D = 1), got D = {spec.d}")
    if field.mu != 1:
        raise DomainError("rank_bound is stated for real fields Q(sqrt(D)), mu = +1")
    s_data = s_class_group(field.disc, spec.p, spec.q)
    return RankBound(
        headline=HEADLINE_CONSTANT + 2 * s_data.s_two_rank,
        sharp=2 * (s_data.s_set_size + s_data.s_two_rank) - 2,
        s_set_size=s_data.s_set_size,
        s_two_rank=s_data.s_two_rank,
    )
