"""
Binary Quadratic Forms

Primitive integral forms f = (a, b, c) = a x^2 + b xy + c y^2 of a fixed
discriminant d = b^2 - 4ac, with

- reduction of positive definite forms (|b| <= a <= c, b >= 0 when |b| = a or a = c)
- reduction of indefinite forms (0 < b < sqrt(d), sqrt(d) - b < 2|a| < sqrt(d) + b)
  by the rho operator, and enumeration of the rho-cycles
- composition (Dirichlet/Shanks, via two extended gcds) followed by reduction

All comparisons with sqrt(d) are done against isqrt(d); d is never a square
here, so no comparison is ever an equality.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import sympy

from app.engine.arith import is_square
from app.models.errors import DomainError, InternalInconsistencyError


@dataclass(frozen=True, order=True)
class Form:
    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def inverse(self) -> "Form":
        return Form(self.a, -self.b, self.c)


def _ext_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """(u, v, g) with u a + v b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_u, u = u, old_u - quotient * u
        old_v, v = v, old_v - quotient * v
    if old_r < 0:
        return -old_u, -old_v, -old_r
    return old_u, old_v, old_r


def principal_form(d: int) -> Form:
    b = d % 2
    return Form(1, b, (b * b - d) // 4)


def minus_principal_form(d: int) -> Form:
    """The form (-1, b, c) representing -1; its class is trivial iff N(fundamental unit) = -1."""
    b = d % 2
    return Form(-1, b, (d - b * b) // 4)


# ---------------------------------------------------------------------------
# Positive definite forms
# ---------------------------------------------------------------------------

def is_reduced_definite(f: Form) -> bool:
    a, b, c = f.as_tuple()
    if not (abs(b) <= a <= c):
        return False
    if b < 0 and (abs(b) == a or a == c):
        return False
    return True


def reduce_definite(f: Form) -> Form:
    a, b, c = f.as_tuple()
    if a <= 0 or f.disc >= 0:
        raise DomainError(f"{f} is not positive definite")
    while True:
        r = b % (2 * a)
        if r > a:
            r -= 2 * a
        k = (r - b) // (2 * a)
        b, c = r, a * k * k + b * k + c
        if a > c:
            a, b, c = c, -b, a
            continue
        if b < 0 and (a == c or -b == a):
            b = -b
        return Form(a, b, c)


def reduced_definite_forms(d: int) -> List[Form]:
    """All primitive reduced positive definite forms of discriminant d < 0."""
    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            numerator = b * b - d
            if numerator % (4 * a):
                continue
            c = numerator // (4 * a)
            f = Form(a, b, c)
            if c < a or not is_reduced_definite(f):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append(f)
        a += 1
    return forms


# ---------------------------------------------------------------------------
# Indefinite forms
# ---------------------------------------------------------------------------

def is_reduced_indefinite(f: Form) -> bool:
    s = math.isqrt(f.disc)
    a, b = abs(f.a), f.b
    return 0 < b <= s and 2 * a + b > s and 2 * a - b <= s


def _normalize_rho(b: int, c: int, d: int) -> int:
    """The representative r == b (mod 2|c|) chosen by the rho operator."""
    s = math.isqrt(d)
    m = 2 * abs(c)
    if abs(c) > s:
        r = b % m
        if r > abs(c):
            r -= m
        return r
    # s - 2|c| < r <= s, i.e. sqrt(d) - 2|c| < r < sqrt(d)
    return s - (s - b) % m


def rho(f: Form) -> Form:
    """One reduction step (a, b, c) -> (c, r, (r^2 - d) / 4c)."""
    d = f.disc
    r = _normalize_rho(-f.b, f.c, d)
    return Form(f.c, r, (r * r - d) // (4 * f.c))


def reduce_indefinite(f: Form, max_steps: int = 10_000) -> Form:
    d = f.disc
    if d <= 0 or is_square(d):
        raise DomainError(f"{f} is not indefinite with non-square discriminant")
    for _ in range(max_steps):
        if is_reduced_indefinite(f):
            return f
        f = rho(f)
    raise InternalInconsistencyError(f"indefinite reduction of discriminant {d} did not terminate")


def reduced_indefinite_forms(d: int) -> List[Form]:
    """All primitive reduced indefinite forms of discriminant d > 0."""
    s = math.isqrt(d)
    forms = []
    for b in range(1, s + 1):
        if (b - d) % 2:
            continue
        product = (d - b * b) // 4  # = -a c > 0
        for a in sympy.divisors(product):
            for sign in (1, -1):
                f = Form(sign * a, b, -sign * product // a)
                if is_reduced_indefinite(f) and math.gcd(math.gcd(a, b), f.c) == 1:
                    forms.append(f)
    return forms


def rho_cycles(d: int) -> List[List[Form]]:
    """Partition the reduced indefinite forms of discriminant d into rho-cycles (narrow classes)."""
    remaining = set(reduced_indefinite_forms(d))
    cycles = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        cycle = [start]
        remaining.discard(start)
        f = rho(start)
        while f != start:
            if f not in remaining:
                raise InternalInconsistencyError(f"rho left the reduced forms of discriminant {d} at {f}")
            cycle.append(f)
            remaining.discard(f)
            f = rho(f)
        cycles.append(cycle)
    return cycles


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def compose_raw(f1: Form, f2: Form) -> Form:
    """
    Unreduced composition of two primitive forms of the same discriminant.

    Both first coefficients must be positive; reduced definite forms and the
    canonical indefinite representatives satisfy this.
    """
    d = f1.disc
    if f2.disc != d:
        raise DomainError(f"cannot compose discriminants {d} and {f2.disc}")
    if f1.a <= 0 or f2.a <= 0:
        raise DomainError(f"composition expects positive leading coefficients: {f1}, {f2}")
    if f1.a > f2.a:
        f1, f2 = f2, f1
    a1, b1, _ = f1.as_tuple()
    a2, b2, c2 = f2.as_tuple()
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, g = 0, a1
    else:
        y1, _, g = _ext_gcd(a2, a1)
    if s % g == 0:
        x2, y2, d1 = 0, -1, g
    else:
        x2, v, d1 = _ext_gcd(s, g)
        y2 = -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    if (b3 * b3 - d) % (4 * a3):
        raise InternalInconsistencyError(f"composition of {f1} and {f2} is not integral")
    return Form(a3, b3, (b3 * b3 - d) // (4 * a3))


class FormClassGroup:
    """
    Form class group of a fundamental discriminant d.

    Elements are canonical reduced forms: the unique reduced form for d < 0,
    the least reduced form with a > 0 in the rho-cycle for d > 0 (narrow
    classes).
    """

    def __init__(self, d: int):
        self.d = d
        if d < 0:
            self.elements = reduced_definite_forms(d)
            self._canonical: Dict[Form, Form] = {f: f for f in self.elements}
        else:
            self.cycles = rho_cycles(d)
            self._canonical = {}
            self.elements = []
            for cycle in self.cycles:
                representative = min(f for f in cycle if f.a > 0)
                self.elements.append(representative)
                for f in cycle:
                    self._canonical[f] = representative
        self.identity = self.canonical(principal_form(d))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Form]:
        return iter(self.elements)

    def canonical(self, f: Form) -> Form:
        if f.disc != self.d:
            raise DomainError(f"{f} has discriminant {f.disc}, expected {self.d}")
        reduced = reduce_definite(f) if self.d < 0 else reduce_indefinite(f)
        try:
            return self._canonical[reduced]
        except KeyError:
            raise InternalInconsistencyError(f"{reduced} is not a reduced form of discriminant {self.d}")

    def compose(self, f1: Form, f2: Form) -> Form:
        return self.canonical(compose_raw(self.canonical(f1), self.canonical(f2)))

    def inverse(self, f: Form) -> Form:
        return self.canonical(self.canonical(f).inverse())

    def power(self, f: Form, k: int) -> Form:
        result = self.identity
        base = self.canonical(f)
        while k:
            if k & 1:
                result = self.compose(result, base)
            base = self.compose(base, base)
            k >>= 1
        return result
