"""
Exact Integer and Modular Arithmetic

Primality, factorisation of desk-scale integers, the Jacobi/Kronecker family
of quadratic symbols, local Hilbert symbols and l-adic valuations.

All quantities are checked against a fixed signed bit width (128 by default)
so that out-of-range inputs fail loudly instead of silently growing.

Primality and factorisation are delegated to sympy:
- isprime is deterministic below 2^64 and uses the strong BPSW test above it,
  for which no counterexample is known inside the 128-bit range
- factorint is trial division + Pollard rho, ample for |n| < 10^12

Hilbert symbols use the classical unit/valuation case formulas; a brute-force
solvability search modulo l^k is kept alongside as an oracle.
"""

import logging
import math
from typing import Tuple

import numpy as np
import sympy

from app.config.settings import get_settings
from app.models.entities import FactoredInteger, QuadraticSymbol
from app.models.errors import DomainError, ExhaustionError, RangeError

logger = logging.getLogger(__name__)

# Largest modulus the brute-force Hilbert oracle will tabulate.
_BRUTEFORCE_MODULUS_LIMIT = 10_000_000


def check_width(n: int, what: str = "value") -> int:
    """Raise RangeError unless n fits the configured signed bit width."""
    bits = get_settings().integer_bit_width
    if abs(n) >= 1 << (bits - 1):
        raise RangeError(f"{what} = {n} exceeds the {bits}-bit signed range")
    return n


def is_prime(n: int) -> bool:
    if n < 1:
        raise RangeError(f"is_prime expects n >= 1, got {n}")
    check_width(n, "n")
    return bool(sympy.isprime(n))


def factor(n: int) -> FactoredInteger:
    """
    Factor a nonzero integer.

    Returns:
        FactoredInteger with increasing primes; 1 and -1 have no factors
    """
    if n == 0:
        raise DomainError("cannot factor 0")
    check_width(n, "n")
    sign = 1 if n > 0 else -1
    factors = tuple(sorted(sympy.factorint(abs(n)).items()))
    return FactoredInteger(sign=sign, factors=factors)


def next_twin_prime_pair(start: int) -> Tuple[int, int]:
    """Smallest twin pair (p, p + 2) with p >= start."""
    if start < 3:
        raise DomainError(f"twin search starts at 3 or above, got {start}")
    limit = get_settings().twin_search_limit
    p = int(sympy.nextprime(start - 1))
    while p - start <= limit:
        check_width(p + 2, "twin candidate")
        if sympy.isprime(p + 2):
            return p, p + 2
        p = int(sympy.nextprime(p))
    raise ExhaustionError(f"no twin prime pair in [{start}, {start + limit}]")


def twin_prime_pairs(p_max: int, p_min: int = 3):
    """All twin pairs with p_min <= p < p_max."""
    pairs = []
    p = p_min
    while True:
        p, q = next_twin_prime_pair(p)
        if p >= p_max:
            return pairs
        pairs.append((p, q))
        p += 1


def jacobi_symbol(a: int, m: int) -> QuadraticSymbol:
    if m < 1 or m % 2 == 0:
        raise DomainError(f"Jacobi symbol needs an odd positive modulus, got {m}")
    if m == 1:
        return 1
    return int(sympy.jacobi_symbol(a % m, m))


def kronecker_symbol(a: int, n: int) -> QuadraticSymbol:
    """Kronecker extension (a/n) for arbitrary integers."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if a % 2 == 0:
            return 0
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
    return result * jacobi_symbol(a, n)


def is_squarefree(n: int) -> bool:
    return n != 0 and factor(n).is_squarefree


def is_fundamental_discriminant(d: int) -> bool:
    if d == 1:
        return True
    if d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker_character(d: int, n: int) -> QuadraticSymbol:
    """The quadratic character chi_K(n) of the field with fundamental discriminant d."""
    if not is_fundamental_discriminant(d):
        raise DomainError(f"{d} is not a fundamental discriminant")
    return kronecker_symbol(d, n)


def valuation(n: int, l: int) -> int:
    if n == 0:
        raise DomainError("valuation of 0 is undefined")
    if l < 2:
        raise DomainError(f"valuation base must be prime, got {l}")
    return int(sympy.multiplicity(l, abs(n)))


def split_valuation(n: int, l: int) -> Tuple[int, int]:
    """Write n = l^v * u with l not dividing u."""
    v = valuation(n, l)
    return v, n // l ** v


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def hilbert_symbol_local(a: int, b: int, l: int) -> int:
    """
    Hilbert symbol (a, b) over Q_l.

    Args:
        a, b: Nonzero integers
        l: Prime

    Returns:
        +1 if a x^2 + b y^2 = z^2 has a nontrivial l-adic solution, else -1
    """
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol arguments must be nonzero")
    if not is_prime(l):
        raise DomainError(f"Hilbert symbol needs a prime place, got {l}")
    alpha, u = split_valuation(a, l)
    beta, w = split_valuation(b, l)
    if l != 2:
        sign = -1 if (alpha * beta * ((l - 1) // 2)) % 2 else 1
        if beta % 2:
            sign *= jacobi_symbol(u, l)
        if alpha % 2:
            sign *= jacobi_symbol(w, l)
        return sign

    def eps(x: int) -> int:
        return ((x - 1) // 2) % 2

    def omega(x: int) -> int:
        return ((x * x - 1) // 8) % 2

    exponent = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u)
    return -1 if exponent % 2 else 1


def hilbert_symbol_bruteforce(a: int, b: int, l: int) -> int:
    """
    Decide (a, b)_l by searching a + b t^2 = z^2 and b + a t^2 = z^2 modulo l^k.

    A primitive l-adic solution has x or y a unit; with k = 2 v(2ab) + 3 any
    solution modulo l^k lifts by Hensel's lemma in that unit coordinate.
    """
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol arguments must be nonzero")
    k = 2 * valuation(2 * a * b, l) + 3
    modulus = l ** k
    if modulus > _BRUTEFORCE_MODULUS_LIMIT:
        raise RangeError(f"brute-force Hilbert oracle modulus {modulus} too large")
    t = np.arange(modulus, dtype=np.int64)
    t_squared = (t * t) % modulus
    is_square_mod = np.zeros(modulus, dtype=bool)
    is_square_mod[t_squared] = True
    for x, y in ((a, b), (b, a)):
        values = (x % modulus + (y % modulus) * t_squared) % modulus
        if is_square_mod[values].any():
            return 1
    return -1
