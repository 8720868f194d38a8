"""
Tate's Algorithm

Computes the Kodaira symbol, Tamagawa number c_l, conductor exponent f_l and
the valuation of the minimal discriminant of a Weierstrass equation at a
prime l, working directly on integral coordinates:

1. Translate the singular point of the reduction to (0, 0)
2. Read off multiplicative, II, III, IV from divisibility of b2, a6, b8, b6
3. Otherwise arrange l | a1, a2; l^2 | a3, a4; l^3 | a6 and study the cubic
   T^3 + a2/l T^2 + a4/l^2 T + a6/l^3:
   - distinct roots  -> I0*
   - a double root   -> I_m*, found by a sub-loop that alternately pushes
                        a3/a6 and a4/a6 one power of l deeper
   - a triple root   -> IV*, III*, II*, or a non-minimal model, which is
                        rescaled by u = l and the whole procedure restarted

The model is never assumed minimal, so the output also certifies local
minimality of the input (disc_valuation equals the input valuation exactly
when no rescaling happened).

Complexity: O(l) per call (root counting mod l), plus O(m) sub-loop steps.
"""

import logging
from typing import List, Tuple

import numpy as np

from app.config.settings import get_settings
from app.engine.arith import is_prime, valuation
from app.engine.pointcount import count_weierstrass
from app.models.entities import LocalReductionData, ReductionClass, WeierstrassCoeffs
from app.models.errors import DomainError, RangeError

logger = logging.getLogger(__name__)

Model = List[int]  # [a1, a2, a3, a4, a6]


def _b_invariants(model: Model) -> Tuple[int, int, int, int]:
    a1, a2, a3, a4, a6 = model
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _translate(model: Model, r: int, s: int, t: int) -> Model:
    """Substitute x = x' + r, y = y' + s x' + t."""
    a1, a2, a3, a4, a6 = model
    return [
        a1 + 2 * s,
        a2 - s * a1 + 3 * r - s * s,
        a3 + r * a1 + 2 * t,
        a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
        a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1,
    ]


def _rescale(model: Model, u: int) -> Model:
    a1, a2, a3, a4, a6 = model
    return [a1 // u, a2 // u ** 2, a3 // u ** 3, a4 // u ** 4, a6 // u ** 6]


def _count_roots(coefficients: List[int], l: int) -> int:
    """Number of roots in F_l of the polynomial with the given coefficients (highest first)."""
    t = np.arange(l, dtype=np.int64)
    values = np.zeros(l, dtype=np.int64)
    for c in coefficients:
        values = (values * t + c % l) % l
    return int(np.count_nonzero(values == 0))


def _good_class(coeffs: Model, l: int) -> ReductionClass:
    if l > get_settings().prime_enumeration_budget:
        raise RangeError(f"l = {l} exceeds the prime enumeration budget")
    count = count_weierstrass(WeierstrassCoeffs(*coeffs), l)
    trace = l + 1 - count
    if trace % l == 0:
        return ReductionClass.GOOD_SUPERSINGULAR
    return ReductionClass.GOOD_ORDINARY


def tate_oracle(coeffs: WeierstrassCoeffs, l: int) -> LocalReductionData:
    """
    Local reduction data of an integral Weierstrass equation at l by Tate's algorithm.

    Args:
        coeffs: Integral nonsingular Weierstrass coefficients
        l: Prime

    Returns:
        LocalReductionData for the minimal model at l
    """
    if not is_prime(l):
        raise DomainError(f"Tate's algorithm needs a prime, got {l}")
    model: Model = list(coeffs.as_tuple())
    n = valuation(coeffs.discriminant, l)
    half = (l + 1) // 2  # 2 * half == 1 mod l for odd l

    while True:
        if n == 0:
            return LocalReductionData(
                l=l,
                reduction_class=_good_class(model, l),
                kodaira="I0",
                tamagawa=1,
                conductor_exponent=0,
                disc_valuation=0,
            )

        a1, a2, a3, a4, a6 = model
        b2, b4, b6, b8 = _b_invariants(model)
        if l == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif l == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            c4 = b2 * b2 - 24 * b4
            c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
            if c4 % l == 0:
                r = (-pow(12, -1, l) * b2) % l
            else:
                r = (-pow(12 * c4, -1, l) * (c6 + b2 * c4)) % l
            t = (-pow(2, -1, l) * (a1 * r + a3)) % l
        model = _translate(model, r, 0, t)
        a1, a2, a3, a4, a6 = model
        b2, b4, b6, b8 = _b_invariants(model)

        if b2 % l != 0:
            split = _count_roots([1, a1, -a2], l) > 0
            if split:
                cls, tamagawa = ReductionClass.SPLIT_MULTIPLICATIVE, n
            else:
                cls, tamagawa = ReductionClass.NONSPLIT_MULTIPLICATIVE, 2 if n % 2 == 0 else 1
            return LocalReductionData(l, cls, f"I{n}", tamagawa, 1, n)

        if a6 % l ** 2 != 0:
            return _additive(l, "II", 1, n, n)
        if b8 % l ** 3 != 0:
            return _additive(l, "III", 2, n - 1, n)
        if b6 % l ** 3 != 0:
            tamagawa = 3 if _count_roots([1, a3 // l, -(a6 // l ** 2)], l) > 0 else 1
            return _additive(l, "IV", tamagawa, n - 2, n)

        if l == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            s = -a1 * half
            t = -a3 * half
        model = _translate(model, 0, s, t)
        a1, a2, a3, a4, a6 = model

        b = a2 // l
        c = a4 // l ** 2
        d = a6 // l ** 3
        w = 27 * d * d - b * b * c * c + 4 * b ** 3 * d - 18 * b * c * d + 4 * c ** 3
        x = 3 * c - b * b

        if w % l != 0:
            tamagawa = 1 + _count_roots([1, b, c, d], l)
            return _additive(l, "I0*", tamagawa, n - 4, n)

        if x % l != 0:
            # Double root: move it to T = 0
            if l == 2:
                r = c
            elif l == 3:
                r = b * c
            else:
                r = (b * c - 9 * d) * pow(2 * x, -1, l)
            model = _translate(model, l * (r % l), 0, 0)
            m, mx, my, tamagawa = 1, l * l, l * l, 0
            while tamagawa == 0:
                a1, a2, a3, a4, a6 = model
                xa3 = a3 // my
                xa6 = a6 // (mx * my)
                if (xa3 * xa3 + 4 * xa6) % l != 0:
                    tamagawa = 4 if _count_roots([1, xa3, -xa6], l) > 0 else 2
                    continue
                t = my * xa6 if l == 2 else my * ((-xa3 * half) % l)
                model = _translate(model, 0, 0, t)
                my *= l
                m += 1
                a1, a2, a3, a4, a6 = model
                xa2 = a2 // l
                xa4 = a4 // (l * mx)
                xa6 = a6 // (mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % l != 0:
                    tamagawa = 4 if _count_roots([xa2, xa4, xa6], l) > 0 else 2
                    continue
                if l == 2:
                    r = mx * ((xa6 * xa2) % 2)
                else:
                    r = mx * ((-xa4 * pow(2 * xa2, -1, l)) % l)
                model = _translate(model, r, 0, 0)
                mx *= l
                m += 1
            return _additive(l, f"I{m}*", tamagawa, n - m - 4, n)

        # Triple root: move it to T = 0
        if l == 2:
            r = b
        elif l == 3:
            r = -d
        else:
            r = -b * pow(3, -1, l)
        model = _translate(model, l * (r % l), 0, 0)
        a1, a2, a3, a4, a6 = model
        x3 = a3 // l ** 2
        x6 = a6 // l ** 4
        if (x3 * x3 + 4 * x6) % l != 0:
            tamagawa = 3 if _count_roots([1, x3, -x6], l) > 0 else 1
            return _additive(l, "IV*", tamagawa, n - 6, n)
        t = x6 if l == 2 else x3 * half
        model = _translate(model, 0, 0, -l * l * (t % l))
        a1, a2, a3, a4, a6 = model
        if a4 % l ** 4 != 0:
            return _additive(l, "III*", 2, n - 8, n)
        if a6 % l ** 6 != 0:
            return _additive(l, "II*", 1, n - 9, n)

        logger.debug(f"Non-minimal model at l={l}; rescaling by u={l}")
        model = _rescale(model, l)
        n -= 12


def _additive(l: int, kodaira: str, tamagawa: int, f: int, n: int) -> LocalReductionData:
    return LocalReductionData(
        l=l,
        reduction_class=ReductionClass.ADDITIVE,
        kodaira=kodaira,
        tamagawa=tamagawa,
        conductor_exponent=f,
        disc_valuation=n,
    )
