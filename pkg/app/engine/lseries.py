"""
L-Series of the Base Curve at s = 1

Dirichlet coefficients a(n) come from the Euler product: point counts at
good primes, +1/-1 at split/nonsplit multiplicative primes, 0 at additive
primes, the Hecke recursion on prime powers and multiplicativity.

With N = 2^5 p q, t0 = 1/sqrt(N) = 1/(4 sqrt(2pq)) and omega the root number:

    L(E, 1)       = (1 + omega) * sum a(n)/n * exp(-2 pi n t0)
    L^(r)(E, 1)   = 2 pi * sum a(n) * int_{t0}^inf [log^r t + omega (-1)^r log^r(N t)] exp(-2 pi n t) dt
    L(E_{mu D}, 1) = (1 + omega chi(-2pq)) * sum a(n) chi(n)/n * exp(-2 pi n t0 / |d|)

The derivative formula is the r-th derivative of 2 pi (2 pi)^-s Gamma(s) L(E, s)
at s = 1; it equals L^(r)(E, 1) at the order of vanishing. For r = 0 the
integral is evaluated in closed form; for r >= 1 by Gauss-Legendre
quadrature on geometric panels, refined until two successive panel
subdivisions agree.

Tail bounds use |a(n)| <= n:

    r = 0:  2 G
    r >= 1: 2 G * sum_k C(r, k) A^(r-k) k! (2 pi (M+1) t0)^-k

with G = exp(-2 pi (M+1) t0) / (1 - exp(-2 pi t0)), A = log(N)/2 and M the
truncation point.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from app.config.settings import get_settings
from app.engine.arith import kronecker_character
from app.engine.curves import check_field_coprime, invariants
from app.engine.localdata import count_points, is_split_at
from app.engine.rootnumber import root_number
from app.models.entities import CurveSpec, LSeriesApprox, TwistField
from app.models.errors import DomainError, NumericError, RangeError, UnsupportedError

logger = logging.getLogger(__name__)

MAX_DERIVATIVE = 2
DERIVATIVE_METHODS = ("auto", "quadrature")

# Beyond t0 + _INTEGRATION_SPAN the integrand is below exp(-2 pi * 6).
_INTEGRATION_SPAN = 6.0


def _require_base(spec: CurveSpec, operation: str) -> None:
    if spec.d != 1:
        raise UnsupportedError(f"{operation} requires D = 1, got D = {spec.d}")


def _check_budget(n_max: int) -> None:
    if n_max < 1:
        raise DomainError(f"N_max must be positive, got {n_max}")
    budget = get_settings().series_truncation_budget
    if n_max > budget:
        raise RangeError(f"N_max = {n_max} exceeds the series truncation budget {budget}")


def _prime_coefficient(spec: CurveSpec, l: int) -> int:
    if l == 2 or l in spec.d_primes:
        return 0
    if l in (spec.p, spec.q):
        return 1 if is_split_at(spec, l) else -1
    return count_points(spec, l).trace


@lru_cache(maxsize=32)
def _coefficients(spec: CurveSpec, n_max: int) -> np.ndarray:
    a = np.zeros(n_max + 1, dtype=np.int64)
    a[1] = 1
    # smallest prime factor sieve
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for l in range(2, n_max + 1):
        if spf[l]:
            continue
        spf[l::l][spf[l::l] == 0] = l
        a_l = _prime_coefficient(spec, l)
        previous, current = 1, a_l
        power = l
        while power <= n_max:
            a[power] = current
            if l in spec.bad_primes:
                current = current * a_l
            else:
                previous, current = current, a_l * current - l * previous
            power *= l
    for n in range(2, n_max + 1):
        l = int(spf[n])
        power = l
        while n % (power * l) == 0:
            power *= l
        if power != n:
            a[n] = a[power] * a[n // power]
    a.setflags(write=False)
    return a


def an_coefficients(spec: CurveSpec, n_max: int) -> np.ndarray:
    """
    Dirichlet coefficients of L(E_D, s).

    Returns:
        Read-only int64 array indexed by n, of length n_max + 1 (entry 0 unused)

    Raises:
        RangeError: n_max above the series truncation budget
    """
    _check_budget(n_max)
    return _coefficients(spec, n_max)


def _t0(spec: CurveSpec) -> float:
    return 1.0 / math.sqrt(invariants(spec).conductor)


def tail_bound(spec: CurveSpec, n_max: int, r: int = 0, scale: float = 1.0) -> float:
    """
    Bound on the terms n > n_max dropped from the series (or the integral sum) for derivative r.

    scale = |d| damps the character-twisted series by exp(-2 pi n t0 / |d|).
    """
    decay = 2 * math.pi * _t0(spec) / scale
    geometric = math.exp(-decay * (n_max + 1)) / -math.expm1(-decay)
    if r == 0:
        return 2 * geometric
    a = abs(math.log(_t0(spec)))
    total = sum(
        math.comb(r, k) * a ** (r - k) * math.factorial(k) * (decay * (n_max + 1)) ** (-k)
        for k in range(r + 1)
    )
    return 2 * geometric * total


def auto_truncation(spec: CurveSpec, tolerance: Optional[float] = None, r: int = 0, scale: float = 1.0) -> int:
    """Smallest N_max whose tail bound is below tolerance, capped by the truncation budget."""
    settings = get_settings()
    tolerance = settings.series_tolerance if tolerance is None else tolerance
    budget = settings.series_truncation_budget
    if tail_bound(spec, budget, r, scale) >= tolerance:
        logger.warning(f"Tolerance {tolerance} not reachable within budget {budget} for {spec}")
        return budget
    low, high = 1, 1
    while tail_bound(spec, high, r, scale) >= tolerance:
        low, high = high, min(2 * high, budget)
    while low < high:
        mid = (low + high) // 2
        if tail_bound(spec, mid, r, scale) < tolerance:
            high = mid
        else:
            low = mid + 1
    logger.debug(f"Auto truncation for {spec} (r={r}, tol={tolerance}): N_max = {high}")
    return high


def _damped_sum(a: np.ndarray, decay: float, chi: Optional[np.ndarray] = None) -> float:
    n = np.arange(1, len(a), dtype=np.float64)
    terms = a[1:] / n * np.exp(-decay * n)
    if chi is not None:
        terms = terms * chi[1:]
    return float(math.fsum(terms))


def l_value_at_1(spec: CurveSpec, n_max: Optional[int] = None) -> LSeriesApprox:
    """
    L(E, 1) for the base curve; exactly 0 when the root number is -1.

    Raises:
        UnsupportedError: D != 1
        RangeError: n_max above the budget
    """
    _require_base(spec, "l_value_at_1")
    if root_number(spec) == -1:
        return LSeriesApprox(value=0.0, truncation=0, tail_bound=0.0, formula_tag="vanishing:root-number-minus-one")
    n_max = auto_truncation(spec) if n_max is None else n_max
    a = an_coefficients(spec, n_max)
    value = 2 * _damped_sum(a, 2 * math.pi * _t0(spec))
    return LSeriesApprox(
        value=value,
        truncation=n_max,
        tail_bound=tail_bound(spec, n_max),
        formula_tag="series:root-number-plus-one",
    )


def _integrate_derivative(spec: CurveSpec, a: np.ndarray, r: int, omega: int) -> float:
    t0 = _t0(spec)
    conductor = invariants(spec).conductor
    n = np.arange(1, len(a), dtype=np.float64)
    weights = a[1:].astype(np.float64)

    def integrand(t):
        x = float(t)
        theta = float(np.dot(weights, np.exp(-2 * math.pi * n * x)))
        kernel = math.log(x) ** r + omega * (-1) ** r * math.log(conductor * x) ** r
        return theta * kernel

    upper = t0 + _INTEGRATION_SPAN
    points = [t0]
    while points[-1] * 2 < upper:
        points.append(points[-1] * 2)
    points.append(upper)

    settings = get_settings()
    tolerance = max(settings.series_tolerance, 1e-13)
    previous = None
    difference = float("inf")
    with mpmath.workdps(15):
        for refinement in range(settings.quadrature_max_refinements + 1):
            value = float(mpmath.quad(integrand, points, method="gauss-legendre"))
            if previous is not None:
                difference = abs(value - previous)
                if difference <= tolerance * max(1.0, abs(value)):
                    logger.debug(f"Quadrature for r={r} converged after {refinement} refinements")
                    return 2 * math.pi * value
            previous = value
            points = sorted(set(points) | {(x + y) / 2 for x, y in zip(points, points[1:])})
    raise NumericError(
        "derivative quadrature did not converge",
        diagnostics={
            "r": r,
            "refinements": settings.quadrature_max_refinements,
            "panels": len(points) - 1,
            "last_difference": difference,
            "truncation": len(a) - 1,
        },
    )


def l_derivative_at_1(
    spec: CurveSpec, r: int, n_max: Optional[int] = None, method: str = "auto"
) -> LSeriesApprox:
    """
    r-th derivative at s = 1 (0 <= r <= 2) of the base curve's L-function.

    For r = 0 the integral has a closed form; method="quadrature" integrates
    it numerically anyway, which gives an independent check of the series.

    Raises:
        DomainError: r outside 0..2, or an unknown method
        NumericError: the quadrature does not converge within the refinement budget
    """
    _require_base(spec, "l_derivative_at_1")
    if not 0 <= r <= MAX_DERIVATIVE:
        raise DomainError(f"derivative order must be in 0..{MAX_DERIVATIVE}, got {r}")
    if method not in DERIVATIVE_METHODS:
        raise DomainError(f"method must be one of {DERIVATIVE_METHODS}, got {method!r}")
    omega = root_number(spec)
    n_max = auto_truncation(spec, r=r) if n_max is None else n_max
    a = an_coefficients(spec, n_max)
    if r == 0 and method == "auto":
        value = (1 + omega) * _damped_sum(a, 2 * math.pi * _t0(spec))
        tag = "closed-form-integral"
    else:
        value = _integrate_derivative(spec, a, r, omega)
        tag = "integral:gauss-legendre"
    return LSeriesApprox(
        value=value,
        truncation=n_max,
        tail_bound=tail_bound(spec, n_max, r),
        formula_tag=tag,
        derivative=r,
    )


def twisted_l_value(spec: CurveSpec, field: TwistField, n_max: Optional[int] = None) -> LSeriesApprox:
    """
    L(E_{mu D}, 1) through the character-twisted series of the base curve.

    Raises:
        DomainError: mu D not == 1 (mod 4)
        TwistError: D shares a factor with 2pq
    """
    _require_base(spec, "twisted_l_value")
    check_field_coprime(spec, field)
    if field.value % 4 != 1:
        raise DomainError(f"twisted L-value needs D == mu (mod 4), got mu D = {field.value}")
    disc = field.disc
    prefactor = 1 + root_number(spec) * kronecker_character(disc, -2 * spec.p * spec.q)
    if prefactor == 0:
        return LSeriesApprox(value=0.0, truncation=0, tail_bound=0.0, formula_tag="vanishing:twisted-prefactor")
    scale = abs(disc)
    n_max = auto_truncation(spec, scale=scale) if n_max is None else n_max
    a = an_coefficients(spec, n_max)
    residues = np.array([kronecker_character(disc, b) for b in range(scale)], dtype=np.int64)
    chi = residues[np.arange(n_max + 1) % scale]
    value = prefactor * _damped_sum(a, 2 * math.pi * _t0(spec) / scale, chi)
    return LSeriesApprox(
        value=value,
        truncation=n_max,
        tail_bound=tail_bound(spec, n_max, scale=scale),
        formula_tag="twisted-series",
    )
