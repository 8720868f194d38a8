"""
Root Numbers, Parity and Related Predictions

Global root number of the base curve E (D = 1):

    eps = +1:  omega_E = +1 iff p == 5, 7 (mod 8)
    eps = -1:  omega_E = +1 iff p == 3, 5 (mod 8)

The table is re-derived constructively as a product of local root numbers:

    omega_inf = -1
    omega_l   = +1 at good l
    omega_p   = -1 iff split multiplicative at p (same for q)
    omega_2   = (-1)^(1 + ord_2 #coker phi_2) * (eps (p + q), -pq)_2

where phi: E -> E' is the 2-isogeny and #coker phi_2 = 2 c_2(E') / c_2(E).

Also here: twisted root numbers of E_{mu D}, the parity check against known
ranks, the Heegner congruence and the e_n exponent of the l-part of Sha
over the layers of the cyclotomic Z_l-extension.
"""

import logging
import math
from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np

from app.engine.arith import check_width, hilbert_symbol_local, is_prime, kronecker_character, valuation
from app.engine.curves import check_field_coprime, invariants, isogenous_curve, weierstrass
from app.engine.galois import rho_surjective
from app.engine.localdata import is_split_at, is_supersingular, isogenous_local_data, reduction_data
from app.engine.tate import tate_oracle
from app.models.entities import (
    CurveSpec,
    IwasawaPrediction,
    ParityOutcome,
    ParityVerdict,
    RootNumberData,
    SurjectivityStatus,
    TwistField,
)
from app.models.errors import DomainError, RangeError, UnsupportedError

logger = logging.getLogger(__name__)

TAMAGAWA_SOURCES = ("table", "tate")

# Largest 4N for which the Heegner residue search allocates a square table.
_HEEGNER_MODULUS_LIMIT = 50_000_000


def _require_base(spec: CurveSpec, operation: str) -> None:
    if spec.d != 1:
        raise UnsupportedError(f"{operation} requires D = 1, got D = {spec.d}; use twisted_root_number")


def root_number(spec: CurveSpec) -> int:
    _require_base(spec, "root_number")
    residue = spec.p % 8
    if spec.epsilon == 1:
        return 1 if residue in (5, 7) else -1
    return 1 if residue in (3, 5) else -1


def root_number_constructive(spec: CurveSpec, tamagawa_source: str = "table") -> RootNumberData:
    """
    Global root number as the product of local root numbers.

    Args:
        spec: Base curve (D = 1)
        tamagawa_source: "table" for the closed-form Tamagawa numbers of E and
            E' at 2, "tate" to recompute both with Tate's algorithm

    Returns:
        RootNumberData whose global_sign is the product of the local signs
    """
    _require_base(spec, "root_number_constructive")
    if tamagawa_source not in TAMAGAWA_SOURCES:
        raise DomainError(f"tamagawa_source must be one of {TAMAGAWA_SOURCES}, got {tamagawa_source!r}")
    if tamagawa_source == "tate":
        c2 = tate_oracle(weierstrass(spec), 2).tamagawa
        c2_isogenous = tate_oracle(isogenous_curve(spec), 2).tamagawa
    else:
        c2 = reduction_data(spec, 2).tamagawa
        c2_isogenous = isogenous_local_data(spec, 2).tamagawa
    # #E(Q_2)[phi] = 2
    coker = Fraction(2 * c2_isogenous, c2)
    if coker.denominator != 1:
        raise DomainError(f"cokernel order {coker} is not an integer")
    coker_order = int(coker)
    hilbert = hilbert_symbol_local(spec.epsilon * (spec.p + spec.q), -spec.p * spec.q, 2)
    omega_2 = (-1) ** (1 + valuation(coker_order, 2)) * hilbert
    omega_p = -1 if is_split_at(spec, spec.p) else 1
    omega_q = -1 if is_split_at(spec, spec.q) else 1
    omega_inf = -1
    return RootNumberData(
        omega_inf=omega_inf,
        omega_2=omega_2,
        omega_p=omega_p,
        omega_q=omega_q,
        omega_good=1,
        global_sign=omega_inf * omega_2 * omega_p * omega_q,
        coker_order=coker_order,
        hilbert_factor=hilbert,
    )


def twisted_root_number(spec: CurveSpec, field: TwistField) -> int:
    """
    omega(E_{mu D}) = chi_K(-2pq) * omega_E for K = Q(sqrt(mu D)).

    Raises:
        UnsupportedError: mu D == 3 (mod 4), not covered by the twist formula
        TwistError: D shares a factor with 2pq
    """
    _require_base(spec, "twisted_root_number")
    check_field_coprime(spec, field)
    if field.value % 4 != 1:
        raise UnsupportedError(f"twisted root number needs mu D == 1 (mod 4), got {field.value}")
    return kronecker_character(field.disc, -2 * spec.p * spec.q) * root_number(spec)


# ---------------------------------------------------------------------------
# Parity
# ---------------------------------------------------------------------------

def _two_square_representations(n: int) -> Iterator[Tuple[int, int]]:
    """All ordered signed (a1, a2) with a1^2 + a2^2 = n."""
    for a1 in range(-math.isqrt(n), math.isqrt(n) + 1):
        rest = n - a1 * a1
        a2 = math.isqrt(rest)
        if a2 * a2 == rest:
            yield a1, a2
            if a2:
                yield a1, -a2


def rank_one_witness(q: int) -> Optional[Tuple[int, int, int, int, int]]:
    """
    (a1, a2, e1, e2, a3) with q = a1^2 + a2^2 and (a1 + e1)^2 + (a2 + e2)^2 = a3^2.

    The search is exhaustive over every representation and every sign
    choice e1, e2 in {1, -1}; None when no witness exists.
    """
    for a1, a2 in _two_square_representations(q):
        for e1 in (1, -1):
            for e2 in (1, -1):
                total = (a1 + e1) ** 2 + (a2 + e2) ** 2
                a3 = math.isqrt(total)
                if a3 * a3 == total:
                    return a1, a2, e1, e2, a3
    return None


def parity_check(spec: CurveSpec) -> ParityVerdict:
    """
    Compare omega_E with (-1)^rank for the families whose rank is known.

        eps = +1, p == 5 (mod 8)            rank 0
        eps = -1, p == 3, 5 (mod 8)         rank 0
        eps = +1, p == 3 (mod 8) + witness  rank 1
    """
    _require_base(spec, "parity_check")
    omega = root_number(spec)
    residue = spec.p % 8
    rank = family = source = witness = None
    if spec.epsilon == 1 and residue == 5:
        rank, family, source = 0, "eps+1/p5mod8", "imported:two-descent"
    elif spec.epsilon == -1 and residue in (3, 5):
        rank, family, source = 0, "eps-1/p3,5mod8", "imported:two-descent"
    elif spec.epsilon == 1 and residue == 3:
        witness = rank_one_witness(spec.q)
        if witness is not None:
            rank, family, source = 1, "eps+1/p3mod8", "imported:two-descent+witness-search"
    if rank is None:
        return ParityVerdict(outcome=ParityOutcome.RANK_UNKNOWN, root_number=omega)
    outcome = ParityOutcome.CONSISTENT if (-1) ** rank == omega else ParityOutcome.INCONSISTENT
    if outcome is ParityOutcome.INCONSISTENT:
        logger.warning(f"Parity violated for {spec}: rank {rank}, root number {omega}")
    return ParityVerdict(
        outcome=outcome,
        root_number=omega,
        rank=rank,
        family=family,
        source=source,
        witness=witness,
    )


def heegner_congruence(spec: CurveSpec, disc: int) -> bool:
    """Whether disc is a square modulo 4 N_E (exhaustive residue search)."""
    if disc >= 0:
        raise DomainError(f"Heegner discriminant must be negative, got {disc}")
    modulus = 4 * invariants(spec).conductor
    if modulus > _HEEGNER_MODULUS_LIMIT:
        raise RangeError(f"Heegner residue search modulus {modulus} too large")
    x = np.arange(modulus, dtype=np.int64)
    squares = (x * x) % modulus
    return bool(np.any(squares == disc % modulus))


# ---------------------------------------------------------------------------
# Cyclotomic Z_l-extension
# ---------------------------------------------------------------------------

def iwasawa_e_n(l: int, n: int) -> int:
    """e_n = floor(l^(n+1) / (l^2 - 1) - n / 2)."""
    if l < 2:
        raise DomainError(f"l must be at least 2, got {l}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    check_width(l ** (n + 1), "l^(n+1)")
    return math.floor(Fraction(l ** (n + 1), l * l - 1) - Fraction(n, 2))


def iwasawa_hypotheses(spec: CurveSpec, l: int) -> bool:
    """
    l = 3 with 3 not dividing pqD, or l = 7 with 7 not dividing pqD and p == 2, 3, 6 (mod 7).

    Each such l is supersingular, prime to every Tamagawa number and has
    surjective rho_l; those consequences are re-checked here.
    """
    pqd = spec.p * spec.q * abs(spec.d)
    if l == 3:
        holds = pqd % 3 != 0
    elif l == 7:
        holds = pqd % 7 != 0 and spec.p % 7 in (2, 3, 6)
    else:
        return False
    if not holds:
        return False
    tamagawa_product = math.prod(reduction_data(spec, b).tamagawa for b in spec.bad_primes)
    return (
        is_supersingular(spec, l)
        and tamagawa_product % l != 0
        and rho_surjective(spec, l).status is SurjectivityStatus.SURJECTIVE
    )


def iwasawa_prediction(spec: CurveSpec, l: int, n: int) -> IwasawaPrediction:
    """
    Predicted #Sha(E_D / Q_n)[l^inf] = l^(e_n) and E_D(Q_n) = Z/2 x Z/2.

    The prediction is conditional on ord_l(L(E_D, 1) / Omega) = 0, which is
    not checked; hypotheses_hold reports only the congruence conditions.
    """
    if not is_prime(l):
        raise DomainError(f"{l} is not prime")
    e_n = iwasawa_e_n(l, n)
    return IwasawaPrediction(
        l=l,
        n=n,
        e_n=e_n,
        predicted_order=check_width(l ** e_n, "l^e_n"),
        hypotheses_hold=iwasawa_hypotheses(spec, l),
    )
