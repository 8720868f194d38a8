from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from app.models.errors import DomainError, InternalInconsistencyError

# Values of the Legendre/Jacobi/Kronecker symbols: -1, 0 or +1.
QuadraticSymbol = int


class ReductionClass(str, Enum):
    GOOD_ORDINARY = "good-ordinary"
    GOOD_SUPERSINGULAR = "good-supersingular"
    SPLIT_MULTIPLICATIVE = "split-multiplicative"
    NONSPLIT_MULTIPLICATIVE = "nonsplit-multiplicative"
    ADDITIVE = "additive"

    @property
    def is_good(self) -> bool:
        return self in (ReductionClass.GOOD_ORDINARY, ReductionClass.GOOD_SUPERSINGULAR)

    @property
    def is_multiplicative(self) -> bool:
        return self in (ReductionClass.SPLIT_MULTIPLICATIVE, ReductionClass.NONSPLIT_MULTIPLICATIVE)


class SurjectivityStatus(str, Enum):
    SURJECTIVE = "surjective"
    UNKNOWN = "unknown"


class ParityOutcome(str, Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    RANK_UNKNOWN = "rank-unknown"


@dataclass(frozen=True)
class FactoredInteger:
    sign: int
    factors: Tuple[Tuple[int, int], ...] = ()  # (prime, exponent), primes increasing

    @property
    def value(self) -> int:
        result = self.sign
        for prime, exponent in self.factors:
            result *= prime ** exponent
        return result

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(prime for prime, _ in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(exponent == 1 for _, exponent in self.factors)

    def __abs__(self) -> "FactoredInteger":
        return FactoredInteger(sign=1, factors=self.factors)

    def __neg__(self) -> "FactoredInteger":
        return FactoredInteger(sign=-self.sign, factors=self.factors)


@dataclass(frozen=True)
class CurveSpec:
    """E_D: y^2 = x(x + epsilon*p*D)(x + epsilon*q*D) with q = p + 2."""

    epsilon: int
    p: int
    q: int
    D: FactoredInteger = FactoredInteger(sign=1)

    @property
    def d(self) -> int:
        return self.D.value

    @property
    def d_primes(self) -> Tuple[int, ...]:
        return self.D.primes

    @property
    def n(self) -> int:
        return len(self.D.factors)

    @property
    def bad_primes(self) -> Tuple[int, ...]:
        return tuple(sorted({2, self.p, self.q, *self.d_primes}))

    def key(self) -> Tuple[int, int, int, int]:
        return (self.p, self.d, self.epsilon, self.q)


@dataclass(frozen=True)
class CurveInvariants:
    discriminant: int
    j_numerator: int
    j_denominator: int
    conductor: int


@dataclass(frozen=True)
class WeierstrassCoeffs:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise DomainError(f"singular Weierstrass equation {self.as_tuple()}")

    def as_tuple(self) -> Tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self) -> int:
        return self.a1 * self.a1 + 4 * self.a2

    @property
    def b4(self) -> int:
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self) -> int:
        return self.a3 * self.a3 + 4 * self.a6

    @property
    def b8(self) -> int:
        a1, a2, a3, a4, a6 = self.as_tuple()
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4

    @property
    def c4(self) -> int:
        return self.b2 * self.b2 - 24 * self.b4

    @property
    def c6(self) -> int:
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class TorsionGroup:
    invariants: Tuple[int, ...]
    points: Tuple[Tuple[int, int], ...]
    checked_primes: Tuple[int, ...] = ()
    search_bound: int = 0

    @property
    def order(self) -> int:
        result = 1
        for m in self.invariants:
            result *= m
        return result


@dataclass(frozen=True)
class LocalReductionData:
    l: int
    reduction_class: ReductionClass
    kodaira: str
    tamagawa: int
    conductor_exponent: int
    disc_valuation: int

    def __post_init__(self):
        if self.reduction_class.is_good != (self.conductor_exponent == 0):
            raise InternalInconsistencyError(f"good reduction must have f=0: {self}")
        if self.reduction_class.is_multiplicative:
            if self.conductor_exponent != 1 or self.kodaira != f"I{self.disc_valuation}":
                raise InternalInconsistencyError(f"multiplicative data malformed: {self}")
        if self.reduction_class is ReductionClass.ADDITIVE and self.conductor_exponent < 2:
            raise InternalInconsistencyError(f"additive reduction needs f >= 2: {self}")


@dataclass(frozen=True)
class PointCount:
    l: int
    count: int
    trace: int


@dataclass(frozen=True)
class RamificationVerdict:
    l: int
    at: int
    ramified: bool


@dataclass(frozen=True)
class SurjectivityVerdict:
    l: int
    status: SurjectivityStatus
    clause: Optional[int] = None


@dataclass(frozen=True)
class TwistField:
    """K = Q(sqrt(mu*D)) with D > 0 square-free odd."""

    mu: int
    D: FactoredInteger

    @property
    def mu0(self) -> int:
        return (1 - self.mu) // 2

    @property
    def value(self) -> int:
        return self.mu * self.D.value

    @property
    def disc(self) -> int:
        m = self.value
        return m if m % 4 == 1 else 4 * m

    @property
    def n(self) -> int:
        return len(self.D.factors)


@dataclass(frozen=True)
class NormIndexBreakdown:
    delta_inf: int
    delta_g: int
    delta_m: int
    delta_a: int
    total: int
    case_label: str

    def __post_init__(self):
        if self.total != self.delta_inf + self.delta_g + self.delta_m + self.delta_a:
            raise InternalInconsistencyError(f"norm-index components do not add up: {self}")


@dataclass(frozen=True)
class TwoAdicLocalData:
    field_tag: str
    kodaira_w: str
    ord_disc_w: int
    f_w: int
    c_w: int
    residue_degree: int
    ramified: bool


@dataclass(frozen=True)
class DeltaCase:
    label: str
    total: int


@dataclass(frozen=True)
class ParityRelation:
    beta: int
    clause_label: str


@dataclass(frozen=True)
class ClassGroupData:
    disc: int
    h: int
    elementary_divisors: Tuple[int, ...]
    two_rank: int
    narrow_h: Optional[int] = None
    unit_norm: Optional[int] = None


@dataclass(frozen=True)
class SClassData:
    base: ClassGroupData
    s_primes: Tuple[Tuple[int, int], ...]  # (rational prime, number of places above it)
    s_two_rank: int
    s_set_size: int


@dataclass(frozen=True)
class RankBound:
    headline: int
    sharp: int
    s_set_size: int
    s_two_rank: int


@dataclass(frozen=True)
class RootNumberData:
    omega_inf: int
    omega_2: int
    omega_p: int
    omega_q: int
    omega_good: int
    global_sign: int
    coker_order: int = 0
    hilbert_factor: int = 1

    def __post_init__(self):
        product = self.omega_inf * self.omega_2 * self.omega_p * self.omega_q * self.omega_good
        if product != self.global_sign:
            raise InternalInconsistencyError(f"local root numbers do not multiply out: {self}")


@dataclass(frozen=True)
class LSeriesApprox:
    value: float
    truncation: int
    tail_bound: float
    formula_tag: str
    derivative: int = 0


@dataclass(frozen=True)
class ParityVerdict:
    outcome: ParityOutcome
    root_number: int
    rank: Optional[int] = None
    family: Optional[str] = None
    source: Optional[str] = None
    witness: Optional[Tuple[int, int, int, int, int]] = None


@dataclass(frozen=True)
class IwasawaPrediction:
    l: int
    n: int
    e_n: int
    predicted_order: int
    hypotheses_hold: bool
    torsion: Tuple[int, ...] = field(default=(2, 2))
