from typing import List, Optional

from pydantic import BaseModel, Field, validator

from app.engine.curves import validate
from app.engine.sweep import CheckRow, SweepParams, SweepResult
from app.models.entities import (
    ClassGroupData,
    CurveInvariants,
    CurveSpec,
    IwasawaPrediction,
    LocalReductionData,
    LSeriesApprox,
    NormIndexBreakdown,
    ParityRelation,
    ParityVerdict,
    RankBound,
    RootNumberData,
    SClassData,
    SurjectivityVerdict,
    TorsionGroup,
)
from app.models.hypotheses import AdvisorReport, Conclusion, UnmetRule


class CurveSpecDTO(BaseModel):
    epsilon: int
    p: int
    q: int
    D: int = 1

    @validator("epsilon")
    def validate_epsilon(cls, v: int):
        if v not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        return v

    @validator("D")
    def validate_d(cls, v: int):
        """D is a nonzero odd integer; square-freeness and coprimality are domain checks."""
        if v == 0 or v % 2 == 0:
            raise ValueError("D must be a nonzero odd integer")
        return v

    def to_domain(self) -> CurveSpec:
        return validate(self.epsilon, self.p, self.q, self.D)

    @classmethod
    def from_domain(cls, spec: CurveSpec) -> "CurveSpecDTO":
        return cls(epsilon=spec.epsilon, p=spec.p, q=spec.q, D=spec.d)


class InvariantsDTO(BaseModel):
    discriminant: int
    j_numerator: int
    j_denominator: int
    conductor: int
    source: str = "closed-form"

    @classmethod
    def from_domain(cls, inv: CurveInvariants) -> "InvariantsDTO":
        return cls(
            discriminant=inv.discriminant,
            j_numerator=inv.j_numerator,
            j_denominator=inv.j_denominator,
            conductor=inv.conductor,
        )


class LocalDataDTO(BaseModel):
    l: int
    reduction_class: str
    kodaira: str
    tamagawa: int
    conductor_exponent: int
    disc_valuation: int
    source: str = "reduction-table"

    @classmethod
    def from_domain(cls, data: LocalReductionData, source: str = "reduction-table") -> "LocalDataDTO":
        return cls(
            l=data.l,
            reduction_class=data.reduction_class.value,
            kodaira=data.kodaira,
            tamagawa=data.tamagawa,
            conductor_exponent=data.conductor_exponent,
            disc_valuation=data.disc_valuation,
            source=source,
        )


class TorsionDTO(BaseModel):
    invariants: List[int]
    points: List[List[int]]
    checked_primes: List[int] = []
    search_bound: int = 0
    source: str = "computed-nagell-lutz"

    @classmethod
    def from_domain(cls, torsion: TorsionGroup) -> "TorsionDTO":
        return cls(
            invariants=list(torsion.invariants),
            points=[list(point) for point in torsion.points],
            checked_primes=list(torsion.checked_primes),
            search_bound=torsion.search_bound,
        )


class GaloisDTO(BaseModel):
    l: int
    ramified_at_p: bool
    ramified_at_q: bool
    surjectivity: str
    clause: Optional[int] = None
    source: str = "discriminant-valuation"

    @classmethod
    def from_domain(cls, at_p: bool, at_q: bool, verdict: SurjectivityVerdict) -> "GaloisDTO":
        return cls(
            l=verdict.l,
            ramified_at_p=at_p,
            ramified_at_q=at_q,
            surjectivity=verdict.status.value,
            clause=verdict.clause,
        )


class RootNumberDTO(BaseModel):
    global_sign: int
    table_value: Optional[int] = None
    omega_inf: Optional[int] = None
    omega_2: Optional[int] = None
    omega_p: Optional[int] = None
    omega_q: Optional[int] = None
    coker_order: Optional[int] = None
    hilbert_factor: Optional[int] = None
    source: str = "constructive-local-product"

    @validator("global_sign", "table_value")
    def validate_sign(cls, v: Optional[int]):
        if v is not None and v not in (1, -1):
            raise ValueError("root numbers are +1 or -1")
        return v

    @classmethod
    def from_domain(cls, data: RootNumberData, table_value: int) -> "RootNumberDTO":
        return cls(
            global_sign=data.global_sign,
            table_value=table_value,
            omega_inf=data.omega_inf,
            omega_2=data.omega_2,
            omega_p=data.omega_p,
            omega_q=data.omega_q,
            coker_order=data.coker_order,
            hilbert_factor=data.hilbert_factor,
        )


class ParityDTO(BaseModel):
    outcome: str
    root_number: int
    rank: Optional[int] = None
    family: Optional[str] = None
    source: Optional[str] = None
    witness: Optional[List[int]] = None

    @classmethod
    def from_domain(cls, verdict: ParityVerdict) -> "ParityDTO":
        return cls(
            outcome=verdict.outcome.value,
            root_number=verdict.root_number,
            rank=verdict.rank,
            family=verdict.family,
            source=verdict.source,
            witness=None if verdict.witness is None else list(verdict.witness),
        )


class NormIndexDTO(BaseModel):
    mu: int
    D: int
    delta_inf: int
    delta_g: int
    delta_m: int
    delta_a: int
    total: int
    case_label: str
    parity_clause: str
    beta: int
    source: str = "components+clause-table"

    @validator("total")
    def validate_total(cls, v: int, values):
        parts = [values.get(k) for k in ("delta_inf", "delta_g", "delta_m", "delta_a")]
        if None not in parts and sum(parts) != v:
            raise ValueError("total must equal the sum of the components")
        return v

    @classmethod
    def from_domain(cls, mu: int, d: int, breakdown: NormIndexBreakdown, relation: ParityRelation) -> "NormIndexDTO":
        return cls(
            mu=mu,
            D=d,
            delta_inf=breakdown.delta_inf,
            delta_g=breakdown.delta_g,
            delta_m=breakdown.delta_m,
            delta_a=breakdown.delta_a,
            total=breakdown.total,
            case_label=breakdown.case_label,
            parity_clause=relation.clause_label,
            beta=relation.beta,
        )


class LSeriesDTO(BaseModel):
    value: float
    truncation: int
    tail_bound: float
    derivative: int = 0
    source: str

    @classmethod
    def from_domain(cls, approx: LSeriesApprox) -> "LSeriesDTO":
        return cls(
            value=approx.value,
            truncation=approx.truncation,
            tail_bound=approx.tail_bound,
            derivative=approx.derivative,
            source=approx.formula_tag,
        )


class IwasawaDTO(BaseModel):
    l: int
    n: int
    e_n: int
    predicted_order: int
    hypotheses_hold: bool
    torsion: List[int]
    source: str = "conditional-prediction"

    @classmethod
    def from_domain(cls, prediction: IwasawaPrediction) -> "IwasawaDTO":
        return cls(
            l=prediction.l,
            n=prediction.n,
            e_n=prediction.e_n,
            predicted_order=prediction.predicted_order,
            hypotheses_hold=prediction.hypotheses_hold,
            torsion=list(prediction.torsion),
        )


class CurveReport(BaseModel):
    spec: CurveSpecDTO
    invariants: InvariantsDTO
    local_data: List[LocalDataDTO]
    torsion: TorsionDTO
    galois: List[GaloisDTO] = []
    root_number: Optional[RootNumberDTO] = None
    parity: Optional[ParityDTO] = None
    norm_index: List[NormIndexDTO] = []
    l_value: Optional[LSeriesDTO] = None
    iwasawa: List[IwasawaDTO] = []

    def to_json(self) -> str:
        return self.json(sort_keys=True, indent=2)

    def to_text(self) -> str:
        spec, inv = self.spec, self.invariants
        lines = [
            f"E: eps={spec.epsilon:+d} p={spec.p} q={spec.q} D={spec.D}",
            f"  conductor     {inv.conductor}",
            f"  discriminant  {inv.discriminant}",
            f"  j-invariant   {inv.j_numerator}/{inv.j_denominator}",
            f"  torsion       {' x '.join(f'Z/{m}' for m in self.torsion.invariants) or 'trivial'}",
        ]
        for data in self.local_data:
            lines.append(
                f"  l={data.l:<6} {data.kodaira:<4} c={data.tamagawa} f={data.conductor_exponent} "
                f"ord(disc)={data.disc_valuation} {data.reduction_class}"
            )
        if self.root_number is not None:
            lines.append(f"  root number   {self.root_number.global_sign:+d} ({self.root_number.source})")
        if self.parity is not None:
            lines.append(f"  parity        {self.parity.outcome}")
        for entry in self.norm_index:
            lines.append(
                f"  K=Q(sqrt({entry.mu * entry.D})): delta={entry.total} [{entry.case_label}] "
                f"inf={entry.delta_inf} g={entry.delta_g} m={entry.delta_m} a={entry.delta_a} "
                f"parity clause {entry.parity_clause}"
            )
        if self.l_value is not None:
            lines.append(f"  L(E,1)        {self.l_value.value:.12g} (tail <= {self.l_value.tail_bound:.1e})")
        for entry in self.iwasawa:
            status = "hypotheses hold" if entry.hypotheses_hold else "hypotheses fail"
            lines.append(f"  Sha[{entry.l}^inf] over Q_{entry.n}: {entry.l}^{entry.e_n} ({status})")
        return "\n".join(lines)


class ClassGroupDTO(BaseModel):
    disc: int
    h: int
    elementary_divisors: List[int]
    two_rank: int
    narrow_h: Optional[int] = None
    unit_norm: Optional[int] = None
    source: str = "form-class-group"

    @classmethod
    def from_domain(cls, data: ClassGroupData) -> "ClassGroupDTO":
        return cls(
            disc=data.disc,
            h=data.h,
            elementary_divisors=list(data.elementary_divisors),
            two_rank=data.two_rank,
            narrow_h=data.narrow_h,
            unit_norm=data.unit_norm,
        )


class SClassDTO(BaseModel):
    s_primes: List[List[int]]
    s_two_rank: int
    s_set_size: int

    @classmethod
    def from_domain(cls, data: SClassData) -> "SClassDTO":
        return cls(
            s_primes=[list(entry) for entry in data.s_primes],
            s_two_rank=data.s_two_rank,
            s_set_size=data.s_set_size,
        )


class RankBoundDTO(BaseModel):
    headline: int
    sharp: int
    s_set_size: int
    s_two_rank: int

    @classmethod
    def from_domain(cls, bound: RankBound) -> "RankBoundDTO":
        return cls(
            headline=bound.headline,
            sharp=bound.sharp,
            s_set_size=bound.s_set_size,
            s_two_rank=bound.s_two_rank,
        )


class ClassGroupResponse(BaseModel):
    class_group: ClassGroupDTO
    s_class: Optional[SClassDTO] = None
    analytic_h: int
    rank_bound: Optional[RankBoundDTO] = None


class ConclusionDTO(BaseModel):
    rule: str
    statement: str
    verified: List[str]
    asserted: List[str]
    conditional: bool

    @classmethod
    def from_domain(cls, conclusion: Conclusion) -> "ConclusionDTO":
        return cls(
            rule=conclusion.rule,
            statement=conclusion.statement,
            verified=list(conclusion.verified),
            asserted=list(conclusion.asserted),
            conditional=conclusion.conditional,
        )


class UnmetRuleDTO(BaseModel):
    rule: str
    failed: List[str]
    missing_facts: List[str]

    @classmethod
    def from_domain(cls, unmet: UnmetRule) -> "UnmetRuleDTO":
        return cls(rule=unmet.rule, failed=list(unmet.failed), missing_facts=list(unmet.missing_facts))


class AdvisorResponse(BaseModel):
    spec: CurveSpecDTO
    facts: List[str]
    conclusions: List[ConclusionDTO]
    unmet: List[UnmetRuleDTO]

    @classmethod
    def from_domain(cls, report: AdvisorReport) -> "AdvisorResponse":
        return cls(
            spec=CurveSpecDTO.from_domain(report.spec),
            facts=list(report.facts),
            conclusions=[ConclusionDTO.from_domain(c) for c in report.conclusions],
            unmet=[UnmetRuleDTO.from_domain(u) for u in report.unmet],
        )


class CheckRowDTO(BaseModel):
    epsilon: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    D: Optional[int] = None
    mu: Optional[int] = None
    check: str
    expected: str
    actual: str
    passed: bool

    @classmethod
    def from_domain(cls, row: CheckRow) -> "CheckRowDTO":
        return cls(
            epsilon=row.epsilon,
            p=row.p,
            q=row.q,
            D=row.D,
            mu=row.mu,
            check=row.check,
            expected=row.expected,
            actual=row.actual,
            passed=row.passed,
        )


class CheckTimingDTO(BaseModel):
    check: str
    tasks: int
    rows: int
    failures: int
    time_seconds: float


class SweepSummary(BaseModel):
    checks: List[str]
    p_max: Optional[int] = None
    d_max: Optional[int] = None
    rows: int
    passed: int
    failed: int
    failures: List[CheckRowDTO] = Field(default_factory=list)
    timings: List[CheckTimingDTO] = Field(default_factory=list)

    @classmethod
    def from_domain(cls, result: SweepResult, params: Optional[SweepParams] = None) -> "SweepSummary":
        return cls(
            checks=list(result.checks),
            p_max=None if params is None else params.p_max,
            d_max=None if params is None else params.d_max,
            rows=len(result.rows),
            passed=result.passed,
            failed=len(result.failures),
            failures=[CheckRowDTO.from_domain(row) for row in result.failures],
            timings=[CheckTimingDTO(**vars(t)) for t in result.timings],
        )

    def to_json(self) -> str:
        return self.json(sort_keys=True, indent=2)
