"""
Verification Sweeps

Runs exhaustive consistency checks over ranges of twin primes p, twists D
and signs mu, eps. Every check compares two independent computations of
the same quantity and emits one CheckRow per comparison:

    counts       closed-form point counts  vs  brute-force counts over F_l
    delta        clause total              vs  place-by-place norm index
    partition    exactly one norm-index clause and one parity clause match
    rootnumbers  root-number table         vs  product of local root numbers
    anomalous    no good l <= bound divides #E~(F_l)
    tate         reduction tables          vs  Tate's algorithm (E_D and E')
    classgroups  form class number         vs  reduced-ideal count and analytic formula
    lvalues      exact vanishing, Cauchy stability, closed-form integral
    parity       no known-rank family contradicts the root number
    example      conductor, root number, torsion and Heegner congruence of (3, 5)
    jacobi       multiplicativity, and residues against squares for prime m
    hilbert      local formula             vs  brute-force l-adic search
    twists       minus_twist involution and disc = (c4^3 - c6^2) / 1728
    supersingular  Hasse invariant         vs  a_l == 0
    an_bound     |a(n)| <= d(n) sqrt(n) and |a(n)| <= n
    rho          surjectivity is monotone past the bound
    rankbound    S-class 2-rank <= class 2-rank, sharp <= headline
    twisted      twisted series vanishes iff the twisted root number is -1
    roundtrip    JSON report parses back to an equal report

Work is split into tasks (one per twin pair, per modulus or prime, or per
discriminant chunk) and fanned out over a process pool; rows are merged and
sorted by (p, D, mu, eps, check) so identical inputs give identical CSV output.
"""

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np
import sympy

from app.config.settings import current_overrides, get_settings, load_settings
from app.engine.arith import (
    factor,
    hilbert_symbol_bruteforce,
    hilbert_symbol_local,
    is_fundamental_discriminant,
    is_prime,
    is_squarefree,
    jacobi_symbol,
    next_twin_prime_pair,
    twin_prime_pairs,
)
from app.engine.classgroup import class_group, class_number_analytic, class_number_reduced_ideals, rank_bound
from app.engine.curves import (
    invariants,
    isogenous_curve,
    make_twist_field,
    minus_twist,
    torsion_group,
    validate,
    weierstrass,
)
from app.engine.galois import rho_surjective
from app.engine.localdata import (
    anomalous_scan,
    count_points,
    is_supersingular,
    isogenous_local_data,
    predicted_count,
    reduced_point_count,
    reduction_data,
    tate_check,
)
from app.engine.lseries import an_coefficients, auto_truncation, l_derivative_at_1, l_value_at_1, twisted_l_value
from app.engine.normindex import delta_case, delta_components, matching_clauses, parity_relation
from app.engine.rootnumber import (
    heegner_congruence,
    parity_check,
    root_number,
    root_number_constructive,
    twisted_root_number,
)
from app.engine.tate import tate_oracle
from app.models.entities import CurveSpec, ParityOutcome, SurjectivityStatus
from app.models.errors import RangeError, TwinCurveError
from app.utils.benchmarking import CheckTiming, summarize_timings, timed
from app.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["epsilon", "p", "q", "D", "mu", "check", "expected", "actual", "pass"]
SWEEP_CHECKS = ("counts", "delta", "rootnumbers", "anomalous", "partition")
ANOMALOUS_DS = (1, 7, 35)
COUNT_DS = (1, 5, 7, 11, 13, 17, 35)
HILBERT_ORACLE_SET = (1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10)
HILBERT_UNIT_SET = (1, -1, 3, -3, 5, -5, 7, -7, 2, -2, 6, -6, 10, -10, 14, -14)
CAUCHY_SPECS = 10


@dataclass(frozen=True)
class CheckRow:
    epsilon: Optional[int]
    p: Optional[int]
    q: Optional[int]
    D: Optional[int]
    mu: Optional[int]
    check: str
    expected: str
    actual: str
    passed: bool

    def sort_key(self) -> Tuple:
        return (
            self.p or 0,
            self.D or 0,
            self.mu or 0,
            self.epsilon or 0,
            self.check,
            self.expected,
            self.actual,
        )

    def as_csv_row(self) -> List[str]:
        values = [self.epsilon, self.p, self.q, self.D, self.mu]
        cells = ["" if v is None else str(v) for v in values]
        return cells + [self.check, self.expected, self.actual, "true" if self.passed else "false"]


@dataclass(frozen=True)
class SweepParams:
    p_max: int
    d_max: int = 1
    p_min: int = 3
    count_ds: Optional[Tuple[int, ...]] = None
    anomalous_bound: int = 1000
    disc_ranges: Tuple[Tuple[int, int], ...] = ((-2000, 0), (1, 500))
    disc_chunk: int = 250
    tamagawa_sources: Tuple[str, ...] = ("table",)
    symbol_bound: int = 60
    jacobi_moduli: int = 200
    hilbert_primes: Tuple[int, ...] = (2, 3, 5, 7)
    supersingular_bound: int = 200
    coefficient_bound: int = 10_000
    rho_window: Tuple[int, int] = (3100, 3400)


@dataclass
class SweepResult:
    checks: Tuple[str, ...]
    rows: List[CheckRow] = field(default_factory=list)
    timings: List[CheckTiming] = field(default_factory=list)

    @property
    def failures(self) -> List[CheckRow]:
        return [row for row in self.rows if not row.passed]

    @property
    def passed(self) -> int:
        return len(self.rows) - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "SweepResult") -> "SweepResult":
        rows = sorted(self.rows + other.rows, key=CheckRow.sort_key)
        return SweepResult(self.checks + other.checks, rows, self.timings + other.timings)


def _row(spec: CurveSpec, check: str, expected: Any, actual: Any, mu: Optional[int] = None, d: Optional[int] = None) -> CheckRow:
    return CheckRow(
        epsilon=spec.epsilon,
        p=spec.p,
        q=spec.q,
        D=spec.d if d is None else d,
        mu=mu,
        check=check,
        expected=str(expected),
        actual=str(actual),
        passed=str(expected) == str(actual),
    )


def _error_row(spec: CurveSpec, check: str, expected: Any, exc: Exception, mu: Optional[int] = None, d: Optional[int] = None) -> CheckRow:
    return _row(spec, check, expected, f"error: {type(exc).__name__}: {exc}", mu=mu, d=d)


def twist_values(d_max: int, p: int, q: int) -> List[int]:
    """Odd square-free D in [1, d_max] coprime to pq."""
    return [d for d in range(1, d_max + 1, 2) if math.gcd(d, p * q) == 1 and is_squarefree(d)]


def _twin_q(p: int) -> int:
    return p + 2


# ---------------------------------------------------------------------------
# Checks, each keyed by a twin prime p (or a chunk index)
# ---------------------------------------------------------------------------

def check_counts(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    ds = params.count_ds if params.count_ds is not None else tuple(twist_values(params.d_max, p, q))
    rows = []
    for d in ds:
        if math.gcd(d, 2 * p * q) != 1:
            continue
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            for l in sorted({2, 3, 5, 7, *spec.d_primes}):
                try:
                    rows.append(_row(spec, f"counts@{l}", predicted_count(spec, l), reduced_point_count(spec, l)))
                except TwinCurveError as exc:
                    rows.append(_error_row(spec, f"counts@{l}", "table", exc))
    return rows


def _fields(p: int, q: int, d_max: int):
    for d in twist_values(d_max, p, q):
        for mu in (1, -1):
            if mu * d != 1:
                yield mu, d, make_twist_field(mu, d)


def check_delta(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        for mu, d, twist in _fields(p, q, params.d_max):
            try:
                expected = delta_case(spec, twist).total
                actual = delta_components(spec, twist).total
                rows.append(_row(spec, "delta", expected, actual, mu=mu, d=d))
            except TwinCurveError as exc:
                rows.append(_error_row(spec, "delta", "clause total", exc, mu=mu, d=d))
    return rows


def check_partition(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        for mu, d, twist in _fields(p, q, params.d_max):
            rows.append(_row(spec, "partition:norm-index", 1, len(matching_clauses(spec, twist)), mu=mu, d=d))
            try:
                relation = parity_relation(spec, twist)
                rows.append(_row(spec, "partition:parity", "consistent", "consistent", mu=mu, d=d))
                logger.debug(f"Parity clause {relation.clause_label} for {spec}, mu D = {twist.value}")
            except TwinCurveError as exc:
                rows.append(_error_row(spec, "partition:parity", "consistent", exc, mu=mu, d=d))
    return rows


def check_rootnumbers(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        for source in params.tamagawa_sources:
            try:
                actual = root_number_constructive(spec, tamagawa_source=source).global_sign
                rows.append(_row(spec, f"rootnumbers:{source}", root_number(spec), actual))
            except TwinCurveError as exc:
                rows.append(_error_row(spec, f"rootnumbers:{source}", root_number(spec), exc))
    return rows


def check_anomalous(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for d in ANOMALOUS_DS:
        if math.gcd(d, p * q) != 1:
            continue
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            rows.append(_row(spec, f"anomalous<={params.anomalous_bound}", [], anomalous_scan(spec, params.anomalous_bound)))
    return rows


def check_tate(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for d in twist_values(params.d_max, p, q):
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            for l in spec.bad_primes:
                try:
                    rows.append(_row(spec, f"tate@{l}", reduction_data(spec, l), tate_check(spec, l)))
                except TwinCurveError as exc:
                    rows.append(_error_row(spec, f"tate@{l}", "table", exc))
            if d != 1:
                continue
            coeffs = isogenous_curve(spec)
            for l in (2, p, q):
                expected = isogenous_local_data(spec, l)
                actual = tate_oracle(coeffs, l)
                rows.append(_row(spec, f"tate-isogenous@{l}", expected, actual))
    return rows


def _disc_chunks(params: SweepParams) -> List[Tuple[int, int]]:
    chunks = []
    for start, stop in params.disc_ranges:
        for low in range(start, stop, params.disc_chunk):
            chunks.append((low, min(low + params.disc_chunk, stop)))
    return chunks


def _disc_row(disc: int, check: str, expected: Any, actual: Any) -> CheckRow:
    return CheckRow(None, None, None, disc, None, check, str(expected), str(actual), str(expected) == str(actual))


def check_classgroups(chunk: int, params: SweepParams) -> List[CheckRow]:
    low, high = _disc_chunks(params)[chunk]
    rows = []
    for disc in range(low, high):
        if disc in (0, 1) or not is_fundamental_discriminant(disc):
            continue
        try:
            data = class_group(disc)
            rows.append(_disc_row(disc, "classgroups:reduced-ideals", class_number_reduced_ideals(disc), data.h))
            rows.append(_disc_row(disc, "classgroups:analytic", class_number_analytic(disc), data.h))
            if disc < 0:
                rows.append(_disc_row(disc, "classgroups:genus", len(factor(disc).primes) - 1, data.two_rank))
        except TwinCurveError as exc:
            rows.append(_disc_row(disc, "classgroups", "h", f"error: {type(exc).__name__}: {exc}"))
    return rows


def check_lvalues(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        try:
            if root_number(spec) == -1:
                rows.append(_row(spec, "lvalue:vanishing", 0.0, l_value_at_1(spec).value))
                zero = abs(l_derivative_at_1(spec, 0).value) <= 1e-12
                rows.append(_row(spec, "lvalue:r0-cancels", True, zero))
                continue
            n_max = auto_truncation(spec)
            first = l_value_at_1(spec, n_max)
            second = l_value_at_1(spec, 2 * n_max)
            stable = abs(first.value - second.value) <= first.tail_bound + 1e-15
            rows.append(_row(spec, "lvalue:cauchy", True, stable))
            integral = l_derivative_at_1(spec, 0, n_max, method="quadrature").value
            close = abs(integral - first.value) <= 1e-9 * max(1.0, abs(first.value))
            rows.append(_row(spec, "lvalue:r0-matches-series", True, close))
        except TwinCurveError as exc:
            rows.append(_error_row(spec, "lvalue", "ok", exc))
    return rows


def check_parity(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        verdict = parity_check(spec)
        passed = verdict.outcome is not ParityOutcome.INCONSISTENT
        rows.append(
            CheckRow(eps, p, q, 1, None, "parity", "not-inconsistent", verdict.outcome.value, passed)
        )
    return rows


def check_example(key: int, params: SweepParams) -> List[CheckRow]:
    rows = []
    for eps in (1, -1):
        spec = validate(eps, 3, 5)
        rows.append(_row(spec, "example:conductor", 480, invariants(spec).conductor))
        rows.append(_row(spec, "example:root-number", -eps, root_number(spec)))
        rows.append(_row(spec, "example:torsion", (2, 2), torsion_group(spec).invariants))
        rows.append(_row(spec, "example:heegner-119", True, heegner_congruence(spec, -119)))
    return rows


def _symbol_row(check: str, expected: Any, actual: Any) -> CheckRow:
    return CheckRow(None, None, None, None, None, check, str(expected), str(actual), str(expected) == str(actual))


def check_jacobi(m: int, params: SweepParams) -> List[CheckRow]:
    """Multiplicativity in the top argument over |a|, |b| <= symbol_bound; residues against squares for prime m."""
    values = np.arange(-params.symbol_bound, params.symbol_bound + 1, dtype=np.int64)
    single = np.array([jacobi_symbol(int(a), m) for a in values], dtype=np.int64)
    products, inverse = np.unique(np.multiply.outer(values, values), return_inverse=True)
    direct = np.array([jacobi_symbol(int(n), m) for n in products], dtype=np.int64)
    violations = np.count_nonzero(direct[inverse.ravel()] != np.multiply.outer(single, single).ravel())
    rows = [_symbol_row(f"jacobi:multiplicative@{m}", 0, int(violations))]
    if m > 2 and is_prime(m):
        squares = {x * x % m for x in range(1, m)}
        mismatches = [a for a in range(1, m) if (jacobi_symbol(a, m) == 1) != (a in squares)]
        rows.append(_symbol_row(f"jacobi:residues@{m}", [], mismatches))
    return rows


def check_hilbert(l: int, params: SweepParams) -> List[CheckRow]:
    rows = []
    for a in HILBERT_ORACLE_SET:
        expected = [hilbert_symbol_bruteforce(a, b, l) for b in HILBERT_ORACLE_SET]
        actual = [hilbert_symbol_local(a, b, l) for b in HILBERT_ORACLE_SET]
        rows.append(_symbol_row(f"hilbert:oracle@{l}:a={a}", expected, actual))
    asymmetric = [
        (a, b) for a in HILBERT_UNIT_SET for b in HILBERT_UNIT_SET
        if hilbert_symbol_local(a, b, l) != hilbert_symbol_local(b, a, l)
    ]
    rows.append(_symbol_row(f"hilbert:symmetric@{l}", [], asymmetric))
    nonlinear = [
        (a, b1, b2)
        for a in HILBERT_UNIT_SET
        for b1 in HILBERT_UNIT_SET
        for b2 in HILBERT_UNIT_SET
        if hilbert_symbol_local(a, b1 * b2, l) != hilbert_symbol_local(a, b1, l) * hilbert_symbol_local(a, b2, l)
    ]
    rows.append(_symbol_row(f"hilbert:bilinear@{l}", [], nonlinear))
    return rows


def check_twists(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for d in twist_values(params.d_max, p, q):
        for sign in (1, -1):
            for eps in (1, -1):
                spec = validate(eps, p, q, sign * d)
                rows.append(_row(spec, "twist:involution", spec, minus_twist(minus_twist(spec))))
                coeffs = weierstrass(spec)
                from_c = Fraction(coeffs.c4 ** 3 - coeffs.c6 ** 2, 1728)
                rows.append(_row(spec, "disc:c4-c6", invariants(spec).discriminant, from_c))
    return rows


def check_supersingular(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    for d in twist_values(params.d_max, p, q):
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            for l in sympy.primerange(5, params.supersingular_bound + 1):
                if l in spec.bad_primes:
                    continue
                rows.append(_row(spec, f"supersingular@{l}", count_points(spec, l).trace == 0, is_supersingular(spec, l)))
    return rows


def _divisor_counts(n_max: int) -> np.ndarray:
    counts = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        counts[k::k] += 1
    return counts


def check_an_bound(p: int, params: SweepParams) -> List[CheckRow]:
    """|a(n)| <= d(n) sqrt(n) (Hasse at primes, multiplicativity elsewhere) and the cruder |a(n)| <= n."""
    q = _twin_q(p)
    n = np.arange(params.coefficient_bound + 1, dtype=np.int64)
    divisors = _divisor_counts(params.coefficient_bound)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        a = an_coefficients(spec, params.coefficient_bound)
        hasse = np.flatnonzero(a[1:] ** 2 > divisors[1:] ** 2 * n[1:]) + 1
        crude = np.flatnonzero(np.abs(a[1:]) > n[1:]) + 1
        rows.append(_row(spec, f"an:divisor-bound<={params.coefficient_bound}", [], hasse.tolist()))
        rows.append(_row(spec, f"an:crude-bound<={params.coefficient_bound}", [], crude.tolist()))
    return rows


def check_rho(p: int, params: SweepParams) -> List[CheckRow]:
    """Once clause 3 gives surjectivity at l, every larger prime away from pqD is surjective."""
    q = _twin_q(p)
    low, high = params.rho_window
    rows = []
    for d in twist_values(params.d_max, p, q):
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            pqd = p * q * d
            verdicts = [rho_surjective(spec, l) for l in sympy.primerange(low, high)]
            states = {v.status for v in verdicts}
            rows.append(_row(spec, "rho:two-valued", True, states <= set(SurjectivityStatus)))
            first = next((i for i, v in enumerate(verdicts) if v.clause == 3), None)
            broken = []
            if first is not None:
                broken = [
                    v.l for v in verdicts[first:]
                    if math.gcd(v.l, pqd) == 1 and v.status is not SurjectivityStatus.SURJECTIVE
                ]
            rows.append(_row(spec, f"rho:monotone@{low}-{high}", [], broken))
    return rows


def check_rank_bound(p: int, params: SweepParams) -> List[CheckRow]:
    q = _twin_q(p)
    rows = []
    spec = validate(1, p, q)
    for d in twist_values(params.d_max, p, q):
        if d == 1:
            continue
        twist = make_twist_field(1, d)
        try:
            bound = rank_bound(spec, twist)
            two_rank = class_group(twist.disc).two_rank
            rows.append(_row(spec, "rankbound:s-two-rank", True, bound.s_two_rank <= two_rank, mu=1, d=d))
            rows.append(_row(spec, "rankbound:sharp<=headline", True, bound.sharp <= bound.headline, mu=1, d=d))
        except TwinCurveError as exc:
            rows.append(_error_row(spec, "rankbound", "bounds", exc, mu=1, d=d))
    return rows


def check_twisted_lvalues(p: int, params: SweepParams) -> List[CheckRow]:
    """The twisted series is exactly 0 iff the twisted root number is -1 (mu D == 1 mod 4)."""
    q = _twin_q(p)
    rows = []
    for eps in (1, -1):
        spec = validate(eps, p, q)
        for mu, d, twist in _fields(p, q, params.d_max):
            if twist.value % 4 != 1:
                continue
            odd_sign = twisted_root_number(spec, twist) == -1
            try:
                vanishes = twisted_l_value(spec, twist).value == 0.0
                rows.append(_row(spec, "twisted:vanishing", odd_sign, vanishes, mu=mu, d=d))
            except TwinCurveError as exc:
                rows.append(_error_row(spec, "twisted:vanishing", odd_sign, exc, mu=mu, d=d))
    return rows


def check_roundtrip(p: int, params: SweepParams) -> List[CheckRow]:
    """parse(serialize(report)) == report for the base curve and, when coprime, D = 5."""
    # the report models import this module
    from app.cli.commands import build_report
    from app.cli.schemas import CurveReport

    q = _twin_q(p)
    rows = []
    for d, mus in ((1, (-1,)), (5, (1, -1))):
        if math.gcd(d, p * q) != 1:
            continue
        for eps in (1, -1):
            spec = validate(eps, p, q, d)
            try:
                report = build_report(spec, mus)
                restored = CurveReport.parse_raw(report.to_json())
                rows.append(_row(spec, "report:json-roundtrip", True, restored == report))
            except TwinCurveError as exc:
                rows.append(_error_row(spec, "report:json-roundtrip", True, exc))
    return rows


CHECK_FUNCTIONS: Dict[str, Callable[[int, SweepParams], List[CheckRow]]] = {
    "counts": check_counts,
    "delta": check_delta,
    "partition": check_partition,
    "rootnumbers": check_rootnumbers,
    "anomalous": check_anomalous,
    "tate": check_tate,
    "classgroups": check_classgroups,
    "lvalues": check_lvalues,
    "parity": check_parity,
    "example": check_example,
    "jacobi": check_jacobi,
    "hilbert": check_hilbert,
    "twists": check_twists,
    "supersingular": check_supersingular,
    "an_bound": check_an_bound,
    "rho": check_rho,
    "rankbound": check_rank_bound,
    "twisted": check_twisted_lvalues,
    "roundtrip": check_roundtrip,
}


def lvalue_pairs(params: SweepParams) -> List[int]:
    """Twin pairs below p_max, extended until CAUCHY_SPECS curves with root number +1 are covered."""
    pairs = [p for p, _ in twin_prime_pairs(params.p_max, params.p_min)]
    stable = sum(1 for p in pairs for eps in (1, -1) if root_number(validate(eps, p, p + 2)) == 1)
    start = pairs[-1] + 1 if pairs else params.p_min
    while stable < CAUCHY_SPECS:
        p, q = next_twin_prime_pair(start)
        pairs.append(p)
        stable += sum(1 for eps in (1, -1) if root_number(validate(eps, p, q)) == 1)
        start = p + 1
    return pairs


def build_tasks(checks: Sequence[str], params: SweepParams) -> List[Tuple[str, int]]:
    pairs = [p for p, _ in twin_prime_pairs(params.p_max, params.p_min)]
    tasks = []
    for check in checks:
        if check == "classgroups":
            tasks.extend((check, i) for i in range(len(_disc_chunks(params))))
        elif check == "example":
            tasks.append((check, 0))
        elif check == "jacobi":
            tasks.extend((check, m) for m in range(1, params.jacobi_moduli + 1, 2))
        elif check == "hilbert":
            tasks.extend((check, l) for l in params.hilbert_primes)
        elif check == "lvalues":
            tasks.extend((check, p) for p in lvalue_pairs(params))
        else:
            tasks.extend((check, p) for p in pairs)
    return tasks


def run_task(task: Tuple[str, int], params: SweepParams) -> Tuple[str, List[CheckRow], float]:
    check, key = task
    rows, seconds = timed(CHECK_FUNCTIONS[check], key, params)
    return check, rows, seconds


def _init_worker(overrides: Dict[str, Any]) -> None:
    load_settings(overrides=overrides)
    setup_logging()


def run_sweep(checks: Sequence[str], params: SweepParams, workers: Optional[int] = None) -> SweepResult:
    """
    Run the named checks over the parameter ranges.

    Args:
        checks: Names from CHECK_FUNCTIONS
        params: Ranges and bounds
        workers: Process count; 1 runs inline, None takes settings.sweep_workers (0 = all CPUs)

    Raises:
        RangeError: p_max or d_max above the sweep budgets
        ValueError: unknown check name
    """
    settings = get_settings()
    unknown = [c for c in checks if c not in CHECK_FUNCTIONS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; available: {sorted(CHECK_FUNCTIONS)}")
    if params.p_max > settings.sweep_p_max_budget:
        raise RangeError(f"p_max = {params.p_max} exceeds the sweep budget {settings.sweep_p_max_budget}")
    if params.d_max > settings.sweep_d_max_budget:
        raise RangeError(f"d_max = {params.d_max} exceeds the sweep budget {settings.sweep_d_max_budget}")

    tasks = build_tasks(checks, params)
    if workers is None:
        workers = settings.sweep_workers or os.cpu_count() or 1
    logger.info(f"Sweep {list(checks)}: {len(tasks)} tasks, p < {params.p_max}, D <= {params.d_max}, {workers} workers")

    worker = partial(run_task, params=params)
    if workers == 1 or len(tasks) <= 1:
        outcomes = [worker(task) for task in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(current_overrides(),),
        ) as executor:
            outcomes = list(executor.map(worker, tasks))

    rows: List[CheckRow] = []
    records = []
    for check, task_rows, seconds in outcomes:
        rows.extend(task_rows)
        records.append((check, len(task_rows), sum(1 for r in task_rows if not r.passed), seconds))
    rows.sort(key=CheckRow.sort_key)
    result = SweepResult(checks=tuple(checks), rows=rows, timings=summarize_timings(records))
    logger.info(f"Sweep finished: {result.passed} passed, {len(result.failures)} failed")
    return result


def verification_plan(quick: bool = False) -> List[Tuple[Tuple[str, ...], SweepParams]]:
    """Check groups and ranges run by the verify command."""
    if quick:
        return [
            (("counts",), SweepParams(p_max=60, d_max=35, count_ds=COUNT_DS)),
            (("delta", "partition"), SweepParams(p_max=40, d_max=40)),
            (("rootnumbers",), SweepParams(p_max=200, tamagawa_sources=("table", "tate"))),
            (("anomalous",), SweepParams(p_max=12, anomalous_bound=500)),
            (("tate",), SweepParams(p_max=20, d_max=7)),
            (("classgroups",), SweepParams(p_max=3, disc_ranges=((-300, 0), (1, 100)))),
            (("lvalues",), SweepParams(p_max=12)),
            (("parity",), SweepParams(p_max=100)),
            (("example",), SweepParams(p_max=3)),
            (("jacobi",), SweepParams(p_max=3, symbol_bound=30, jacobi_moduli=60)),
            (("hilbert",), SweepParams(p_max=3)),
            (("twists",), SweepParams(p_max=60, d_max=15)),
            (("supersingular",), SweepParams(p_max=20, d_max=7)),
            (("an_bound",), SweepParams(p_max=30, coefficient_bound=2000)),
            (("rho",), SweepParams(p_max=20, d_max=7)),
            (("rankbound",), SweepParams(p_max=20, d_max=21)),
            (("twisted",), SweepParams(p_max=20, d_max=13)),
            (("roundtrip",), SweepParams(p_max=30)),
        ]
    return [
        (("counts",), SweepParams(p_max=500, d_max=35, count_ds=COUNT_DS)),
        (("delta", "partition"), SweepParams(p_max=200, d_max=150)),
        (("rootnumbers",), SweepParams(p_max=1000, tamagawa_sources=("table", "tate"))),
        (("anomalous",), SweepParams(p_max=12, anomalous_bound=10_000)),
        (("tate",), SweepParams(p_max=60, d_max=15)),
        (("classgroups",), SweepParams(p_max=3)),
        (("lvalues",), SweepParams(p_max=40)),
        (("parity",), SweepParams(p_max=500)),
        (("example",), SweepParams(p_max=3)),
        (("jacobi",), SweepParams(p_max=3)),
        (("hilbert",), SweepParams(p_max=3)),
        (("twists",), SweepParams(p_max=500, d_max=35)),
        (("supersingular",), SweepParams(p_max=100, d_max=15)),
        (("an_bound",), SweepParams(p_max=200)),
        (("rho",), SweepParams(p_max=100, d_max=15)),
        (("rankbound",), SweepParams(p_max=100, d_max=61)),
        (("twisted",), SweepParams(p_max=40, d_max=21)),
        (("roundtrip",), SweepParams(p_max=100)),
    ]


def run_verify(quick: bool = False, workers: Optional[int] = None) -> SweepResult:
    result = SweepResult(checks=())
    for checks, params in verification_plan(quick):
        result = result.merge(run_sweep(checks, params, workers))
    return result


def write_csv(rows: Sequence[CheckRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.as_csv_row())
