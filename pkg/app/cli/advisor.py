"""
Rank Advisor

Each rule pairs machine-checkable hypotheses (congruences, reduction types,
ramification of E_D[l], conductor shape, parity clauses) with facts only a
user can assert (Selmer groups, irreducibility of E_D[l], squareness of
Sha[2]). A rule fires when every checkable hypothesis holds and every
required fact was asserted; its conclusion is reported together with the
split between verified and asserted hypotheses, and is conditional
whenever anything was asserted.
"""

import logging
from abc import ABC, abstractmethod
from typing import Iterable, List, Optional, Tuple, Union

from app.engine.curves import base_curve
from app.engine.galois import torsion_ramified_at
from app.engine.localdata import reduction_data
from app.engine.normindex import parity_clause
from app.models.entities import CurveSpec, ReductionClass, TwistField
from app.models.hypotheses import (
    AdvisorContext,
    AdvisorReport,
    AssertedFact,
    Conclusion,
    HypothesisCheck,
    UnmetRule,
    parse_facts,
)

logger = logging.getLogger(__name__)

RANK_ZERO = "rank E_D(Q) = r_an(E_D/Q) = 0"
RANK_ONE = "rank E_D(Q) = r_an(E_D/Q) = 1"
POSITIVE_RANK = "rank E(K) > 0"


class TheoremRule(ABC):
    """
    A conclusion and the hypotheses it rests on.
    Extend this and register it with the AdvisorRegistry to add rules.
    """

    name: str = ""
    statement: str = ""
    required_facts: Tuple[AssertedFact, ...] = ()

    @abstractmethod
    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        """Machine-checkable hypotheses, evaluated on the context."""

    def evaluate(self, context: AdvisorContext) -> Union[Conclusion, UnmetRule]:
        verified = self.checks(context)
        failed = tuple(c.name for c in verified if not c.holds)
        missing = tuple(f.value for f in self.required_facts if f not in context.facts)
        if failed or missing:
            return UnmetRule(rule=self.name, failed=failed, missing_facts=missing)
        return Conclusion(
            rule=self.name,
            statement=self.statement,
            verified=tuple(c.name for c in verified),
            asserted=tuple(f.value for f in self.required_facts),
        )


def _coprime_to(spec: CurveSpec, l: int) -> HypothesisCheck:
    return HypothesisCheck(f"{l} does not divide pqD", (spec.p * spec.q * spec.d) % l != 0)


def _ordinary_at(spec: CurveSpec, l: int) -> HypothesisCheck:
    holds = (spec.p * spec.q * spec.d) % l != 0 and (
        reduction_data(spec, l).reduction_class is ReductionClass.GOOD_ORDINARY
    )
    return HypothesisCheck(f"good ordinary reduction at {l}", holds)


def _ramified(spec: CurveSpec, l: int, at: int) -> HypothesisCheck:
    return HypothesisCheck(f"E_D[{l}] ramified at {at}", torsion_ramified_at(spec, l, at).ramified)


def _multiplicative_at_p_and_q(spec: CurveSpec) -> HypothesisCheck:
    holds = all(reduction_data(spec, l).reduction_class.is_multiplicative for l in (spec.p, spec.q))
    return HypothesisCheck("multiplicative reduction at p and q", holds)


class SelmerPRankZero(TheoremRule):
    name = "rank-zero-selmer-p"
    statement = RANK_ZERO
    required_facts = (AssertedFact.SELP_TRIVIAL,)

    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        spec = context.spec
        return [
            HypothesisCheck("p > 37", spec.p > 37),
            _multiplicative_at_p_and_q(spec),
            _ramified(spec, spec.p, spec.q),
        ]


class SelmerQRankZero(TheoremRule):
    name = "rank-zero-selmer-q"
    statement = RANK_ZERO
    required_facts = (AssertedFact.SELQ_TRIVIAL,)

    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        spec = context.spec
        return [
            HypothesisCheck("p > 37", spec.p > 37),
            _multiplicative_at_p_and_q(spec),
            _ramified(spec, spec.q, spec.p),
        ]


class SmallSelmerRule(TheoremRule):
    """Rules at l = 5 or 7: good ordinary reduction at l and E_D[l] ramified at p."""

    l: int = 5

    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        spec = context.spec
        coprime = _coprime_to(spec, self.l)
        result = [coprime]
        if self.l == 7:
            result.append(HypothesisCheck("p == 1, 4 (mod 7)", spec.p % 7 in (1, 4)))
        if not coprime.holds:
            return result
        result.append(_ordinary_at(spec, self.l))
        result.append(_ramified(spec, self.l, spec.p))
        return result


class SelmerFiveRankZero(SmallSelmerRule):
    name = "rank-zero-selmer-5"
    statement = RANK_ZERO
    l = 5
    required_facts = (AssertedFact.E5_IRREDUCIBLE, AssertedFact.SEL5_TRIVIAL)


class SelmerSevenRankZero(SmallSelmerRule):
    name = "rank-zero-selmer-7"
    statement = RANK_ZERO
    l = 7
    required_facts = (AssertedFact.E7_IRREDUCIBLE, AssertedFact.SEL7_TRIVIAL)


class SmallSelmerRankOne(SmallSelmerRule):
    """Rank one also needs ramification at q and the conductor shape with p, q exactly dividing N."""

    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        spec = context.spec
        result = super().checks(context)
        if not result[0].holds:
            return result
        result.append(_ramified(spec, self.l, spec.q))
        result.append(
            HypothesisCheck("conductor not square-free, p and q exactly divide it", _multiplicative_at_p_and_q(spec).holds)
        )
        return result


class SelmerFiveRankOne(SmallSelmerRankOne):
    name = "rank-one-selmer-5"
    statement = RANK_ONE
    l = 5
    required_facts = (AssertedFact.E5_IRREDUCIBLE, AssertedFact.SEL5_ORDER_5)


class SelmerSevenRankOne(SmallSelmerRankOne):
    name = "rank-one-selmer-7"
    statement = RANK_ONE
    l = 7
    required_facts = (AssertedFact.E7_IRREDUCIBLE, AssertedFact.SEL7_ORDER_7)


class PositiveRankOverK(TheoremRule):
    """Parity forces odd rank of the base curve over K when Sha(E/K)[2] has square order."""

    name = "positive-rank-over-k"
    statement = POSITIVE_RANK
    required_facts = (AssertedFact.SHA2_SQUARE,)

    def checks(self, context: AdvisorContext) -> List[HypothesisCheck]:
        spec, field = context.spec, context.field
        if field is None:
            return [HypothesisCheck("twist field K = Q(sqrt(mu D)) given", False)]
        clause = parity_clause(base_curve(spec), field)
        wanted = 2 if field.mu == 1 else 1
        return [
            HypothesisCheck(f"parity clause {clause.label} in group {wanted}", clause.group == wanted),
        ]


class AdvisorRegistry:
    """
    Registry for pluggable theorem rules.
    Allows callers to register additional rules dynamically.
    """

    def __init__(self):
        self.rules: List[TheoremRule] = []

    def register(self, rule: TheoremRule):
        self.rules.append(rule)

    def evaluate(self, context: AdvisorContext) -> AdvisorReport:
        conclusions = []
        unmet = []
        for rule in self.rules:
            outcome = rule.evaluate(context)
            if isinstance(outcome, Conclusion):
                conclusions.append(outcome)
            else:
                unmet.append(outcome)
        logger.debug(f"Advisor for {context.spec}: {len(conclusions)} conclusions, {len(unmet)} unmet rules")
        return AdvisorReport(
            spec=context.spec,
            facts=tuple(sorted(f.value for f in context.facts)),
            conclusions=tuple(conclusions),
            unmet=tuple(unmet),
        )


def default_registry() -> AdvisorRegistry:
    registry = AdvisorRegistry()
    for rule in (
        SelmerPRankZero(),
        SelmerQRankZero(),
        SelmerFiveRankZero(),
        SelmerSevenRankZero(),
        SelmerFiveRankOne(),
        SelmerSevenRankOne(),
        PositiveRankOverK(),
    ):
        registry.register(rule)
    return registry


def advise(
    spec: CurveSpec,
    tokens: Iterable[str],
    field: Optional[TwistField] = None,
    registry: Optional[AdvisorRegistry] = None,
) -> AdvisorReport:
    """
    Evaluate every rule against a curve and the asserted facts.

    Raises:
        UsageError: unknown or contradictory fact token
    """
    context = AdvisorContext(spec=spec, facts=parse_facts(tokens), field=field)
    return (registry or default_registry()).evaluate(context)
