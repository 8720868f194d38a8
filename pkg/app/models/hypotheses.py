from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, Optional, Tuple

from app.models.entities import CurveSpec, TwistField
from app.models.errors import UsageError


class AssertedFact(str, Enum):
    """Facts the library cannot compute; a user may assert them."""

    SELP_TRIVIAL = "selp-trivial"
    SELQ_TRIVIAL = "selq-trivial"
    SEL5_TRIVIAL = "sel5-trivial"
    SEL7_TRIVIAL = "sel7-trivial"
    E5_IRREDUCIBLE = "e5-irreducible"
    E7_IRREDUCIBLE = "e7-irreducible"
    SEL5_ORDER_5 = "sel5-order-5"
    SEL7_ORDER_7 = "sel7-order-7"
    SHA2_SQUARE = "sha2-square"


# Pairs that cannot both hold.
CONTRADICTIONS = (
    (AssertedFact.SEL5_TRIVIAL, AssertedFact.SEL5_ORDER_5),
    (AssertedFact.SEL7_TRIVIAL, AssertedFact.SEL7_ORDER_7),
)


def parse_facts(tokens: Iterable[str]) -> FrozenSet[AssertedFact]:
    """
    Parse user-supplied fact tokens.

    Raises:
        UsageError: unknown token, or two contradictory facts
    """
    facts = set()
    vocabulary = ", ".join(f.value for f in AssertedFact)
    for token in tokens:
        try:
            facts.add(AssertedFact(token.strip().lower()))
        except ValueError:
            raise UsageError(f"unknown fact {token!r}; supported: {vocabulary}")
    for first, second in CONTRADICTIONS:
        if first in facts and second in facts:
            raise UsageError(f"facts {first.value} and {second.value} contradict each other")
    return frozenset(facts)


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    holds: bool
    asserted: bool = False


@dataclass(frozen=True)
class AdvisorContext:
    spec: CurveSpec
    facts: FrozenSet[AssertedFact] = frozenset()
    field: Optional[TwistField] = None


@dataclass(frozen=True)
class Conclusion:
    rule: str
    statement: str
    verified: Tuple[str, ...]
    asserted: Tuple[str, ...]

    @property
    def conditional(self) -> bool:
        return bool(self.asserted)


@dataclass(frozen=True)
class UnmetRule:
    rule: str
    failed: Tuple[str, ...] = ()
    missing_facts: Tuple[str, ...] = ()


@dataclass(frozen=True)
class AdvisorReport:
    spec: CurveSpec
    facts: Tuple[str, ...]
    conclusions: Tuple[Conclusion, ...] = ()
    unmet: Tuple[UnmetRule, ...] = field(default=())
