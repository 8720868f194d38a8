import pytest

from app.cli.advisor import AdvisorRegistry, TheoremRule, advise, default_registry
from app.engine.curves import make_twist_field, validate
from app.models.hypotheses import AdvisorContext, AssertedFact, Conclusion, HypothesisCheck, UnmetRule, parse_facts
from app.models.errors import UsageError


def _outcome(report, rule):
    for conclusion in report.conclusions:
        if conclusion.rule == rule:
            return conclusion
    for unmet in report.unmet:
        if unmet.rule == rule:
            return unmet
    raise AssertionError(f"rule {rule} not evaluated")


class TestFacts:
    """Parsing of user-asserted facts."""

    def test_tokens_are_normalised(self):
        assert parse_facts([" SHA2-Square ", "sel5-trivial"]) == {AssertedFact.SHA2_SQUARE, AssertedFact.SEL5_TRIVIAL}

    def test_unknown_token(self):
        with pytest.raises(UsageError):
            parse_facts(["rank-is-zero"])

    def test_contradiction(self):
        with pytest.raises(UsageError):
            parse_facts(["sel5-trivial", "sel5-order-5"])


class TestRules:
    """Rules fire only when every hypothesis holds and every fact is asserted."""

    def test_selmer_five_fires(self):
        """p = 29: 5 does not divide pq, a_5 = -2 so 5 is ordinary."""
        spec = validate(1, 29, 31)
        report = advise(spec, ["e5-irreducible", "sel5-trivial"])
        conclusion = _outcome(report, "rank-zero-selmer-5")
        assert isinstance(conclusion, Conclusion)
        assert conclusion.conditional
        assert conclusion.asserted == ("e5-irreducible", "sel5-trivial")
        assert "E_D[5] ramified at 29" in conclusion.verified

    def test_missing_facts(self):
        report = advise(validate(1, 29, 31), ["e5-irreducible"])
        unmet = _outcome(report, "rank-zero-selmer-5")
        assert isinstance(unmet, UnmetRule)
        assert unmet.failed == ()
        assert unmet.missing_facts == ("sel5-trivial",)

    def test_failed_hypothesis(self):
        """p = 29 is below the bound of the Selmer-at-p rule."""
        unmet = _outcome(advise(validate(1, 29, 31), ["selp-trivial"]), "rank-zero-selmer-p")
        assert "p > 37" in unmet.failed

    def test_five_divides_pq(self):
        unmet = _outcome(advise(validate(1, 3, 5), ["e5-irreducible", "sel5-trivial"]), "rank-zero-selmer-5")
        assert unmet.failed == ("5 does not divide pqD",)

    def test_positive_rank_over_k(self):
        """(5/29) = (5/31) = 1 with mu D = 5: parity clause 2d."""
        spec = validate(1, 29, 31, 5)
        report = advise(spec, ["sha2-square"], field=make_twist_field(1, 5))
        conclusion = _outcome(report, "positive-rank-over-k")
        assert isinstance(conclusion, Conclusion)
        assert conclusion.verified == ("parity clause 2d in group 2",)

    def test_positive_rank_needs_field(self):
        unmet = _outcome(advise(validate(1, 29, 31, 5), ["sha2-square"]), "positive-rank-over-k")
        assert unmet.failed == ("twist field K = Q(sqrt(mu D)) given",)

    def test_no_facts_no_conclusions(self, base_curve_11_13):
        report = advise(base_curve_11_13, [])
        assert report.conclusions == ()
        assert len(report.unmet) == len(default_registry().rules)


class TestRegistry:
    """Additional rules can be registered."""

    def test_custom_rule(self, base_curve_3_5):
        class ConductorRule(TheoremRule):
            name = "conductor-480"
            statement = "N = 480"

            def checks(self, context: AdvisorContext):
                return [HypothesisCheck("p = 3", context.spec.p == 3)]

        registry = AdvisorRegistry()
        registry.register(ConductorRule())
        report = advise(base_curve_3_5, [], registry=registry)
        assert [c.rule for c in report.conclusions] == ["conductor-480"]
        assert not report.conclusions[0].conditional
