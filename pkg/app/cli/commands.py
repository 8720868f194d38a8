"""
Command-line surface.

    report      invariants, local data, root number, parity and norm indices of one curve
    sweep       exhaustive consistency checks over ranges of p and D (CSV)
    lvalue      L(E, 1), its derivatives, or a twisted L-value
    classgroup  class group, S-class group and descent rank bound of a quadratic field
    advisor     which rank statements follow from the curve plus asserted facts
    verify      the full verification plan (all checks)

JSON goes to stdout, logs to stderr. Exit codes: 0 success, 1 check failure
or numerical/internal error, 2 invalid input, 3 budget exceeded.
"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO

from pydantic import ValidationError

from app.cli.advisor import advise
from app.cli.schemas import (
    AdvisorResponse,
    ClassGroupDTO,
    ClassGroupResponse,
    CurveReport,
    CurveSpecDTO,
    GaloisDTO,
    InvariantsDTO,
    IwasawaDTO,
    LocalDataDTO,
    LSeriesDTO,
    NormIndexDTO,
    ParityDTO,
    RankBoundDTO,
    RootNumberDTO,
    SClassDTO,
    SweepSummary,
    TorsionDTO,
)
from app.config.settings import load_settings
from app.engine.classgroup import class_group, class_number_analytic, rank_bound, s_class_group
from app.engine.curves import base_curve, invariants, make_twist_field, torsion_group, validate
from app.engine.galois import rho_surjective, torsion_ramified_at
from app.engine.localdata import reduction_data
from app.engine.lseries import MAX_DERIVATIVE, l_derivative_at_1, l_value_at_1, twisted_l_value
from app.engine.normindex import delta_components, parity_relation
from app.engine.rootnumber import (
    iwasawa_prediction,
    parity_check,
    root_number,
    root_number_constructive,
    twisted_root_number,
)
from app.engine.sweep import SWEEP_CHECKS, SweepParams, run_sweep, run_verify, write_csv
from app.models.entities import CurveSpec
from app.models.errors import OutputError, TwinCurveError, UsageError
from app.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

GALOIS_PRIMES = (3, 5, 7)
IWASAWA_PRIMES = (3, 7)


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def build_report(spec: CurveSpec, mus: Sequence[int] = (), iwasawa_layer: int = 1) -> CurveReport:
    """
    Aggregate every invariant of one curve.

    Root number, parity and L-value come from the base curve when D = 1 and
    from the twist formulas when D == 1 (mod 4); otherwise they are omitted.
    Each mu in mus adds the norm-index breakdown for K = Q(sqrt(mu |D|)).
    """
    galois = []
    for l in GALOIS_PRIMES:
        galois.append(
            GaloisDTO.from_domain(
                torsion_ramified_at(spec, l, spec.p).ramified,
                torsion_ramified_at(spec, l, spec.q).ramified,
                rho_surjective(spec, l),
            )
        )

    base = base_curve(spec)
    root = parity = l_value = None
    if spec.d == 1:
        root = RootNumberDTO.from_domain(root_number_constructive(spec), root_number(spec))
        parity = ParityDTO.from_domain(parity_check(spec))
        l_value = LSeriesDTO.from_domain(l_value_at_1(spec))
    elif spec.d % 4 == 1:
        field = make_twist_field(1 if spec.d > 0 else -1, abs(spec.d))
        root = RootNumberDTO(global_sign=twisted_root_number(base, field), source="twist-character")
        l_value = LSeriesDTO.from_domain(twisted_l_value(base, field))

    norm_index = []
    for mu in mus:
        field = make_twist_field(mu, abs(spec.d))
        norm_index.append(
            NormIndexDTO.from_domain(mu, abs(spec.d), delta_components(base, field), parity_relation(base, field))
        )

    return CurveReport(
        spec=CurveSpecDTO.from_domain(spec),
        invariants=InvariantsDTO.from_domain(invariants(spec)),
        local_data=[LocalDataDTO.from_domain(reduction_data(spec, l)) for l in spec.bad_primes],
        torsion=TorsionDTO.from_domain(torsion_group(spec)),
        galois=galois,
        root_number=root,
        parity=parity,
        norm_index=norm_index,
        l_value=l_value,
        iwasawa=[IwasawaDTO.from_domain(iwasawa_prediction(spec, l, iwasawa_layer)) for l in IWASAWA_PRIMES],
    )


def _spec_from_args(args: argparse.Namespace) -> CurveSpec:
    q = args.q if args.q is not None else args.p + 2
    return CurveSpecDTO(epsilon=args.epsilon, p=args.p, q=q, D=args.D).to_domain()


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

@contextmanager
def _output(path: str) -> Iterator[TextIO]:
    try:
        with open(path, "w", newline="") as stream:
            yield stream
    except OSError as exc:
        raise OutputError(f"Cannot write output {path}: {exc}") from exc


def cmd_report(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    logger.info(f"Report for eps={spec.epsilon} p={spec.p} q={spec.q} D={spec.d}")
    report = build_report(spec, args.mu or ())
    _emit(report.to_text() if args.text else report.to_json())
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    params = SweepParams(p_max=args.p_max, d_max=args.d_max, anomalous_bound=args.anomalous_bound)
    result = run_sweep(args.checks, params, workers=args.workers)
    if args.output == "-":
        write_csv(result.rows, sys.stdout)
    else:
        with _output(args.output) as stream:
            write_csv(result.rows, stream)
        logger.info(f"Wrote {len(result.rows)} rows to {args.output}")
    if args.summary:
        with _output(args.summary) as stream:
            stream.write(SweepSummary.from_domain(result, params).to_json())
    return 0 if result.ok else 1


def cmd_verify(args: argparse.Namespace) -> int:
    result = run_verify(quick=args.quick, workers=args.workers)
    if args.output:
        with _output(args.output) as stream:
            write_csv(result.rows, stream)
    _emit(SweepSummary.from_domain(result).to_json())
    for row in result.failures:
        logger.error(f"FAILED {row.check}: eps={row.epsilon} p={row.p} D={row.D} mu={row.mu} "
                     f"expected {row.expected}, got {row.actual}")
    return 0 if result.ok else 1


def cmd_lvalue(args: argparse.Namespace) -> int:
    spec = CurveSpecDTO(epsilon=args.epsilon, p=args.p, q=args.q if args.q is not None else args.p + 2).to_domain()
    if args.mu is None and args.D == 1:
        if args.derivative:
            approx = l_derivative_at_1(spec, args.derivative, args.n_max)
        else:
            approx = l_value_at_1(spec, args.n_max)
    else:
        if args.derivative:
            raise UsageError("derivatives are available for the base curve only (no -D / --mu)")
        field = make_twist_field(args.mu if args.mu is not None else 1, args.D)
        approx = twisted_l_value(spec, field, args.n_max)
    _emit(LSeriesDTO.from_domain(approx).json(sort_keys=True, indent=2))
    return 0


def _real_field_value(disc: int) -> Optional[int]:
    """Odd square-free m with disc(Q(sqrt(m))) = disc, or None."""
    m = disc if disc % 4 == 1 else disc // 4
    return m if m > 1 and m % 2 else None


def cmd_classgroup(args: argparse.Namespace) -> int:
    data = class_group(args.disc)
    response = ClassGroupResponse(class_group=ClassGroupDTO.from_domain(data), analytic_h=class_number_analytic(args.disc))
    if args.p is not None:
        q = args.q if args.q is not None else args.p + 2
        spec = validate(args.epsilon, args.p, q)
        response.s_class = SClassDTO.from_domain(s_class_group(args.disc, spec.p, spec.q))
        m = _real_field_value(args.disc) if args.disc > 0 else None
        if m is not None:
            response.rank_bound = RankBoundDTO.from_domain(rank_bound(spec, make_twist_field(1, m)))
    _emit(response.json(sort_keys=True, indent=2))
    return 0


def cmd_advisor(args: argparse.Namespace) -> int:
    spec = _spec_from_args(args)
    field = make_twist_field(args.mu, abs(spec.d)) if args.mu is not None else None
    report = advise(spec, args.facts, field=field)
    _emit(AdvisorResponse.from_domain(report).json(sort_keys=True, indent=2))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _check_list(value: str) -> List[str]:
    checks = [c.strip() for c in value.split(",") if c.strip()]
    unknown = [c for c in checks if c not in SWEEP_CHECKS]
    if not checks or unknown:
        raise argparse.ArgumentTypeError(f"checks must be a comma-separated subset of {','.join(SWEEP_CHECKS)}")
    return checks


def _fact_list(value: str) -> List[str]:
    return [token for token in value.split(",") if token.strip()]


def _add_curve_args(parser: argparse.ArgumentParser, with_d: bool = True) -> None:
    parser.add_argument("-e", "--epsilon", type=int, required=True, help="sign epsilon, +1 or -1")
    parser.add_argument("-p", type=int, required=True, help="smaller twin prime")
    parser.add_argument("-q", type=int, default=None, help="larger twin prime (default p + 2)")
    if with_d:
        parser.add_argument("-D", type=int, default=1, help="square-free odd twist parameter coprime to pq")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twincurvex", description="Arithmetic of the twin-prime curve family")
    parser.add_argument("--config", default=None, help="JSON settings file")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    parser.add_argument("--workers", type=int, default=None, help="sweep worker processes (1 = inline)")
    parser.add_argument("--prime-budget", type=int, default=None, help="largest prime for point counting")
    parser.add_argument("--series-budget", type=int, default=None, help="largest L-series truncation")
    parser.add_argument("--classgroup-bound", type=int, default=None, help="largest |disc| for class groups")
    sub = parser.add_subparsers(dest="command", required=True)

    report = sub.add_parser("report", help="invariants of one curve")
    _add_curve_args(report)
    report.add_argument("--mu", type=int, action="append", choices=(1, -1), help="norm index for K = Q(sqrt(mu |D|)); repeatable")
    output = report.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="JSON output (default)")
    output.add_argument("--text", action="store_true", help="human-readable output")
    report.set_defaults(handler=cmd_report)

    sweep = sub.add_parser("sweep", help="consistency checks over ranges of p and D")
    sweep.add_argument("--p-max", type=int, required=True)
    sweep.add_argument("--d-max", type=int, default=1)
    sweep.add_argument("--checks", type=_check_list, default=list(SWEEP_CHECKS))
    sweep.add_argument("--anomalous-bound", type=int, default=1000)
    sweep.add_argument("--output", default="-", help="CSV path, - for stdout")
    sweep.add_argument("--summary", default=None, help="optional JSON summary path")
    sweep.set_defaults(handler=cmd_sweep)

    lvalue = sub.add_parser("lvalue", help="L(E, 1), derivatives and twisted values")
    _add_curve_args(lvalue)
    lvalue.add_argument("--mu", type=int, choices=(1, -1), default=None)
    lvalue.add_argument("--derivative", type=int, default=0, choices=range(MAX_DERIVATIVE + 1))
    lvalue.add_argument("--n-max", type=int, default=None, help="series truncation (default: automatic)")
    lvalue.set_defaults(handler=cmd_lvalue)

    classgroup = sub.add_parser("classgroup", help="class group of a quadratic field")
    classgroup.add_argument("--disc", type=int, required=True, help="fundamental discriminant")
    classgroup.add_argument("-e", "--epsilon", type=int, default=1)
    classgroup.add_argument("-p", type=int, default=None)
    classgroup.add_argument("-q", type=int, default=None)
    classgroup.set_defaults(handler=cmd_classgroup)

    advisor = sub.add_parser("advisor", help="rank statements from checked hypotheses and asserted facts")
    _add_curve_args(advisor)
    advisor.add_argument("--mu", type=int, choices=(1, -1), default=None, help="twist field K = Q(sqrt(mu |D|))")
    advisor.add_argument("--facts", type=_fact_list, default=[], help="comma-separated asserted facts")
    advisor.set_defaults(handler=cmd_advisor)

    verify = sub.add_parser("verify", help="run every consistency check")
    verify.add_argument("--quick", action="store_true", help="reduced ranges for smoke runs")
    verify.add_argument("--output", default=None, help="optional CSV path for all rows")
    verify.set_defaults(handler=cmd_verify)
    return parser


def _settings_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "log_level": args.log_level,
        "sweep_workers": args.workers,
        "prime_enumeration_budget": args.prime_budget,
        "series_truncation_budget": args.series_budget,
        "classgroup_imaginary_bound": args.classgroup_bound,
        "classgroup_real_bound": args.classgroup_bound,
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, install settings and logging, run the subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    try:
        load_settings(args.config, _settings_overrides(args))
    except (OSError, json.JSONDecodeError) as exc:
        logger.error(f"Cannot read configuration: {exc}")
        return 2
    except ValidationError as exc:
        logger.error(f"Invalid configuration: {exc}")
        return 2
    try:
        setup_logging(args.log_level)
        return args.handler(args)
    except ValidationError as exc:
        logger.error(f"Invalid input: {exc}")
        return 2
    except TwinCurveError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exc.exit_code
