import io

import pytest

from app.config.settings import load_settings
from app.engine.curves import validate
from app.engine.rootnumber import root_number
from app.engine.sweep import (
    CHECK_FUNCTIONS,
    CSV_COLUMNS,
    CheckRow,
    SweepParams,
    SweepResult,
    build_tasks,
    lvalue_pairs,
    run_sweep,
    twist_values,
    verification_plan,
    write_csv,
)
from app.models.errors import RangeError


class TestSweepChecks:
    """Small sweeps pass every row."""

    @pytest.mark.parametrize("check", ["counts", "delta", "partition", "rootnumbers", "parity", "example"])
    def test_small_sweep_passes(self, check):
        result = run_sweep([check], SweepParams(p_max=45, d_max=21), workers=1)
        assert result.rows
        assert result.ok, result.failures[:3]

    def test_tate_and_anomalous(self):
        params = SweepParams(p_max=14, d_max=7, anomalous_bound=200, tamagawa_sources=("table", "tate"))
        result = run_sweep(["tate", "anomalous", "rootnumbers"], params, workers=1)
        assert result.ok, result.failures[:3]
        assert {t.check for t in result.timings} == {"tate", "anomalous", "rootnumbers"}

    def test_classgroups(self):
        params = SweepParams(p_max=3, disc_ranges=((-120, 0), (1, 60)), disc_chunk=40)
        result = run_sweep(["classgroups"], params, workers=1)
        assert result.ok, result.failures[:3]
        assert all(row.p is None for row in result.rows)
        checks = {row.check for row in result.rows}
        assert checks == {"classgroups:reduced-ideals", "classgroups:analytic", "classgroups:genus"}

    def test_lvalues(self):
        result = run_sweep(["lvalues"], SweepParams(p_max=12), workers=1)
        assert result.ok, result.failures
        assert {row.check for row in result.rows} >= {"lvalue:vanishing", "lvalue:cauchy"}
        assert sum(row.check == "lvalue:cauchy" for row in result.rows) >= 10

    @pytest.mark.parametrize(
        "check, params",
        [
            ("jacobi", SweepParams(p_max=3, symbol_bound=12, jacobi_moduli=31)),
            ("hilbert", SweepParams(p_max=3)),
            ("twists", SweepParams(p_max=30, d_max=15)),
            ("supersingular", SweepParams(p_max=14, d_max=7)),
            ("an_bound", SweepParams(p_max=14, coefficient_bound=1000)),
            ("rho", SweepParams(p_max=14, d_max=7)),
            ("rankbound", SweepParams(p_max=14, d_max=21)),
            ("twisted", SweepParams(p_max=14, d_max=13)),
            ("roundtrip", SweepParams(p_max=14)),
        ],
    )
    def test_invariant_checks(self, check, params):
        result = run_sweep([check], params, workers=1)
        assert result.rows
        assert result.ok, result.failures[:3]

    def test_jacobi_rows(self):
        result = run_sweep(["jacobi"], SweepParams(p_max=3, symbol_bound=10, jacobi_moduli=7), workers=1)
        assert [row.check for row in result.rows if row.check.startswith("jacobi:residues")] == [
            "jacobi:residues@3", "jacobi:residues@5", "jacobi:residues@7",
        ]

    def test_twisted_rows_cover_both_signs(self):
        result = run_sweep(["twisted"], SweepParams(p_max=14, d_max=13), workers=1)
        assert {row.expected for row in result.rows} == {"True", "False"}


class TestSweepOrchestration:
    """Task fan-out, budgets and deterministic output."""

    def test_twist_values(self):
        assert twist_values(21, 11, 13) == [1, 3, 5, 7, 15, 17, 19, 21]

    def test_tasks(self):
        params = SweepParams(p_max=20, disc_ranges=((-100, 0),), disc_chunk=50)
        tasks = build_tasks(["counts", "classgroups", "example"], params)
        assert tasks == [
            ("counts", 3), ("counts", 5), ("counts", 11), ("counts", 17),
            ("classgroups", 0), ("classgroups", 1),
            ("example", 0),
        ]

    def test_symbol_tasks(self):
        params = SweepParams(p_max=20, jacobi_moduli=7, hilbert_primes=(2, 3))
        assert build_tasks(["jacobi", "hilbert"], params) == [
            ("jacobi", 1), ("jacobi", 3), ("jacobi", 5), ("jacobi", 7),
            ("hilbert", 2), ("hilbert", 3),
        ]

    def test_lvalue_pairs_reach_ten_stable_curves(self):
        assert lvalue_pairs(SweepParams(p_max=12)) == [3, 5, 11, 17, 29, 41, 59, 71, 101]
        assert lvalue_pairs(SweepParams(p_max=200))[-1] == 197
        for quick in (True, False):
            for checks, params in verification_plan(quick):
                if "lvalues" in checks:
                    pairs = lvalue_pairs(params)
                    stable = [p for p in pairs for eps in (1, -1) if root_number(validate(eps, p, p + 2)) == 1]
                    assert len(stable) >= 10

    def test_budget(self):
        load_settings(overrides={"sweep_p_max_budget": 100})
        with pytest.raises(RangeError):
            run_sweep(["counts"], SweepParams(p_max=101), workers=1)

    def test_unknown_check(self):
        with pytest.raises(ValueError):
            run_sweep(["bogus"], SweepParams(p_max=10), workers=1)

    def test_deterministic_csv(self):
        params = SweepParams(p_max=30, d_max=15)
        outputs = []
        for _ in range(2):
            stream = io.StringIO()
            write_csv(run_sweep(["delta", "counts"], params, workers=1).rows, stream)
            outputs.append(stream.getvalue())
        assert outputs[0] == outputs[1]
        assert outputs[0].splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_process_pool_matches_inline(self):
        params = SweepParams(p_max=30)
        inline = run_sweep(["rootnumbers"], params, workers=1)
        pooled = run_sweep(["rootnumbers"], params, workers=2)
        assert pooled.rows == inline.rows

    def test_failed_row_in_csv(self):
        row = CheckRow(1, 3, 5, 1, None, "counts@7", "8", "9", False)
        result = SweepResult(checks=("counts",), rows=[row])
        assert not result.ok and result.passed == 0
        stream = io.StringIO()
        write_csv(result.rows, stream)
        assert stream.getvalue().splitlines()[1] == "1,3,5,1,,counts@7,8,9,false"

    def test_plan_covers_every_check(self):
        for quick in (True, False):
            planned = {check for checks, _ in verification_plan(quick) for check in checks}
            assert planned == set(CHECK_FUNCTIONS)
