"""Tests for figure tables and CSV output."""

import math
from pathlib import Path

import pytest

from hybridtele.services.config import SweepConfig
from hybridtele.services.qubit import Qubit
from hybridtele.services.reports import (
    ReportWriter,
    Table,
    am_probs_table,
    channel_gen_table,
    demod_table,
    direct_probs_table,
    evaluate_grid,
    fidelity_surface_table,
    format_value,
    orthogonal_table,
    rho_b_table,
    surface_qubit,
)

SMALL = SweepConfig(alpha_grid=(0.03, 0.2), t_grid=(0.99, 1.0), a1_grid=(0.0, 0.5, 1.0), n_max=2)


class TestFormatValue:
    @pytest.mark.parametrize(
        ("value", "expected"),
        [(None, ""), (True, "true"), (False, "false"), (3, "3"), ("ideal", "ideal")],
        ids=["none", "true", "false", "int", "str"],
    )
    def test_non_floats(self, value, expected):
        assert format_value(value) == expected

    def test_float_precision(self):
        assert format_value(1 / 3, precision=4) == "0.3333"
        assert format_value(5.46e-7, precision=3) == "5.46e-07"


class TestEvaluateGrid:
    def test_keeps_grid_order_with_workers(self):
        points = list(range(20))
        assert evaluate_grid(lambda x: x * x, points, workers=4) == [x * x for x in points]

    def test_serial(self):
        assert evaluate_grid(str, [1, 2]) == ["1", "2"]


class TestReportWriter:
    """CSV writing to a file or stdout."""

    def table(self) -> Table:
        return Table(("alpha", "p", "ok"), [(0.1, 1 / 3, True), (0.2, None, False)])

    def test_writes_stdout(self, capsys):
        assert ReportWriter(precision=3).write(self.table()) is None
        out = capsys.readouterr().out
        assert out.splitlines() == ["alpha,p,ok", "0.1,0.333,true", "0.2,,false"]

    def test_writes_file(self, tmp_path: Path):
        path = tmp_path / "out" / "table.csv"
        written = ReportWriter(path, precision=3).write(self.table())
        assert written == path
        assert path.read_text().startswith("alpha,p,ok\n0.1,0.333,true\n")

    def test_empty_path_means_stdout(self):
        assert ReportWriter("").output_path is None


class TestTables:
    def test_surface_qubit_normalized(self):
        qubit = surface_qubit()
        assert abs(qubit.a0) ** 2 + abs(qubit.a1) ** 2 == pytest.approx(1.0)

    def test_fidelity_surface(self):
        table = fidelity_surface_table(SMALL)
        assert table.header == ("alpha", "t", "fid")
        assert [(a, t) for a, t, _ in table.rows] == [
            (0.03, 0.99),
            (0.03, 1.0),
            (0.2, 0.99),
            (0.2, 1.0),
        ]
        assert table.rows[1][2] == pytest.approx(1.0)
        assert all(0 < fid <= 1 + 1e-12 for *_, fid in table.rows)

    def test_direct_probs_rows(self):
        table = direct_probs_table(SMALL)
        assert table.header == ("alpha", "a1_abs", "n", "P")
        assert len(table.rows) == 2 * 3 * 3
        assert table.flagged == 0

    def test_direct_probs_at_vacuum_qubit(self):
        """A qubit in |0> sees P_0 = exp(-alpha^2)."""
        rows = direct_probs_table(SMALL).rows
        p0 = next(p for a, a1, n, p in rows if (a, a1, n) == (0.2, 0.0, 0))
        assert p0 == pytest.approx(math.exp(-0.04))

    @pytest.mark.parametrize("mod", [0, 1])
    def test_am_probs(self, mod):
        table = am_probs_table(SMALL, mod)
        assert table.flagged == 0
        assert {n for _, _, n, _ in table.rows} == {0, 1, 2}

    def test_am_probs_bad_index(self):
        with pytest.raises(ValueError, match="mod_index"):
            am_probs_table(SMALL, 2)

    def test_channel_gen_ideal(self):
        cfg = SweepConfig(alpha_grid=(0.03,), cutoff=16)
        table = channel_gen_table(cfg, ideal=True)
        assert table.header == ("alpha", "t", "n5", "n6", "probability", "fidelity", "balanced")
        assert table.rows
        assert all(row[1] == "ideal" for row in table.rows)
        balanced = [row for row in table.rows if row[6]]
        assert all(row[5] == pytest.approx(1.0, abs=1e-9) for row in balanced)

    def test_channel_gen_exact(self):
        t = math.sqrt(0.99)
        cfg = SweepConfig(alpha_grid=(0.03,), t_grid=(t, 1.0), cutoff=10)
        table = channel_gen_table(cfg)
        assert table.rows
        assert all(row[1] == t for row in table.rows)
        assert table.flagged == 0

    @pytest.mark.parametrize(("method", "alpha"), [("coherent", 0.3), ("swap", 0.4)])
    def test_demod(self, method, alpha):
        cfg = SweepConfig(alpha_grid=(alpha,), a1_grid=(0.0, 1.0))
        table = demod_table(cfg, method)
        assert table.header[-3:] == ("p_closed_form", "p_oracle", "abs_diff")
        assert len(table.rows) == 4
        assert table.flagged == 0

    def test_rho_b(self, plus_qubit):
        table = rho_b_table(SweepConfig(alpha_grid=(0.1, 0.2)), plus_qubit)
        assert [row[0] for row in table.rows] == [0.1, 0.2]
        assert all(row[-1] == pytest.approx(1.0, abs=1e-9) for row in table.rows)
        assert table.flagged == 0

    def test_orthogonal(self, complex_qubit):
        cfg = SweepConfig(alpha_grid=(0.2,))
        table = orthogonal_table(cfg, (complex_qubit, complex_qubit.orthogonal()))
        assert [(row[1], row[2]) for row in table.rows] == [(0, 0), (0, 1)]
        assert table.flagged == 0

    def test_orthogonal_rejects_overlapping_pair(self, plus_qubit):
        with pytest.raises(ValueError, match="not orthogonal"):
            orthogonal_table(SweepConfig(alpha_grid=(0.2,)), (plus_qubit, Qubit(1, 0)))
