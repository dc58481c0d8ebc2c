"""Tests for the hybrid-tele command line."""

import csv
from pathlib import Path

import pytest

from hybridtele.cli import build_parser, main
from hybridtele.constants import EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE


@pytest.fixture
def base_args(config_file: Path) -> list[str]:
    """Options keeping runs away from the user's config file."""
    return ["--config", str(config_file)]


class TestParser:
    def test_help_exits_cleanly(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        assert "Exit codes" in capsys.readouterr().out

    def test_missing_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["homodyne"])
        assert exc.value.code == EXIT_USAGE

    @pytest.mark.parametrize(
        "argv",
        [
            ["direct-probs", "--alpha", "0.1,abc"],
            ["am-probs", "--mod", "2"],
            ["rho-b", "--qubit", "1"],
            ["rho-b", "--qubit", "0,0"],
        ],
        ids=["bad-grid", "bad-mod", "short-qubit", "zero-qubit"],
    )
    def test_bad_option_values(self, argv):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == EXIT_USAGE

    def test_qubit_is_normalized(self):
        args = build_parser().parse_args(["rho-b", "--qubit", "1,1j"])
        assert args.qubit.norm == pytest.approx(1.0)
        assert args.qubit.a1 == pytest.approx(1j * 0.5**0.5)


class TestCommands:
    """End-to-end runs of the cheap subcommands."""

    def test_fidelity_surface_to_file(self, base_args, tmp_path: Path):
        out = tmp_path / "fid.csv"
        argv = ["--alpha", "0.1,0.3", "--t", "0.9,1", "--out", str(out)]
        code = main(["fidelity-surface", *base_args, *argv])
        assert code == EXIT_OK
        rows = list(csv.reader(out.read_text().splitlines()))
        assert rows[0] == ["alpha", "t", "fid"]
        assert len(rows) == 5

    def test_direct_probs_to_stdout(self, base_args, capsys):
        code = main(
            ["direct-probs", *base_args, "--alpha", "0.2", "--a1-grid", "0,1", "--n-max", "1"]
        )
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "alpha,a1_abs,n,P"
        assert len(lines) == 1 + 2 * 2

    def test_am_probs(self, base_args, capsys):
        code = main(
            ["am-probs", *base_args, "--mod", "1", "--alpha", "0.2", "--a1-grid", "0.5"]
        )
        assert code == EXIT_OK
        assert capsys.readouterr().out.startswith("alpha,a1_abs,n,P")

    def test_precision_option(self, base_args, capsys):
        main(["fidelity-surface", *base_args, "--alpha", "0.3", "--t", "0.9", "--precision", "3"])
        row = capsys.readouterr().out.splitlines()[1]
        assert len(row.split(",")[2]) <= len("0.123")

    def test_save_config(self, base_args, tmp_path: Path):
        saved = tmp_path / "saved.conf"
        code = main(
            [
                "fidelity-surface",
                *base_args,
                "--alpha",
                "0.2",
                "--t",
                "0.95",
                "--save-config",
                str(saved),
            ]
        )
        assert code == EXIT_OK
        content = saved.read_text()
        assert "ALPHA_GRID=0.2" in content
        assert "T_GRID=0.95" in content

    def test_config_file_is_read(self, config_file: Path, base_args, capsys):
        config_file.write_text("ALPHA_GRID=0.3\nT_GRID=1.0\n")
        assert main(["fidelity-surface", *base_args]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[1].startswith("0.3,1,")

    def test_out_of_range_alpha(self, base_args, capsys):
        assert main(["fidelity-surface", *base_args, "--alpha", "0.95"]) == EXIT_USAGE
        assert "alpha values" in capsys.readouterr().err

    def test_malformed_config_file(self, config_file: Path, base_args, capsys):
        config_file.write_text("CUTOFF=lots\n")
        assert main(["fidelity-surface", *base_args]) == EXIT_USAGE
        assert "CUTOFF" in capsys.readouterr().err


class TestReportCommands:
    """Subcommands that build heavier tables on reduced grids."""

    def test_demod(self, base_args, capsys):
        code = main(["demod", *base_args, "--alpha", "0.3", "--a1-grid", "0,0.5,1"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "alpha,a1_abs,which,p_closed_form,p_oracle,abs_diff"
        assert len(lines) == 1 + 3 * 2

    def test_demod_reads_config_alpha_grid(self, config_file: Path, base_args, capsys):
        config_file.write_text("ALPHA_GRID=0.4\nA1_GRID=0.5\n")
        assert main(["demod", *base_args, "--method", "swap", "--mod", "0"]) == EXIT_OK
        rows = capsys.readouterr().out.splitlines()[1:]
        assert [row.split(",")[0] for row in rows] == ["0.4"]

    def test_rho_b(self, base_args, capsys):
        code = main(["rho-b", *base_args, "--alpha", "0.1,0.2", "--qubit", "1,1j"])
        assert code == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("alpha,beta,rho_01_01,rho_10_10")
        assert len(lines) == 3

    def test_orthogonal(self, base_args, capsys):
        code = main(["orthogonal", *base_args, "--alpha", "0.2", "--qubit", "0.8,0.6j"])
        assert code == EXIT_OK
        assert len(capsys.readouterr().out.splitlines()) == 1 + 2

    def test_orthogonal_explicit_partner(self, base_args, capsys):
        argv = ["--alpha", "0.2", "--qubit", "1,0", "--partner", "0,1"]
        assert main(["orthogonal", *base_args, *argv]) == EXIT_OK

    def test_orthogonal_rejects_overlapping_partner(self, base_args, capsys):
        argv = ["--alpha", "0.2", "--qubit", "1,1", "--partner", "1,0"]
        assert main(["orthogonal", *base_args, *argv]) == EXIT_USAGE
        assert "not orthogonal" in capsys.readouterr().err

    def test_channel_gen_exact(self, base_args, capsys):
        argv = ["--alpha", "0.03", "--t", "0.995,1", "--cutoff", "10"]
        assert main(["channel-gen", *base_args, *argv]) == EXIT_OK
        rows = capsys.readouterr().out.splitlines()[1:]
        assert rows
        assert all(row.split(",")[1] == "0.995" for row in rows)

    def test_accept_prints_every_check(self, base_args, capsys):
        code = main(["accept", *base_args])
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 12
        assert all(line.split()[0] in ("PASS", "FAIL", "NOTE") for line in lines)
        failed = any(line.startswith("FAIL") for line in lines)
        assert code == (EXIT_TOLERANCE if failed else EXIT_OK)
