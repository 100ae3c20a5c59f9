"""Tests for CLI module."""

import csv
import json
import math

import pytest
from click.testing import CliRunner

from guesswork_budget import verify as verify_module
from guesswork_budget.cli import cli


@pytest.fixture
def runner():
    """Provide Click CLI runner."""
    return CliRunner()


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def test_cli_version(runner):
    """Test version flag."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "guesswork-budget" in result.output


def test_cli_help(runner):
    """Test main help output."""
    result = runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for command in (
        "analyze",
        "tilt-scan",
        "moments",
        "success",
        "rate",
        "compare",
        "scan-simplex",
        "table1",
        "verify",
    ):
        assert command in result.output


def test_moments_help(runner):
    """Test moments command help."""
    result = runner.invoke(cli, ["moments", "--help"])
    assert result.exit_code == 0
    assert "--table1" in result.output


class TestAnalyze:
    """Test the analyze command."""

    def test_binary_source(self, runner, tmp_path):
        """Test one row of statistics for a binary source."""
        out = tmp_path / "analyze.csv"
        result = runner.invoke(cli, ["analyze", "-p", "0.1,0.9", "-o", str(out)])
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert row["alphabet_size"] == "2"
        assert float(row["V_nats2"]) == pytest.approx(0.09 * math.log(9) ** 2, rel=1e-10)
        assert float(row["H_half_nats"]) == pytest.approx(0.47000, abs=1e-5)
        assert row["sec"] == "true"
        assert row["status"] == "pass"

    def test_bits(self, runner, tmp_path):
        """Test bits display of the uniform binary source."""
        out = tmp_path / "analyze.csv"
        result = runner.invoke(cli, ["--units", "bits", "analyze", "-p", "1,1", "-o", str(out)])
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert float(row["H_bits"]) == pytest.approx(1.0)
        assert row["status"] == "degenerate"

    def test_source_file(self, runner, tmp_path):
        """Test reading the source from a file."""
        source = tmp_path / "theta.txt"
        source.write_text("0.1 0.2 0.7\n")
        out = tmp_path / "analyze.csv"
        result = runner.invoke(cli, ["analyze", "--source-file", str(source), "-o", str(out)])
        assert result.exit_code == 0
        assert read_rows(out)[0]["alphabet_size"] == "3"

    def test_stdout(self, runner):
        """Test CSV goes to stdout without --output."""
        result = runner.invoke(cli, ["analyze", "-p", "0.3,0.7"])
        assert result.exit_code == 0
        assert "alphabet_size,H_nats" in result.output

    def test_boundary_source(self, runner):
        """Test a zero entry exits with code 2."""
        result = runner.invoke(cli, ["analyze", "-p", "1,0"])
        assert result.exit_code == 2
        assert "Error" in result.output

    def test_missing_source(self, runner):
        """Test a source option is required."""
        result = runner.invoke(cli, ["analyze"])
        assert result.exit_code == 2


class TestExperiments:
    """Test moments, success, rate and tilt-scan."""

    def test_uniform_mean(self, runner, tmp_path):
        """Test E[G] = 2.5 for the uniform binary source at n = 2."""
        out = tmp_path / "moments.csv"
        result = runner.invoke(cli, ["moments", "-p", "0.5,0.5", "--n", "2", "-o", str(out)])
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert float(row["moment"]) == pytest.approx(2.5)
        assert row["mode"] == "exact_integer"

    def test_table1_moments(self, runner, tmp_path):
        """Test the matched binary set gives one row per length and order."""
        out = tmp_path / "moments.csv"
        result = runner.invoke(cli, ["moments", "--table1", "--rhos", "1,2", "-o", str(out)])
        assert result.exit_code == 0
        rows = read_rows(out)
        assert len(rows) == 12
        assert [int(r["n"]) for r in rows[::2]] == [9, 10, 12, 15, 18, 22]

    def test_long_strings_fractional_order(self, runner, tmp_path):
        """Test rho = 0.5 at binary n = 2000 uses the integral and exits cleanly."""
        out = tmp_path / "moments.csv"
        result = runner.invoke(
            cli, ["moments", "-p", "0.3,0.7", "--n", "2000", "--rhos", "0.5", "-o", str(out)]
        )
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert row["mode"] == "integral_approx"
        assert float(row["exponent"]) < float(row["asymptotic_exponent"])

    def test_success_curve(self, runner, tmp_path):
        """Test success probabilities for (0.8, 0.2) at n = 2."""
        out = tmp_path / "success.csv"
        budgets = ",".join(str(math.log(q)) for q in (1, 2, 3, 4))
        result = runner.invoke(
            cli, ["success", "-p", "0.8,0.2", "--n", "2", "--log-budgets", budgets, "-o", str(out)]
        )
        assert result.exit_code == 0
        values = [float(r["success"]) for r in read_rows(out)]
        assert values == pytest.approx([0.64, 0.80, 0.96, 1.0])

    def test_rate(self, runner, tmp_path):
        """Test the uniform rate closed form through the CLI."""
        out = tmp_path / "rate.csv"
        result = runner.invoke(cli, ["rate", "-p", "1,1", "--gs", "0.2,0.5", "-o", str(out)])
        assert result.exit_code == 0
        rows = read_rows(out)
        assert float(rows[0]["rate_nats"]) == pytest.approx(math.log(2) - 0.2)
        assert rows[0]["alpha"] == ""

    def test_tilt_scan(self, runner, tmp_path):
        """Test one row per order with the member columns."""
        out = tmp_path / "tilt.csv"
        result = runner.invoke(cli, ["tilt-scan", "-p", "0.1,0.2,0.7", "-o", str(out)])
        assert result.exit_code == 0
        rows = read_rows(out)
        assert len(rows) == 7
        assert rows[0]["member"] == "high"
        assert float(rows[0]["p1"]) == pytest.approx(1 / 3)

    def test_guard_exit_code(self, runner):
        """Test a too-large profile exits with code 3."""
        result = runner.invoke(cli, ["moments", "-p", "0.2,0.3,0.5", "--n", "10000"])
        assert result.exit_code == 3

    def test_length_required(self, runner):
        """Test --n is needed with an explicit source."""
        result = runner.invoke(cli, ["moments", "-p", "0.3,0.7"])
        assert result.exit_code == 2


class TestCompare:
    """Test the compare command."""

    def test_vs_uniform(self, runner, tmp_path):
        """Test the uniform moment comparison holds."""
        out = tmp_path / "compare.csv"
        result = runner.invoke(
            cli, ["compare", "-p", "0.1,0.9", "--vs-uniform", "--rho", "1", "-o", str(out)]
        )
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert row["verdict"] == "<"
        assert row["holds"] == "true"
        assert float(row["eta"]) == pytest.approx(0.46899, abs=1e-5)

    def test_tilted(self, runner, tmp_path):
        """Test the rate comparison against a tilted member."""
        out = tmp_path / "compare.csv"
        result = runner.invoke(
            cli, ["compare", "-p", "0.3,0.7", "--alpha", "2", "--g1", "0.4", "-o", str(out)]
        )
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert row["verdict"] == ">"
        assert row["expected"] == ">"

    def test_free_form(self, runner, tmp_path):
        """Test a free-form pair has no expected ordering."""
        out = tmp_path / "compare.csv"
        result = runner.invoke(
            cli,
            ["compare", "-p", "0.5,0.5", "--probs2", "0.3160,0.6840", "--rho", "1",
             "--n1", "9", "-o", str(out)],
        )
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert row["expected"] == ""
        assert row["holds"] == ""
        assert float(row["n2_real"]) == pytest.approx(10.0, abs=1e-3)

    def test_needs_one_mode(self, runner):
        """Test --rho and --g1 are exclusive."""
        result = runner.invoke(cli, ["compare", "-p", "0.3,0.7", "--vs-uniform"])
        assert result.exit_code == 2


class TestTable1Command:
    """Test the table1 command."""

    def test_default(self, runner, tmp_path):
        """Test the six published rows."""
        out = tmp_path / "table1.csv"
        result = runner.invoke(cli, ["table1", "-o", str(out)])
        assert result.exit_code == 0
        rows = read_rows(out)
        assert [int(r["n"]) for r in rows] == [9, 10, 12, 15, 18, 22]
        assert float(rows[0]["phi"]) == 0.5
        assert float(rows[1]["phi"]) == pytest.approx(0.3160, abs=5e-4)
        for row in rows:
            assert float(row["n_H_nats"]) == pytest.approx(9 * math.log(2), abs=1e-9)

    def test_custom_budget(self, runner, tmp_path):
        """Test one bit over two characters."""
        out = tmp_path / "table1.csv"
        result = runner.invoke(
            cli, ["table1", "--total-bits", "1", "--lengths", "2", "-o", str(out)]
        )
        assert result.exit_code == 0
        (row,) = read_rows(out)
        assert float(row["H_nats"]) == pytest.approx(0.5 * math.log(2), abs=1e-9)

    def test_infeasible(self, runner):
        """Test lengths shorter than the budget allows."""
        result = runner.invoke(cli, ["table1", "--lengths", "8"])
        assert result.exit_code == 2

    def test_fractional_lengths(self, runner):
        """Test a non-integer length is rejected instead of truncated."""
        result = runner.invoke(cli, ["table1", "--lengths", "9.7"])
        assert result.exit_code == 2


class TestScanAndVerify:
    """Test scan-simplex and verify."""

    def test_scan(self, runner, tmp_path):
        """Test the ternary lattice at resolution 10."""
        out = tmp_path / "scan.csv"
        result = runner.invoke(cli, ["scan-simplex", "--resolution", "10", "-o", str(out)])
        assert result.exit_code == 0
        rows = read_rows(out)
        assert len(rows) == 36
        assert {r["label"] for r in rows} <= {"pass", "fail", "degenerate"}

    def test_scan_binary(self, runner, tmp_path):
        """Test the binary segment has no failures."""
        out = tmp_path / "scan.csv"
        result = runner.invoke(cli, ["scan-simplex", "--dimension", "2", "-o", str(out)])
        assert result.exit_code == 0
        assert {r["label"] for r in read_rows(out)} == {"pass"}

    def test_scan_deterministic_threads(self, runner, tmp_path):
        """Test output bytes do not depend on the thread count."""
        outputs = []
        for threads in ("1", "4"):
            out = tmp_path / f"scan{threads}.csv"
            result = runner.invoke(
                cli, ["--threads", threads, "scan-simplex", "--resolution", "40", "-o", str(out)]
            )
            assert result.exit_code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]

    def test_bad_threads_env(self, runner):
        """Test a nonpositive GUESSWORK_THREADS exits with code 2."""
        result = runner.invoke(
            cli, ["analyze", "-p", "0.3,0.7"], env={"GUESSWORK_THREADS": "0"}
        )
        assert result.exit_code == 2

    def test_verify_derivatives(self, runner, tmp_path):
        """Test the derivatives suite writes a passing JSON report."""
        out = tmp_path / "verify.json"
        result = runner.invoke(cli, ["verify", "derivatives", "-o", str(out)])
        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert len(report) == 100
        assert all(entry["status"] == "pass" for entry in report)

    def test_verify_crash_reported(self, runner, tmp_path, monkeypatch):
        """Test a crashing check still writes the JSON report and exits 1."""
        calls = []
        original = verify_module.derivative_checks

        def flaky(base):
            calls.append(base)
            if len(calls) == 1:
                raise ValueError("math domain error")
            return original(base)

        monkeypatch.setattr(verify_module, "derivative_checks", flaky)
        out = tmp_path / "verify.json"
        result = runner.invoke(cli, ["verify", "derivatives", "-o", str(out)])
        assert result.exit_code == 1
        report = json.loads(out.read_text())
        assert report[0] == {
            "suite": "derivatives",
            "case": "source0",
            "status": "fail",
            "residual": None,
        }
        assert sum(entry["status"] == "fail" for entry in report) == 1
