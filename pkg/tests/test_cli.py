import math

import pytest
from click.testing import CliRunner

from unstable_mzi.cli import main


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False) if "mix_stderr" in \
        CliRunner.__init__.__code__.co_varnames else CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args))


def parse_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return header, rows


class TestSimulate:
    def test_stable_fringe(self, runner, fixtures_dir):
        result = invoke(runner, "simulate", str(fixtures_dir / "stable.ifl"),
                        "--phases", "0:6.283185307179586:5")
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        assert header == ["phi", "p1", "p2", "survival"]
        assert len(rows) == 5
        for phi, p1, p2, survival in rows:
            assert p1 == pytest.approx((1.0 + math.cos(phi)) / 2.0, abs=1e-12)
            assert survival == pytest.approx(1.0, abs=1e-12)

    def test_malformed_file_exits_2(self, runner, fixtures_dir):
        result = invoke(runner, "simulate", str(fixtures_dir / "malformed.ifl"))
        assert result.exit_code == 2
        assert "phi,p1" not in result.output

    def test_missing_file_exits_2(self, runner, tmp_path):
        result = invoke(runner, "simulate", str(tmp_path / "nope.ifl"))
        assert result.exit_code == 2

    def test_bad_phase_grid_exits_2(self, runner, fixtures_dir):
        result = invoke(runner, "simulate", str(fixtures_dir / "stable.ifl"),
                        "--phases", "0:1")
        assert result.exit_code == 2

    def test_saturated_warns_but_succeeds(self, runner, fixtures_dir):
        result = invoke(runner, "simulate", str(fixtures_dir / "saturated.ifl"),
                        "--phases", "0:3.14:3")
        assert result.exit_code == 0
        err = getattr(result, "stderr", "") or ""
        assert "saturated" in (err + result.output).lower()

    def test_out_writes_file(self, runner, fixtures_dir, tmp_path):
        target = tmp_path / "fringe.csv"
        result = invoke(runner, "simulate", str(fixtures_dir / "stable.ifl"),
                        "--phases", "0:1:3", "--out", str(target))
        assert result.exit_code == 0
        assert target.read_text().startswith("phi,p1,p2,survival\n")

    def test_dense_scan_recovers_visibility(self, runner, fixtures_dir, tmp_path):
        # suppressing cavity with L/(2 ell) = 0.5: extracted V = sech 0.5
        layout = tmp_path / "half_theta.ifl"
        layout.write_text(
            "particle { k = 6.283185307179586; ell = 100.0; }\n"
            "upper { segment(length = 10.0); "
            "cavity(length = 100.0, gamma_ratio = 0.0); "
            "segment(length = 10.0); }\n"
            "lower { segment(length = 120.0); }\n")
        result = invoke(runner, "simulate", str(layout),
                        "--phases", "0:6.283185307179586:10000")
        _, rows = parse_csv(result.output)
        p1 = [row[1] for row in rows]
        vis = (max(p1) - min(p1)) / (max(p1) + min(p1))
        assert vis == pytest.approx(1.0 / math.cosh(0.5), abs=1e-6)


class TestSweep:
    def test_file_sweep_section(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "sweep.ifl"))
        assert result.exit_code == 0
        header, rows = parse_csv(result.output)
        assert header == ["param", "visibility", "predictability", "duality_sum"]
        assert len(rows) == 5
        by_param = {row[0]: row for row in rows}
        assert by_param[1.0][1] == 1.0          # exact unity at gamma = 1
        for row in rows:
            assert abs(row[3] - 1.0) <= 1e-12

    def test_flags_override(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "gamma_ratio", "--start", "0", "--end", "1",
                        "--steps", "2")
        assert result.exit_code == 0
        _, rows = parse_csv(result.output)
        assert len(rows) == 2

    def test_no_spec_exits_2(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"))
        assert result.exit_code == 2

    def test_partial_flags_exit_2(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "gamma_ratio", "--start", "0")
        assert result.exit_code == 2

    def test_needs_exactly_one_cavity(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "stable.ifl"),
                        "--param", "gamma_ratio", "--start", "0", "--end", "1",
                        "--steps", "3")
        assert result.exit_code == 2

    def test_negative_gamma_exits_2(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "gamma_ratio", "--start", "-1", "--end", "1",
                        "--steps", "3")
        assert result.exit_code == 2

    def test_cavity_length_sweep(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "cavity_length_over_ell", "--start", "0",
                        "--end", "2", "--steps", "3")
        assert result.exit_code == 0
        _, rows = parse_csv(result.output)
        # L = 0 gives full visibility; growing cavity reduces it
        assert rows[0][1] == 1.0
        assert rows[2][1] < rows[1][1] < 1.0

    def test_log_scale(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "gamma_ratio", "--start", "0.1", "--end", "10",
                        "--steps", "3", "--scale", "log")
        assert result.exit_code == 0
        _, rows = parse_csv(result.output)
        assert rows[1][0] == pytest.approx(1.0)

    def test_byte_identical_reruns(self, runner, fixtures_dir):
        a = invoke(runner, "sweep", str(fixtures_dir / "sweep.ifl"))
        b = invoke(runner, "sweep", str(fixtures_dir / "sweep.ifl"))
        assert a.output == b.output

    def test_101_point_sweep_keeps_duality(self, runner, fixtures_dir):
        result = invoke(runner, "sweep", str(fixtures_dir / "baseline.ifl"),
                        "--param", "gamma_ratio", "--start", "0", "--end", "10",
                        "--steps", "101")
        assert result.exit_code == 0
        _, rows = parse_csv(result.output)
        assert len(rows) == 101
        assert all(abs(row[3] - 1.0) <= 1e-12 for row in rows)


class TestDuality:
    def test_baseline(self, runner, fixtures_dir):
        result = invoke(runner, "duality", str(fixtures_dir / "baseline.ifl"))
        assert result.exit_code == 0
        assert result.output.startswith("V=")
        fields = dict(part.split("=") for part in result.output.split())
        assert float(fields["theta_cav"]) == pytest.approx(0.05)
        assert abs(float(fields["duality_sum"]) - 1.0) <= 1e-12

    def test_no_cavity(self, runner, fixtures_dir):
        result = invoke(runner, "duality", str(fixtures_dir / "no_cavity.ifl"))
        assert result.exit_code == 0
        fields = dict(part.split("=") for part in result.output.split())
        assert float(fields["V"]) == 1.0
        assert float(fields["P"]) == 0.0

    def test_saturated_notes_limits(self, runner, fixtures_dir):
        result = invoke(runner, "duality", str(fixtures_dir / "saturated.ifl"))
        assert result.exit_code == 0
        report_line = result.output.splitlines()[0]
        assert "saturated=true" in report_line
        fields = dict(part.split("=") for part in report_line.split())
        assert float(fields["V"]) == 0.0
        assert float(fields["P"]) == 1.0


class TestOracle:
    def test_verifies_legs(self, runner, fixtures_dir):
        result = invoke(runner, "oracle", str(fixtures_dir / "oracle.ifl"))
        assert result.exit_code == 0, result.output
        lines = dict(line.split("=", 1) for line in result.output.splitlines()
                     if "=" in line)
        assert lines["leg0.kind"] == "cavity"
        assert float(lines["leg0.gamma_ratio"]) == 0.0
        assert float(lines["leg0.relative_error"]) <= 1e-10
        assert lines["leg0.passed"] == "true"
        # free leg of one decay length: e^{-1} survival
        assert float(lines["leg1.predicted_norm_decay"]) == pytest.approx(
            math.exp(-1.0))
        assert lines["leg1.passed"] == "true"

    def test_regime_violation_exits_3(self, runner, fixtures_dir):
        result = invoke(runner, "oracle", str(fixtures_dir / "regime.ifl"))
        assert result.exit_code == 3

    def test_impossible_tolerance_exits_1(self, runner, fixtures_dir):
        result = invoke(runner, "oracle", str(fixtures_dir / "oracle.ifl"),
                        "--oracle-tol", "1e-30")
        assert result.exit_code == 1


class TestFmt:
    def test_canonicalizes(self, runner, fixtures_dir):
        result = invoke(runner, "fmt", str(fixtures_dir / "baseline.ifl"))
        assert result.exit_code == 0
        assert result.output.startswith("particle {\n  ell = 100.0;")

    def test_idempotent(self, runner, fixtures_dir, tmp_path):
        first = invoke(runner, "fmt", str(fixtures_dir / "baseline.ifl"))
        canonical = tmp_path / "canonical.ifl"
        canonical.write_text(first.output)
        second = invoke(runner, "fmt", str(canonical))
        assert second.output == first.output

    def test_malformed_exits_2(self, runner, fixtures_dir):
        result = invoke(runner, "fmt", str(fixtures_dir / "malformed.ifl"))
        assert result.exit_code == 2
