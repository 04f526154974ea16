"""
Test suite for the command-line interface and the batch runner.

Runs use a 200-interval grid and small control families so the full
pipeline stays quick.
"""

import argparse
import json

import pytest

from socverify.cli import build_parser, load_run_config, main, report_paths, run
from socverify.cli.main import EXIT_CONFIG, EXIT_INTEGRITY, EXIT_OK, EXIT_VIOLATED, float_list
from socverify.cli.runner import Verdict
from socverify.errors import IntegrityError

SMALL = ["--grid-n", "200", "--random", "5", "--switches", "4"]


def _args(command, problem, out_dir, *extra):
    return [command, "--problem", problem, "--out", str(out_dir), *SMALL, *extra]


def _verdict(out_dir, problem):
    return json.loads((out_dir / problem / "verdict.json").read_text())


@pytest.mark.unit
class TestParser:
    """Test argument parsing."""

    def test_float_list(self):
        """Test comma-separated float parsing."""
        assert float_list("0.5, 0.25,0.125") == (0.5, 0.25, 0.125)

    @pytest.mark.parametrize("text", ["", "a,b", ","])
    def test_float_list_invalid(self, text):
        """Test that malformed lists are rejected."""
        with pytest.raises(argparse.ArgumentTypeError):
            float_list(text)

    def test_unset_flags_are_none(self):
        """Test that omitted flags do not override the file or the defaults."""
        args = build_parser().parse_args(["pmp"])

        assert args.command == "pmp"
        assert args.grid_n is None
        assert args.family_constants is None
        assert args.suites is None

    def test_flags(self):
        """Test that flags map onto RunConfig fields."""
        args = build_parser().parse_args(
            ["check", "--problem", "P3", "--grid-n", "400", "--no-constants", "--alpha-list", "0.5,0.25"]
        )

        assert args.problem_id == "P3"
        assert args.grid_n == 400
        assert args.family_constants is False
        assert args.alpha_list == (0.5, 0.25)

    def test_command_required(self):
        """Test that a subcommand is mandatory."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_version(self, capsys):
        """Test the --version flag."""
        with pytest.raises(SystemExit) as exc_info:
            build_parser().parse_args(["--version"])

        assert exc_info.value.code == 0
        assert capsys.readouterr().out.startswith("socverify ")


@pytest.mark.integration
class TestExitCodes:
    """Test the exit-code contract of main()."""

    def test_minimising_integrator_passes(self, out_dir, capsys):
        """Test that P2 passes every check with a positive beta."""
        code = main(_args("check", "P2", out_dir))

        verdict = _verdict(out_dir, "P2")
        assert code == EXIT_OK
        assert verdict["pmp"] == "pass"
        assert verdict["soc_necessary"] == "pass"
        assert verdict["pointwise"] == "pass"
        assert verdict["sufficient"] > 0
        assert verdict["details"]["beta_hat_constants"] == pytest.approx(1.0 / 3.0, abs=1e-8)
        assert "Wrote" in capsys.readouterr().out

    def test_family_and_constant_beta_reported(self, out_dir, capsys):
        """Test that the verdict carries beta_hat over the whole family and over the constants."""
        main(_args("sufficient", "P2", out_dir))

        verdict = _verdict(out_dir, "P2")
        assert verdict["sufficient_constants"] == pytest.approx(1.0 / 3.0, abs=1e-8)
        assert 0.0 < verdict["sufficient"] <= verdict["sufficient_constants"] + 1e-12
        assert verdict["sufficient"] == verdict["details"]["beta_hat"]
        assert "sufficient_constants: " in capsys.readouterr().out

    def test_maximising_integrator_violated(self, out_dir):
        """Test that P1 passes the maximum condition but violates the second-order conditions."""
        code = main(_args("check", "P1", out_dir))

        verdict = _verdict(out_dir, "P1")
        assert code == EXIT_VIOLATED
        assert verdict["pmp"] == "pass"
        assert verdict["soc_necessary"] == "violated"
        assert verdict["pointwise"] == "violated"
        assert verdict["sufficient"] == "not_established"
        assert verdict["details"]["Q"] >= 1.0 / 3.0 - 1e-6
        assert verdict["exit_code"] == 1

    def test_unknown_problem(self, out_dir, capsys):
        """Test exit code 2 for an unknown problem id."""
        code = main(_args("check", "P9", out_dir))

        assert code == EXIT_CONFIG
        assert "unknown problem id" in capsys.readouterr().err

    def test_invalid_grid(self, out_dir):
        """Test exit code 2 for an odd grid."""
        assert main(["pmp", "--grid-n", "201", "--out", str(out_dir)]) == EXIT_CONFIG

    def test_invalid_config_file(self, tmp_path):
        """Test exit code 2 for a run file with an unknown key."""
        path = tmp_path / "run.toml"
        path.write_text("[run]\ncolour = 'blue'\n")

        assert main(["pmp", "--config", str(path), "--out", str(tmp_path / "out")]) == EXIT_CONFIG

    def test_probe_out_of_range(self, out_dir):
        """Test exit code 2 for a probe index outside the domain."""
        code = main(["chatter", "--problem", "P1", "--grid-n", "200", "--probe", "9", "--out", str(out_dir)])

        assert code == EXIT_CONFIG

    def test_unresolved_chattering(self, out_dir):
        """Test exit code 2 when the grid cannot resolve a chattering period."""
        code = main(
            ["chatter", "--problem", "P1", "--grid-n", "200", "--eps-list", "0.5,0.01", "--out", str(out_dir)]
        )

        assert code == EXIT_CONFIG

    def test_integrity_failure(self, out_dir, mocker, capsys):
        """Test exit code 3 when an internal identity fails."""
        mocker.patch("socverify.cli.runner.trace_identity_check", side_effect=IntegrityError("trace gap"))

        code = main(_args("soc", "P2", out_dir))

        assert code == EXIT_INTEGRITY
        assert "integrity error" in capsys.readouterr().err


@pytest.mark.integration
class TestRun:
    """Test the runner and its report layout."""

    def test_pmp_artifacts(self, out_dir):
        """Test that pmp writes exactly its documented files."""
        config = load_run_config(
            None, {"problem_id": "P3", "grid_n": 200, "domain_samples": 41, "output_dir": str(out_dir)}
        )

        verdict = run(config, "pmp")

        expected = report_paths(config, "pmp")
        assert all(path.exists() for path in expected)
        relative = sorted(
            p.relative_to(config.problem_dir).as_posix() for p in expected if p.name != "run_meta.json"
        )
        assert [a for a in verdict.artifacts if a != "run_meta.json"] == relative
        assert verdict.soc_necessary is None

    def test_failing_candidate_skips_second_order(self, out_dir, mocker):
        """Test that a failing maximum condition gates the second-order stages."""
        report = mocker.Mock(passed=False, max_residual=1.0, residual=None)
        report.to_dict.return_value = {"verdict": "fail"}
        mocker.patch("socverify.cli.runner.pmp_residual", return_value=report)
        mocker.patch("socverify.cli.runner.ReportWriter.series")
        fit = mocker.patch("socverify.cli.runner.sufficient_fit")
        config = load_run_config(None, {"problem_id": "P2", "grid_n": 200, "output_dir": str(out_dir)})

        verdict = run(config, "check")

        assert verdict.pmp == "fail"
        assert verdict.soc_necessary is None
        assert verdict.sufficient is None
        assert verdict.exit_code == 1
        fit.assert_not_called()

    def test_chatter_command(self, out_dir):
        """Test the chattering suite on P1 and its CSV output."""
        code = main(
            ["chatter", "--problem", "P1", "--grid-n", "200", "--eps-list", "0.5,0.25,0.125", "--out", str(out_dir)]
        )

        verdict = _verdict(out_dir, "P1")
        assert code == EXIT_OK
        assert len(verdict["details"]["chattering_errors"]) == 3
        assert (out_dir / "P1" / "convergence" / "chattering.csv").exists()

    def test_quotients_command(self, out_dir):
        """Test the quotient suite on P1."""
        code = main(["quotients", "--problem", "P1", "--grid-n", "200", "--out", str(out_dir)])

        assert code == EXIT_OK
        assert _verdict(out_dir, "P1")["details"]["quotient_bounds_bounded"] is True
        second = json.loads((out_dir / "P1" / "convergence" / "second_oracle.json").read_text())
        assert second["target"] == pytest.approx(-1.0 / 3.0, abs=1e-10)

    def test_check_with_suites(self, out_dir):
        """Test that --suites adds the relaxation reports to check."""
        code = main(_args("check", "P2", out_dir, "--suites", "--eps-list", "0.5,0.25,0.125"))

        assert code == EXIT_OK
        config = load_run_config(
            None, {"problem_id": "P2", "grid_n": 200, "output_dir": str(out_dir), "suites": True}
        )
        assert all(path.exists() for path in report_paths(config, "check"))

    def test_audit_command(self, out_dir):
        """Test the derivative and regularity audit of P3."""
        code = main(
            [
                "audit", "--problem", "P3", "--grid-n", "200",
                "--domain-samples", "41", "--audit-samples", "50", "--out", str(out_dir),
            ]
        )

        audit = json.loads((out_dir / "P3" / "audit.json").read_text())
        assert code == EXIT_OK
        assert audit["verdict"] == "pass"
        assert audit["metric_violations"] == []

    def test_deterministic_reports(self, tmp_path):
        """Test that two runs with the same configuration write identical reports."""
        first, second = tmp_path / "a", tmp_path / "b"

        main(_args("check", "P2", first))
        main(_args("check", "P2", second))

        for name in ("verdict.json", "pmp.json", "soc.json"):
            assert (first / "P2" / name).read_bytes() == (second / "P2" / name).read_bytes()

    def test_run_meta(self, out_dir):
        """Test that run metadata records the command and configuration."""
        main(["pmp", "--problem", "P1", "--grid-n", "200", "--out", str(out_dir)])

        meta = json.loads((out_dir / "P1" / "run_meta.json").read_text())
        assert meta["command"] == "pmp"
        assert meta["config"]["grid_n"] == 200
        assert "timestamp" in meta

    def test_unknown_command(self):
        """Test that run() rejects unknown commands."""
        with pytest.raises(ValueError):
            run(load_run_config(), "plot")


@pytest.mark.unit
class TestVerdict:
    """Test the verdict exit-code rule."""

    @pytest.mark.parametrize(
        "fields, code",
        [
            ({}, 0),
            ({"pmp": "pass", "soc_necessary": "pass", "pointwise": "pass", "sufficient": 0.3}, 0),
            ({"pmp": "pass", "sufficient": "not_established"}, 0),
            ({"pmp": "fail"}, 1),
            ({"pmp": "pass", "pointwise": "violated"}, 1),
            ({"audit": "fail"}, 1),
        ],
    )
    def test_exit_code(self, fields, code):
        """Test the mapping from findings to exit codes."""
        verdict = Verdict(problem_id="P2", command="check", **fields)

        assert verdict.exit_code == code
        assert verdict.to_dict()["exit_code"] == code
