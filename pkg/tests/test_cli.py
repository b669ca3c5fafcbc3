import json

import pandas as pd
import pytest
from click.testing import CliRunner

from latereg.api import CommandConfig, LateRegService
from latereg.arith import Polynomial, RingContext
from latereg.cli.main import EXIT_HYPOTHESIS, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE, cli
from latereg.construct import ExportFormat, PureModuleSpec, pure_module
from latereg.freemod import GradedMatrix, format_matrix


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture
def m_squared_file(tmp_path):
    R = RingContext(1)
    gens = [Polynomial.monomial(R, m) for m in [(2, 0), (1, 1), (0, 2)]]
    path = tmp_path / "m2.txt"
    path.write_text(format_matrix(GradedMatrix.row(R, gens), with_ring=True))
    return path


WORKED = ["--n", "1", "--N", "2", "--k", "1", "--d", "0"]
JUMP = ["--n", "1", "--N", "2", "--k", "2", "--d", "1"]


def test_no_arguments_shows_commands(runner):
    result = runner.invoke(cli, [])
    assert result.exit_code == EXIT_OK
    assert "Commands" in result.output


def test_unknown_option_is_usage_error(runner):
    result = runner.invoke(cli, ["pure", "--bogus"])
    assert result.exit_code == EXIT_USAGE


def test_pure_ascii(runner):
    result = runner.invoke(cli, ["pure", "--n", "1", "--k", "2", "--d", "1"])
    assert result.exit_code == EXIT_OK
    assert "degree sequence: (2, 3, 5)" in result.output
    assert "generators: 2" in result.output
    assert "pure: yes" in result.output


def test_pure_json(runner, tmp_path):
    out = tmp_path / "pure.json"
    result = runner.invoke(
        cli, ["pure", "--n", "2", "--k", "1", "--d", "1", "--format", "json", "--out", str(out)]
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["degree_sequence"] == [1, 2, 3, 5]
    assert data["generator_count"] == 3
    assert data["pure"] is True


@pytest.mark.parametrize(
    "args",
    [
        ["pure", "--n", "0", "--k", "1", "--d", "0"],
        ["pure", "--n", "1", "--k", "1"],
        ["pure", "--n", "1", "--k", "1", "--d", "0", "--format", "cas"],
    ],
)
def test_pure_rejects_bad_input(runner, args):
    assert runner.invoke(cli, args).exit_code == EXIT_USAGE


def test_construct_worked_instance(runner, tmp_path):
    out = tmp_path / "j.txt"
    result = runner.invoke(cli, ["construct", *WORKED, "--out", str(out)])
    assert result.exit_code == EXIT_OK
    assert sorted(line.lstrip("-") for line in out.read_text().split()) == sorted(
        ["y1^2", "y1*y2", "y2^2", "x0*y1", "x1*y1"]
    )


def test_construct_cas(runner, tmp_path):
    out = tmp_path / "j.m2"
    result = runner.invoke(cli, ["construct", *JUMP, "--format", "cas", "--out", str(out)])
    assert result.exit_code == EXIT_OK
    text = out.read_text()
    assert text.startswith("S = ZZ/32003[x0,x1,y1,y2];")
    assert "ideal(" in text


def test_construct_hypothesis_failure(runner):
    result = runner.invoke(cli, ["construct", "--n", "2", "--N", "2", "--k", "1", "--d", "1"])
    assert result.exit_code == EXIT_HYPOTHESIS
    assert "(d)" in result.output


def test_construct_from_module_file(runner, tmp_path):
    m = pure_module(PureModuleSpec(n=1, k=2, d=1))
    module = tmp_path / "m.txt"
    module.write_text(format_matrix(m.presentation, with_ring=True))
    out = tmp_path / "j.txt"
    result = runner.invoke(
        cli, ["construct", "--module", str(module), "--k", "2", "--N", "3", "--out", str(out)]
    )
    assert result.exit_code == EXIT_OK
    assert len(out.read_text().splitlines()) == 10 + 3


def test_construct_rejects_y_variables_in_module(runner, tmp_path):
    module = tmp_path / "m.txt"
    module.write_text("matrix 1 <- 2\n0: y1\n")
    result = runner.invoke(cli, ["construct", "--module", str(module), "--N", "2"])
    assert result.exit_code == EXIT_USAGE


def test_construct_missing_module_file(runner, tmp_path):
    missing = tmp_path / "absent.txt"
    result = runner.invoke(cli, ["construct", "--module", str(missing), "--N", "2"])
    assert result.exit_code == EXIT_USAGE


def test_resolve_ascii(runner, m_squared_file):
    result = runner.invoke(cli, ["resolve", str(m_squared_file)])
    assert result.exit_code == EXIT_OK
    assert "total: 1 3 2" in result.output
    assert "ranks: (1, 3, 2)" in result.output
    assert "regularity: 1" in result.output


def test_resolve_json(runner, m_squared_file, tmp_path):
    out = tmp_path / "res.json"
    result = runner.invoke(
        cli, ["resolve", str(m_squared_file), "--format", "json", "--out", str(out)]
    )
    assert result.exit_code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["ranks"] == [1, 3, 2]
    assert data["regularity"] == 1
    assert data["betti"]["pd"] == 2


def test_resolve_bad_file(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("mat 0 <- 1\n0: x0\n")
    assert runner.invoke(cli, ["resolve", str(bad)]).exit_code == EXIT_USAGE


def test_resolve_rejects_code_in_matrix_file(runner, tmp_path):
    marker = tmp_path / "marker"
    bad = tmp_path / "bad.txt"
    bad.write_text(f"matrix 1 <- 1\n0: x0 + 0*len(open('{marker}','w').name)\n")
    assert runner.invoke(cli, ["resolve", str(bad)]).exit_code == EXIT_USAGE
    assert not marker.exists()


def test_verify_passes(runner):
    result = runner.invoke(cli, ["verify", *JUMP, "--format", "ascii"])
    assert result.exit_code == EXIT_OK
    assert "(3, 5, 6, 7)" in result.output
    assert "check betti: ok" in result.output


def test_verify_json(runner, tmp_path):
    out = tmp_path / "cert.json"
    result = runner.invoke(cli, ["verify", *WORKED, "--format", "json", "--out", str(out)])
    assert result.exit_code == EXIT_OK
    cert = json.loads(out.read_text())
    assert cert["passed"] is True
    assert cert["computed_regularity"] == 2
    assert cert["predicted_sequence"] == [2, 3, 4, 5]


def test_verify_defaults_to_certificate_json(runner, tmp_path):
    out = tmp_path / "cert.json"
    result = runner.invoke(cli, ["verify", *JUMP, "--out", str(out)])
    assert result.exit_code == EXIT_OK
    cert = json.loads(out.read_text())
    assert cert["computed_sequence"] == [3, 5, 6, 7]
    assert cert["checks"]["betti"] is True


def test_verify_reports_mismatch(runner):
    result = runner.invoke(cli, ["verify", *JUMP, "--expect-seq", "3,5,6,8", "--format", "ascii"])
    assert result.exit_code == EXIT_MISMATCH
    assert "FAILED" in result.output


def test_verify_hypothesis_failure(runner):
    result = runner.invoke(cli, ["verify", "--n", "2", "--N", "2", "--k", "1", "--d", "1"])
    assert result.exit_code == EXIT_HYPOTHESIS


def test_verify_rejects_composite_prime(runner):
    result = runner.invoke(cli, ["verify", *WORKED, "--prime", "9"])
    assert result.exit_code == EXIT_USAGE


def test_construct_then_verify(runner, tmp_path):
    gens = tmp_path / "j.json"
    built = runner.invoke(cli, ["construct", *JUMP, "--format", "json", "--out", str(gens)])
    assert built.exit_code == EXIT_OK
    result = runner.invoke(cli, ["verify", *JUMP, "--input", str(gens)])
    assert result.exit_code == EXIT_OK


def test_scan_csv(runner, tmp_path):
    out = tmp_path / "scan.csv"
    result = runner.invoke(
        cli,
        ["scan", "--n", "1", "--N", "3", "--k", "2..3", "--max-seconds", "0.001", "--out", str(out)],
    )
    assert result.exit_code == EXIT_OK
    table = pd.read_csv(out)
    assert list(table.columns) == ["k", "d_max", "reg_predicted", "reg_computed", "seconds"]
    assert table["k"].tolist() == [2, 3]
    assert table["d_max"].tolist() == [5, 9]
    assert "adjusted slope" in result.output
    assert table["reg_predicted"].tolist() == [8, 13]
    computed = table["reg_computed"].dropna().tolist()
    assert all(c in (8, 13) for c in computed)


def test_scan_rejects_empty_range(runner):
    result = runner.invoke(cli, ["scan", "--n", "1", "--N", "3", "--k", "5..2"])
    assert result.exit_code == EXIT_USAGE


def test_command_config_parses_sequences_and_ranges():
    config = CommandConfig(
        subcommand="verify", n=1, N=2, k=2, d=1, expect_seq="(3, 5, 6, 7)"
    )
    assert config.expect_seq == [3, 5, 6, 7]
    scan_config = CommandConfig(subcommand="scan", n=1, N=3, k_range="2-6")
    assert scan_config.k_range == (2, 6)
    assert scan_config.format == "ascii"
    assert config.format == "json"
    assert scan_config.max_seconds == 30.0


def test_command_config_requires_shape():
    with pytest.raises(ValueError):
        CommandConfig(subcommand="construct", n=1, k=1, d=0)


def test_service_construct_result():
    config = CommandConfig(subcommand="construct", n=1, N=2, k=1, d=0)
    result = LateRegService().construct(config)
    assert result.ring == RingContext(1, 2)
    assert len(result.generators) == 5
    assert result.embedding == ["e0 -> y1"]
    assert len(result.export(ExportFormat.TEXT).splitlines()) == 5
