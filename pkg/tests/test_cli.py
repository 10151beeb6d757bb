import json

import pytest

from src.errors import ConfigError
from src.handlers.command_handler import RunConfig, parse_entry
from src.main import main
from src.models import Command
from tests.conftest import DATA

PROGRAMS = DATA / "programs"
CERTS = DATA / "certificates"
DISTS = DATA / "distributions"


def run(capsys, *argv):
    status = main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_parse_prints_labelled_program(capsys):
    status, out, _ = run(capsys, "parse", PROGRAMS / "random_walk.prog")
    assert status == 0
    assert "  1: if n >= 1 then" in out
    assert "sample r, s;" in out


def test_cfg_dump(capsys):
    status, out, _ = run(capsys, "cfg", PROGRAMS / "random_walk.prog")
    assert status == 0
    assert "g: (2, n := n + s, 1)" in out


def test_check_passes(capsys):
    status, out, _ = run(
        capsys, "check", PROGRAMS / "recursive_running.prog", "--cert", CERTS / "recursive_running.cert",
        "--dist", DISTS / "recursive_running.dist", "--box", "n=-20..20", "--kind", "cdb",
    )
    assert status == 0
    assert "== verdict ==" in out
    assert "== cdb conditions ==" in out
    assert "counterexample" not in out


def test_check_failure_reports_counterexample(capsys):
    status, out, _ = run(
        capsys, "check", PROGRAMS / "bounded_refutation.prog", "--cert", CERTS / "bounded_refutation_weak.cert",
        "--box", "i=0..4,n=0..4,c=0..1",
    )
    assert status == 1
    assert "C2 fails at (main, 10," in out


def test_check_super_with_overridden_delta(capsys):
    status, out, _ = run(
        capsys, "check", PROGRAMS / "recursive_running.prog", "--cert", CERTS / "recursive_running.cert",
        "--dist", DISTS / "recursive_running.dist", "--box", "n=-10..10", "--kind", "super", "--delta", "2",
    )
    assert status == 1
    assert "D2(delta) fails at (f, 6," in out
    assert "== step bounds ==" in out


def test_check_json_with_tight_parameters(capsys):
    status, out, _ = run(
        capsys, "check", PROGRAMS / "random_walk.prog", "--cert", CERTS / "random_walk.cert",
        "--dist", DISTS / "random_walk.dist", "--box", "n=-10..10", "--kind", "super", "--tight", "--format", "json",
    )
    assert status == 0
    document = json.loads(out)
    assert document["header"]["kind"] == "super"
    assert len(document["header"]["certificate"]) == 64
    sections = {section["title"]: section["content"] for section in document["sections"]}
    assert sections["verdict"][0]["verdict"] == "pass"
    assert sections["step bounds"] == [{"function": "f", "K_max": 2}, {"function": "g", "K_max": 1}]
    assert sections["tight parameters"][0]["max_super_delta"] == "1"


def test_bounds(capsys):
    status, out, _ = run(
        capsys, "bounds", PROGRAMS / "recursive_running.prog", "--cert", CERTS / "recursive_running.cert",
        "--dist", DISTS / "recursive_running.dist", "--box", "n=-20..20",
        "--kind", "cdb", "--entry", "f", "--args", "n=5", "--k", "112", "--format", "csv",
    )
    assert status == 0
    assert "upper_expected,,56," in out
    assert "lower_expected,,56/13," in out
    assert "markov_tail,112,0.5,P(T >= k)" in out


def test_bounds_refused_for_failing_certificate(capsys):
    status, out, _ = run(
        capsys, "bounds", PROGRAMS / "bounded_refutation.prog", "--cert", CERTS / "bounded_refutation_weak.cert",
        "--box", "i=0..4,n=0..4,c=0..1", "--entry", "main", "--k", "100",
    )
    assert status == 1
    assert "C2 fails at (main, 10," in out
    assert "upper_expected" not in out
    assert "markov_tail" not in out


def test_check_cdb_just_below_minimal_delta(capsys):
    status, out, _ = run(
        capsys, "check", PROGRAMS / "recursive_running.prog", "--cert", CERTS / "recursive_running.cert",
        "--dist", DISTS / "recursive_running.dist", "--box", "n=-100..100", "--kind", "cdb", "--delta", "1299/100",
    )
    assert status == 1
    assert "== cdb counterexample ==" in out
    assert any(f"{name} fails at (" in out for name in ("C6(i)", "C7", "C8", "C9"))


def test_simulate_csv(capsys):
    status, out, _ = run(
        capsys, "simulate", PROGRAMS / "random_walk.prog", "--entry", "g", "--args", "n=1",
        "--dist", DISTS / "random_walk.dist", "--runs", "200", "--max-steps", "10000", "--tail", "3,5",
        "--format", "csv", "--seed", "42",
    )
    assert status == 0
    assert "# seed=42" in out
    assert "# tail P(T >= k)" in out
    assert "\n3,1.0," in out


def test_lab_json(capsys):
    status, out, _ = run(capsys, "lab", "--example", "cbounded", "--runs", "2000", "--horizon", "50", "--n", "1,2", "--format", "json")
    assert status == 0
    rows = json.loads(out)["sections"][0]["content"]
    assert [row["query"] for row in rows] == ["prob_nonterm", "expected_T", "tail", "tail"]
    assert rows[2]["analytic"] == 0.5


@pytest.mark.parametrize(
    "argv",
    [
        ["parse", "missing.prog"],
        ["check", PROGRAMS / "random_walk.prog", "--cert", CERTS / "random_walk.cert", "--box", "n=5..1"],
        ["simulate", PROGRAMS / "random_walk.prog", "--entry", "h", "--dist", DISTS / "random_walk.dist"],
        ["simulate", PROGRAMS / "random_walk.prog", "--entry", "g", "--scheduler", "greedy-max", "--dist", DISTS / "random_walk.dist"],
        ["simulate", PROGRAMS / "random_walk.prog", "--entry", "g@3", "--dist", DISTS / "random_walk.dist"],
        ["check", PROGRAMS / "random_walk.prog", "--cert", CERTS / "recursive_running.cert", "--box", "n=0..1"],
        ["bounds", PROGRAMS / "random_walk.prog", "--cert", CERTS / "random_walk.cert", "--entry", "f", "--args", "n=1", "--box", "n=-5..5"],
        ["bounds", PROGRAMS / "recursive_running.prog", "--cert", CERTS / "recursive_running.cert", "--entry", "f"],
        ["lab", "--example", "noconcentration", "--alpha", "0.5"],
        ["check", PROGRAMS / "random_walk.prog"],
        ["frobnicate"],
    ],
)
def test_usage_and_input_errors_exit_2(capsys, argv):
    status, out, _ = run(capsys, *argv)
    assert status == 2
    assert out == ""


def test_version(capsys):
    status, out, _ = run(capsys, "--version")
    assert status == 0
    assert out.startswith("rpt ")


def test_parse_entry(walk):
    _, cfg, _ = walk
    element = parse_entry(cfg, "f@3", "n=7")
    assert (element.fname, element.label, element.valuation) == ("f", 3, {"n": 7})
    assert parse_entry(cfg, "g", "").valuation == {"n": 0}
    for bad in ("m=1", "n", "n=x"):
        with pytest.raises(ConfigError):
            parse_entry(cfg, "g", bad)


def test_run_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(Command.CHECK, program=PROGRAMS / "random_walk.prog").validate()
    with pytest.raises(ConfigError):
        RunConfig(Command.LAB).validate()
    with pytest.raises(ConfigError):
        RunConfig(Command.BOUNDS, program=PROGRAMS / "random_walk.prog", cert=CERTS / "random_walk.cert", entry="f").validate()
    with pytest.raises(ConfigError):
        RunConfig(Command.PARSE, program=tmp_path / "absent.prog").validate()
    assert RunConfig(Command.CFG, program=PROGRAMS / "random_walk.prog").validate().command is Command.CFG
