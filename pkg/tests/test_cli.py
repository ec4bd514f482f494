import io
import json
import subprocess
import sys

import pytest

from qbent.boolfn import BoolFunc, parse_anf
from qbent.cli import COMMANDS, build_parser, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    text = buf.getvalue()
    return code, (json.loads(text) if text.startswith("{") else text)


def raw(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def test_rho_flags_table_cell():
    code, rep = call("rho", "--n", "4", "--wt", "7")
    assert code == 0
    assert rep["schema_version"] == "1" and rep["command"] == "rho"
    assert rep["result"]["rho"] == 5
    assert rep["discrepancies"] and "2" in rep["discrepancies"][0]
    assert rep["timing"] is None


def test_rho_reports_exact_ratio():
    code, rep = call("rho", "--n", "9", "--wt", "256")
    assert rep["result"]["rho"] == 23
    assert rep["result"]["ratio"] == {"num": "262144", "den": "511"}
    assert rep["result"]["exact"] is False
    assert rep["discrepancies"] == ["table2 cell n=9: printed rho 24, computed 23"]


def test_stabilizer_command():
    code, rep = call("stabilizer", "--anf", "x1*x2+x3", "--n", "3")
    assert code == 0
    assert rep["result"]["orbit_size"] == 28
    assert len(rep["result"]["matrices"]) == 6
    assert "111;010;001" in rep["result"]["matrices"]


def test_verify_thm3_exit_zero():
    code, rep = call("verify", "--claim", "thm3", "--n", "3")
    assert code == 0
    assert rep["result"]["verdict"]["kind"] == "FoundWitnesses"


def test_verify_expected_none_exist():
    code, rep = call("verify", "--claim", "thm4", "--n", "3")
    assert code == 0 and rep["result"]["verdict"]["kind"] == "VerifiedNoneExist"


def test_refutation_sets_exit_one():
    code, rep = call("verify", "--claim", "thm5", "--n", "4", "--orbit-reduce")
    assert code == 1
    assert rep["result"]["verdict"]["kind"] == "Refuted"
    assert rep["result"]["verdict"]["details"]["counterexamples"]


def test_conjecture_exit_codes():
    code, rep = call("conjecture", "--n", "3")
    assert code == 0 and rep["result"]["verdict"]["kind"] == "VerifiedNoneExist"
    code, rep = call("conjecture", "--n", "4", "--wt-min", "4", "--wt-max", "4", "--orbit-reduce")
    assert code == 1 and rep["result"]["verdict"]["kind"] == "Refuted"


@pytest.mark.parametrize(
    "argv",
    [
        ["parse", "--anf", "x1+", "--n", "3"],
        ["parse", "--anf", "x9", "--n", "3"],
        ["parse", "--tt-hex", "1E0", "--n", "3"],
        ["parse", "--n", "3"],
        ["parse", "--anf", "x1", "--tt-hex", "1E", "--n", "3"],
        ["coeff", "--anf", "x1", "--q-anf", "x2", "--n", "3", "--matrix", "110;110;001"],
        ["coeff", "--anf", "x1", "--q-anf", "x2", "--n", "3", "--matrix", "10;01"],
        ["spectrum", "--anf", "x1", "--q-anf", "x2", "--n", "6"],
        ["check-q-bent", "--anf", "x1", "--q-anf", "x1*x2", "--n", "4"],
        ["verify", "--claim", "nope"],
        ["rho", "--n", "2", "--wt", "1"],
        ["table1", "--format", "xml"],
        ["parse", "--anf", "x1", "--n", "3", "--format", "csv"],
        ["no-such-command"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, out = raw(*argv)
    assert code == 2 and out == ""
    assert capsys.readouterr().err


def test_parse_error_names_token(capsys):
    assert run(["parse", "--anf", "x1*y2", "--n", "3"], out=io.StringIO()) == 2
    err = capsys.readouterr().err
    assert "parse error" in err and "'y'" in err


def test_function_echo_round_trips():
    code, rep = call("check-nearly-bent", "--anf", "x3", "--q-tt-hex", "1E", "--n", "3")
    assert code == 0 and rep["result"]["holds"] is True
    for key in ("f", "q"):
        echo = rep["inputs"][key]
        assert BoolFunc.from_hex(echo["tt_hex"], 3) == parse_anf(echo["anf"], 3)
    assert rep["inputs"]["q"]["anf"] == "x1*x2+x3"


def test_anf_and_parse_commands():
    code, rep = call("anf", "--tt-hex", "1E", "--n", "3")
    assert rep["inputs"]["f"]["anf"] == "x1*x2+x3"
    code, rep = call("parse", "--anf", "x1*x2+x3", "--n", "3")
    assert rep["inputs"]["f"]["tt_hex"] == "1E"


def test_coeff_and_spectrum():
    code, rep = call("coeff", "--anf", "x1*x2+x3", "--q-anf", "x1*x2+x3", "--n", "3", "--matrix", "100;010;001")
    assert code == 0 and rep["result"]["coefficient"] == 8
    code, rep = call("spectrum", "--anf", "x3", "--q-anf", "x1*x2+x3", "--n", "3")
    assert rep["result"]["histogram"] == {"-4": 24, "0": 72, "4": 72}
    code, rep = call("spectrum", "--anf", "x3", "--q-anf", "x1*x2+x3", "--n", "8", "--samples", "50")
    assert code == 0 and sum(rep["result"]["histogram"].values()) == 50


def test_moments_rationals_are_strings():
    code, rep = call("moments", "--anf", "x3", "--q-anf", "x1*x2+x3", "--n", "3")
    assert code == 0
    r = rep["result"]
    assert r["sum_sq"] == 1536 and r["eq1_holds"] and r["eq2_holds"]
    assert r["eprime"] == {"num": "64", "den": "7"}


def test_check_commands():
    code, rep = call("check-bent", "--anf", "x1*x2+x3*x4", "--n", "4")
    assert code == 0 and rep["result"]["bent"] is True
    code, rep = call("check-q-bent", "--anf", "x1*x2+x3*x4", "--q-anf", "x1", "--n", "4")
    assert code == 0 and rep["result"]["holds"] is True
    code, rep = call("check-plateaued", "--tt-hex", "C0", "--q-anf", "x1*x2+x3", "--n", "3")
    assert rep["result"]["plateaued"] is True and rep["result"]["lambda"] == 4


def test_table_formats():
    code, rep = call("table2", "--no-reverify")
    assert code == 0
    assert any("n=9" in d for d in rep["discrepancies"])
    assert "printed_rho" not in rep["result"]["cells"][0]
    code, rep = call("table2", "--no-reverify", "--paper-values")
    assert rep["result"]["cells"][0]["printed_rho"] == 4
    code, text = raw("table1", "--format", "csv")
    lines = text.splitlines()
    assert code == 0 and lines[0].startswith("n,wt_q,rho")
    assert len(lines) == 1 + len(call("table1")[1]["result"]["cells"])
    code, text = raw("table1", "--format", "text")
    assert "discrepancy: table1 n=4 wt=7" in text


def test_timing_only_on_request():
    code, rep = call("rho", "--n", "5", "--wt", "3", "--timing")
    assert isinstance(rep["timing"]["elapsed_ms"], int)


def test_reports_repeat_byte_for_byte():
    argv = ["verify", "--claim", "thm6", "--samples", "5", "--seed", "3"]
    assert raw(*argv) == raw(*argv)
    assert raw(*argv, "--threads", "1") == raw(*argv, "--threads", "8")


def test_every_command_has_help():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    assert set(sub.choices) == set(COMMANDS)
    for name, p in sub.choices.items():
        assert p.description and len(p.description) > 20, name
    assert raw("rho", "--help")[0] == 0


def test_verbose_progress_goes_to_stderr(capsys):
    code, out = raw("conjecture", "--n", "3", "-v")
    err = capsys.readouterr().err
    assert "candidates/s" in err
    assert "candidates/s" not in out
    json.loads(out)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qbent", "rho", "--n", "3", "--wt", "2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["rho"] == 3
