import subprocess
import sys

import pytest

from irv_commlab.ballots import parse_profile
from irv_commlab.cli import main
from irv_commlab.fooling import FoolingSpec, canonical_fooling_profile

from conftest import DATA


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_tally_worked_example(capsys):
    code, out, _ = run(capsys, "tally", DATA / "p_fooling.profile", "--trace")
    assert code == 0
    assert out.splitlines() == [
        "winner: 0",
        "round 1: eliminated 2 | 0=2 1=2 2=2",
        "round 2: eliminated 1 | 0=3 1=3",
    ]
    code, out, _ = run(capsys, "tally", DATA / "q_fooling.profile")
    assert out == "winner: 0\n"


def test_tally_rules(capsys):
    assert run(capsys, "tally", DATA / "stv_m4_k2.profile", "--rule", "stv", "-k", 2)[1] == "winners: 0 1\n"
    assert run(capsys, "tally", DATA / "p_fooling.profile", "--tiebreak", "higher")[1] == "winner: 2\n"
    assert run(capsys, "tally", DATA / "p_fooling.profile", "--tiebreak", "1,0,2")[1] == "winner: 1\n"
    code, out, _ = run(capsys, "tally", DATA / "p_fooling.profile", "--rule", "irv-average",
                       "--exception", "declare-smallest-index-winner")
    assert (code, out) == (0, "winner: 0\n")


def test_tally_structured(capsys):
    code, out, _ = run(capsys, "--format", "structured", "tally", DATA / "single_peaked_18.profile")
    assert out.splitlines() == ["format: irv-commlab/1", "rule: irv", "m: 5", "n: 18", "winner: 3"]


def test_protocol_outputs(capsys):
    code, out, _ = run(capsys, "protocol", DATA / "single_peaked_18.profile", "--sp", "--check-bounds")
    assert (code, out) == (0, "winner: 3, bits: 61, bounds: ok\n")
    code, out, _ = run(capsys, "protocol", DATA / "p_fooling.profile")
    assert out == "winner: 0, bits: 14\n"
    code, out, _ = run(capsys, "protocol", DATA / "stv_m4_k2.profile", "-k", 2, "--check-bounds")
    assert out.startswith("winners: 0 1, bits: ") and out.endswith("bounds: ok\n")


def test_protocol_transcript(capsys):
    code, out, _ = run(capsys, "protocol", DATA / "single_peaked_18.profile", "--sp", "--transcript")
    lines = out.splitlines()
    assert lines[1] == "format: irv-commlab-transcript/1"
    assert "protocol: sp-ppr" in lines
    assert lines[-1] == "total_bits: 61"
    assert sum(" kind=direction " in l for l in lines) == 7


def test_protocol_rejects_non_single_peaked(capsys):
    code, _, err = run(capsys, "protocol", DATA / "p_fooling.profile", "--sp")
    assert code == 2
    assert "voter 0 is not single-peaked: 1 ranked below 0 and 2" in err


def test_bad_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.profile"
    bad.write_text("0 > 0 > 1\n")
    assert run(capsys, "tally", bad)[0] == 2
    assert run(capsys, "tally", tmp_path / "missing.profile")[0] == 2
    assert run(capsys, "tally", DATA / "p_fooling.profile", "--rule", "stv", "-k", 3)[0] == 2
    assert run(capsys, "tally", DATA / "p_fooling.profile", "--tiebreak", "0,0,1")[0] == 2
    assert run(capsys, "fooling", "count", "--family", "sp", "-m", 6, "-l", 3)[0] == 2
    with pytest.raises(SystemExit):
        main(["tally"])


def test_fooling_count(capsys):
    assert run(capsys, "fooling", "count", "-m", 3)[1] == "|F| = 180, ln = 5.192956851\n"
    assert run(capsys, "fooling", "count", "--family", "sp", "-m", 2, "-l", 3)[1].startswith("|F| = 20,")
    code, out, _ = run(capsys, "--format", "structured", "fooling", "count", "-m", 3)
    assert "cardinality: 180" in out.splitlines()
    code, out, _ = run(capsys, "fooling", "count", "-m", 300)
    assert code == 0 and "too large" in out and "overflow" in out


def test_fooling_emit_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "fooling", "emit", "--family", "sp", "-m", 4, "-l", 3)
    assert parse_profile(out) == canonical_fooling_profile(FoolingSpec("sp", 4, 3))
    target = tmp_path / "f.profile"
    run(capsys, "fooling", "emit", "-m", 3, "--tiebreak-voters", "-l", 7, "--ungrouped", "-o", target)
    spec = FoolingSpec("irv", 3, 7, tiebreak_voters=True)
    assert parse_profile(target.read_text()) == canonical_fooling_profile(spec)


def test_fooling_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "fooling", "verify", "-m", 3, "--exhaustive")
    assert (code, out) == (0, "180 profiles, 16110 pairs, 0 failures\n")
    code, out, _ = run(capsys, "fooling", "verify", "--family", "stv", "-m", 3, "-k", 2, "--exhaustive")
    assert code == 1
    assert out.splitlines()[0] == "180 profiles, 16110 pairs, 90 failures"


def test_fooling_verify_structured_is_deterministic(capsys):
    argv = ["--format", "structured", "fooling", "verify", "--family", "sp", "-m", 4, "-l", 3,
            "--samples", 40, "--seed", 5, "--no-timing"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == 0
    assert first[1].startswith("format: irv-commlab-fooling-report/1\n")
    assert "seconds" not in first[1]


def test_asymptotics_csv(capsys):
    code, out, _ = run(capsys, "asymptotics", "--ms", "8,1024")
    rows = [l.split(",") for l in out.splitlines()]
    assert rows[0] == ["m", "n", "ln_F", "finite_sum", "leading_term",
                       "ratio_exact_to_leading", "ratio_finite_to_leading"]
    assert rows[1][:2] == ["8", "40320"]
    assert float(rows[2][5]) < float(rows[1][5])
    assert "e2639" in rows[2][1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "irv_commlab", "fooling", "count", "-m", "3"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.startswith("|F| = 180")
