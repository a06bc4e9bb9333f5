import csv
import hashlib
import io
import json

import pytest

from stoplight.cli import parse_probability, run
from stoplight.errors import ValidationError
from fractions import Fraction


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_maxdist_exact_json(capsys):
    code, out, _ = call(capsys, "maxdist", "--p", "1/3", "--ell", "1", "--n", "4",
                        "--mode", "exact", "--format", "json")
    assert code == 0
    assert json.loads(out) == {"0": "4/9", "1": "14/27", "2": "1/27"}


def test_maxdist_csv_decimal_input(capsys):
    code, out, _ = call(capsys, "maxdist", "--p", "0.5", "--n", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows == [["a", "probability"], ["0", "1/2"], ["1", "1/2"]]


def test_jointdist(capsys):
    code, out, _ = call(capsys, "jointdist", "--p", "1/3", "--n", "2")
    entries = {(e["x"], e["a"]): e["probability"] for e in json.loads(out)["entries"]}
    assert entries == {(0, 0): "2/3", (0, 1): "2/9", (1, 1): "1/9"}


def test_stationary(capsys):
    code, out, _ = call(capsys, "stationary", "--p", "1/3", "--ell", "1", "--xmax", "2")
    assert json.loads(out) == [0.75, 0.1875, 0.046875]


def test_gf_check(capsys):
    code, out, _ = call(capsys, "gf-check", "--p", "1/3", "--a", "1", "--terms", "25")
    assert (code, out.strip()) == (0, "PASS: 25/25 coefficients match DP")


def test_ell2_verify(capsys):
    code, out, _ = call(capsys, "ell2-verify", "--p", "0.3", "--lambda", "0.25", "--amax", "3")
    report = json.loads(out)
    assert code == 0 and report["status"] == "PASS"
    assert report["printed_g02"] < 0


def test_asymptotics_constants(capsys):
    code, out, _ = call(capsys, "asymptotics")
    c = json.loads(out)["constants"]
    assert c["catalan"] == pytest.approx(0.915965594177219)


@pytest.mark.parametrize("argv,expected", [
    (["maxdist", "--p", "2/3", "--n", "3"], 1),
    (["maxdist", "--p", "abc", "--n", "3"], 1),
    (["stationary", "--p", "1/2"], 1),
    (["simulate", "--n", "5", "--seed", "-4"], 1),
    (["maxdist", "--n", "3", "--bogus"], 64),
    (["frobnicate"], 64),
    ([], 64),
])
def test_exit_codes(capsys, argv, expected):
    assert call(capsys, *argv)[0] == expected


def test_numeric_failure_exit(capsys, monkeypatch):
    import stoplight.cli as cli
    from stoplight.errors import NumericFailure

    def boom(args):
        raise NumericFailure("singular")
    monkeypatch.setattr(cli, "cmd_stationary", boom)
    assert call(capsys, "stationary")[0] == 2


def test_parse_probability_is_exact():
    assert parse_probability("0.1") == Fraction(1, 10)
    assert parse_probability(" 3/7 ") == Fraction(3, 7)
    with pytest.raises(ValidationError):
        parse_probability("1/0")


@pytest.mark.parametrize("argv", [
    ["simulate", "--p", "1/2", "--n", "300", "--reps", "3000", "--seed", "17"],
    ["universality", "--p", "1/2", "--ells", "1,2", "--n", "200", "--reps", "2048", "--seed", "17",
     "--format", "csv"],
])
def test_outputs_are_byte_identical(tmp_path, argv):
    digests = []
    for k in range(2):
        out = tmp_path / f"run{k}.out"
        assert run(argv + ["--out", str(out)]) == 0
        data = out.read_bytes()
        manifest = json.loads((tmp_path / f"run{k}.out.manifest.json").read_text())
        assert manifest["sha256"] == hashlib.sha256(data).hexdigest()
        assert manifest["seed"] == 17 and manifest["command"] == argv[0]
        digests.append(data)
    assert digests[0] == digests[1]


def test_workers_do_not_change_simulate_output(capsys):
    base = ["simulate", "--p", "1/3", "--n", "50", "--reps", "5000", "--seed", "1"]
    _, one, _ = call(capsys, *base)
    _, many, _ = call(capsys, *base, "--workers", "3")
    assert one == many
