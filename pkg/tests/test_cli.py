import io
import json

import pytest

from arcperiods.cli import EXIT_DOMAIN, EXIT_PRECISION, EXIT_USAGE, run
from arcperiods.measure_algebra import ExpPolyMeasure
from arcperiods.witt_algebra import WittElement, parse_witt

IOTA = {"atoms": [], "pieces": [{"l": 0, "r": "inf", "terms": [{"coeff": [1, 0], "power": 0, "rate": [0, 0]}]}]}


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def iota_file(tmp_path):
    p = tmp_path / "iota.json"
    p.write_text(json.dumps(IOTA))
    return str(p)


def test_laplace_example(iota_file):
    code, out, _ = cli("measure", "laplace", "--z", "2", iota_file)
    assert code == 0 and json.loads(out) == {"value": 0.5}


def test_theta_example():
    code, out, _ = cli("witt", "theta", "2[3]-[5]")
    assert code == 0 and json.loads(out) == {"value": 1}


def test_grid_example(tmp_path):
    path = tmp_path / "grid.csv"
    code, out, _ = cli("hyper", "grid", "--m", "6", "--kappa", "1/3", "--out", str(path))
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,value" and len(lines) == 101 * 101 + 1
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    # collapse: away from the antidiagonal the value is the dominant coordinate
    far = [(x, y, v) for x, y, v in rows if abs(abs(x) - abs(y)) > 0.2]
    assert max(abs(v - (x if abs(x) > abs(y) else y)) for x, y, v in far) < 1e-3
    anti = [v for x, y, v in rows if x == -y]
    assert max(abs(v) for v in anti) < 1e-12


def test_conv_roundtrip(iota_file):
    code, out, _ = cli("measure", "conv", iota_file, iota_file)
    mu = ExpPolyMeasure.from_json(json.loads(out))
    assert code == 0 and mu == ExpPolyMeasure.from_json(json.loads(out))
    assert mu.to_json() == json.loads(out)


def test_witt_parse_roundtrip():
    code, out, _ = cli("witt", "parse", "2[3]-[5]+[1/2]+[2^(1/3)]")
    assert WittElement.from_json(json.loads(out)) == parse_witt("2[3]-[5]+[1/2]+[2^(1/3)]")


def test_floats_have_17_digits():
    code, out, _ = cli("deform", "sum", "--hbar", "0.5", "1", "1")
    assert '"value": 1.4142135623730949' in out


def test_csv_format():
    code, out, _ = cli("--format", "csv", "witt", "derive", "12")
    assert code == 0 and out.splitlines() == ["prime,component", "2,12", "3,4"]


def test_deterministic():
    a = cli("--seed", "7", "deform", "funeq", "--samples", "5")
    b = cli("--seed", "7", "deform", "funeq", "--samples", "5")
    assert a == b and a[0] == 0


def test_exit_codes(iota_file):
    assert cli("bogus")[0] == EXIT_USAGE
    assert cli("measure", "laplace", iota_file)[0] == EXIT_USAGE
    assert cli("witt", "theta", "[0")[0] == EXIT_DOMAIN
    assert cli("measure", "norm", "--rho", "2", iota_file)[0] == EXIT_DOMAIN
    assert cli("measure", "laplace", "--z", "-1", iota_file)[0] == EXIT_DOMAIN
    code, _, err = cli("--precision", "30", "witt", "rho", "[2^(1/2)]-[2^(1/2)]+[3]")
    assert code == 0


def test_precision_exit_code(tmp_path):
    X = {"basis": [{"label": "a", "value": "2"}, {"label": "b", "value": "2.0000000000000000000000000000000000000000000000000000000000001"}],
         "terms": [{"exp": ["1", "0"], "coeff": "1"}, {"exp": ["0", "1"], "coeff": "1"}]}
    p = tmp_path / "x.json"
    p.write_text(json.dumps(X))
    code, _, err = cli("witt", "rho", str(p))
    assert code == EXIT_PRECISION and "precision" in err


def test_mikusinski_table(iota_file):
    code, out, _ = cli("--format", "csv", "mikusinski", "duhamel", iota_file, iota_file, "--samples", "1,2")
    assert out.splitlines() == ["t,value", "1,0.5", "2,2"]


def test_check_subset():
    code, out, _ = cli("check", "--only", "1", "14")
    assert code == 0
    assert [line.split("[")[1][:4] for line in out.splitlines()] == ["PASS", "PASS"]


def test_help_has_grammar(capsys):
    code, _, _ = cli("--help")
    assert code == 0 and "2[3]-[5]+[1/2]" in capsys.readouterr().out
