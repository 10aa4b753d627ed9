import json
from importlib import resources

import jsonschema
import pytest

from bloch_k2.cli import (EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, EXIT_TOLERANCE,
                          EXIT_UNSUPPORTED, main)

SCHEMA = json.loads(resources.files("bloch_k2").joinpath("data/report.schema.json").read_text())


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def _json(capsys, *argv):
    code, out = _run(capsys, *argv)
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["exit_code"] == code
    return code, report


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)
    return write


def test_dilog(capsys):
    code, rep = _json(capsys, "dilog", "--z", "0.5+0.5i", "--digits", "30")
    assert code == EXIT_OK
    assert rep["digits"] == 30
    assert rep["result"]["li2"]["re"].startswith("0.45398526915029558331")
    assert not rep["result"]["on_cut"]


def test_dilog_bad_input(capsys):
    code, rep = _json(capsys, "dilog", "--z", "zz")
    assert code == EXIT_INPUT and rep["status"] == "input_error"


def test_digits_env_var(capsys, monkeypatch):
    monkeypatch.setenv("BLOCH_K2_DIGITS", "22")
    _, rep = _json(capsys, "dilog", "--z", "i")
    assert rep["digits"] == 22
    assert main(["dilog", "--z", "i", "--digits", "5"]) == EXIT_INPUT


def test_field_info(capsys, files):
    path = files("f.json", {"poly": [2, 1, 1, 1]})
    code, rep = _json(capsys, "field-info", "--field", path)
    assert code == EXIT_OK
    res = rep["result"]
    assert res["disc"] == -83 and res["signature"] == [1, 1] and res["w2"] == 24


def test_field_info_errors(capsys, files):
    code, rep = _json(capsys, "field-info", "--field", files("r.json", {"poly": [-1, 0, 1]}))
    assert code == EXIT_INPUT
    code, rep = _json(capsys, "field-info", "--field", files("n.json", {"poly": [-8, 0, 1]}))
    assert code == EXIT_UNSUPPORTED and rep["status"] == "unsupported_field"
    code, _ = _json(capsys, "field-info", "--field", files("d.json", {"poly": [5, 0, 1]}))
    assert code == EXIT_OK
    code, _ = _json(capsys, "field-info", "--field", "/nonexistent/f.json")
    assert code == EXIT_INPUT


def test_verify_bloch(capsys, files):
    field = files("f.json", {"poly": [2, 1, 1, 1]})
    good = files("e.json", {"elements": ["4*[a] + 1*[a-1]"]})
    code, rep = _json(capsys, "verify-bloch", "--field", field, "--elements", good)
    assert code == EXIT_OK
    assert rep["result"]["certificates"][0]["status"] == "VERIFIED_ZERO"
    mixed = files("m.json", {"elements": ["4*[a] + 1*[a-1]", "[2]"]})
    code, rep = _json(capsys, "verify-bloch", "--field", field, "--elements", mixed)
    assert code == EXIT_INCONCLUSIVE
    bad = files("b.json", {"elements": ["[1]"]})
    code, _ = _json(capsys, "verify-bloch", "--field", field, "--elements", bad)
    assert code == EXIT_INPUT


def test_zeta2(capsys, files):
    field = files("f.json", {"poly": [2, 1, 1, 1]})
    code, rep = _json(capsys, "zeta2", "--field", field, "--terms", "20000")
    assert code == EXIT_OK
    assert rep["result"]["terms_used"] == 20000
    assert main(["zeta2", "--field", field, "--terms", "10"]) == EXIT_INPUT
    assert "terms must be" in capsys.readouterr().err


def test_k2_predict(capsys, files):
    field = files("f.json", {"poly": [2, 1, 1, 1]})
    elems = files("e.json", {"elements": ["4*[a] + 1*[a-1]"]})
    code, rep = _json(capsys, "k2-predict", "--field", field, "--elements", elems,
                      "--terms", "200000")
    assert code == EXIT_OK
    assert rep["result"]["nearest_integer"] == 4 and rep["result"]["status"] == "CONSISTENT"
    uncertified = files("u.json", {"elements": ["[a]"]})
    code, _ = _json(capsys, "k2-predict", "--field", field, "--elements", uncertified,
                    "--terms", "2000")
    assert code == EXIT_INPUT


def test_cyclo(capsys):
    code, rep = _json(capsys, "cyclo", "--p", "7")
    assert code == EXIT_OK
    code, rep = _json(capsys, "cyclo", "--p", "5", "--check", "theorem33", "--k2-plus", "4")
    assert code == EXIT_OK and rep["result"]["input_consistent"]
    code, rep = _json(capsys, "cyclo", "--p", "3", "--check", "theorem33", "--k2-plus", "1")
    assert code == EXIT_TOLERANCE
    code, _ = _json(capsys, "cyclo", "--p", "5", "--check", "theorem33")
    assert code == EXIT_INPUT
    code, _ = _json(capsys, "cyclo", "--p", "9")
    assert code == EXIT_INPUT


def test_text_format_and_output_file(capsys, tmp_path):
    out = tmp_path / "r.txt"
    code, text = _run(capsys, "dilog", "--z", "i", "--format", "text", "--output", str(out))
    assert code == EXIT_OK
    assert "result.bloch_wigner: 0.91596559417721901505" in text
    assert out.read_text() == text


def test_argparse_rejects_unknown_command(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
