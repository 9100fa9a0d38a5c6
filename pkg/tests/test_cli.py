import json
import shutil
import subprocess

import pytest

from foldcoh.cli import main
from foldcoh.documents import SAFE_INT, dec, dumps, enc, loads, model_from_doc, model_to_doc

P0_DOC = {"a": 1, "b": 2, "bprime": 0, "A": [[1], [1]], "H": [[0, 1], [1, 0]]}
P0_PIPELINE = {
    **P0_DOC,
    "pipeline": {
        "base": {"l_list": [2], "m": 7, "n": 4},
        "spheres": [{"id": 1, "base_class": [1]}, {"id": 2, "base_class": [1]}],
        "crossings": [{"pair": [1, 2], "sign": 1}],
        "point_count": 0,
    },
}


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def p0_file(tmp_path):
    return write(tmp_path / "p0.json", P0_DOC)


@pytest.fixture
def p0_model(tmp_path, p0_file):
    out = tmp_path / "m5.json"
    assert main(["build", "--theorem", "5", "--params", p0_file, "--out", str(out)]) == 0
    return out


def test_build_reports_homology(p0_model):
    doc = loads(p0_model.read_text())
    assert doc["homology"] == [1, 0, 3, 2, 2, 3, 0, 1]
    assert doc["findings"] == []
    assert doc["verdicts"]["special_generic_obstruction"]["reasons"] == ["a_matrix_nonzero", "H_nonzero"]


def test_build_empty_params(tmp_path):
    src = write(tmp_path / "e.json", {})
    out = tmp_path / "e5.json"
    assert main(["build", "--theorem", "5", "--params", src, "--out", str(out)]) == 0
    assert loads(out.read_text())["homology"] == [1, 0, 0, 0, 0, 0, 0, 1]


def test_build_asymmetric_h_is_input_error(tmp_path, capsys):
    src = write(tmp_path / "bad.json", {**P0_DOC, "H": [[0, 1], [2, 0]]})
    assert main(["build", "--theorem", "5", "--params", src, "--out", str(tmp_path / "x.json")]) == 2
    assert "H" in capsys.readouterr().err


def test_build_unknown_key_is_named(tmp_path, capsys):
    src = write(tmp_path / "bad.json", {**P0_DOC, "hh": 1})
    assert main(["build", "--theorem", "5", "--params", src]) == 2
    assert "'hh'" in capsys.readouterr().err


def test_build_non_integer_entry_is_named(tmp_path, capsys):
    src = write(tmp_path / "bad.json", {**P0_DOC, "A": [["x"], [1]]})
    assert main(["build", "--theorem", "5", "--params", src]) == 2
    assert "'A'" in capsys.readouterr().err


def test_verify_built_report(p0_model):
    assert main(["verify", str(p0_model)]) == 0


def test_round_trip_is_byte_identical(p0_model):
    text = p0_model.read_text()
    assert dumps(model_to_doc(model_from_doc(loads(text)))) == text


def test_verify_broken_associativity(p0_model, capsys):
    doc = loads(p0_model.read_text())
    for t in doc["structure_constants"]:
        if t[0] == 2 and t[2] == 2:
            t[-1] += 1
            break
    p0_model.write_text(dumps(doc))
    assert main(["verify", str(p0_model)]) == 1
    assert "ring:" in capsys.readouterr().out


def test_verify_truncated_file(p0_model):
    text = p0_model.read_text()
    p0_model.write_text(text[: len(text) // 2])
    assert main(["verify", str(p0_model)]) == 2


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.json")]) == 2


def test_surgery_reproduces_reference(tmp_path, p0_model, capsys):
    pipe = write(tmp_path / "pipe.json", P0_PIPELINE)
    out = tmp_path / "rec.json"
    assert main(["surgery", "--pipeline", pipe, "--reference", str(p0_model), "--out", str(out)]) == 0
    assert "reproduces" in capsys.readouterr().out
    assert loads(out.read_text())["manifold_rank"] == [1, 0, 3, 2, 2, 3, 0, 1]


def test_surgery_wrong_signed_sum(tmp_path, capsys):
    doc = json.loads(json.dumps(P0_PIPELINE))
    doc["pipeline"]["crossings"][0]["sign"] = -1
    doc["pipeline"]["target_H"] = [[0, 1], [1, 0]]
    pipe = write(tmp_path / "pipe.json", doc)
    assert main(["surgery", "--pipeline", pipe, "--out", str(tmp_path / "r.json")]) == 1
    assert "validator:" in capsys.readouterr().out


def test_surgery_empty_pipeline_echoes_base(tmp_path):
    pipe = write(tmp_path / "pipe.json", {"pipeline": {"base": {"l_list": [2]}}})
    out = tmp_path / "r.json"
    assert main(["surgery", "--pipeline", pipe, "--out", str(out)]) == 0
    assert loads(out.read_text())["manifold_rank"] == [1, 0, 1, 0, 0, 1, 0, 1]


def test_analyze_modes(p0_file, p0_model, tmp_path, capsys):
    assert main(["analyze", "--mode", "obstruction", p0_file]) == 0
    assert capsys.readouterr().out.strip() == "obstructed: a_matrix_nonzero, H_nonzero"
    assert main(["analyze", "--mode", "isotropy", "--bound", "3", str(p0_model)]) == 0
    assert "max isotropic rank 1" in capsys.readouterr().out
    assert main(["analyze", "--mode", "square", "--coeffs", "1,0,0", str(p0_model)]) == 0
    assert capsys.readouterr().out.strip() == "square: 0"
    m1 = tmp_path / "m1.json"
    assert main(["build", "--theorem", "1", "--params", p0_file, "--out", str(m1)]) == 0
    assert main(["analyze", "--mode", "compare", "--bound", "3", str(p0_model), str(m1)]) == 0
    assert "distinct:" in capsys.readouterr().out


def test_analyze_input_errors(p0_model):
    assert main(["analyze", "--mode", "square", str(p0_model)]) == 2
    assert main(["analyze", "--mode", "square", "--coeffs", "1", str(p0_model)]) == 2
    assert main(["analyze", "--mode", "compare", str(p0_model)]) == 2
    assert main(["analyze", "--mode", "locus", "--bound", "0", str(p0_model)]) == 2
    assert main(["analyze", "--mode", "nonsense", str(p0_model)]) == 2


def test_roundmap(capsys):
    assert main(["roundmap", "--l", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["fiber_counts"] == [2, 1, 0]
    assert main(["roundmap", "--counts", "3,1,0"]) == 1
    assert main(["roundmap"]) == 2


def test_large_integers_become_strings():
    big = SAFE_INT + 1
    assert enc(big) == str(big) and enc(SAFE_INT) == SAFE_INT
    assert dec(str(big), "x") == big


def test_console_script(tmp_path, p0_file):
    exe = shutil.which("foldcoh")
    if exe is None:
        pytest.skip("console script not installed")
    res = subprocess.run([exe, "roundmap", "--l", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and '"fiber_counts": [1, 0]' in res.stdout
