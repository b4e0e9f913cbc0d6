import csv
import io
import json

import numpy as np
import pytest

from odeco_spectra.cli import main
from odeco_spectra.serialization import write_tensor_file
from odeco_spectra.tensor_core import materialize, random_odeco


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_count_333(capsys):
    code, out, _ = run(capsys, "count", "--shape", "3,3,3")
    assert code == 0
    assert json.loads(out) == {"type1": 31, "type1_real": 31, "type2": 6, "dim": 0, "generic": 37}


def test_count_233_vertices(capsys):
    _, out, _ = run(capsys, "count", "--shape", "2x3x3")
    assert json.loads(out)["vertices"] == 2


def test_count_text(capsys):
    code, out, _ = run(capsys, "count", "--shape", "2,2,2,2", "--format", "text")
    assert code == 0 and "type1_real" in out and "10" in out


def test_formats_k0(capsys):
    _, out, _ = run(capsys, "formats", "--k", "0")
    assert len(json.loads(out)["formats"]) == 3


def test_formats_csv(capsys):
    _, out, _ = run(capsys, "formats", "--k", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["format"]: int(r["generic"]) for r in rows}["2x3x3"] == 15


def test_complex_dot(capsys, tmp_path):
    dest = tmp_path / "c.dot"
    code, out, _ = run(capsys, "complex", "--shape", "2,3,3", "--format", "dot", "--output", str(dest))
    assert code == 0 and out == ""
    text = dest.read_text()
    assert text.count(" -- ") == 6


def test_enumerate_with_fixture(capsys):
    _, out, _ = run(capsys, "enumerate", "--fixture", "example22")
    obj = json.loads(out)
    assert len(obj["type1"]) == 6 and len(obj["type2"]) == 5
    assert obj["type1"][0]["tuple"]["kind"] == "fixed"


def test_enumerate_real_only(capsys):
    _, out, _ = run(capsys, "enumerate", "--shape", "2,2,2,2", "--real-only")
    assert len(json.loads(out)["type1"]) == 10


def test_verify(capsys, tmp_path):
    path = tmp_path / "o.json"
    write_tensor_file(path, random_odeco((2, 3, 3), 4))
    code, out, _ = run(capsys, "verify", "--input", str(path), "--format", "json")
    assert code == 0 and json.loads(out)["failures"] == 0


def test_perturb_csv(capsys):
    code, out, _ = run(capsys, "perturb", "--fixture", "example22", "--eps", "1e-6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 13
    assert sum(int(r["members"]) for r in rows) == 15


def test_decompose(capsys, tmp_path):
    od = random_odeco((2, 3, 4), 9)
    path = tmp_path / "d.json"
    write_tensor_file(path, materialize(od))
    code, out, _ = run(capsys, "decompose", "--input", str(path))
    assert code == 0
    np.testing.assert_allclose(sorted(json.loads(out)["sigmas"]), sorted(od.sigmas), atol=1e-8)


def test_decompose_not_odeco_exit_2(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"shape": [3, 3, 3],
                                "entries": np.random.default_rng(1).standard_normal(27).tolist()}))
    code, _, err = run(capsys, "decompose", "--input", str(path))
    assert code == 2 and "residual floor" in err


@pytest.mark.parametrize("argv", [
    ["count", "--shape", "2,1,3"],
    ["count"],
    ["formats"],
    ["complex", "--shape", "2,3,3", "--format", "csv"],
    ["enumerate", "--fixture", "nope"],
    ["enumerate", "--fixture", "example22", "--shape", "2,3,3"],
])
def test_validation_exit_1(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err.startswith("error:")


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_deterministic(capsys):
    a = run(capsys, "perturb", "--fixture", "example22", "--starts", "50", "--seed", "3")[1]
    b = run(capsys, "perturb", "--fixture", "example22", "--starts", "50", "--seed", "3")[1]
    assert a == b
