import json

import numpy as np
import pytest

from odeco_spectra.errors import ValidationError
from odeco_spectra.serialization import (component_to_dict, dense_to_dict,
                                         odeco_from_dict, odeco_to_dict,
                                         parse_tensor_file, pattern_from_dict,
                                         pattern_to_dict, spec_from_dict,
                                         spec_to_dict, tuple_from_dict,
                                         tuple_to_dict, write_tensor_file)
from odeco_spectra.spectra_enum import enumerate_type1, enumerate_type2, realize_type1
from odeco_spectra.tensor_core import (DenseTensor, OdecoTensor, materialize,
                                       random_odeco)


def test_fixture_S_is_diagonal(example22):
    S, T = example22
    assert S.shape.dims == (2, 3, 3)
    np.testing.assert_array_equal(S.sigmas, [1, 1])
    for V in S.factors:
        np.testing.assert_array_equal(V, np.eye(V.shape[0]))
    np.testing.assert_array_equal(T.data[0], [[0, 40, 10], [100, 3, 3], [3, 2, 6]])
    np.testing.assert_array_equal(T.data[1], [[7, 1, 1], [8, 0, 2], [2, 2, 3]])


def test_dense_round_trip(tmp_path):
    T = DenseTensor.from_array(np.random.default_rng(0).standard_normal((2, 3, 4)))
    path = tmp_path / "t.json"
    write_tensor_file(path, T)
    back = parse_tensor_file(path)
    np.testing.assert_array_equal(back.data, T.data)
    assert json.loads(path.read_text()) == dense_to_dict(T)


def test_odeco_round_trip_canonicalizes(tmp_path):
    od = random_odeco((3, 3, 3), 2)
    od = OdecoTensor(od.shape, od.sigmas * np.array([-1, 1, 1]), od.factors)
    path = tmp_path / "o.json"
    write_tensor_file(path, od)
    back = parse_tensor_file(path)
    assert back.is_canonical
    np.testing.assert_allclose(materialize(back).data, materialize(od).data, atol=1e-14)
    assert odeco_to_dict(odeco_from_dict(odeco_to_dict(back))) == odeco_to_dict(back)


def test_entry_count(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"shape": [2, 3, 3], "entries": list(range(17))}))
    with pytest.raises(ValidationError, match="expected 18 entries"):
        parse_tensor_file(path)


def test_factor_deviation(tmp_path):
    V = np.eye(3)
    V[1, 2] = 1e-3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"shape": [2, 3, 3], "sigmas": [1, 1],
                                "factors": [np.eye(2).tolist(), V.tolist(), np.eye(3).tolist()]}))
    with pytest.raises(ValidationError, match="deviation 1.000e-03"):
        parse_tensor_file(path)


@pytest.mark.parametrize("text", ["{not json", "[1, 2]", '{"shape": [2, 2, 2]}'])
def test_malformed(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(ValidationError):
        parse_tensor_file(path)


def test_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="cannot read"):
        parse_tensor_file(tmp_path / "nope.json")


def test_spec_tuple_pattern_round_trip(example22):
    S, _ = example22
    for spec in enumerate_type1((2, 2, 2, 3)):
        assert spec_from_dict(json.loads(json.dumps(spec_to_dict(spec))), 4) == spec
    for spec in enumerate_type1(S.shape):
        t = realize_type1(spec, S)
        back = tuple_from_dict(json.loads(json.dumps(tuple_to_dict(t))))
        assert back.kind == t.kind
        for a, b in zip(back.points, t.points):
            np.testing.assert_array_equal(a, b)
    for comp in enumerate_type2((2, 2, 3, 3)):
        d = json.loads(json.dumps(component_to_dict(comp)))
        assert pattern_from_dict(d) == comp.pattern
        assert d["dimension"] == 2
    assert pattern_to_dict(next(enumerate_type2((2, 3, 3))).pattern) == {"rows": [[1, 2], [2, 3]]}
