import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_isocone
from ncorder.algebra import BlockAlgebra
from ncorder.spec_io import (
    AsymmetryWarning,
    SpecError,
    dump_cone_spec,
    dump_element,
    dump_generators,
    load_cone_spec,
    load_element,
    load_generators,
    parse_cone_spec,
    parse_element,
    parse_matrix,
    spec_hash,
)

CHAIN = {
    "dims": [1, 2, 1],
    "poset": {"relations": [[1, 2], [2, 3]]},
    "inner": [{"kind": "full"}, {"kind": "cap", "center": [0, 0, 1], "angle": 0.5}, {"kind": "full"}],
}


def _spec(**patch):
    doc = json.loads(json.dumps(CHAIN))
    doc.update(patch)
    return doc


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_serialize_is_a_fixed_point(seed):
    I = random_isocone(np.random.default_rng(seed))
    text = dump_cone_spec(I, {"seed": seed})
    J, meta = parse_cone_spec(json.loads(text))
    assert meta == {"seed": seed}
    assert dump_cone_spec(J, meta) == text
    assert spec_hash(J) == spec_hash(I)


def test_relations_are_one_based():
    I, _ = parse_cone_spec(CHAIN)
    assert I.poset.lt(0, 1) and I.poset.lt(1, 2) and I.poset.lt(0, 2)
    assert I.inner[1].region.kind == "cap"


def test_defaults():
    I, meta = parse_cone_spec({"dims": [2, 3]})
    assert meta == {} and all(c.is_full for c in I.inner) and not I.poset.lt(0, 1)


@pytest.mark.parametrize(
    "doc, where",
    [
        ([], "$"),
        (_spec(dims=[]), "dims"),
        (_spec(dims=[1, 0, 1]), "dims[1]"),
        (_spec(dims=[1, 2.5, 1]), "dims[1]"),
        (_spec(poset={"relations": [[1, 2], [2]]}), "poset.relations[1]"),
        (_spec(poset={"relations": [[1, 4]]}), "poset.relations[0]"),
        (_spec(poset={"relations": [[1, 2], [2, 1]]}), "poset.relations"),
        (_spec(inner=[{"kind": "full"}]), "inner"),
        (_spec(inner=[{"kind": "full"}, {"kind": "disk"}, {"kind": "full"}]), "inner[1].kind"),
        (_spec(inner=[{"kind": "cap", "center": [0, 0, 1], "angle": 1}] + CHAIN["inner"][1:]), "inner[0].kind"),
        (_spec(inner=[{"kind": "full"}, {"kind": "cap", "center": [0, 1], "angle": 1}, {"kind": "full"}]),
         "inner[1].center"),
        (_spec(inner=[{"kind": "full"}, {"kind": "cap", "center": [0, 0, 1], "angle": "wide"}, {"kind": "full"}]),
         "inner[1].angle"),
        (_spec(inner=[{"kind": "full"}, {"kind": "polygon", "normals": [[0, 0, 1], [1, 0]]}, {"kind": "full"}]),
         "inner[1].normals[1]"),
        (_spec(metadata=[1]), "metadata"),
    ],
)
def test_errors_name_the_field(doc, where):
    with pytest.raises(SpecError) as e:
        parse_cone_spec(doc)
    assert e.value.where == where
    assert str(e.value).startswith(where)


def test_json_syntax_error_has_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"dims": [1,\n  2,, 3]}')
    with pytest.raises(SpecError) as e:
        load_cone_spec(p)
    assert e.value.where == f"{p}:2:5"


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        load_cone_spec(tmp_path / "nope.json")


def test_complex_entries_and_asymmetry_warning():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        m = parse_matrix([[1, [0, 1]], [[0, -1], 2]], "m")
        assert not w
        m2 = parse_matrix([[1, 0.25], [0.75, 2]], "m")
        assert len(w) == 1 and issubclass(w[0].category, AsymmetryWarning)
    assert np.allclose(m, [[1, 1j], [-1j, 2]])
    assert np.allclose(m2, [[1, 0.5], [0.5, 2]])


def test_tiny_asymmetry_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_matrix([[1, 0.5], [0.5 + 1e-14, 2]], "m")


@pytest.mark.parametrize(
    "m, where",
    [([], "m"), ([[1, 2]], "m[0]"), ([[1, "x"], [0, 1]], "m[0][1]"), ([[1, [1, 2, 3]], [0, 1]], "m[0][1]")],
)
def test_matrix_errors(m, where):
    with pytest.raises(SpecError) as e:
        parse_matrix(m, "m")
    assert e.value.where == where


def test_element_round_trip(tmp_path, rng):
    A = BlockAlgebra((1, 2, 3))
    a = A.random_element(rng)
    p = tmp_path / "a.json"
    p.write_text(dump_element(a))
    b = load_element(p, A)
    assert all(np.allclose(x, y) for x, y in zip(a.blocks, b.blocks))


def test_element_dims_must_match():
    with pytest.raises(SpecError) as e:
        parse_element({"blocks": [[[1]], [[1]]]}, BlockAlgebra((1, 2)))
    assert e.value.where == "blocks"


def test_generators(tmp_path, rng):
    g = [rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(2)]
    g = [(m + m.conj().T) / 2 for m in g]
    p = tmp_path / "g.json"
    p.write_text(dump_generators(g))
    back = load_generators(p)
    assert all(np.allclose(x, y) for x, y in zip(g, back))
    p.write_text(json.dumps({"generators": [[[1]], [[1, 0], [0, 1]]]}))
    with pytest.raises(SpecError) as e:
        load_generators(p)
    assert e.value.where == "generators[1]"
