import json
import math
from fractions import Fraction

import numpy as np
import pytest

from banach.exceptions import DimensionMismatchError, InvalidSpaceError, ManifestError
from banach.seqnorm import ClassKind
from banach.space import INF, Space
from utils.schema import (
    dumps,
    format_float,
    load_json,
    parse_class,
    parse_manifest,
    parse_operator,
    parse_sequence,
    parse_space,
    to_jsonable,
)

MANIFEST = {
    "schema_version": 1,
    "spaces": {
        "e2": {"dim": 2, "norm": {"p": 2}},
        "box": {"dim": 2, "norm": {"polytope": [[1, 1], [1, -1], [-1, 1], [-1, -1]]}},
    },
    "sequences": {"x": {"space": "e2", "vectors": [[3, 4], [0, 0]]}},
    "operators": {"id": {"domain": "e2", "codomain": "e2", "matrix": [[1, 0], [0, 1]]}},
    "tasks": [
        {"kind": "norm", "id": "lp2", "class": "lp:2", "sequence": "x"},
        {"kind": "dualnorm", "class": "linf", "sequence": [1, 2, 3]},
        {"kind": "opnorm", "X": "lp:2", "Y": "lp:2", "operator": "id", "k": 1},
    ],
}


def test_parse_spaces():
    assert parse_space({"dim": 3, "norm": {"p": "inf"}}) == Space.pnorm(3, INF)
    weighted = parse_space({"dim": 2, "norm": {"p": 1, "weights": [1, 2]}})
    assert weighted.norm([1, 1]) == pytest.approx(3.0)
    box = parse_space(MANIFEST["spaces"]["box"])
    assert box.norm([0.5, -2]) == pytest.approx(2.0)


def test_space_errors():
    with pytest.raises(ManifestError):
        parse_space({"norm": {"p": 2}})
    with pytest.raises(ManifestError):
        parse_space({"dim": 3, "norm": {"p": 1, "weights": [1, 2]}})
    with pytest.raises(ManifestError):
        parse_space("missing")
    with pytest.raises(InvalidSpaceError):
        parse_space({"dim": 2, "norm": {"polytope": [[1, 0], [0, 1]]}})


def test_parse_sequences():
    scalars = parse_sequence([1, 2, 3])
    assert scalars.space.dim == 1 and scalars.length == 3
    vectors = parse_sequence([[3, 4], [0, 0]])
    assert vectors.space == Space.pnorm(2, 2)
    named = parse_sequence({"space": "e2", "vectors": [[1, 0]]}, {"e2": Space.pnorm(2, 2)})
    assert named.vectors.tolist() == [[1.0, 0.0]]
    with pytest.raises(ManifestError):
        parse_sequence([[[1]]])
    with pytest.raises(DimensionMismatchError):
        parse_sequence({"space": {"dim": 2, "norm": {"p": 2}}, "vectors": [[1, 2, 3]]})


def test_parse_operator():
    T = parse_operator({"domain": {"dim": 2, "norm": {"p": 1}}, "codomain": {"dim": 1, "norm": {"p": 2}},
                        "matrix": [[1, 2]]})
    assert T.matrix.shape == (1, 2)
    with pytest.raises(ManifestError):
        parse_operator({"domain": {"dim": 2, "norm": {"p": 1}}, "matrix": [[1, 2]]})


def test_parse_class():
    assert parse_class("dual(lpw:2)").kind is ClassKind.DUAL
    with pytest.raises(ManifestError):
        parse_class(2)


def test_load_json_inline_and_file(tmp_path):
    assert load_json('{"a": 1}') == {"a": 1}
    path = tmp_path / "input.json"
    path.write_text(json.dumps([1, 2]))
    assert load_json(str(path)) == [1, 2]


def test_load_json_reports_position():
    with pytest.raises(ManifestError) as excinfo:
        load_json('{\n  "a": 1,\n  "b": \n}')
    assert excinfo.value.line == 4
    assert "line 4" in str(excinfo.value)


def test_parse_manifest():
    manifest = parse_manifest(MANIFEST)
    assert [t.kind for t in manifest.tasks] == ["norm", "dualnorm", "opnorm"]
    assert manifest.tasks[1].id == "task-1"
    assert manifest.sequence("x").length == 2
    assert manifest.operator("id").domain == Space.pnorm(2, 2)
    assert manifest.tasks[0].params == {"class": "lp:2", "sequence": "x"}


@pytest.mark.parametrize("patch,message", [
    ({"schema_version": 2}, "schema_version"),
    ({"tasks": [{"kind": "plot"}]}, "unknown kind"),
    ({"tasks": [{"kind": "norm", "class": "lp:2", "sequence": "nope"}]}, "nope"),
    ({"tasks": [{"kind": "opnorm", "X": "lp:2", "Y": "zz", "operator": "id"}]}, "zz"),
])
def test_manifest_errors(patch, message):
    with pytest.raises(ManifestError) as excinfo:
        parse_manifest({**MANIFEST, **patch})
    assert message in str(excinfo.value)


def test_manifest_requires_version():
    with pytest.raises(ManifestError):
        parse_manifest({"tasks": []})


def test_to_jsonable():
    value = to_jsonable({"a": np.float64(1.5), "b": np.array([1, 2]), "c": Fraction(4, 3), "d": math.inf,
                         "e": np.bool_(True), 3: None})
    assert value == {"a": 1.5, "b": [1, 2], "c": "4/3", "d": "inf", "e": True, "3": None}


def test_dumps_is_canonical():
    text = dumps({"b": 0.1, "a": [math.nan, 1], "c": 2.0, "d": {}})
    assert text == '{\n  "a": [\n    "nan",\n    1\n  ],\n  "b": 0.10000000000000001,\n  "c": 2.0,\n  "d": {}\n}'
    assert dumps(json.loads(text)) == text


def test_floats_carry_seventeen_significant_digits():
    digits = dumps(1 / 3).replace("0.", "", 1)
    assert len(digits) == 17
    assert float(dumps(1 / 3)) == 1 / 3
    assert format_float(1e16) == "10000000000000000.0"
    assert format_float(1e20) == "1e+20"
