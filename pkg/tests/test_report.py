import json
import math

import numpy as np
import pytest

from ifba.report import AxiomRecord, AxiomReport, dumps, load_schema, strip_timestamp, to_jsonable, write_atomic


def test_floats_round_trip_exactly():
    vals = [0.1, 1 / 3, 2.0**-1074, 1e308, -0.0, 123456789.123456789, 1.0]
    back = json.loads(dumps(vals))
    assert all(a == b for a, b in zip(vals, back))


def test_non_finite_become_null():
    assert json.loads(dumps({"a": math.inf, "b": math.nan})) == {"a": None, "b": None}


def test_numpy_values_are_converted():
    out = to_jsonable({"a": np.float64(0.5), "b": np.arange(3), "c": np.bool_(True), "d": (1, 2)})
    assert out == {"a": 0.5, "b": [0, 1, 2], "c": True, "d": [1, 2]}


def test_integral_float_keeps_decimal_point():
    assert dumps(2.0).strip() == "2.0"


def test_axiom_records():
    rep = AxiomReport("m", 1, 10, [AxiomRecord("i", "pass", 10), AxiomRecord("vi", "vacuous", 10, note="n")])
    assert rep.all_passed and rep["vi"].passed
    with pytest.raises(KeyError):
        rep["zz"]
    d = rep.to_dict()
    assert "witness" not in d["axioms"][0] and d["axioms"][1]["note"] == "n"


def test_write_atomic_replaces(tmp_path):
    p = tmp_path / "sub" / "out.json"
    write_atomic(p, "one")
    write_atomic(p, "two")
    assert p.read_text() == "two"
    assert [f.name for f in p.parent.iterdir()] == ["out.json"]


def test_strip_timestamp():
    assert strip_timestamp({"generated_at": "x", "a": 1}) == {"a": 1}


def test_schemas_ship_for_every_command():
    from ifba.cli import COMMANDS

    for cmd in COMMANDS:
        assert load_schema(cmd)["properties"]["command"]["const"] == cmd
