"""Report serialization: canonical JSON, digests, lossless round-trips."""

import json

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from advbound.report import BoundReport, canonical_json


def test_canonical_json_sorted_and_compact():
    s = canonical_json({"b": 1, "a": [1.5, 2]})
    assert s == '{"a":[1.5,2],"b":1}'


def test_numpy_payloads_jsonable():
    s = canonical_json({"m": np.eye(2), "x": np.float64(1.5), "n": np.int64(3)})
    d = json.loads(s)
    assert d["m"] == [[1.0, 0.0], [0.0, 1.0]] and d["x"] == 1.5 and d["n"] == 3


def test_round_trip_lossless():
    rep = BoundReport(
        name="adv", value=2.8284271247461903,
        params={"dim": 4}, witness={"Gamma": [[0.0, 1e-17], [1e-17, 0.0]]},
        residuals={"lmi": 3.2e-9}, gap=1.1e-5, iterations=42, seed=7, c=None,
        status="ok",
    )
    back = BoundReport.from_json(rep.to_json())
    assert back == rep
    assert back.to_json() == rep.to_json()


def test_digest_stable_and_sensitive():
    a = BoundReport(name="x", value=1.0, witness={"v": [1.0, 0.0]})
    b = BoundReport(name="x", value=1.0, witness={"v": [1.0, 0.0]})
    c = BoundReport(name="x", value=1.0, witness={"v": [0.0, 1.0]})
    assert a.witness_digest() == b.witness_digest()
    assert a.witness_digest() != c.witness_digest()


def test_summary_contains_c_only_when_set():
    assert "c" not in BoundReport(name="x", value=0.0).summary()
    assert BoundReport(name="x", value=0.0, c=1.5).summary()["c"] == 1.5


@given(st.floats(allow_nan=False, allow_infinity=False),
       st.integers(0, 10**6))
@settings(max_examples=50, deadline=None)
def test_float_round_trip(v, it):
    rep = BoundReport(name="r", value=v, iterations=it)
    back = BoundReport.from_json(rep.to_json())
    assert back.value == v and back.iterations == it
