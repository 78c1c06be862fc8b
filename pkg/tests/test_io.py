import json
import os

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cornerrank.errors import FormatError
from cornerrank.io import dumps_report, format_cmtx, parse_cmtx, read_cmtx, write_cmtx

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, st.tuples(st.integers(0, 4), st.integers(0, 4)), elements=finite),
       st.data())
def test_cmtx_roundtrip_is_bit_exact(re, data):
    im = data.draw(arrays(np.float64, re.shape, elements=finite))
    A = re + 1j * im
    B = parse_cmtx(format_cmtx(A))
    assert B.shape == A.shape
    assert np.array_equal(B.view(np.float64), A.view(np.float64))


def test_known_layout():
    text = format_cmtx(np.array([[1 + 2j, 0.5]]))
    assert text == "cmtx 1 2\n1 2\n0.5 0\n"


@pytest.mark.parametrize("text", [
    "",
    "matrix 1 1\n0 0\n",
    "cmtx 1\n",
    "cmtx a b\n",
    "cmtx 2 2\n1 0\n",
    "cmtx 1 1\n1\n",
    "cmtx 1 1\nx 0\n",
    "cmtx 1 1\nnan 0\n",
    "cmtx -1 1\n",
])
def test_malformed_input_raises_format_error(text):
    with pytest.raises(FormatError):
        parse_cmtx(text)


def test_refuses_non_finite_output():
    with pytest.raises(FormatError):
        format_cmtx(np.array([[np.inf]]))


def test_file_roundtrip_and_missing_file(tmp_path):
    p = tmp_path / "a.cmtx"
    A = np.arange(6).reshape(2, 3) * (1 - 0.5j)
    write_cmtx(p, A)
    np.testing.assert_array_equal(read_cmtx(p), A)
    assert [f for f in os.listdir(tmp_path) if f.startswith(".tmp")] == []
    with pytest.raises(FormatError):
        read_cmtx(tmp_path / "missing.cmtx")


def test_report_is_deterministic_and_json_safe():
    rep = {"b": float("inf"), "a": np.float64(1.5), "c": [np.int64(2), float("nan")],
           "d": np.array([1, 2])}
    text = dumps_report(rep)
    assert text == dumps_report(dict(reversed(list(rep.items()))))
    data = json.loads(text)
    assert data == {"a": 1.5, "b": "inf", "c": [2, None], "d": [1, 2]}
    assert list(data) == sorted(data)
