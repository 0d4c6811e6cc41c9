import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lewisq.errors import DimensionMismatch, ParseError
from lewisq.graph import random_balanced_digraph
from lewisq.io import (dumps_report, read_csv, read_edgelist, read_matrix, write_csv,
                       write_edgelist, write_matrix, write_report)


@given(st.integers(0, 2**32 - 1))
def test_matrix_round_trip(tmp_path_factory, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((int(rng.integers(1, 9)), int(rng.integers(1, 5))))
    A *= 10.0 ** rng.integers(-300, 300, size=A.shape)
    path = tmp_path_factory.mktemp("m") / "a.mtx"
    write_matrix(path, A)
    B = read_matrix(path)
    assert B.tobytes() == A.tobytes()


def test_matrix_coordinate(tmp_path):
    p = tmp_path / "c.mtx"
    p.write_text("%%MatrixMarket matrix coordinate real general\n% comment\n3 2 3\n"
                 "1 1 1.5\n3 2 -2\n1 1 0.5\n")
    np.testing.assert_array_equal(read_matrix(p), [[2.0, 0.0], [0.0, 0.0], [0.0, -2.0]])


@pytest.mark.parametrize("body, line", [
    ("2 1\n1.0\nnan\n", 4),
    ("2 1\n1.0\ninf\n", 4),
    ("2 1\n1.0\nabc\n", 4),
])
def test_matrix_rejects_bad_values(tmp_path, body, line):
    p = tmp_path / "bad.mtx"
    p.write_text("%%MatrixMarket matrix array real general\n" + body)
    with pytest.raises(ParseError) as exc:
        read_matrix(p)
    assert exc.value.line == line and f"line {line}" in str(exc.value)


def test_matrix_other_errors(tmp_path):
    p = tmp_path / "x.mtx"
    p.write_text("hello\n")
    with pytest.raises(ParseError):
        read_matrix(p)
    p.write_text("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n")
    with pytest.raises(DimensionMismatch):
        read_matrix(p)
    p.write_text("%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 1\n")
    with pytest.raises(ParseError):
        read_matrix(p)
    p.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n")
    with pytest.raises(ParseError):
        read_matrix(p)


def test_csv_round_trip_and_errors(tmp_path, rng):
    A, b = rng.standard_normal((10, 3)), rng.standard_normal(10)
    p = tmp_path / "d.csv"
    write_csv(p, A, b, header=["a", "b", "c", "y"])
    A2, b2, header = read_csv(p)
    assert A2.tobytes() == A.tobytes() and b2.tobytes() == b.tobytes()
    assert header == ["a", "b", "c", "y"]
    p.write_text("x,y\n1,2\n3,oops\n")
    with pytest.raises(ParseError) as exc:
        read_csv(p)
    assert exc.value.line == 3
    p.write_text("x,y\n1,2\n3,NaN\n")
    with pytest.raises(ParseError):
        read_csv(p)
    p.write_text("x,y\n1,2,3\n")
    with pytest.raises(ParseError):
        read_csv(p)
    p.write_text("x,y\n")
    with pytest.raises(ParseError):
        read_csv(p)


def test_csv_quoted_header(tmp_path):
    p = tmp_path / "q.csv"
    p.write_text('"age, years","y"\n1,2\n')
    A, b, header = read_csv(p)
    assert header == ["age, years", "y"] and A.shape == (1, 1)


def test_edgelist_two_cycle(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# a 2-cycle\n2 2\n1 2 1.0\n2 1 1\n")
    G = read_edgelist(p)
    assert G.n == 2 and G.edge_count == 2
    assert G.edges() == [(0, 1, 1.0), (1, 0, 1.0)]


def test_edgelist_round_trip_and_errors(tmp_path):
    G = random_balanced_digraph(7, 4, seed=1)
    p = tmp_path / "g.txt"
    write_edgelist(p, G, comment="seeded\ngraph")
    assert read_edgelist(p).edges() == G.edges()
    for text, exc in [("2 2\n1 2 1\n", DimensionMismatch), ("2 1\n1 3 1\n", ParseError),
                      ("2 1\n1 1 1\n", ParseError), ("2 1\n1 2 -1\n", ParseError),
                      ("2 1\n1 2 inf\n", ParseError), ("2\n", ParseError)]:
        p.write_text(text)
        with pytest.raises(exc):
            read_edgelist(p)


def test_report_json(tmp_path):
    obj = {"b": np.arange(3), "a": np.float64(1.5), "c": {"z": 1, "y": [np.int64(2)]}}
    text = dumps_report(obj)
    assert json.loads(text) == {"a": 1.5, "b": [0, 1, 2], "c": {"y": [2], "z": 1}}
    assert text.index('"a"') < text.index('"b"')
    write_report(tmp_path / "r.json", obj)
    assert (tmp_path / "r.json").read_text() == text
