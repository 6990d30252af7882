import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from txnet.errors import CsvFormatError
from txnet.ingest import Edge
from txnet.ledger import EdgeList, read_csv, window, write_csv

HOUR = 3_600_000


def _edges(times):
    return [Edge(f"S{i}", f"R{i}", Decimal("0.5"), t) for i, t in enumerate(times)]


def test_nested_prefix():
    rng = random.Random(3)
    times = sorted(rng.randrange(0, 6 * HOUR) for _ in range(500))
    edges = EdgeList.spanning(_edges(times))
    one = window(edges, 0, HOUR)
    two = window(edges, 0, 2 * HOUR)
    assert 0 < len(one) < len(two)
    assert two.edges[:len(one)] == one.edges


def test_empty_window():
    w = window([], 5, 10)
    assert len(w) == 0 and (w.t0, w.duration_ms) == (5, 10)


def test_half_open():
    e = _edges([100, 150, 200])
    assert [x.timestamp_ms for x in window(e, 100, 100)] == [100, 150]


def test_duration_must_be_positive():
    with pytest.raises(ValueError):
        window([], 0, 0)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1000), max_size=60), st.integers(-50, 1000),
       st.integers(1, 600), st.integers(1, 600))
def test_window_properties(times, t0, d1, d2):
    d1, d2 = sorted((d1, d2))
    edges = _edges(sorted(times))
    a, b = window(edges, t0, d1), window(edges, t0, d2)
    # nesting as ordered multisets: a is a subsequence of b
    it = iter(b.edges)
    assert all(any(x == y for y in it) for x in a.edges)
    assert window(a, t0, d1).edges == a.edges
    assert all(t0 <= e.timestamp_ms < t0 + d1 for e in a)
    assert len(a) == sum(t0 <= t < t0 + d1 for t in times)


def _random_edges(n, seed):
    rng = random.Random(seed)
    out, t = [], 1_496_275_200_000
    for _ in range(n):
        t += rng.randrange(0, 5000)
        amt = Decimal(rng.randrange(0, 10**12)).scaleb(-8)
        out.append(Edge(f"1A{rng.randrange(10**9)}", f"bc1q{rng.randrange(10**9)}", amt, t))
    return out


def test_csv_roundtrip(tmp_path):
    edges = EdgeList.spanning(_random_edges(1000, 11))
    path = tmp_path / "e.csv"
    assert write_csv(edges, path) == 1000
    back = read_csv(path)
    assert back.edges == edges.edges
    assert (back.t0, back.duration_ms) == (edges.t0, edges.duration_ms)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 40))
def test_csv_roundtrip_property(tmp_path_factory, seed, n):
    path = tmp_path_factory.mktemp("csv") / "e.csv"
    edges = _random_edges(n, seed)
    write_csv(edges, path)
    assert read_csv(path).edges == edges


def test_csv_missing_header(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("A,B,0.10000000,5\n")
    with pytest.raises(CsvFormatError) as info:
        read_csv(path)
    assert info.value.line == 1


def test_csv_bad_row_line(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("source,target,amount_btc,timestamp_ms\nA,B,0.1,5\nA,B,zz,6\n")
    with pytest.raises(CsvFormatError) as info:
        read_csv(path)
    assert info.value.line == 3


def test_csv_fixed_point(tmp_path):
    path = tmp_path / "e.csv"
    write_csv([Edge("A", "B", Decimal("0.3"), 1)], path)
    text = path.read_text()
    assert text == "source,target,amount_btc,timestamp_ms\nA,B,0.30000000,1\n"
    assert read_csv(path).edges[0].amount_btc == Decimal("0.30000000")
