import io
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oddcolor.graph import (
    ColoringFormatError,
    EdgeColoring,
    HostGraph,
    PartialColoringError,
    dumps_coloring,
    has_odd_class,
    loads_coloring,
    parity_signature,
    read_coloring,
    write_coloring,
)


def k3_example():
    return EdgeColoring.from_mapping(HostGraph.complete(3), {(0, 1): 0, (0, 2): 0, (1, 2): 1})


def test_host_edge_counts():
    assert HostGraph.complete(5).num_edges == 10 == len(HostGraph.complete(5).edges())
    assert HostGraph.bipartite(4).num_edges == 16 == len(HostGraph.bipartite(4).edges())
    assert HostGraph.bipartite(2).vertices() == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_canonical_edges():
    K = HostGraph.complete(4)
    assert K.edge(3, 1) == (1, 3)
    with pytest.raises(ValueError, match="loop edge"):
        K.edge(2, 2)
    B = HostGraph.bipartite(3)
    assert B.edge((1, 2), (0, 0)) == (0, 2)
    with pytest.raises(ValueError, match="non-bipartite edge"):
        B.edge((0, 1), (0, 2))


def test_parity_signature_examples():
    c = EdgeColoring.from_mapping(HostGraph.complete(4), {
        (0, 1): 0, (0, 2): 0, (0, 3): 1, (1, 2): 1, (1, 3): 2, (2, 3): 3})
    assert parity_signature(c, [(0, 1), (0, 2), (0, 3)]) == {0: 0, 1: 1}
    assert parity_signature(c, [(0, 1), (0, 2), (0, 3), (1, 2)]) == {0: 0, 1: 0}
    assert parity_signature(c, []) == {}
    assert has_odd_class(c, [(0, 1), (1, 3), (2, 3), (0, 3)]) is True


def test_has_odd_class_examples():
    # a,b,c,d on four edges
    c = EdgeColoring.from_mapping(HostGraph.complete(4), {
        (0, 1): 0, (0, 2): 1, (0, 3): 2, (1, 2): 3, (1, 3): 3, (2, 3): 3})
    assert has_odd_class(c, [(0, 1), (0, 2), (0, 3), (1, 2)])
    # a,a,a
    assert has_odd_class(c, [(1, 2), (1, 3), (2, 3)])
    # 2-2-2-2-2 on K_5: five classes, each a matching or a path
    K5 = HostGraph.complete(5)
    m = {(0, 1): 0, (2, 3): 0, (1, 2): 1, (3, 4): 1, (0, 2): 2, (1, 4): 2,
         (0, 3): 3, (2, 4): 3, (0, 4): 4, (1, 3): 4}
    c5 = EdgeColoring.from_mapping(K5, m)
    assert not has_odd_class(c5, K5.edges())


def test_partial_coloring_error():
    c = EdgeColoring.from_mapping(HostGraph.complete(3), {(0, 1): 0})
    assert not c.is_total
    with pytest.raises(PartialColoringError, match="partial coloring"):
        parity_signature(c, [(0, 1), (1, 2)])


def test_contiguous_ids_enforced():
    with pytest.raises(ValueError, match="contiguous"):
        EdgeColoring.from_mapping(HostGraph.complete(3), {(0, 1): 0, (0, 2): 2, (1, 2): 0})
    c = EdgeColoring.from_matrix(HostGraph.bipartite(2), np.array([[5, 9], [9, 5]]), compact=True)
    assert c.num_colors == 2 and c.matrix[0, 0] == 0


def test_round_trip_k3():
    c = k3_example()
    text = dumps_coloring(c)
    assert text.splitlines()[:4] == ["oddcolor v1", "graph complete n=3", "colors t=2", "e 0 1 0"]
    assert len([ln for ln in text.splitlines() if ln.startswith("e ")]) == 3
    assert loads_coloring(text) == c


def test_write_is_deterministic(tmp_path):
    c = k3_example()
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_coloring(c, a)
    write_coloring(EdgeColoring.from_mapping(HostGraph.complete(3), dict(reversed(list(
        c.assignment().items())))), b)
    assert a.read_bytes() == b.read_bytes()
    assert read_coloring(a) == c


@pytest.mark.parametrize("body,msg", [
    ("oddcolor v1\ngraph complete n=6\ncolors t=1\ne 5 5 0\n", "loop edge"),
    ("oddcolor v1\ngraph bipartite n=3\ncolors t=1\ne x0 x1 0\n", "non-bipartite edge"),
    ("oddcolor v1\ngraph complete n=3\ncolors t=1\ne 0 3 0\n", "vertex out of range"),
    ("oddcolor v1\ngraph complete n=3\ncolors t=1\ne 0 1 0\ne 1 0 0\n", "duplicate edge"),
    ("oddcolor v2\ngraph complete n=3\ncolors t=1\n", "malformed header"),
    ("oddcolor v1\ngraph cube n=3\ncolors t=1\n", "malformed header"),
    ("oddcolor v1\ngraph complete n=3\ncolors t=2\ne 0 1 0\n", "header says t=2"),
    ("oddcolor v1\ngraph complete n=3\ncolors t=1\ne 0 1 4\n", "outside"),
])
def test_parse_errors(body, msg):
    with pytest.raises(ColoringFormatError, match=msg) as ei:
        loads_coloring(body)
    assert str(ei.value).startswith("line ")


def test_parse_error_line_number():
    with pytest.raises(ColoringFormatError) as ei:
        loads_coloring("oddcolor v1\ngraph complete n=6\ncolors t=1\ne 0 1 0\n# c\ne 4 4 0\n")
    assert ei.value.line == 6


def test_bipartite_side_prefixes():
    c = loads_coloring("oddcolor v1\ngraph bipartite n=2\ncolors t=1\ne y1 x0 0\n")
    assert c.color((0, 1)) == 0 and c.color((1, 0)) is None


def _random_coloring(draw_seed, kind, n, t, density):
    rng = np.random.default_rng(draw_seed)
    host = HostGraph(kind, n)
    m = np.full((n, n), -1, dtype=np.int64)
    for e in host.edges():
        if rng.random() < density:
            m[e] = rng.integers(0, t)
            if kind == "complete":
                m[e[1], e[0]] = m[e]
    return EdgeColoring.from_matrix(host, m, compact=True)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), kind=st.sampled_from(["complete", "bipartite"]),
       n=st.integers(1, 9), t=st.integers(1, 5), density=st.floats(0.0, 1.0))
def test_round_trip_property(seed, kind, n, t, density):
    c = _random_coloring(seed, kind, n, t, density)
    text = dumps_coloring(c, comments=["hello"])
    assert loads_coloring(text) == c
    assert dumps_coloring(loads_coloring(text), comments=["hello"]) == text
    buf = io.StringIO()
    write_coloring(c, buf)
    assert buf.getvalue() == dumps_coloring(c)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2 ** 32), n=st.integers(2, 8), t=st.integers(1, 4))
def test_has_odd_class_matches_recount(seed, n, t):
    c = _random_coloring(seed, "complete", n, t, 1.0)
    rng = np.random.default_rng(seed + 1)
    edges = c.host.edges()
    subset = [e for e in edges if rng.random() < 0.5]
    cnt = Counter(int(c.matrix[e]) for e in subset)
    assert has_odd_class(c, subset) == any(v % 2 for v in cnt.values())
