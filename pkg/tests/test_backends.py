import os
import subprocess
import sys

import numpy as np
import pytest

from oddcolor import kernels
from oddcolor.knn import Stage2Config, build_knn_coloring, random_greedy_stage1, stage2_lll
from oddcolor.verify import (
    builtin_patterns,
    match_pattern,
    scan_c4_odd,
    scan_cliques_odd,
    scan_min_colors,
)

needs_cython = pytest.mark.skipif("cython" not in kernels.available(),
                                  reason="compiled kernels not built")


def test_pure_python_switch():
    env = dict(os.environ, ODDCOLOR_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import oddcolor; print(oddcolor.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_get_unknown():
    with pytest.raises(ValueError):
        kernels.get("fortran")
    assert kernels.get("python").NAME == "python"


@needs_cython
def test_default_is_compiled():
    assert kernels.BACKEND == "cython"


def _rand(n, t, seed):
    from oddcolor.graph import EdgeColoring, HostGraph

    rng = np.random.default_rng(seed)
    m = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, 1)
    m[iu] = rng.integers(0, t, len(iu[0]))
    m = m + m.T
    np.fill_diagonal(m, -1)
    return EdgeColoring.from_matrix(HostGraph.complete(n), m, compact=True)


def _strip(rep):
    d = rep.to_dict()
    d.pop("elapsed")
    d.pop("backend")
    return d


@needs_cython
@pytest.mark.parametrize("mode", ["exhaustive", "sample:3:30000"])
def test_clique_scans_agree(mode):
    col = _rand(14, 2, 1)
    for p in (4, 5):
        a = scan_cliques_odd(col, p, mode, backend="python", limit=10 ** 6)
        b = scan_cliques_odd(col, p, mode, backend="cython", limit=10 ** 6)
        assert _strip(a) == _strip(b)
    a = scan_min_colors(col, 5, 2, mode, backend="python", limit=10 ** 6)
    b = scan_min_colors(col, 5, 2, mode, backend="cython", limit=10 ** 6)
    assert _strip(a) == _strip(b)


@needs_cython
@pytest.mark.parametrize("mode", ["exhaustive", "sample:9:20000"])
def test_pattern_scans_agree(mode):
    col = _rand(9, 3, 2)
    for spec in builtin_patterns():
        a = match_pattern(col, spec, mode, backend="python", limit=10 ** 6)
        b = match_pattern(col, spec, mode, backend="cython", limit=10 ** 6)
        assert _strip(a) == _strip(b), spec.name


@needs_cython
def test_c4_agree():
    from oddcolor.graph import EdgeColoring, HostGraph

    m = np.random.default_rng(4).integers(0, 3, (9, 9))
    col = EdgeColoring.from_matrix(HostGraph.bipartite(9), m, compact=True)
    assert _strip(scan_c4_odd(col, backend="python", limit=10 ** 6)) == \
        _strip(scan_c4_odd(col, backend="cython", limit=10 ** 6))


@needs_cython
@pytest.mark.parametrize("n,seed", [(12, 0), (16, 7), (20, 1)])
def test_stages_agree(n, seed):
    a = random_greedy_stage1(n, seed, backend="python")
    b = random_greedy_stage1(n, seed, backend="cython")
    assert a.slots == b.slots
    ca, ia = stage2_lll(a, Stage2Config(seed=seed), backend="python")
    cb, ib = stage2_lll(b, Stage2Config(seed=seed), backend="cython")
    assert np.array_equal(ca.matrix, cb.matrix)
    assert ia["palette"] == ib["palette"] and ia["restarts"] == ib["restarts"]


@needs_cython
def test_knn_agree_n24():
    a, _ = build_knn_coloring(24, Stage2Config(seed=3), backend="python", verify=False)
    b, _ = build_knn_coloring(24, Stage2Config(seed=3), backend="cython", verify=False)
    assert a == b
