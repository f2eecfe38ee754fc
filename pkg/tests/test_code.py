import itertools

import numpy as np
import pytest

from oddcolor.code import (
    cayley_adjacency,
    certify_h_code,
    is_h_code,
    max_h_code_exact,
    parity_matrix,
    rank_gf2,
)
from oddcolor.exact import PATTERNS, min_colors_odd
from oddcolor.graph import EdgeColoring, HostGraph, PartialColoringError

from oracles import brute_mis_hcode

# frozen from the networkx reference (brute_mis_hcode) at first run
D_FROZEN = {(2, "K3"): 2, (3, "K3"): 4, (3, "C4"): 8, (4, "K3"): 32, (4, "K4"): 32,
            (4, "C4"): 16}


def mono(host):
    n = host.n
    m = np.zeros((n, n), dtype=int)
    if not host.is_bipartite:
        np.fill_diagonal(m, -1)
    return EdgeColoring.from_matrix(host, m)


def test_parity_matrix_examples(cfls2):
    pm = parity_matrix(mono(HostGraph.complete(3)))
    assert pm.bits.tolist() == [[1, 1, 1]]
    col, _ = cfls2
    pm = parity_matrix(col)
    assert pm.bits.shape == (36, 120) and (pm.bits.sum(axis=0) == 1).all()
    w = min_colors_odd(HostGraph.bipartite(2), "C4", 2).witness
    pm = parity_matrix(w)
    assert pm.bits.shape == (2, 4) and ((pm.bits[0] ^ pm.bits[1]) == 1).all()
    with pytest.raises(PartialColoringError):
        parity_matrix(EdgeColoring.from_mapping(HostGraph.complete(3), {(0, 1): 0}))


def test_syndrome_matches_bits():
    pm = parity_matrix(mono(HostGraph.complete(4)))
    assert pm.syndrome([(0, 1), (1, 2), (0, 2)]).tolist() == [1]
    assert pm.syndrome([(0, 1), (1, 2)]).tolist() == [0]


def test_rank_examples():
    assert rank_gf2(np.eye(7, dtype=int)) == 7
    assert rank_gf2([[1, 1, 1, 1]]) == 1
    assert rank_gf2([[1, 0, 1], [1, 0, 1], [0, 1, 1]]) == 2
    assert rank_gf2([[1, 1, 0], [0, 1, 1], [1, 0, 1]]) == 2
    assert rank_gf2([0b101, 0b011, 0b110]) == 2
    assert rank_gf2(np.zeros((3, 5), dtype=int)) == 0
    assert rank_gf2([]) == 0


def test_rank_random_vs_numpy_elimination():
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.integers(0, 2, size=(int(rng.integers(1, 9)), int(rng.integers(1, 12))))
        # reference: naive Gaussian elimination over GF(2)
        b = a.copy() % 2
        r = 0
        for c in range(b.shape[1]):
            piv = next((i for i in range(r, b.shape[0]) if b[i, c]), None)
            if piv is None:
                continue
            b[[r, piv]] = b[[piv, r]]
            for i in range(b.shape[0]):
                if i != r and b[i, c]:
                    b[i] ^= b[r]
            r += 1
        assert rank_gf2(a) == r


def test_certify_k3_mono():
    rep = certify_h_code(mono(HostGraph.complete(3)), "K3")
    assert rep.certified and rep.density_lower_bound == 0.5 and rep.failing_copy is None
    assert rep.rank == 1 and rep.code_size == 4


def test_certify_cfls2_k5(cfls2):
    col, _ = cfls2
    rep = certify_h_code(col, "K5")
    assert rep.certified and rep.copies_checked == 4368
    assert rep.rank == 36 == col.num_colors
    assert rep.density_lower_bound == 2.0 ** -36
    assert rep.code_size == 2 ** (120 - 36)
    assert rep.density_lower_bound * 2 ** 120 == rep.code_size


def test_certify_planted_failure(cfls2):
    col, _ = cfls2
    m = col.matrix.copy()
    # 2-2-2-2-2 pattern on vertices 0..4
    for (a, b), c in {(0, 1): 0, (2, 3): 0, (1, 2): 1, (3, 4): 1, (0, 2): 2, (1, 4): 2,
                      (0, 3): 3, (2, 4): 3, (0, 4): 4, (1, 3): 4}.items():
        m[a, b] = m[b, a] = c
    bad = EdgeColoring.from_matrix(col.host, m, compact=True)
    rep = certify_h_code(bad, "K5")
    assert not rep.certified and rep.failing_copy is not None
    assert sorted(map(tuple, rep.failing_copy)) == list(itertools.combinations(range(5), 2))


@pytest.mark.parametrize("n,pat", sorted(D_FROZEN))
def test_exact_d_vs_networkx(n, pat):
    res = max_h_code_exact(n, pat)
    assert res.exact and res.value == D_FROZEN[(n, pat)]
    p = PATTERNS[pat]
    assert brute_mis_hcode(n, p.edges, p.k) == D_FROZEN[(n, pat)]
    assert is_h_code(res.family, n, pat)
    assert len(res.family) == res.value


def test_even_edge_family_attains_k3():
    even = [v for v in range(64) if bin(v).count("1") % 2 == 0]
    assert is_h_code(even, 4, "K3") and len(even) == 32 == D_FROZEN[(4, "K3")]


def test_translation_invariance():
    rng = np.random.default_rng(0)
    fam = max_h_code_exact(4, "C4").family
    for _ in range(20):
        v = int(rng.integers(0, 64))
        assert is_h_code([f ^ v for f in fam], 4, "C4")
    adj, N = cayley_adjacency(4, "C4")
    for _ in range(20):
        u, v, w = (int(x) for x in rng.integers(0, 64, 3))
        assert bool(adj[u] >> v & 1) == bool(adj[u ^ w] >> (v ^ w) & 1)


def test_kernel_membership_and_consistency():
    col = mono(HostGraph.complete(4))
    rep = certify_h_code(col, "K3")
    assert rep.certified
    pm = parity_matrix(col)
    rows = pm.row_ints()
    kernel = [v for v in range(64) if all(bin(v & r).count("1") % 2 == 0 for r in rows)]
    assert len(kernel) == rep.code_size == 32
    assert is_h_code(kernel, 4, "K3")
    exact = max_h_code_exact(4, "K3").value
    assert rep.density_lower_bound <= exact / 64


def test_pattern_larger_than_n():
    # no copies fit, so every graph on [3] is allowed
    assert max_h_code_exact(3, "K4").value == 8


def test_n_range():
    with pytest.raises(ValueError):
        max_h_code_exact(6, "K3")
    with pytest.raises(ValueError):
        max_h_code_exact(1, "K3")


@pytest.mark.slow
def test_n5_time_boxed():
    res = max_h_code_exact(5, "C4", time_limit=2.0)
    assert res.lower <= res.upper
    assert is_h_code(res.family, 5, "C4")
    if not res.exact:
        assert res.upper_kind == "clique-cover"
        with pytest.raises(ValueError):
            res.value
