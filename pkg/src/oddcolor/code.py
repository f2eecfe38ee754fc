"""Graph codes from odd-class colorings, and exact maximum codes on tiny ``n``.

A coloring with ``t`` colors gives a ``t x |E|`` parity-check matrix ``M``
(row ``s`` marks the edges of color ``s``).  The syndrome ``M v`` of a copy of
``H`` is its vector of color parities, so "every copy has an odd class" is
"every copy has nonzero syndrome".  Then ``ker M`` is an H-code: the
difference of two kernel members is in the kernel, hence not a copy of ``H``.
It has ``2**(|E| - rank M) >= 2**(|E| - t)`` members.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .exact import copy_count, enumerate_copies, get_pattern
from .graph import EdgeColoring, HostGraph


@dataclass
class ParityMatrix:
    rows: int
    cols: int
    bits: np.ndarray  # uint8, shape (rows, cols)
    edges: list

    def row_ints(self) -> list[int]:
        """Rows as Python ints, bit ``j`` = column ``j``."""
        return _pack_rows(self.bits)

    def syndrome(self, edge_subset) -> np.ndarray:
        pos = {e: j for j, e in enumerate(self.edges)}
        v = np.zeros(self.cols, dtype=np.uint8)
        for e in edge_subset:
            v[pos[e]] ^= 1
        return (self.bits.astype(np.int64) @ v) & 1


def _pack_rows(a: np.ndarray) -> list[int]:
    packed = np.packbits(np.asarray(a, dtype=np.uint8) & 1, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


def parity_matrix(coloring: EdgeColoring) -> ParityMatrix:
    coloring.require_total()
    edges = coloring.host.edges()
    t = coloring.num_colors
    bits = np.zeros((t, len(edges)), dtype=np.uint8)
    if edges:
        e = np.array(edges)
        cs = coloring.matrix[e[:, 0], e[:, 1]]
        bits[cs, np.arange(len(edges))] = 1
    return ParityMatrix(t, len(edges), bits, edges)


def rank_gf2(matrix) -> int:
    """Rank over GF(2) of a 0/1 matrix (array, nested lists, or list of row ints)."""
    if isinstance(matrix, ParityMatrix):
        rows = matrix.row_ints()
    elif isinstance(matrix, (list, tuple)) and (not matrix or isinstance(matrix[0], int)):
        rows = [int(r) for r in matrix]
    else:
        a = np.asarray(matrix, dtype=np.uint8) & 1
        if a.ndim == 1:
            a = a[None, :]
        rows = _pack_rows(a)
    pivots: dict[int, int] = {}  # leading bit -> basis row
    for r in rows:
        while r:
            hb = r.bit_length() - 1
            if hb in pivots:
                r ^= pivots[hb]
            else:
                pivots[hb] = r
                break
    return len(pivots)


@dataclass
class CodeReport:
    pattern: str
    colors: int
    num_edges: int
    rank: int
    copies_checked: int
    certified: bool
    failing_copy: list | None

    @property
    def code_size(self) -> int:
        return 1 << (self.num_edges - self.rank)

    @property
    def log2_density(self) -> int:
        return -self.rank

    @property
    def density_lower_bound(self) -> float:
        return 2.0 ** (-self.rank)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "colors": self.colors,
            "num_edges": self.num_edges,
            "rank": self.rank,
            "code_size_log2": self.num_edges - self.rank,
            "density_lower_bound": self.density_lower_bound,
            "density_lower_bound_log2": self.log2_density,
            "copies_checked": self.copies_checked,
            "certified": self.certified,
            "failing_copy": self.failing_copy,
        }


def certify_h_code(coloring: EdgeColoring, pattern, *, max_copies: int = 5 * 10 ** 6) -> CodeReport:
    """Check every copy of ``pattern`` for a nonzero syndrome."""
    pat = get_pattern(pattern)
    pm = parity_matrix(coloring)
    expected = copy_count(coloring.host, pat)
    if expected > max_copies:
        raise ValueError(f"{expected} copies exceed the certification budget of {max_copies}")
    copies = enumerate_copies(coloring.host, pat).copies
    m = coloring.matrix
    failing = None
    if copies:
        arr = np.array(copies, dtype=np.int64)  # (N, |E(H)|, 2)
        cs = m[arr[:, :, 0], arr[:, :, 1]]
        cs = np.sort(cs, axis=1)
        w = cs.shape[1]
        if w % 2:
            zero = np.zeros(len(cs), dtype=bool)
        else:
            zero = np.all(cs[:, 0::2] == cs[:, 1::2], axis=1)
        bad = np.nonzero(zero)[0]
        if bad.size:
            failing = [list(e) for e in copies[int(bad[0])]]
    rank = rank_gf2(pm)
    return CodeReport(pat.name, pm.rows, pm.cols, rank, len(copies), failing is None, failing)


# -- exact maximum H-codes --------------------------------------------------------

def _copy_vectors(n: int, pattern) -> tuple[list[int], int]:
    host = HostGraph.complete(n)
    pos = {e: j for j, e in enumerate(host.edges())}
    if get_pattern(pattern).k > n:
        return [], len(pos)
    vecs = sorted({sum(1 << pos[e] for e in cp) for cp in enumerate_copies(host, pattern).copies})
    return vecs, len(pos)


def _greedy_color_bound(cand: int, adj: list[int]) -> tuple[list[int], list[int]]:
    """Greedy proper coloring of ``cand``; ``bounds[i]`` colors cover ``order[:i+1]``."""
    order, bounds = [], []
    color = 0
    rest = cand
    while rest:
        color += 1
        q = rest
        while q:
            v = (q & -q).bit_length() - 1
            q &= ~(1 << v)
            rest &= ~(1 << v)
            q &= ~adj[v]
            order.append(v)
            bounds.append(color)
    return order, bounds


class _MaxClique:
    """Bitset branch and bound for maximum clique (greedy coloring bound)."""

    def __init__(self, adj: list[int], deadline: float | None):
        self.adj = adj
        self.best = 0
        self.best_set: list[int] = []
        self.deadline = deadline
        self.nodes = 0
        self.timed_out = False

    def expand(self, cur: list[int], cand: int):
        self.nodes += 1
        if self.deadline is not None and (self.nodes & 1023) == 0 and time.perf_counter() > self.deadline:
            self.timed_out = True
        if self.timed_out:
            return
        order, bounds = _greedy_color_bound(cand, self.adj)
        for i in range(len(order) - 1, -1, -1):
            if len(cur) + bounds[i] <= self.best:
                return
            v = order[i]
            cur.append(v)
            nc = cand & self.adj[v]
            if nc:
                self.expand(cur, nc)
            elif len(cur) > self.best:
                self.best = len(cur)
                self.best_set = list(cur)
            cur.pop()
            cand &= ~(1 << v)
            if self.timed_out:
                return


@dataclass
class HCodeResult:
    n: int
    pattern: str
    exact: bool
    lower: int
    upper: int
    nodes: int
    elapsed: float
    family: list | None = None
    upper_kind: str = "exact"

    @property
    def value(self) -> int:
        if not self.exact:
            raise ValueError("only bounds are known")
        return self.lower

    def to_dict(self) -> dict:
        return {"n": self.n, "pattern": self.pattern, "exact": self.exact, "lower": self.lower,
                "upper": self.upper, "upper_kind": self.upper_kind, "nodes": self.nodes,
                "elapsed": round(self.elapsed, 6)}


def cayley_adjacency(n: int, pattern) -> tuple[list[int], int]:
    """Adjacency bitsets of the graph on ``GF(2)^C(n,2)`` joining ``u, v`` when ``u ^ v`` is a copy."""
    vecs, N = _copy_vectors(n, pattern)
    size = 1 << N
    adj = []
    for u in range(size):
        b = 0
        for s in vecs:
            b |= 1 << (u ^ s)
        adj.append(b)
    return adj, N


def max_h_code_exact(n: int, pattern, *, time_limit: float | None = None) -> HCodeResult:
    """Largest family of graphs on ``[n]`` with no difference a copy of ``pattern``.

    Maximum independent set in the Cayley graph, searched as a maximum clique
    of its complement.  The graph is vertex-transitive (translations), so the
    empty graph is fixed into the family.  ``n <= 4`` is solved exactly;
    ``n = 5`` runs until ``time_limit`` (default 60 s) and, if cut short,
    reports the incumbent and the smaller of the greedy clique-cover bound
    and ``|V| / omega``.
    """
    if not 2 <= n <= 5:
        raise ValueError("n must be between 2 and 5")
    pat = get_pattern(pattern)
    t0 = time.perf_counter()
    if n == 5 and time_limit is None:
        time_limit = 60.0
    adj, N = cayley_adjacency(n, pat)
    size = 1 << N
    full = (1 << size) - 1
    comp = [full & ~a & ~(1 << v) for v, a in enumerate(adj)]
    mc = _MaxClique(comp, None if time_limit is None else t0 + time_limit)
    cand0 = comp[0]
    if cand0:
        mc.expand([0], cand0)
    else:
        mc.best, mc.best_set = 1, [0]
    if mc.best == 0:
        mc.best, mc.best_set = 1, [0]
    lower = mc.best
    family = sorted(mc.best_set)
    if not mc.timed_out:
        return HCodeResult(n, pat.name, True, lower, lower, mc.nodes, time.perf_counter() - t0,
                           family)
    # clique-cover bound: a greedy coloring of the complement covers V by cliques of G
    _, bounds = _greedy_color_bound(full, comp)
    cover = max(bounds) if bounds else 0
    omega = _max_clique_size(adj)
    upper = min(cover, size // omega if omega else size)
    return HCodeResult(n, pat.name, False, lower, upper, mc.nodes, time.perf_counter() - t0,
                       family, "clique-cover")


def _max_clique_size(adj: list[int]) -> int:
    mc = _MaxClique(adj, None)
    mc.expand([], (1 << len(adj)) - 1)
    return mc.best


def is_h_code(family, n: int, pattern) -> bool:
    """Direct check: no two members differ by a copy of ``pattern``."""
    vecs = set(_copy_vectors(n, pattern)[0])
    fam = list(family)
    return all((a ^ b) not in vecs for a, b in itertools.combinations(fam, 2))
