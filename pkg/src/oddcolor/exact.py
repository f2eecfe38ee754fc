"""Exact ``g(G, H)`` for tiny hosts by backtracking over edge colorings.

``g(G, H)`` is the least number of colors in an edge-coloring of ``G`` where
every copy of ``H`` has some color an odd number of times.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .graph import EdgeColoring, HostGraph, has_odd_class

DEFAULT_MAX_EDGES = 20


@dataclass(frozen=True)
class SmallGraph:
    """Pattern graph on vertices ``0..k-1``."""

    name: str
    k: int
    edges: tuple

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def is_bipartite(self) -> bool:
        side = {}
        adj = {v: [] for v in range(self.k)}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        for s in range(self.k):
            if s in side:
                continue
            side[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if w not in side:
                        side[w] = 1 - side[u]
                        stack.append(w)
                    elif side[w] == side[u]:
                        return False
        return True


def _cycle(k):
    return tuple((i, (i + 1) % k) if i < (i + 1) % k else ((i + 1) % k, i) for i in range(k))


def _clique(k):
    return tuple(itertools.combinations(range(k), 2))


PATTERNS = {
    "C4": SmallGraph("C4", 4, _cycle(4)),
    "C6": SmallGraph("C6", 6, _cycle(6)),
    "K3": SmallGraph("K3", 3, _clique(3)),
    "K4": SmallGraph("K4", 4, _clique(4)),
    "K5": SmallGraph("K5", 5, _clique(5)),
}


def get_pattern(p) -> SmallGraph:
    if isinstance(p, SmallGraph):
        return p
    try:
        return PATTERNS[str(p).upper()]
    except KeyError:
        raise ValueError(f"unknown pattern {p!r}; known: {', '.join(PATTERNS)}") from None


def parse_host(text: str) -> HostGraph:
    """``K:<n>`` or ``B:<n>``."""
    kind, _, n = str(text).partition(":")
    try:
        n_ = int(n)
    except ValueError:
        raise ValueError(f"bad host {text!r}") from None
    if kind.upper() == "K":
        return HostGraph.complete(n_)
    if kind.upper() == "B":
        return HostGraph.bipartite(n_)
    raise ValueError(f"bad host {text!r}; expected K:<n> or B:<n>")


@dataclass
class CopyList:
    host: HostGraph
    pattern: str
    copies: list  # each a sorted tuple of canonical host edges

    def __len__(self):
        return len(self.copies)


def _host_adjacent(host: HostGraph):
    """Vertex list and adjacency predicate in a uniform labelling."""
    n = host.n
    if host.is_bipartite:
        verts = list(range(2 * n))  # X: 0..n-1, Y: n..2n-1

        def edge(u, v):
            if (u < n) == (v < n):
                return None
            x, y = (u, v) if u < n else (v, u)
            return (x, y - n)
    else:
        verts = list(range(n))

        def edge(u, v):
            return (u, v) if u < v else (v, u)
    return verts, edge


def _generic_copies(host: HostGraph, pat: SmallGraph) -> list:
    verts, edge = _host_adjacent(host)
    adj = {v: [] for v in range(pat.k)}
    for a, b in pat.edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = set()
    out = []
    phi = [-1] * pat.k
    used = set()

    def rec(i):
        if i == pat.k:
            es = []
            for a, b in pat.edges:
                e = edge(phi[a], phi[b])
                es.append(e)
            key = tuple(sorted(es))
            if key not in seen:
                seen.add(key)
                out.append(key)
            return
        for v in verts:
            if v in used:
                continue
            if any(phi[w] >= 0 and w < i and edge(v, phi[w]) is None for w in adj[i]):
                continue
            phi[i] = v
            used.add(v)
            rec(i + 1)
            used.discard(v)
            phi[i] = -1

    rec(0)
    out.sort()
    return out


def enumerate_copies(host: HostGraph, pattern) -> CopyList:
    """All copies of ``pattern`` in ``host`` as edge subsets, without duplicates."""
    pat = get_pattern(pattern)
    nv = 2 * host.n if host.is_bipartite else host.n
    if pat.k > nv:
        raise ValueError("pattern larger than host")
    n = host.n
    if host.is_bipartite and not pat.is_bipartite():
        return CopyList(host, pat.name, [])
    if pat.name == "C4" and host.is_bipartite:
        copies = [((x, y), (x, y2), (x2, y), (x2, y2))
                  for x, x2 in itertools.combinations(range(n), 2)
                  for y, y2 in itertools.combinations(range(n), 2)]
    elif pat.name in ("K3", "K4", "K5") and not host.is_bipartite:
        copies = [tuple(itertools.combinations(s, 2))
                  for s in itertools.combinations(range(n), pat.k)]
    elif pat.name == "C4" and not host.is_bipartite:
        copies = []
        for a, b, c, d in itertools.combinations(range(n), 4):
            for cyc in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
                es = [tuple(sorted((cyc[i], cyc[(i + 1) % 4]))) for i in range(4)]
                copies.append(tuple(sorted(es)))
    else:
        if pat.k > 8:
            raise ValueError("generic enumeration supports patterns up to 8 vertices")
        copies = _generic_copies(host, pat)
    return CopyList(host, pat.name, copies)


@dataclass
class GValue:
    """Result of :func:`min_colors_odd`.  ``g is None`` means ``g > k_max``."""

    host: HostGraph
    pattern: str
    k_max: int
    g: int | None
    witness: EdgeColoring | None
    exhausted: list = field(default_factory=list)
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def exceeds(self) -> bool:
        return self.g is None

    def to_dict(self) -> dict:
        return {
            "host": self.host.spec(),
            "pattern": self.pattern,
            "kmax": self.k_max,
            "g": self.g,
            "result": f"g = {self.g}" if self.g is not None else f"g > {self.k_max}",
            "exhausted": self.exhausted,
            "nodes": self.nodes,
            "elapsed": round(self.elapsed, 6),
        }


class _Search:
    def __init__(self, host, copies):
        edges = host.edges()
        # most-constrained edges first
        load = {e: 0 for e in edges}
        for cp in copies:
            for e in cp:
                load[e] += 1
        self.order = sorted(edges, key=lambda e: (-load[e], e))
        pos = {e: i for i, e in enumerate(self.order)}
        self.masks_at: list[list[int]] = [[] for _ in self.order]
        for cp in copies:
            ps = [pos[e] for e in cp]
            m = 0
            for p in ps:
                m |= 1 << p
            self.masks_at[max(ps)].append(m)
        self.nodes = 0

    def run(self, k: int):
        E = len(self.order)
        color = [0] * E
        cmask = [0] * k
        masks_at = self.masks_at

        def all_even(m):
            for c in range(k):
                if (cmask[c] & m).bit_count() & 1:
                    return False
            return True

        def rec(i, used):
            self.nodes += 1
            if i == E:
                return True
            top = min(used + 1, k)  # a fresh color only as the next unused id
            for c in range(top):
                cmask[c] |= 1 << i
                color[i] = c
                bad = False
                for m in masks_at[i]:
                    if all_even(m):
                        bad = True
                        break
                if not bad and rec(i + 1, max(used, c + 1)):
                    return True
                cmask[c] &= ~(1 << i)
            return False

        return list(color) if rec(0, 0) else None


def min_colors_odd(host: HostGraph, pattern, k_max: int, *, max_edges: int = DEFAULT_MAX_EDGES,
                   force: bool = False) -> GValue:
    """Least ``k <= k_max`` such that some ``k``-coloring gives every copy an odd class."""
    pat = get_pattern(pattern)
    if host.num_edges > max_edges and not force:
        raise ValueError(
            f"host has {host.num_edges} edges, above the exact-search guard of {max_edges}; "
            "pass force=True to run anyway")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    t0 = time.perf_counter()
    copies = enumerate_copies(host, pat).copies
    s = _Search(host, copies)
    exhausted = []
    for k in range(1, k_max + 1):
        sol = s.run(k)
        if sol is not None:
            m = np.full((host.n, host.n), -1, dtype=np.int32)
            for e, c in zip(s.order, sol):
                m[e] = c
                if not host.is_bipartite:
                    m[e[1], e[0]] = c
            # first-use ordering may leave top ids unused when k > needed; it cannot here
            wit = EdgeColoring.from_matrix(host, m, compact=True)
            return GValue(host, pat.name, k_max, k, wit, exhausted, s.nodes,
                          time.perf_counter() - t0)
        exhausted.append(k)
    return GValue(host, pat.name, k_max, None, None, exhausted, s.nodes, time.perf_counter() - t0)


def verify_witness(host: HostGraph, pattern, coloring: EdgeColoring) -> bool:
    """True iff every copy of ``pattern`` has an odd color class."""
    if coloring.host != host:
        raise ValueError("coloring is on a different host")
    coloring.require_total()
    return all(has_odd_class(coloring, cp) for cp in enumerate_copies(host, pattern).copies)


def copy_count(host: HostGraph, pattern) -> int:
    """Closed-form copy counts for the fast-path patterns."""
    pat = get_pattern(pattern)
    n = host.n
    if host.is_bipartite:
        if pat.name == "C4":
            return math.comb(n, 2) ** 2
        if not pat.is_bipartite():
            return 0
    elif pat.name in ("K3", "K4", "K5"):
        return math.comb(n, pat.k)
    elif pat.name == "C4":
        return 3 * math.comb(n, 4)
    return len(enumerate_copies(host, pat))
