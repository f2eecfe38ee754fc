"""Host graphs, edge colorings, parity signatures and the coloring file format."""

from __future__ import annotations

import io
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, TextIO

import numpy as np

COMPLETE = "complete"
BIPARTITE = "bipartite"
FORMAT_TAG = "oddcolor v1"


class PartialColoringError(ValueError):
    """An edge that must be colored is unassigned."""

    def __init__(self, msg: str = "partial coloring"):
        super().__init__(msg)


class ColoringFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line
        self.reason = msg


@dataclass(frozen=True)
class HostGraph:
    """``K_n`` (kind ``complete``) or ``K_{n,n}`` (kind ``bipartite``).

    Complete hosts have vertices ``0..n-1``.  Bipartite hosts have vertices
    ``(0, i)`` on side X and ``(1, j)`` on side Y; their edges are written
    ``(i, j)`` with the X index first.
    """

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in (COMPLETE, BIPARTITE):
            raise ValueError(f"unknown host kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @classmethod
    def complete(cls, n: int) -> "HostGraph":
        return cls(COMPLETE, n)

    @classmethod
    def bipartite(cls, n: int) -> "HostGraph":
        return cls(BIPARTITE, n)

    @property
    def is_bipartite(self) -> bool:
        return self.kind == BIPARTITE

    @property
    def num_edges(self) -> int:
        n = self.n
        return n * n if self.is_bipartite else n * (n - 1) // 2

    def vertices(self) -> list:
        if self.is_bipartite:
            return [(0, i) for i in range(self.n)] + [(1, j) for j in range(self.n)]
        return list(range(self.n))

    def edges(self) -> list[tuple[int, int]]:
        """All edges in canonical order."""
        n = self.n
        if self.is_bipartite:
            return [(x, y) for x in range(n) for y in range(n)]
        return [(u, v) for u in range(n) for v in range(u + 1, n)]

    def edge(self, u, v) -> tuple[int, int]:
        """Canonical form of the edge joining vertices ``u`` and ``v``."""
        n = self.n
        if self.is_bipartite:
            (su, iu), (sv, iv) = u, v
            if su == sv:
                raise ValueError("non-bipartite edge")
            if su == 1:
                iu, iv = iv, iu
            if not (0 <= iu < n and 0 <= iv < n):
                raise ValueError("vertex out of range")
            return (iu, iv)
        if u == v:
            raise ValueError("loop edge")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError("vertex out of range")
        return (u, v) if u < v else (v, u)

    def check_edge(self, e: tuple[int, int]) -> tuple[int, int]:
        """Validate an edge given in index form and return it canonically."""
        u, v = e
        if self.is_bipartite:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("vertex out of range")
            return (u, v)
        return self.edge(u, v)

    def spec(self) -> str:
        return f"{'B' if self.is_bipartite else 'K'}:{self.n}"


class EdgeColoring:
    """Immutable (possibly partial) map from host edges to dense color ids.

    Colors are kept in an ``n x n`` int32 matrix with ``-1`` for unassigned
    edges.  Complete hosts store the matrix symmetrically; bipartite hosts
    index it as ``[x, y]``.  Color ids in use must be exactly ``0..t-1``.
    """

    __slots__ = ("host", "_m", "num_colors", "_total")

    def __init__(self, host: HostGraph, matrix: np.ndarray):
        m = np.array(matrix, dtype=np.int32, copy=True)
        if m.shape != (host.n, host.n):
            raise ValueError("matrix shape does not match host")
        if not host.is_bipartite:
            if not np.array_equal(m, m.T):
                raise ValueError("complete-host matrix must be symmetric")
            if np.any(np.diag(m) != -1):
                raise ValueError("diagonal must be unassigned")
        if np.any(m < -1):
            raise ValueError("color ids must be non-negative")
        used = np.unique(m[m >= 0])
        if used.size and (used[0] != 0 or used[-1] != used.size - 1):
            raise ValueError("color ids in use must form a contiguous range 0..t-1")
        m.flags.writeable = False
        self.host = host
        self._m = m
        self.num_colors = int(used.size)
        assigned = int((m >= 0).sum())
        if not host.is_bipartite:
            assigned //= 2
        self._total = assigned == host.num_edges

    @classmethod
    def from_matrix(cls, host: HostGraph, matrix: np.ndarray, compact: bool = False):
        m = np.asarray(matrix, dtype=np.int64)
        if compact:
            m = compact_ids(m)
        return cls(host, m)

    @classmethod
    def from_mapping(cls, host: HostGraph, assignment: Mapping[tuple, int]):
        m = np.full((host.n, host.n), -1, dtype=np.int32)
        for e, c in assignment.items():
            u, v = host.check_edge(e)
            m[u, v] = c
            if not host.is_bipartite:
                m[v, u] = c
        return cls(host, m)

    @property
    def matrix(self) -> np.ndarray:
        """Read-only color matrix."""
        return self._m

    @property
    def is_total(self) -> bool:
        return self._total

    def color(self, e: tuple[int, int]) -> int | None:
        c = int(self._m[e[0], e[1]])
        return None if c < 0 else c

    def assignment(self) -> dict[tuple[int, int], int]:
        out = {}
        for e in self.host.edges():
            c = self._m[e]
            if c >= 0:
                out[e] = int(c)
        return out

    def require_total(self) -> None:
        if not self._total:
            raise PartialColoringError()

    def __eq__(self, other):
        if not isinstance(other, EdgeColoring):
            return NotImplemented
        return self.host == other.host and np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash((self.host, self._m.tobytes()))

    def __repr__(self):
        state = "total" if getattr(self, "_total", False) else "partial"
        return f"EdgeColoring({self.host.spec()}, t={getattr(self, 'num_colors', '?')}, {state})"


def compact_ids(m: np.ndarray) -> np.ndarray:
    """Relabel non-negative ids to ``0..t-1`` preserving their order."""
    m = np.asarray(m)
    out = np.full(m.shape, -1, dtype=np.int32)
    mask = m >= 0
    if mask.any():
        _, inv = np.unique(m[mask], return_inverse=True)
        out[mask] = inv
    return out


def parity_signature(coloring: EdgeColoring, subset: Iterable[tuple[int, int]]) -> dict[int, int]:
    """Multiplicity mod 2 of every color occurring on ``subset``."""
    m = coloring.matrix
    counts: Counter = Counter()
    for u, v in subset:
        c = int(m[u, v])
        if c < 0:
            raise PartialColoringError()
        counts[c] += 1
    return {c: k & 1 for c, k in sorted(counts.items())}


def has_odd_class(coloring: EdgeColoring, subset: Iterable[tuple[int, int]]) -> bool:
    return any(parity_signature(coloring, subset).values())


def clique_edges(vertices: Iterable[int]) -> list[tuple[int, int]]:
    vs = sorted(vertices)
    return [(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]


# -- file format -------------------------------------------------------------

def dumps_coloring(coloring: EdgeColoring, comments: Iterable[str] = ()) -> str:
    host = coloring.host
    lines = [FORMAT_TAG, f"graph {host.kind} n={host.n}", f"colors t={coloring.num_colors}"]
    m = coloring.matrix
    if host.is_bipartite:
        xs, ys = np.nonzero(m >= 0)
    else:
        xs, ys = np.nonzero(np.triu(m >= 0, 1))
    # np.nonzero walks row-major, which is the canonical edge order
    cs = m[xs, ys]
    lines.extend(f"e {u} {v} {c}" for u, v, c in zip(xs.tolist(), ys.tolist(), cs.tolist()))
    lines.extend(f"# {c}" for c in comments)
    return "\n".join(lines) + "\n"


def write_coloring(coloring: EdgeColoring, destination, comments: Iterable[str] = ()) -> None:
    text = dumps_coloring(coloring, comments)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        destination.write(text)


def _parse_vertex(tok: str, lineno: int) -> tuple[str | None, int]:
    side = None
    if tok[:1] in ("x", "y"):
        side, tok = tok[0], tok[1:]
    try:
        return side, int(tok)
    except ValueError:
        raise ColoringFormatError(lineno, f"bad vertex {tok!r}") from None


def loads_coloring(text: str) -> EdgeColoring:
    return read_coloring(io.StringIO(text))


def read_coloring(source) -> EdgeColoring:
    """Parse the text format written by :func:`write_coloring`.

    Bipartite records may also name sides explicitly (``e x3 y5 c``); a
    record joining two vertices of the same side is rejected.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return _read(fh)
    return _read(source)


def _read(fh: TextIO) -> EdgeColoring:
    header: list[tuple[int, str]] = []
    records: list[tuple[int, str]] = []
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if len(header) < 3:
            header.append((lineno, line))
        else:
            records.append((lineno, line))
    if len(header) < 3:
        raise ColoringFormatError(len(header) + 1, "malformed header: truncated")
    (l1, tag), (l2, gline), (l3, cline) = header
    if tag != FORMAT_TAG:
        raise ColoringFormatError(l1, f"malformed header: expected {FORMAT_TAG!r}")
    parts = gline.split()
    if len(parts) != 3 or parts[0] != "graph" or parts[1] not in (COMPLETE, BIPARTITE) \
            or not parts[2].startswith("n="):
        raise ColoringFormatError(l2, "malformed header: graph line")
    try:
        n = int(parts[2][2:])
        host = HostGraph(parts[1], n)
    except ValueError:
        raise ColoringFormatError(l2, "malformed header: bad n") from None
    cparts = cline.split()
    if len(cparts) != 2 or cparts[0] != "colors" or not cparts[1].startswith("t="):
        raise ColoringFormatError(l3, "malformed header: colors line")
    try:
        t = int(cparts[1][2:])
    except ValueError:
        raise ColoringFormatError(l3, "malformed header: bad t") from None
    if t < 0:
        raise ColoringFormatError(l3, "malformed header: bad t")

    m = np.full((n, n), -1, dtype=np.int32)
    for lineno, line in records:
        toks = line.split()
        if len(toks) != 4 or toks[0] != "e":
            raise ColoringFormatError(lineno, "malformed edge record")
        (su, u), (sv, v) = _parse_vertex(toks[1], lineno), _parse_vertex(toks[2], lineno)
        try:
            c = int(toks[3])
        except ValueError:
            raise ColoringFormatError(lineno, "bad color id") from None
        if not 0 <= c < t:
            raise ColoringFormatError(lineno, f"color {c} outside 0..t-1")
        if host.is_bipartite:
            if su is not None and sv is not None and su == sv:
                raise ColoringFormatError(lineno, "non-bipartite edge")
            if su == "y" or sv == "x":
                u, v = v, u
            if not (0 <= u < n and 0 <= v < n):
                raise ColoringFormatError(lineno, "vertex out of range")
        else:
            if su is not None or sv is not None:
                raise ColoringFormatError(lineno, "side prefix on complete host")
            if u == v:
                raise ColoringFormatError(lineno, "loop edge")
            if not (0 <= u < n and 0 <= v < n):
                raise ColoringFormatError(lineno, "vertex out of range")
            if u > v:
                u, v = v, u
        if m[u, v] >= 0:
            raise ColoringFormatError(lineno, "duplicate edge")
        m[u, v] = c
        if not host.is_bipartite:
            m[v, u] = c
    used = np.unique(m[m >= 0])
    if used.size != t:
        raise ColoringFormatError(l3, f"header says t={t} but {used.size} colors are used")
    return EdgeColoring(host, m)
