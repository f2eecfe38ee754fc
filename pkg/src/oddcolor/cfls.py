"""Modified CFLS coloring of ``K_n`` for ``n = 2**(m*m)``.

Vertices are bit strings of length ``m*m`` read as ``m`` blocks of ``m`` bits.
For ``x < y`` let ``i`` be the first block where they differ.  The edge ``xy``
gets the tuple

    ((i, {x^(i), y^(i)}), (i_1, ..., i_m), (d_1, ..., d_m))

where ``i_k`` is the 1-based first differing bit of block ``k`` (0 when the
blocks agree) and ``d_k = +1`` iff ``x^(k) <= y^(k)`` as m-bit integers.

The leading coordinate uses the pair of *blocks* at position ``i``, not the
pair of whole vertices; with whole vertices every edge would get its own
color.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import EdgeColoring, HostGraph

MAX_DEFAULT_M = 3


@dataclass(frozen=True, order=True)
class BitVertex:
    m: int
    index: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0 <= self.index < 1 << (self.m * self.m):
            raise ValueError(f"index {self.index} out of range for m={self.m}")

    @property
    def bits(self) -> str:
        return format(self.index, f"0{self.m * self.m}b")

    def block(self, k: int) -> str:
        """Block ``k`` (1-based) as an m-bit string."""
        if not 1 <= k <= self.m:
            raise ValueError("block index out of range")
        b = self.bits
        return b[(k - 1) * self.m: k * self.m]

    def blocks(self) -> tuple[str, ...]:
        return tuple(self.block(k) for k in range(1, self.m + 1))


def vertex_from_index(idx: int, m: int) -> BitVertex:
    return BitVertex(m, idx)


def block_diff_index(b1: str, b2: str) -> int:
    """0 if equal, else the 1-based position of the first differing bit."""
    if len(b1) != len(b2):
        raise ValueError("block length mismatch")
    for pos, (u, v) in enumerate(zip(b1, b2), start=1):
        if u != v:
            return pos
    return 0


@dataclass(frozen=True)
class CflsColor:
    i: int
    block_pair: tuple[str, str]  # sorted, distinct
    diffs: tuple[int, ...]
    signs: tuple[int, ...]

    def text(self) -> str:
        """``((i,{b1,b2}),(i_1..i_m),(d_1..d_m))``"""
        d = ",".join(str(v) for v in self.diffs)
        s = ",".join("+1" if v > 0 else "-1" for v in self.signs)
        return f"(({self.i},{{{self.block_pair[0]},{self.block_pair[1]}}}),({d}),({s}))"


def cfls_color(x: BitVertex, y: BitVertex) -> CflsColor:
    if x.m != y.m:
        raise ValueError("vertices have different m")
    if x.index == y.index:
        raise ValueError("cfls_color needs two distinct vertices")
    if y.index < x.index:
        x, y = y, x
    xb, yb = x.blocks(), y.blocks()
    diffs = tuple(block_diff_index(a, b) for a, b in zip(xb, yb))
    signs = tuple(1 if int(a, 2) <= int(b, 2) else -1 for a, b in zip(xb, yb))
    i = next(k for k, d in enumerate(diffs, start=1) if d)
    pair = tuple(sorted((xb[i - 1], yb[i - 1])))
    return CflsColor(i, pair, diffs, signs)  # type: ignore[arg-type]


def _edge_keys(m: int, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Integer key per edge, injective on color tuples (us < vs)."""
    mask = (1 << m) - 1
    key = np.zeros(us.shape, dtype=np.int64)
    first = np.zeros(us.shape, dtype=np.int64)  # 1-based first differing block
    lo_blk = np.zeros(us.shape, dtype=np.int64)
    hi_blk = np.zeros(us.shape, dtype=np.int64)
    for k in range(1, m + 1):
        shift = m * (m - k)
        bu = (us >> shift) & mask
        bv = (vs >> shift) & mask
        x = bu ^ bv
        # first differing bit, 1-based from the left; 0 when equal
        d = np.where(x == 0, 0, m - np.floor(np.log2(np.maximum(x, 1))).astype(np.int64))
        sign = (bu <= bv).astype(np.int64)
        key = key * (m + 1) + d
        key = key * 2 + sign
        here = (first == 0) & (x != 0)
        first = np.where(here, k, first)
        lo_blk = np.where(here, np.minimum(bu, bv), lo_blk)
        hi_blk = np.where(here, np.maximum(bu, bv), hi_blk)
    key = ((key * (m + 1) + first) << (2 * m)) | (lo_blk << m) | hi_blk
    return key


def _decode(m: int, u: int, v: int) -> CflsColor:
    return cfls_color(BitVertex(m, u), BitVertex(m, v))


def build_cfls_coloring(m: int, allow_large: bool = False) -> tuple[EdgeColoring, list[CflsColor]]:
    """Color ``K_{2^(m^2)}``; ids follow first appearance in canonical edge order.

    Returns the coloring and the side table ``table[c]`` of color tuples.
    ``m > 3`` is refused unless ``allow_large`` is set.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > MAX_DEFAULT_M and not allow_large:
        raise ValueError(f"m={m} gives {1 << (m * m)} vertices; pass allow_large to build it")
    n = 1 << (m * m)
    us, vs = np.triu_indices(n, 1)
    us = us.astype(np.int64)
    vs = vs.astype(np.int64)
    keys = _edge_keys(m, us, vs)
    uniq, first_idx, inv = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    ids = rank[inv].astype(np.int32)
    mat = np.full((n, n), -1, dtype=np.int32)
    mat[us, vs] = ids
    mat[vs, us] = ids
    table = [_decode(m, int(us[first_idx[j]]), int(vs[first_idx[j]])) for j in order]
    return EdgeColoring(HostGraph.complete(n), mat), table


def distinct_color_count(coloring: EdgeColoring) -> int:
    coloring.require_total()
    return coloring.num_colors


def tuple_space_size(m: int) -> int:
    """Coarse ceiling on the number of possible color tuples."""
    return m * 2 ** (2 * m) * (m + 1) ** m * 2 ** m


def side_table_comments(table: list[CflsColor]) -> list[str]:
    return [f"color {c} = {col.text()}" for c, col in enumerate(table)]
