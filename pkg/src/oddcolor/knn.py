"""Two-stage coloring of ``K_{n,n}`` in which every 4-cycle has an odd color class.

Stage 1 packs monochromatic 6-cycles with ``ceil(n/2)`` colors.  Each packed
cycle occupies 18 keys: its six cross edges, the six same-side pairs among its
vertices, and the six (vertex, color) pairs.  No two packed cycles may share a
key, and no 4-cycle may end up as two monochromatic opposite pairs (a
"conflict").  Sampling is uniform rejection sampling over (color, cycle); once
it stalls, a deterministic completion pass visits every (color, X-vertex) slot
in a shuffled order and packs any cycle that still fits.

Stage 2 colors the leftover edges ``L`` from a fresh palette with
Moser-Tardos resampling of three bad events:

* A -- two adjacent L-edges with the same fresh color;
* B -- a 4-cycle inside ``L`` colored ``i, j, j, i`` with ``i != j`` around it;
* C -- L-edges ``xy`` and ``x'y'`` of one fresh color whose crossing edges
  ``xy'`` and ``x'y`` carry the same stage-1 color.

The lowest-numbered bad event is resampled each round.  After
``max_rounds`` rounds without success the palette grows and stage 2 restarts.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import EdgeColoring, HostGraph
from .verify import scan_c4_odd

MIN_N = 12


# -- stage 1 data ---------------------------------------------------------------

def canonical_cycle(seq) -> tuple[int, ...]:
    """Rotate/reflect ``(x1,y1,x2,y2,x3,y3)``: x1 minimal, then y1 < y3."""
    xs = (seq[0], seq[2], seq[4])
    r = 2 * xs.index(min(xs))
    s = [seq[(r + t) % 6] for t in range(6)]
    if s[1] > s[5]:
        s = [s[0], s[5], s[4], s[3], s[2], s[1]]
    return tuple(s)


@dataclass(frozen=True)
class CycleSlot:
    """A 6-cycle ``x1 y1 x2 y2 x3 y3`` with a 1-based stage-1 color."""

    cycle: tuple
    color: int

    def __post_init__(self):
        c = tuple(int(v) for v in self.cycle)
        if len(c) != 6:
            raise ValueError("a cycle slot has six vertices")
        if len({c[0], c[2], c[4]}) != 3 or len({c[1], c[3], c[5]}) != 3:
            raise ValueError("cycle vertices must be distinct")
        object.__setattr__(self, "cycle", canonical_cycle(c))

    def edges(self) -> list[tuple[int, int]]:
        x1, y1, x2, y2, x3, y3 = self.cycle
        return [(x1, y1), (x2, y1), (x2, y2), (x3, y2), (x3, y3), (x1, y3)]

    def keys(self) -> list[tuple]:
        """The 18 occupancy keys."""
        x1, y1, x2, y2, x3, y3 = self.cycle
        xs, ys = sorted((x1, x2, x3)), sorted((y1, y2, y3))
        out = [("e",) + e for e in self.edges()]
        out += [("xx", xs[0], xs[1]), ("xx", xs[0], xs[2]), ("xx", xs[1], xs[2])]
        out += [("yy", ys[0], ys[1]), ("yy", ys[0], ys[2]), ("yy", ys[1], ys[2])]
        out += [("xc", x, self.color) for x in xs] + [("yc", y, self.color) for y in ys]
        return out


class MatchingState:
    """Chosen slots plus the three occupancy sets (reference implementation)."""

    def __init__(self, n: int):
        self.n = n
        self.chosen: list[CycleSlot] = []
        self.occupied_cross: set = set()
        self.occupied_same_side: set = set()
        self.occupied_color_vertex: set = set()
        self.colors: dict[tuple[int, int], int] = {}

    def _split(self, slot):
        keys = slot.keys()
        return ({k[1:] for k in keys[:6]}, set(keys[6:12]), set(keys[12:]))

    def occupancy_ok(self, slot: CycleSlot) -> bool:
        cross, same, cv = self._split(slot)
        return not (cross & self.occupied_cross or same & self.occupied_same_side
                    or cv & self.occupied_color_vertex)

    def add(self, slot: CycleSlot) -> None:
        if not self.occupancy_ok(slot):
            raise ValueError("occupancy violation")
        cross, same, cv = self._split(slot)
        self.occupied_cross |= cross
        self.occupied_same_side |= same
        self.occupied_color_vertex |= cv
        for e in slot.edges():
            self.colors[e] = slot.color
        self.chosen.append(slot)


def conflict_check(state: MatchingState, candidate: CycleSlot) -> bool:
    """Would adding ``candidate`` create a 4-cycle of two monochromatic opposite pairs?"""
    if not state.occupancy_ok(candidate):
        raise ValueError("occupancy violation")
    col = dict(state.colors)
    new = candidate.edges()
    for e in new:
        col[e] = candidate.color
    same = [e for e, c in col.items() if c == candidate.color]
    for x, y in new:
        for xb, yb in same:
            if xb == x or yb == y:
                continue
            a = col.get((x, yb))
            if a is not None and a == col.get((xb, y)):
                return True
    return False


@dataclass
class Stage1Result:
    n: int
    seed: int
    F: EdgeColoring  # partial; stage-1 ids 0..ceil(n/2)-1
    slots: list
    stats: dict

    @property
    def leftover(self) -> np.ndarray:
        """Boolean ``n x n`` mask of uncolored edges."""
        return self.F.matrix < 0

    def leftover_edges(self) -> list[tuple[int, int]]:
        xs, ys = np.nonzero(self.leftover)
        return list(zip(xs.tolist(), ys.tolist()))


def default_max_failures(n: int) -> int:
    return 20 * n


def random_greedy_stage1(n: int, seed: int, max_failures: int | None = None, *,
                         complete: bool = True, backend=None) -> Stage1Result:
    """Conflict-free packing of monochromatic 6-cycles in ``K_{n,n}``.

    Stops rejection sampling after ``max_failures`` consecutive rejections,
    then (unless ``complete`` is false) runs the completion pass.
    """
    if n < MIN_N:
        raise ValueError("n too small")
    if max_failures is None:
        max_failures = default_max_failures(n)
    be = kernels.get(backend)
    t0 = time.perf_counter()
    raw, stats = be.stage1_run(int(n), int(seed) & ((1 << 64) - 1), int(max_failures), bool(complete))
    m = np.full((n, n), -1, dtype=np.int32)
    slots = []
    for row in raw.tolist():
        s = CycleSlot(tuple(row[1:]), row[0] + 1)
        slots.append(s)
        for e in s.edges():
            m[e] = row[0]
    k = (n + 1) // 2
    used = np.unique(m[m >= 0])
    stats = dict(stats)
    stats.update(slots=len(slots), colors_available=k, colors_used=int(used.size),
                 covered_edges=int((m >= 0).sum()), max_failures=int(max_failures),
                 elapsed=time.perf_counter() - t0, backend=be.NAME)
    # EdgeColoring needs contiguous ids; every color is used at any n >= 12 in practice
    F = EdgeColoring.from_matrix(HostGraph.bipartite(n), m, compact=used.size != k)
    return Stage1Result(n, seed, F, slots, stats)


# -- stage 1 properties ------------------------------------------------------------

def _color_classes_are_c6_unions(m: np.ndarray) -> tuple[bool, str]:
    n = m.shape[0]
    for c in np.unique(m[m >= 0]).tolist():
        xs, ys = np.nonzero(m == c)
        degx = np.bincount(xs, minlength=n)
        degy = np.bincount(ys, minlength=n)
        if np.any((degx != 0) & (degx != 2)) or np.any((degy != 0) & (degy != 2)):
            return False, f"color {c}: a vertex has degree other than 0 or 2"
        adj: dict = {}
        for x, y in zip(xs.tolist(), ys.tolist()):
            adj.setdefault(("x", x), []).append(("y", y))
            adj.setdefault(("y", y), []).append(("x", x))
        seen = set()
        for v in adj:
            if v in seen:
                continue
            comp, stack = 0, [v]
            seen.add(v)
            while stack:
                u = stack.pop()
                comp += 1
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if comp != 6:
                return False, f"color {c}: a component has {comp} vertices"
    return True, ""


def leftover_max_degree(L: np.ndarray) -> int:
    if L.size == 0:
        return 0
    return int(max(L.sum(axis=1).max(), L.sum(axis=0).max()))


def crossing_counts(F: np.ndarray) -> np.ndarray:
    """``out[x, y]`` = #{L-edges x'y' with F[x,y'] == F[x',y] colored}."""
    L = (F < 0).astype(np.int64)
    n = F.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in np.unique(F[F >= 0]).tolist():
        A = (F == c).astype(np.int64)
        out += A @ L.T @ A
    return out


@dataclass
class Stage1Report:
    prop1: bool
    prop1_detail: str
    prop2: bool
    prop2_violations: int
    max_degree: int
    degree_threshold: float
    crossing_max: int
    crossing_threshold: float

    @property
    def prop3(self) -> bool:
        return self.max_degree <= self.degree_threshold

    @property
    def prop4(self) -> bool:
        return self.crossing_max <= self.crossing_threshold

    def to_dict(self) -> dict:
        return {
            "prop1_c6_union": self.prop1,
            "prop1_detail": self.prop1_detail,
            "prop2_f_c4_odd": self.prop2,
            "prop2_violations": self.prop2_violations,
            "prop3_max_degree": self.max_degree,
            "prop3_threshold": self.degree_threshold,
            "prop3_within": self.prop3,
            "prop4_max_crossing": self.crossing_max,
            "prop4_threshold": self.crossing_threshold,
            "prop4_within": self.prop4,
        }


def soft_thresholds(n: int, delta: float = 0.25) -> tuple[float, float]:
    """``(n^(1-delta), 4 n^(1-delta))``."""
    b = n ** (1.0 - delta)
    return b, 4.0 * b


def check_stage1_properties(F, thresholds=None, *, delta=0.25, threads=None,
                            backend=None) -> Stage1Report:
    """Check (1) and (2) exactly; measure (3) and (4) against soft thresholds."""
    if isinstance(F, Stage1Result):
        F = F.F
    m = F.matrix
    n = F.host.n
    if thresholds is None:
        thresholds = soft_thresholds(n, delta)
    ok1, why = _color_classes_are_c6_unions(m)
    rep = scan_c4_odd(F, colored_only=True, threads=threads, backend=backend)
    L = m < 0
    return Stage1Report(ok1, why, rep.ok, rep.num_violations, leftover_max_degree(L),
                        float(thresholds[0]), int(crossing_counts(m).max()) if n else 0,
                        float(thresholds[1]))


# -- stage 2 ---------------------------------------------------------------------

@dataclass
class Stage2Config:
    delta: float = 0.25
    palette: int | None = None  # initial |P|; default ceil(n^(1-delta))
    max_rounds: int | None = None  # default 50 |L|
    growth: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.growth <= 1.0:
            raise ValueError("growth factor must exceed 1")
        if self.palette is not None and self.palette < 1:
            raise ValueError("palette must be at least 1")

    def initial_palette(self, n: int) -> int:
        if self.palette is not None:
            return int(self.palette)
        return max(1, math.ceil(n ** (1.0 - self.delta) - 1e-9))

    def rounds(self, num_leftover: int) -> int:
        return int(self.max_rounds) if self.max_rounds is not None else 50 * num_leftover

    def to_dict(self) -> dict:
        return {"delta": self.delta, "palette": self.palette, "max_rounds": self.max_rounds,
                "growth": self.growth, "seed": self.seed}


@dataclass(frozen=True)
class BadEvent:
    kind: str  # "A" | "B" | "C"
    edges: tuple  # L-edges involved
    color_data: tuple  # fresh colors seen (and stage-1 color for C)


def bad_events(F: np.ndarray, fresh: np.ndarray, limit: int | None = None) -> list[BadEvent]:
    """Direct scan for occurring A/B/C events (independent of the resampler)."""
    n = F.shape[0]
    L = F < 0
    out: list[BadEvent] = []

    def full():
        return limit is not None and len(out) >= limit

    for x in range(n):
        ys = np.nonzero(L[x])[0].tolist()
        for a in range(len(ys)):
            for b in range(a + 1, len(ys)):
                if fresh[x, ys[a]] == fresh[x, ys[b]]:
                    out.append(BadEvent("A", ((x, ys[a]), (x, ys[b])), (int(fresh[x, ys[a]]),)))
                    if full():
                        return out
    for y in range(n):
        xs = np.nonzero(L[:, y])[0].tolist()
        for a in range(len(xs)):
            for b in range(a + 1, len(xs)):
                if fresh[xs[a], y] == fresh[xs[b], y]:
                    out.append(BadEvent("A", ((xs[a], y), (xs[b], y)), (int(fresh[xs[a], y]),)))
                    if full():
                        return out
    for x in range(n):
        for x2 in range(x + 1, n):
            lx, lx2 = np.nonzero(L[x])[0].tolist(), np.nonzero(L[x2])[0].tolist()
            s1, s2 = set(lx), set(lx2)
            for y in lx:
                for y2 in lx2:
                    if y == y2:
                        continue
                    if y < y2 and y2 in s1 and y in s2:
                        a, b, c, d = fresh[x, y], fresh[x, y2], fresh[x2, y], fresh[x2, y2]
                        if a == d and b == c and a != b:
                            out.append(BadEvent("B", ((x, y), (x, y2), (x2, y), (x2, y2)),
                                                (int(a), int(b))))
                    f1, f2 = F[x, y2], F[x2, y]
                    if f1 >= 0 and f1 == f2 and fresh[x, y] == fresh[x2, y2]:
                        out.append(BadEvent("C", ((x, y), (x2, y2)), (int(fresh[x, y]), int(f1))))
                    if full():
                        return out
    return out


def stage2_lll(F, config: Stage2Config | None = None, *, backend=None):
    """Color the leftover of ``F`` from a fresh palette; returns ``(coloring, info)``.

    Stage-1 colors keep ids ``0..ceil(n/2)-1``; fresh colors that end up used
    follow in palette order.
    """
    config = config or Stage2Config()
    if isinstance(F, Stage1Result):
        F = F.F
    n = F.host.n
    m = np.asarray(F.matrix, dtype=np.int32)
    nL = int((m < 0).sum())
    t0 = time.perf_counter()
    if nL == 0:
        return F, {"palette": 0, "rounds": 0, "restarts": 0,
                   "events": {"A": 0, "B": 0, "C": 0}, "fresh_used": 0, "elapsed": 0.0}
    be = kernels.get(backend)
    k0 = config.initial_palette(n)
    fresh, info = be.stage2_run(m, k0, float(config.growth), config.rounds(nL),
                                int(config.seed) & ((1 << 64) - 1))
    mask = m < 0
    used = np.unique(fresh[mask])
    remap = np.full(int(info["palette"]), -1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    total = m.astype(np.int64).copy()
    total[mask] = F.num_colors + remap[fresh[mask]]
    info = dict(info)
    info.update(fresh_used=int(used.size), elapsed=time.perf_counter() - t0, backend=be.NAME,
                initial_palette=k0, max_rounds=config.rounds(nL))
    return EdgeColoring(F.host, total), info


def build_knn_coloring(n: int, config: Stage2Config | None = None, *, max_failures=None,
                       verify: bool = True, threads=None, backend=None):
    """Stage 1, stage 2 and (optionally) the exhaustive 4-cycle check."""
    config = config or Stage2Config()
    t0 = time.perf_counter()
    s1 = random_greedy_stage1(n, config.seed, max_failures, backend=backend)
    col, info2 = stage2_lll(s1, config, backend=backend)
    L = s1.leftover
    stats = {
        "n": n,
        "seed": int(config.seed),
        "config": config.to_dict(),
        "stage1": s1.stats,
        "stage1_colors_used": s1.F.num_colors,
        "leftover_edges": int(L.sum()),
        "leftover_max_degree": leftover_max_degree(L),
        "crossing_max": int(crossing_counts(s1.F.matrix).max()),
        "stage2": info2,
        "palette": int(info2["palette"]),
        "total_colors": col.num_colors,
        "ratio": col.num_colors / n,
    }
    if verify:
        rep = scan_c4_odd(col, threads=threads, backend=backend)
        stats["c4_checked"] = rep.checked
        stats["c4_violations"] = rep.num_violations
    stats["elapsed"] = time.perf_counter() - t0
    return col, stats
