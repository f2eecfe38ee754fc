"""Scans over cliques, bipartite 4-cycles and small colored patterns.

All heavy loops live in :mod:`oddcolor.kernels`; this module partitions the
work, runs the pieces on a thread pool and merges the reports.  Chunks are
contiguous ranges of the first vertex (exhaustive mode) or of the sample
index (sampled mode), so the merged report does not depend on how many
threads ran it.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .graph import EdgeColoring, PartialColoringError, clique_edges, parity_signature
from .rng import SplitMix64

EXHAUSTIVE_BUDGET = 10 ** 9
DEFAULT_LIMIT = 100
_HASH_SEED = 0x0DDC0104C0105EED


@dataclass(frozen=True)
class Mode:
    """``exhaustive`` or ``sampled`` with a seed and a sample count."""

    kind: str = "exhaustive"
    seed: int | None = None
    count: int | None = None

    def __post_init__(self):
        if self.kind not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown mode {self.kind!r}")
        if self.kind == "sampled" and (self.seed is None or self.count is None or self.count < 0):
            raise ValueError("sampled mode needs a seed and a non-negative count")

    @classmethod
    def sampled(cls, seed: int, count: int) -> "Mode":
        return cls("sampled", int(seed), int(count))

    def text(self) -> str:
        return "exhaustive" if self.kind == "exhaustive" else f"sample:{self.seed}:{self.count}"


def parse_mode(text) -> Mode:
    """``exhaustive`` or ``sample:<seed>:<count>``."""
    if isinstance(text, Mode):
        return text
    if text == "exhaustive":
        return Mode()
    parts = str(text).split(":")
    if len(parts) == 3 and parts[0] == "sample":
        try:
            return Mode.sampled(int(parts[1], 0), int(float(parts[2])))
        except ValueError:
            pass
    raise ValueError(f"bad mode {text!r}; expected exhaustive or sample:<seed>:<count>")


@dataclass
class ViolationReport:
    check: str
    mode: Mode
    checked: int
    num_violations: int
    violations: list = field(default_factory=list)
    elapsed: float = 0.0
    backend: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.num_violations == 0

    @property
    def truncated(self) -> bool:
        return len(self.violations) < self.num_violations

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "mode": self.mode.kind,
            "seed": self.mode.seed,
            "count": self.mode.count,
            "checked": int(self.checked),
            "num_violations": int(self.num_violations),
            "truncated": self.truncated,
            "violations": self.violations,
            "elapsed": round(self.elapsed, 6),
            "backend": self.backend,
        }
        if self.extra:
            d["extra"] = self.extra
        return d


# -- helpers -----------------------------------------------------------------

def default_threads() -> int:
    return os.cpu_count() or 1


def _pool_map(fn, jobs, threads):
    threads = max(1, int(threads or 1))
    if threads == 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda j: fn(*j), jobs))


def _first_vertex_ranges(n: int, p: int, pieces: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into contiguous first-vertex ranges of similar work."""
    work = [math.comb(n - 1 - a, p - 1) for a in range(n)]
    total = sum(work)
    if total == 0 or pieces <= 1:
        return [(0, n)]
    target = total / pieces
    out, lo, acc = [], 0, 0
    for a, w in enumerate(work):
        acc += w
        if acc >= target and a + 1 < n:
            out.append((lo, a + 1))
            lo, acc = a + 1, 0
    out.append((lo, n))
    return out


def _sample_ranges(count: int, pieces: int) -> list[tuple[int, int]]:
    pieces = max(1, min(pieces, count or 1))
    step = -(-count // pieces) if count else 0
    return [(s, min(step, count - s)) for s in range(0, count, step)] if count else []


def color_hashes(t: int) -> np.ndarray:
    rng = SplitMix64(_HASH_SEED)
    return np.array([rng.next_u64() for _ in range(t)], dtype=np.uint64)


def _require_complete_total(coloring: EdgeColoring):
    if coloring.host.is_bipartite:
        raise ValueError("this scan needs a complete host")
    coloring.require_total()


def _check_budget(total: int, force: bool):
    if total > EXHAUSTIVE_BUDGET and not force:
        raise ValueError(
            f"exhaustive scan over {total} tuples refused (budget {EXHAUSTIVE_BUDGET}); "
            "use sampled mode or force=True")


# -- clique scans --------------------------------------------------------------

def _clique_scan(coloring, p, check, q, mode, threads, limit, force, backend, name):
    be = kernels.get(backend)
    col = np.ascontiguousarray(coloring.matrix, dtype=np.int32)
    n = coloring.host.n
    hashes = color_hashes(coloring.num_colors)
    threads = threads or default_threads()
    t0 = time.perf_counter()
    if mode.kind == "exhaustive":
        checked = math.comb(n, p)
        _check_budget(checked, force)
        jobs = [(col, hashes, p, check, q, lo, hi, limit)
                for lo, hi in _first_vertex_ranges(n, p, threads * 4)]
        parts = _pool_map(be.clique_scan, jobs, threads)
        total = sum(c for c, _ in parts)
        found = [(None, t) for _, lst in parts for t in lst][:limit]
    else:
        if p > n:
            raise ValueError("p exceeds vertex count")
        checked = mode.count
        jobs = [(col, hashes, p, check, q, mode.seed, s, c, limit)
                for s, c in _sample_ranges(mode.count, threads * 4)]
        parts = _pool_map(be.clique_sample, jobs, threads)
        total = sum(c for c, _ in parts)
        found = [jt for _, lst in parts for jt in lst][:limit]
    elapsed = time.perf_counter() - t0
    viol = []
    for j, tup in found:
        edges = clique_edges(tup)
        entry = {"vertices": list(tup)}
        if check == 0:
            entry["signature"] = {str(c): b for c, b in parity_signature(coloring, edges).items()}
        else:
            entry["colors"] = sorted({int(coloring.matrix[e]) for e in edges})
        if j is not None:
            entry["sample"] = int(j)
        viol.append(entry)
    return ViolationReport(name, mode, checked, total, viol, elapsed, be.NAME)


def scan_cliques_odd(coloring: EdgeColoring, p: int, mode="exhaustive", *, threads=None,
                     limit=DEFAULT_LIMIT, allow_any_p=False, force=False, backend=None):
    """Report ``p``-subsets whose clique has every color an even number of times."""
    _require_complete_total(coloring)
    if p not in (4, 5) and not (allow_any_p and p >= 2):
        raise ValueError("p must be 4 or 5 (other p need allow_any_p)")
    mode = parse_mode(mode)
    return _clique_scan(coloring, p, 0, 0, mode, threads, limit, force, backend, f"k{p}odd")


def scan_min_colors(coloring: EdgeColoring, p: int, q: int, mode="exhaustive", *, threads=None,
                    limit=DEFAULT_LIMIT, force=False, backend=None):
    """Report ``p``-subsets seeing fewer than ``q`` distinct colors."""
    _require_complete_total(coloring)
    if p < 2:
        raise ValueError("p must be at least 2")
    mode = parse_mode(mode)
    return _clique_scan(coloring, p, 1, q, mode, threads, limit, force, backend,
                        f"mincolors:{p},{q}")


def scan_c4_odd(coloring: EdgeColoring, *, colored_only=False, threads=None,
                limit=DEFAULT_LIMIT, backend=None):
    """Exhaustive scan of the ``C(n,2)**2`` 4-cycles of ``K_{n,n}``.

    With ``colored_only`` the coloring may be partial and only 4-cycles whose
    four edges are all colored are examined.
    """
    if not coloring.host.is_bipartite:
        raise ValueError("C4 scan needs a bipartite host")
    if not colored_only:
        coloring.require_total()
    be = kernels.get(backend)
    n = coloring.host.n
    col = np.ascontiguousarray(coloring.matrix, dtype=np.int32)
    threads = threads or default_threads()
    t0 = time.perf_counter()
    ranges = _first_vertex_ranges(n, 2, threads * 4)
    parts = _pool_map(be.c4_scan, [(col, lo, hi, bool(colored_only), limit) for lo, hi in ranges],
                      threads)
    total = sum(c for c, _ in parts)
    found = [t for _, lst in parts for t in lst][:limit]
    viol = [{"x": [x, x2], "y": [y, y2],
             "colors": [int(col[x, y]), int(col[x, y2]), int(col[x2, y]), int(col[x2, y2])]}
            for x, x2, y, y2 in found]
    checked = math.comb(n, 2) ** 2
    return ViolationReport("c4odd", Mode(), checked, total, viol, time.perf_counter() - t0, be.NAME)


# -- patterns ----------------------------------------------------------------

LETTERS = "abcdefgh"


def _pair(s: str) -> tuple[int, int]:
    a, b = LETTERS.index(s[0]), LETTERS.index(s[1])
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PatternSpec:
    """Equality constraints on the edges of ``K_k``.

    ``groups`` lists edge classes that must be monochromatic; with
    ``distinct`` set, different classes must get different colors.  The
    optional ``profile`` is the required sorted (descending) multiset of color
    multiplicities over all ``C(k,2)`` edges, e.g. ``(2, 2, 2)`` for a ``K_4``
    with three colors used twice each.
    """

    name: str
    k: int
    groups: tuple
    distinct: bool = True
    profile: tuple = ()

    def __post_init__(self):
        if self.k < 2 or self.k > len(LETTERS):
            raise ValueError("pattern size out of range")
        seen = set()
        for g in self.groups:
            if not g:
                raise ValueError(f"{self.name}: empty group")
            for a, b in g:
                if not (0 <= a < b < self.k):
                    raise ValueError(f"{self.name}: bad edge position {(a, b)}")
                if (a, b) in seen:
                    raise ValueError(f"{self.name}: groups overlap at {(a, b)}")
                seen.add((a, b))
        if self.profile and sum(self.profile) != self.k * (self.k - 1) // 2:
            raise ValueError(f"{self.name}: profile does not sum to the edge count")
        if list(self.profile) != sorted(self.profile, reverse=True):
            raise ValueError(f"{self.name}: profile must be sorted descending")

    @classmethod
    def from_letters(cls, name, k, groups, distinct=True, profile=()):
        """Build from groups such as ``[("ad", "bc"), ("ac", "ab")]``."""
        gs = tuple(tuple(_pair(e) for e in g) for g in groups)
        return cls(name, k, gs, distinct, tuple(profile))

    def pos_group(self) -> np.ndarray:
        """Group index per edge position of ``K_k`` (row-major, -1 if free)."""
        pos = {e: i for i, e in enumerate(itertools.combinations(range(self.k), 2))}
        out = np.full(len(pos), -1, dtype=np.int32)
        for g, grp in enumerate(self.groups):
            for e in grp:
                out[pos[e]] = g
        return out

    def automorphisms(self) -> list[tuple[int, ...]]:
        target = {frozenset(g) for g in self.groups}
        auts = []
        for s in itertools.permutations(range(self.k)):
            img = {frozenset(tuple(sorted((s[a], s[b]))) for a, b in g) for g in self.groups}
            if img == target:
                auts.append(s)
        return auts

    def representatives(self) -> np.ndarray:
        """One permutation per orbit of vertex assignments under the symmetries."""
        auts = self.automorphisms()
        reps = []
        for pi in itertools.permutations(range(self.k)):
            orbit_min = min(tuple(pi[s[a]] for a in range(self.k)) for s in auts)
            if orbit_min == pi:
                reps.append(pi)
        return np.array(reps, dtype=np.int32)

    def matches(self, col, t) -> bool:
        """Plain-Python check of one ordered vertex tuple (reference)."""
        gcol = []
        for g in self.groups:
            cs = {int(col[t[a], t[b]]) for a, b in g}
            if len(cs) != 1:
                return False
            gcol.append(cs.pop())
        if self.distinct and len(set(gcol)) != len(gcol):
            return False
        if self.profile:
            cnt: dict = {}
            for a, b in itertools.combinations(range(self.k), 2):
                c = int(col[t[a], t[b]])
                cnt[c] = cnt.get(c, 0) + 1
            if tuple(sorted(cnt.values(), reverse=True)) != tuple(self.profile):
                return False
        return True

    def planted(self) -> np.ndarray:
        """A ``k x k`` coloring matrix realizing the groups (no profile)."""
        m = np.full((self.k, self.k), -1, dtype=np.int64)
        nxt = 0
        for g in self.groups:
            for a, b in g:
                m[a, b] = m[b, a] = nxt
            nxt += 1
        for a, b in itertools.combinations(range(self.k), 2):
            if m[a, b] < 0:
                m[a, b] = m[b, a] = nxt
                nxt += 1
        return m


def builtin_patterns() -> list[PatternSpec]:
    P = PatternSpec.from_letters
    return [
        P("fig2a", 4, [("ad", "bc"), ("ac", "ab")]),
        P("fig2b", 4, [("ab", "bd"), ("da", "ac"), ("dc", "cb")]),
        P("fig2c", 4, [("cb", "da"), ("ab", "cd"), ("ac", "bd")]),
        P("k4-222", 4, [], profile=(2, 2, 2)),
        P("fig3a", 5, [("be", "cd"), ("ab", "de"), ("bc", "ae")]),
        P("fig3b", 5, [("ac", "bc"), ("ab", "bd"), ("ad", "de"), ("ae", "ec")]),
        P("fig3c", 5, [("be", "cd"), ("ab",), ("bc",), ("de",), ("ea",)]),
        P("fig3d", 5, [("bc", "de"), ("ad", "cd"), ("ab", "ac")]),
        P("fig3e", 5, [("ab", "be"), ("bc", "ac"), ("cd", "bd"), ("de", "ce"), ("ae", "ad")]),
    ]


def fig3c_contextual() -> PatternSpec:
    """``fig3c`` inside a coloring of ``K_5`` with five colors used twice each."""
    return PatternSpec.from_letters(
        "fig3c-2x5", 5, [("be", "cd"), ("ab",), ("bc",), ("de",), ("ea",)],
        profile=(2, 2, 2, 2, 2))


def match_pattern(coloring: EdgeColoring, spec: PatternSpec, mode="exhaustive", *, threads=None,
                  limit=DEFAULT_LIMIT, force=False, backend=None) -> ViolationReport:
    """Find vertex tuples realizing ``spec``.

    Exhaustive mode reports each match once per orbit under the pattern's
    symmetries.  Sampled mode draws uniform ordered tuples and counts raw hits.
    """
    _require_complete_total(coloring)
    mode = parse_mode(mode)
    n = coloring.host.n
    k = spec.k
    if k > n:
        raise ValueError("pattern larger than host")
    be = kernels.get(backend)
    col = np.ascontiguousarray(coloring.matrix, dtype=np.int32)
    pg = spec.pos_group()
    prof = np.array(spec.profile, dtype=np.int32)
    threads = threads or default_threads()
    t0 = time.perf_counter()
    if mode.kind == "exhaustive":
        reps = spec.representatives()
        checked = math.comb(n, k) * len(reps)
        _check_budget(checked, force)
        jobs = [(col, k, pg, len(spec.groups), spec.distinct, prof, reps, lo, hi, limit)
                for lo, hi in _first_vertex_ranges(n, k, threads * 4)]
        parts = _pool_map(be.pattern_scan, jobs, threads)
        total = sum(c for c, _ in parts)
        found = [(None, t) for _, lst in parts for t in lst][:limit]
    else:
        checked = mode.count
        jobs = [(col, k, pg, len(spec.groups), spec.distinct, prof, mode.seed, s, c, limit)
                for s, c in _sample_ranges(mode.count, threads * 4)]
        parts = _pool_map(be.pattern_sample, jobs, threads)
        total = sum(c for c, _ in parts)
        found = [jt for _, lst in parts for jt in lst][:limit]
    viol = []
    for j, t in found:
        entry = {"vertices": list(t), "pattern": spec.name}
        if j is not None:
            entry["sample"] = int(j)
        viol.append(entry)
    return ViolationReport(spec.name, mode, checked, total, viol, time.perf_counter() - t0, be.NAME)


# -- leftover structure -------------------------------------------------------

@dataclass(frozen=True)
class LeftoverTree:
    """Leaf (single vertex, ``color is None``) or a split by color ``color``."""

    vertices: tuple
    color: int | None = None
    left: "LeftoverTree | None" = None
    right: "LeftoverTree | None" = None

    def to_obj(self):
        if self.color is None:
            return self.vertices[0]
        return {"color": self.color, "parts": [self.left.to_obj(), self.right.to_obj()]}


def _colors_inside(col, vs) -> set:
    return {int(col[u, v]) for u, v in itertools.combinations(vs, 2)}


def _leftover(col, S: tuple) -> LeftoverTree | None:
    if len(S) == 1:
        return LeftoverTree(S)
    v0 = S[0]
    for alpha in sorted({int(col[v0, u]) for u in S[1:]}):
        # the alpha-edges must be exactly the complete bipartite graph A x B
        B = tuple(u for u in S if u != v0 and col[v0, u] == alpha)
        A = tuple(u for u in S if u not in B)
        ok = all(col[a, b] == alpha for a in A for b in B)
        if not ok:
            continue
        fa, fb = _colors_inside(col, A), _colors_inside(col, B)
        if alpha in fa or alpha in fb or fa & fb:
            continue
        ta = _leftover(col, A)
        if ta is None:
            continue
        tb = _leftover(col, B)
        if tb is None:
            continue
        return LeftoverTree(S, alpha, ta, tb)
    return None


def is_leftover(coloring: EdgeColoring, subset) -> tuple[bool, LeftoverTree | None]:
    """Whether ``subset`` has a leftover structure; returns a witness tree.

    Any split ``A | B`` must use a cut color ``alpha`` that appears on every
    edge at the first vertex crossing the cut, so trying each color at that
    vertex and reading off ``B`` as its alpha-neighbors covers all splits.
    """
    S = tuple(sorted(set(subset)))
    if not S:
        raise ValueError("empty subset")
    col = coloring.matrix
    for u, v in itertools.combinations(S, 2):
        if col[u, v] < 0:
            raise PartialColoringError()
    tree = _leftover(col, S)
    return tree is not None, tree


def four_color_k5s(coloring: EdgeColoring, *, threads=None, limit=10 ** 6, backend=None):
    """All 5-subsets whose clique uses exactly four colors (exhaustive)."""
    rep = scan_min_colors(coloring, 5, 5, threads=threads, limit=limit, backend=backend)
    return [tuple(v["vertices"]) for v in rep.violations if len(v["colors"]) == 4]
