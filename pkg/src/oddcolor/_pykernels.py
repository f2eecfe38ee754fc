"""Pure-Python / numpy implementations of the hot kernels.

Every function here has a twin with the same signature and the same output in
``_kernels.pyx``.  The compiled module is preferred at import time; this one
is the fallback and the reference the compiled code is tested against.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from .rng import SplitMix64, sample_tuples

NAME = "python"
_BATCH = 1 << 18


# -- clique scans ------------------------------------------------------------

def _combos_from(a: int, n: int, p: int):
    for rest in itertools.combinations(range(a + 1, n), p - 1):
        yield (a,) + rest


def _clique_violations(col, tuples, p, check, q):
    """Boolean mask over rows of ``tuples`` (sorted p-subsets)."""
    iu, ju = np.triu_indices(p, 1)
    cs = col[tuples[:, iu], tuples[:, ju]]
    cs = np.sort(cs, axis=1)
    if check == 0:
        if cs.shape[1] % 2:
            return np.zeros(len(cs), dtype=bool)
        return np.all(cs[:, 0::2] == cs[:, 1::2], axis=1)
    distinct = 1 + np.count_nonzero(np.diff(cs, axis=1), axis=1)
    return distinct < q


def clique_scan(col, hashes, p, check, q, lo, hi, limit):
    col = np.asarray(col)
    n = col.shape[0]
    count = 0
    found: list[tuple[int, ...]] = []
    for a in range(lo, hi):
        it = _combos_from(a, n, p)
        while True:
            chunk = list(itertools.islice(it, _BATCH))
            if not chunk:
                break
            arr = np.array(chunk, dtype=np.int64)
            bad = _clique_violations(col, arr, p, check, q)
            nb = int(bad.sum())
            if nb:
                count += nb
                if len(found) < limit:
                    found.extend(tuple(r) for r in arr[bad][: limit - len(found)].tolist())
    return count, found


def clique_sample(col, hashes, p, check, q, seed, start, count, limit):
    col = np.asarray(col)
    n = col.shape[0]
    nbad = 0
    found: list[tuple[int, tuple[int, ...]]] = []
    done = 0
    while done < count:
        b = min(_BATCH, count - done)
        tup = np.sort(sample_tuples(seed, n, p, start + done, b), axis=1)
        bad = _clique_violations(col, tup, p, check, q)
        idx = np.nonzero(bad)[0]
        nbad += idx.size
        for r in idx[: max(0, limit - len(found))].tolist():
            found.append((start + done + r, tuple(tup[r].tolist())))
        done += b
    return nbad, found


# -- pattern scans -----------------------------------------------------------

def _pattern_mask(col, tuples, k, pos_group, ngroups, distinct, profile):
    iu, ju = np.triu_indices(k, 1)
    cs = col[tuples[:, iu], tuples[:, ju]]
    ok = np.ones(len(tuples), dtype=bool)
    gcols = []
    for g in range(ngroups):
        pos = np.nonzero(pos_group == g)[0]
        first = cs[:, pos[0]]
        for p_ in pos[1:]:
            ok &= cs[:, p_] == first
        gcols.append(first)
    if distinct:
        for g1 in range(ngroups):
            for g2 in range(g1 + 1, ngroups):
                ok &= gcols[g1] != gcols[g2]
    if len(profile):
        s = np.sort(cs, axis=1)
        # multiplicities via run lengths; compare as descending sorted list
        prof = np.asarray(profile)
        for r in np.nonzero(ok)[0]:
            _, cnt = np.unique(s[r], return_counts=True)
            if cnt.size != prof.size or np.any(np.sort(cnt)[::-1] != prof):
                ok[r] = False
    return ok


def pattern_scan(col, k, pos_group, ngroups, distinct, profile, perms, lo, hi, limit):
    col = np.asarray(col)
    n = col.shape[0]
    pos_group = np.asarray(pos_group)
    perms = np.asarray(perms, dtype=np.int64)
    supports = [s for a in range(lo, hi) for s in _combos_from(a, n, k)]
    if not supports:
        return 0, []
    sup = np.array(supports, dtype=np.int64)
    hits = []
    for pi, perm in enumerate(perms):
        tup = sup[:, perm]
        ok = _pattern_mask(col, tup, k, pos_group, ngroups, distinct, profile)
        for si in np.nonzero(ok)[0].tolist():
            hits.append((si, pi))
    hits.sort()
    found = [tuple(sup[si][perms[pi]].tolist()) for si, pi in hits[:limit]]
    return len(hits), found


def pattern_sample(col, k, pos_group, ngroups, distinct, profile, seed, start, count, limit):
    col = np.asarray(col)
    n = col.shape[0]
    pos_group = np.asarray(pos_group)
    nhit = 0
    found = []
    done = 0
    while done < count:
        b = min(_BATCH, count - done)
        tup = sample_tuples(seed, n, k, start + done, b)
        ok = _pattern_mask(col, tup, k, pos_group, ngroups, distinct, profile)
        idx = np.nonzero(ok)[0]
        nhit += idx.size
        for r in idx[: max(0, limit - len(found))].tolist():
            found.append((start + done + r, tuple(tup[r].tolist())))
        done += b
    return nhit, found


# -- bipartite C4 scan -------------------------------------------------------

def c4_scan(col, lo, hi, colored_only, limit):
    col = np.asarray(col)
    n = col.shape[0]
    iu, ju = np.triu_indices(n, 1)
    count = 0
    found = []
    for x in range(lo, hi):
        for x2 in range(x + 1, n):
            a, b = col[x, iu], col[x, ju]
            c, d = col[x2, iu], col[x2, ju]
            even = ((a == b) & (c == d)) | ((a == c) & (b == d)) | ((a == d) & (b == c))
            if colored_only:
                even &= (a >= 0) & (b >= 0) & (c >= 0) & (d >= 0)
            idx = np.nonzero(even)[0]
            if idx.size:
                count += idx.size
                for r in idx[: max(0, limit - len(found))].tolist():
                    found.append((x, x2, int(iu[r]), int(ju[r])))
    return count, found


# -- stage 1: conflict-free C6 packing ----------------------------------------

def draw_triple(rng: SplitMix64, n: int) -> list[int]:
    picked: list[int] = []
    for t in range(3):
        v = rng.below(n - t)
        for c in sorted(picked):
            if v >= c:
                v += 1
        picked.append(v)
    return picked


def canonical_cycle(seq) -> tuple[int, ...]:
    """Rotate/reflect ``(x1,y1,x2,y2,x3,y3)`` so x1 is minimal and y1 < y3."""
    xs = (seq[0], seq[2], seq[4])
    r = 2 * xs.index(min(xs))
    s = [seq[(r + t) % 6] for t in range(6)]
    if s[1] > s[5]:
        s = [s[0], s[5], s[4], s[3], s[2], s[1]]
    return tuple(s)


class _Stage1:
    def __init__(self, n: int):
        self.n = n
        self.k = (n + 1) // 2
        self.col = [[-1] * n for _ in range(n)]
        self.xp = [[False] * n for _ in range(n)]
        self.yp = [[False] * n for _ in range(n)]
        self.xfree = [[True] * n for _ in range(self.k)]
        self.yfree = [[True] * n for _ in range(self.k)]
        self.clist: list[list[tuple[int, int]]] = [[] for _ in range(self.k)]
        self.slots: list[tuple[int, ...]] = []

    def occupancy_ok(self, i, c):
        x1, y1, x2, y2, x3, y3 = c
        col, xp, yp, xf, yf = self.col, self.xp, self.yp, self.xfree[i], self.yfree[i]
        if not (xf[x1] and xf[x2] and xf[x3] and yf[y1] and yf[y2] and yf[y3]):
            return False
        if xp[x1][x2] or xp[x1][x3] or xp[x2][x3] or yp[y1][y2] or yp[y1][y3] or yp[y2][y3]:
            return False
        return (col[x1][y1] < 0 and col[x2][y1] < 0 and col[x2][y2] < 0
                and col[x3][y2] < 0 and col[x3][y3] < 0 and col[x1][y3] < 0)

    def conflict(self, i, c):
        x1, y1, x2, y2, x3, y3 = c
        es = ((x1, y1), (x2, y1), (x2, y2), (x3, y2), (x3, y3), (x1, y3))
        col = self.col
        lst = self.clist[i]
        for x, y in es:
            col[x][y] = i
        lst.extend(es)
        hit = False
        for x, y in es:
            for xb, yb in lst:
                if xb == x or yb == y:
                    continue
                a = col[x][yb]
                if a >= 0 and a == col[xb][y]:
                    hit = True
                    break
            if hit:
                break
        del lst[-6:]
        for x, y in es:
            col[x][y] = -1
        return hit

    def accept(self, i, c):
        x1, y1, x2, y2, x3, y3 = c
        es = ((x1, y1), (x2, y1), (x2, y2), (x3, y2), (x3, y3), (x1, y3))
        for x, y in es:
            self.col[x][y] = i
        self.clist[i].extend(es)
        for a, b in ((x1, x2), (x1, x3), (x2, x3)):
            self.xp[a][b] = self.xp[b][a] = True
        for a, b in ((y1, y2), (y1, y3), (y2, y3)):
            self.yp[a][b] = self.yp[b][a] = True
        for v in (x1, x2, x3):
            self.xfree[i][v] = False
        for v in (y1, y2, y3):
            self.yfree[i][v] = False
        self.slots.append((i,) + canonical_cycle(c))

    def search(self, i, x1, ox, oy):
        n = self.n
        col, xp, yp, xf, yf = self.col, self.xp, self.yp, self.xfree[i], self.yfree[i]
        for a in range(n):
            y1 = (oy + a) % n
            if not yf[y1] or col[x1][y1] >= 0:
                continue
            for b in range(n):
                x2 = (ox + b) % n
                if x2 == x1 or not xf[x2] or col[x2][y1] >= 0 or xp[x1][x2]:
                    continue
                for c in range(n):
                    y2 = (oy + c) % n
                    if y2 == y1 or not yf[y2] or col[x2][y2] >= 0 or yp[y1][y2]:
                        continue
                    for d in range(n):
                        x3 = (ox + d) % n
                        if (x3 == x1 or x3 == x2 or not xf[x3] or col[x3][y2] >= 0
                                or xp[x1][x3] or xp[x2][x3]):
                            continue
                        for e in range(n):
                            y3 = (oy + e) % n
                            if (y3 == y1 or y3 == y2 or not yf[y3] or col[x3][y3] >= 0
                                    or col[x1][y3] >= 0 or yp[y1][y3] or yp[y2][y3]):
                                continue
                            cyc = (x1, y1, x2, y2, x3, y3)
                            if not self.conflict(i, cyc):
                                return cyc
        return None


def stage1_run(n, seed, max_fail, complete):
    st = _Stage1(n)
    rng = SplitMix64(seed)
    k = st.k
    attempts = sample_accepts = completion_accepts = 0
    fails = 0
    while fails < max_fail:
        i = rng.below(k)
        xs = draw_triple(rng, n)
        ys = draw_triple(rng, n)
        attempts += 1
        c = (xs[0], ys[0], xs[1], ys[1], xs[2], ys[2])
        if st.occupancy_ok(i, c) and not st.conflict(i, c):
            st.accept(i, c)
            sample_accepts += 1
            fails = 0
        else:
            fails += 1
    if complete:
        order = list(range(k * n))
        rng.shuffle(order)
        for p in order:
            i, x1 = divmod(p, n)
            if not st.xfree[i][x1]:
                continue
            oy = rng.below(n)
            ox = rng.below(n)
            c = st.search(i, x1, ox, oy)
            if c is not None:
                st.accept(i, c)
                completion_accepts += 1
    slots = np.array(st.slots, dtype=np.int32).reshape(-1, 7)
    stats = {
        "sample_attempts": attempts,
        "sample_accepts": sample_accepts,
        "completion_accepts": completion_accepts,
    }
    return slots, stats


# -- stage 2: Moser-Tardos resampling ------------------------------------------

def build_events(F):
    """Static bad-event list over the uncolored edges of ``F``.

    Returns ``(eid, edges, kinds, ev_edges)`` where ``eid[x, y]`` indexes the
    L-edge ``(x, y)`` (or is -1), ``edges`` lists L-edges canonically and
    ``ev_edges`` is an ``(E, 4)`` array of edge indices (-1 padded).
    Kinds: 0 = A (adjacent), 1 = B (L-only C4), 2 = C (old-color pair).
    """
    F = np.asarray(F)
    n = F.shape[0]
    L = F < 0
    eid = np.full((n, n), -1, dtype=np.int64)
    xs, ys = np.nonzero(L)
    eid[xs, ys] = np.arange(xs.size)
    edges = np.stack([xs, ys], axis=1) if xs.size else np.zeros((0, 2), dtype=np.int64)
    rows: list[np.ndarray] = []
    kinds: list[np.ndarray] = []

    def add(kind, arr):
        if arr.size:
            rows.append(arr)
            kinds.append(np.full(len(arr), kind, dtype=np.int8))

    # A, X-centered then Y-centered
    for side in (0, 1):
        for v in range(n):
            line = eid[v, :] if side == 0 else eid[:, v]
            ids = line[line >= 0]
            if ids.size >= 2:
                a, b = np.triu_indices(ids.size, 1)
                pad = np.full(a.size, -1, dtype=np.int64)
                add(0, np.stack([ids[a], ids[b], pad, pad], axis=1))
    # B: all four edges in L
    for x in range(n):
        for x2 in range(x + 1, n):
            common = np.nonzero(L[x] & L[x2])[0]
            if common.size >= 2:
                a, b = np.triu_indices(common.size, 1)
                ya, yb = common[a], common[b]
                add(1, np.stack([eid[x, ya], eid[x, yb], eid[x2, ya], eid[x2, yb]], axis=1))
    # C: L-edges xy, x'y' whose crossing edges xy', x'y share an old color
    for x in range(n):
        for x2 in range(x + 1, n):
            # y runs over L[x], y' over L[x2], y != y'
            yy, yy2 = np.meshgrid(np.nonzero(L[x])[0], np.nonzero(L[x2])[0], indexing="ij")
            yy, yy2 = yy.ravel(), yy2.ravel()
            f1, f2 = F[x, yy2], F[x2, yy]
            sel = (yy != yy2) & (f1 >= 0) & (f1 == f2)
            if sel.any():
                ya, yb = yy[sel], yy2[sel]
                pad = np.full(ya.size, -1, dtype=np.int64)
                add(2, np.stack([eid[x, ya], eid[x2, yb], pad, pad], axis=1))
    if rows:
        ev = np.concatenate(rows)
        kd = np.concatenate(kinds)
    else:
        ev = np.zeros((0, 4), dtype=np.int64)
        kd = np.zeros(0, dtype=np.int8)
    return eid, edges, kd, ev


def _is_bad(kind, e, c):
    if kind == 1:
        return c[e[0]] == c[e[3]] and c[e[1]] == c[e[2]] and c[e[0]] != c[e[1]]
    return c[e[0]] == c[e[1]]


def stage2_run(F, k0, growth, max_rounds, seed):
    eid, edges, kinds, ev = build_events(F)
    nL = len(edges)
    nE = len(ev)
    inc: list[list[int]] = [[] for _ in range(nL)]
    evl = ev.tolist()
    kl = kinds.tolist()
    for j, row in enumerate(evl):
        for e in row:
            if e >= 0:
                inc[e].append(j)
    rng = SplitMix64(seed)
    k = max(1, int(k0))
    rounds_total = 0
    restarts = 0
    while True:
        c = [rng.below(k) for _ in range(nL)]
        bad = [_is_bad(kl[j], evl[j], c) for j in range(nE)]
        heap = [j for j in range(nE) if bad[j]]
        heapq.heapify(heap)
        rounds = 0
        ok = True
        while heap:
            j = heap[0]
            if not bad[j]:
                heapq.heappop(heap)
                continue
            if rounds >= max_rounds:
                ok = False
                break
            es = [e for e in evl[j] if e >= 0]
            for e in es:
                c[e] = rng.below(k)
            for e in es:
                for j2 in inc[e]:
                    b = _is_bad(kl[j2], evl[j2], c)
                    if b and not bad[j2]:
                        heapq.heappush(heap, j2)
                    bad[j2] = b
            rounds += 1
        rounds_total += rounds
        if ok:
            break
        if k >= max(nL, 1):
            raise RuntimeError(
                f"stage 2 did not converge with palette {k} >= |L| = {nL} "
                f"after {rounds_total} resampling rounds")
        k = max(k + 1, int(math.ceil(k * growth)))
        restarts += 1
    fresh = np.full(np.asarray(F).shape, -1, dtype=np.int32)
    if nL:
        fresh[edges[:, 0], edges[:, 1]] = np.array(c, dtype=np.int32)
    counts = np.bincount(kinds.astype(np.int64), minlength=3) if nE else np.zeros(3, dtype=np.int64)
    info = {
        "palette": k,
        "rounds": rounds_total,
        "restarts": restarts,
        "events": {"A": int(counts[0]), "B": int(counts[1]), "C": int(counts[2])},
    }
    return fresh, info

