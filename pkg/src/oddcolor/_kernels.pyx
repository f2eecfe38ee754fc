# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels.  Same signatures and outputs as ``_pykernels``."""

import math

import numpy as np

from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint64_t

from ._pykernels import build_events

NAME = "cython"

cdef enum:
    MAXP = 32
    MAXQ = 496

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MUL1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MUL2 = 0x94D049BB133111EBULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MUL1
    z = (z ^ (z >> 27)) * MUL2
    return z ^ (z >> 31)


cdef inline uint64_t word_at(uint64_t seed, uint64_t idx) noexcept nogil:
    return mix64(seed + (idx + 1) * GAMMA)


cdef inline int64_t bounded(uint64_t w, int64_t n) noexcept nogil:
    return <int64_t>(((w >> 32) * <uint64_t>n) >> 32)


cdef struct Rng:
    uint64_t state


cdef inline int64_t rng_below(Rng* r, int64_t n) noexcept nogil:
    r.state += GAMMA
    return bounded(mix64(r.state), n)


cdef inline void sort_ints(int64_t* a, int m) noexcept nogil:
    cdef int i, j
    cdef int64_t v
    for i in range(1, m):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef inline void draw_tuple(uint64_t seed, int64_t n, int p, int64_t j, int64_t* out) noexcept nogil:
    cdef int t, s
    cdef int64_t v
    cdef int64_t srt[MAXP]
    for t in range(p):
        v = bounded(word_at(seed, <uint64_t>(j * p + t)), n - t)
        for s in range(t):
            srt[s] = out[s]
        sort_ints(srt, t)
        for s in range(t):
            if v >= srt[s]:
                v += 1
        out[t] = v


# -- clique scans ------------------------------------------------------------

cdef inline bint clique_bad(const int32_t[:, ::1] col, int64_t* verts, int p, int check,
                            int q) noexcept nogil:
    cdef int64_t cs[MAXQ]
    cdef int a, b, m = 0, distinct
    for a in range(p):
        for b in range(a + 1, p):
            cs[m] = col[verts[a], verts[b]]
            m += 1
    sort_ints(cs, m)
    if check == 0:
        if m % 2:
            return False
        a = 0
        while a < m:
            if cs[a] != cs[a + 1]:
                return False
            a += 2
        return True
    distinct = 1
    for a in range(1, m):
        if cs[a] != cs[a - 1]:
            distinct += 1
    return distinct < q


def clique_scan(col_in, hashes_in, int p, int check, int q, int lo, int hi, long limit):
    cdef const int32_t[:, ::1] col = np.ascontiguousarray(col_in, dtype=np.int32)
    cdef int n = col.shape[0]
    hm_np = np.zeros((n, n), dtype=np.uint64)
    hashes = np.asarray(hashes_in, dtype=np.uint64)
    colnp = np.asarray(col_in)
    mask = colnp >= 0
    if hashes.size:
        hm_np[mask] = hashes[colnp[mask]]
    cdef const uint64_t[:, ::1] hm = hm_np
    out_np = np.zeros((max(limit, 1), p), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_np
    cdef int64_t idx[MAXP]
    cdef uint64_t acc[MAXP]
    cdef int64_t count = 0, stored = 0
    cdef int L, j, a
    cdef uint64_t h
    cdef bint bad
    if p < 2 or p > MAXP:
        raise ValueError("p out of range")
    with nogil:
        for a in range(lo, hi):
            if a > n - p:
                break
            idx[0] = a
            acc[0] = 0
            L = 1
            idx[1] = a
            while L >= 1:
                idx[L] += 1
                if idx[L] > n - p + L:
                    L -= 1
                    continue
                h = acc[L - 1]
                for j in range(L):
                    h ^= hm[idx[j], idx[L]]
                acc[L] = h
                if L < p - 1:
                    L += 1
                    idx[L] = idx[L - 1]
                    continue
                if check == 0:
                    bad = h == 0 and clique_bad(col, idx, p, 0, q)
                else:
                    bad = clique_bad(col, idx, p, check, q)
                if bad:
                    if stored < limit:
                        for j in range(p):
                            out[stored, j] = idx[j]
                        stored += 1
                    count += 1
    return int(count), [tuple(r) for r in out_np[:stored].tolist()]


def clique_sample(col_in, hashes_in, int p, int check, int q, uint64_t seed, int64_t start,
                  int64_t count, long limit):
    cdef const int32_t[:, ::1] col = np.ascontiguousarray(col_in, dtype=np.int32)
    cdef int64_t n = col.shape[0]
    out_np = np.zeros((max(limit, 1), p), dtype=np.int64)
    jout_np = np.zeros(max(limit, 1), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_np
    cdef int64_t[::1] jout = jout_np
    cdef int64_t verts[MAXP]
    cdef int64_t j, nbad = 0, stored = 0
    cdef int t
    if p < 2 or p > MAXP or p > n:
        raise ValueError("p out of range")
    with nogil:
        for j in range(start, start + count):
            draw_tuple(seed, n, p, j, verts)
            sort_ints(verts, p)
            if clique_bad(col, verts, p, check, q):
                if stored < limit:
                    jout[stored] = j
                    for t in range(p):
                        out[stored, t] = verts[t]
                    stored += 1
                nbad += 1
    return int(nbad), [(int(jj), tuple(r)) for jj, r in
                       zip(jout_np[:stored].tolist(), out_np[:stored].tolist())]


# -- pattern scans -----------------------------------------------------------

cdef inline bint pattern_ok(const int32_t[:, ::1] col, int64_t* t, int k,
                            const int32_t[::1] pos_group, int ngroups, bint distinct,
                            const int32_t[::1] profile) noexcept nogil:
    cdef int64_t gcol[MAXQ]
    cdef int64_t cs[MAXQ]
    cdef int64_t runs[MAXQ]
    cdef int a, b, g, pos = 0, nr, r
    cdef int64_t c
    for g in range(ngroups):
        gcol[g] = -2
    for a in range(k):
        for b in range(a + 1, k):
            c = col[t[a], t[b]]
            cs[pos] = c
            g = pos_group[pos]
            if g >= 0:
                if gcol[g] == -2:
                    gcol[g] = c
                elif gcol[g] != c:
                    return False
            pos += 1
    if distinct:
        for a in range(ngroups):
            for b in range(a + 1, ngroups):
                if gcol[a] == gcol[b]:
                    return False
    if profile.shape[0] > 0:
        sort_ints(cs, pos)
        nr = 0
        r = 1
        for a in range(1, pos + 1):
            if a < pos and cs[a] == cs[a - 1]:
                r += 1
            else:
                runs[nr] = -r
                nr += 1
                r = 1
        if nr != profile.shape[0]:
            return False
        sort_ints(runs, nr)
        for a in range(nr):
            if -runs[a] != profile[a]:
                return False
    return True


def pattern_scan(col_in, int k, pos_group_in, int ngroups, bint distinct, profile_in, perms_in,
                 int lo, int hi, long limit):
    cdef const int32_t[:, ::1] col = np.ascontiguousarray(col_in, dtype=np.int32)
    cdef const int32_t[::1] pos_group = np.ascontiguousarray(pos_group_in, dtype=np.int32)
    cdef const int32_t[::1] profile = np.ascontiguousarray(profile_in, dtype=np.int32)
    cdef const int32_t[:, ::1] perms = np.ascontiguousarray(perms_in, dtype=np.int32)
    cdef int n = col.shape[0]
    cdef int np_ = perms.shape[0]
    out_np = np.zeros((max(limit, 1), k), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_np
    cdef int64_t idx[MAXP]
    cdef int64_t t[MAXP]
    cdef int64_t count = 0, stored = 0
    cdef int L, j, a, pi
    if k < 2 or k > MAXP:
        raise ValueError("k out of range")
    with nogil:
        for a in range(lo, hi):
            if a > n - k:
                break
            idx[0] = a
            L = 1
            idx[1] = a
            while L >= 1:
                idx[L] += 1
                if idx[L] > n - k + L:
                    L -= 1
                    continue
                if L < k - 1:
                    L += 1
                    idx[L] = idx[L - 1]
                    continue
                for pi in range(np_):
                    for j in range(k):
                        t[j] = idx[perms[pi, j]]
                    if pattern_ok(col, t, k, pos_group, ngroups, distinct, profile):
                        if stored < limit:
                            for j in range(k):
                                out[stored, j] = t[j]
                            stored += 1
                        count += 1
    return int(count), [tuple(r) for r in out_np[:stored].tolist()]


def pattern_sample(col_in, int k, pos_group_in, int ngroups, bint distinct, profile_in,
                   uint64_t seed, int64_t start, int64_t count, long limit):
    cdef const int32_t[:, ::1] col = np.ascontiguousarray(col_in, dtype=np.int32)
    cdef const int32_t[::1] pos_group = np.ascontiguousarray(pos_group_in, dtype=np.int32)
    cdef const int32_t[::1] profile = np.ascontiguousarray(profile_in, dtype=np.int32)
    cdef int64_t n = col.shape[0]
    out_np = np.zeros((max(limit, 1), k), dtype=np.int64)
    jout_np = np.zeros(max(limit, 1), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_np
    cdef int64_t[::1] jout = jout_np
    cdef int64_t t[MAXP]
    cdef int64_t j, nhit = 0, stored = 0
    cdef int s
    if k < 2 or k > MAXP or k > n:
        raise ValueError("k out of range")
    with nogil:
        for j in range(start, start + count):
            draw_tuple(seed, n, k, j, t)
            if pattern_ok(col, t, k, pos_group, ngroups, distinct, profile):
                if stored < limit:
                    jout[stored] = j
                    for s in range(k):
                        out[stored, s] = t[s]
                    stored += 1
                nhit += 1
    return int(nhit), [(int(jj), tuple(r)) for jj, r in
                       zip(jout_np[:stored].tolist(), out_np[:stored].tolist())]


# -- bipartite C4 scan -------------------------------------------------------

def c4_scan(col_in, int lo, int hi, bint colored_only, long limit):
    cdef const int32_t[:, ::1] col = np.ascontiguousarray(col_in, dtype=np.int32)
    cdef int n = col.shape[0]
    out_np = np.zeros((max(limit, 1), 4), dtype=np.int64)
    cdef int64_t[:, ::1] out = out_np
    cdef int x, x2, y, y2
    cdef int32_t a, b, c, d
    cdef int64_t count = 0, stored = 0
    cdef bint even
    with nogil:
        for x in range(lo, hi):
            for x2 in range(x + 1, n):
                for y in range(n):
                    a = col[x, y]
                    c = col[x2, y]
                    for y2 in range(y + 1, n):
                        b = col[x, y2]
                        d = col[x2, y2]
                        even = (a == b and c == d) or (a == c and b == d) or (a == d and b == c)
                        if even and colored_only:
                            even = a >= 0 and b >= 0 and c >= 0 and d >= 0
                        if even:
                            if stored < limit:
                                out[stored, 0] = x
                                out[stored, 1] = x2
                                out[stored, 2] = y
                                out[stored, 3] = y2
                                stored += 1
                            count += 1
    return int(count), [tuple(r) for r in out_np[:stored].tolist()]


# -- stage 1 -----------------------------------------------------------------

cdef struct S1:
    int n
    int k
    int cap
    int32_t* col
    uint8_t* xp
    uint8_t* yp
    uint8_t* xf
    uint8_t* yf
    int32_t* clx
    int32_t* cly
    int32_t* ccount


cdef inline void draw_triple(Rng* rng, int n, int64_t* out) noexcept nogil:
    cdef int t, s
    cdef int64_t v
    cdef int64_t srt[3]
    for t in range(3):
        v = rng_below(rng, n - t)
        for s in range(t):
            srt[s] = out[s]
        sort_ints(srt, t)
        for s in range(t):
            if v >= srt[s]:
                v += 1
        out[t] = v


cdef inline bint occupancy_ok(S1* st, int i, int64_t* c) noexcept nogil:
    cdef int n = st.n
    cdef int64_t x1 = c[0], y1 = c[1], x2 = c[2], y2 = c[3], x3 = c[4], y3 = c[5]
    cdef uint8_t* xf = st.xf + i * n
    cdef uint8_t* yf = st.yf + i * n
    if not (xf[x1] and xf[x2] and xf[x3] and yf[y1] and yf[y2] and yf[y3]):
        return False
    if (st.xp[x1 * n + x2] or st.xp[x1 * n + x3] or st.xp[x2 * n + x3]
            or st.yp[y1 * n + y2] or st.yp[y1 * n + y3] or st.yp[y2 * n + y3]):
        return False
    return (st.col[x1 * n + y1] < 0 and st.col[x2 * n + y1] < 0 and st.col[x2 * n + y2] < 0
            and st.col[x3 * n + y2] < 0 and st.col[x3 * n + y3] < 0 and st.col[x1 * n + y3] < 0)


cdef inline void cycle_edges(int64_t* c, int64_t* ex, int64_t* ey) noexcept nogil:
    ex[0] = c[0]; ey[0] = c[1]
    ex[1] = c[2]; ey[1] = c[1]
    ex[2] = c[2]; ey[2] = c[3]
    ex[3] = c[4]; ey[3] = c[3]
    ex[4] = c[4]; ey[4] = c[5]
    ex[5] = c[0]; ey[5] = c[5]


cdef bint conflict(S1* st, int i, int64_t* c) noexcept nogil:
    cdef int n = st.n
    cdef int64_t ex[6]
    cdef int64_t ey[6]
    cdef int e, m, base = i * st.cap
    cdef int cnt
    cdef int64_t x, y, xb, yb
    cdef int32_t a
    cdef bint hit = False
    cycle_edges(c, ex, ey)
    cnt = st.ccount[i]
    for e in range(6):
        st.col[ex[e] * n + ey[e]] = i
        st.clx[base + cnt + e] = <int32_t>ex[e]
        st.cly[base + cnt + e] = <int32_t>ey[e]
    for e in range(6):
        x = ex[e]
        y = ey[e]
        for m in range(cnt + 6):
            xb = st.clx[base + m]
            yb = st.cly[base + m]
            if xb == x or yb == y:
                continue
            a = st.col[x * n + yb]
            if a >= 0 and a == st.col[xb * n + y]:
                hit = True
                break
        if hit:
            break
    for e in range(6):
        st.col[ex[e] * n + ey[e]] = -1
    return hit


cdef void canonical(int64_t* c, int64_t* out) noexcept nogil:
    cdef int r = 0, t
    cdef int64_t s[6]
    if c[2] < c[r]:
        r = 2
    if c[4] < c[r]:
        r = 4
    for t in range(6):
        s[t] = c[(r + t) % 6]
    if s[1] > s[5]:
        out[0] = s[0]; out[1] = s[5]; out[2] = s[4]
        out[3] = s[3]; out[4] = s[2]; out[5] = s[1]
    else:
        for t in range(6):
            out[t] = s[t]


cdef void accept(S1* st, int i, int64_t* c, int32_t* slot_out) noexcept nogil:
    cdef int n = st.n
    cdef int64_t ex[6]
    cdef int64_t ey[6]
    cdef int64_t cc[6]
    cdef int e, base = i * st.cap
    cdef int cnt = st.ccount[i]
    cdef int64_t x1 = c[0], y1 = c[1], x2 = c[2], y2 = c[3], x3 = c[4], y3 = c[5]
    cycle_edges(c, ex, ey)
    for e in range(6):
        st.col[ex[e] * n + ey[e]] = i
        st.clx[base + cnt + e] = <int32_t>ex[e]
        st.cly[base + cnt + e] = <int32_t>ey[e]
    st.ccount[i] = cnt + 6
    st.xp[x1 * n + x2] = 1; st.xp[x2 * n + x1] = 1
    st.xp[x1 * n + x3] = 1; st.xp[x3 * n + x1] = 1
    st.xp[x2 * n + x3] = 1; st.xp[x3 * n + x2] = 1
    st.yp[y1 * n + y2] = 1; st.yp[y2 * n + y1] = 1
    st.yp[y1 * n + y3] = 1; st.yp[y3 * n + y1] = 1
    st.yp[y2 * n + y3] = 1; st.yp[y3 * n + y2] = 1
    st.xf[i * n + x1] = 0; st.xf[i * n + x2] = 0; st.xf[i * n + x3] = 0
    st.yf[i * n + y1] = 0; st.yf[i * n + y2] = 0; st.yf[i * n + y3] = 0
    canonical(c, cc)
    slot_out[0] = i
    for e in range(6):
        slot_out[e + 1] = <int32_t>cc[e]


cdef bint search(S1* st, int i, int64_t x1, int64_t ox, int64_t oy, int64_t* c) noexcept nogil:
    cdef int n = st.n
    cdef uint8_t* xf = st.xf + i * n
    cdef uint8_t* yf = st.yf + i * n
    cdef int32_t* col = st.col
    cdef uint8_t* xp = st.xp
    cdef uint8_t* yp = st.yp
    cdef int a, b, cc, d, e
    cdef int64_t y1, x2, y2, x3, y3
    for a in range(n):
        y1 = (oy + a) % n
        if not yf[y1] or col[x1 * n + y1] >= 0:
            continue
        for b in range(n):
            x2 = (ox + b) % n
            if x2 == x1 or not xf[x2] or col[x2 * n + y1] >= 0 or xp[x1 * n + x2]:
                continue
            for cc in range(n):
                y2 = (oy + cc) % n
                if y2 == y1 or not yf[y2] or col[x2 * n + y2] >= 0 or yp[y1 * n + y2]:
                    continue
                for d in range(n):
                    x3 = (ox + d) % n
                    if (x3 == x1 or x3 == x2 or not xf[x3] or col[x3 * n + y2] >= 0
                            or xp[x1 * n + x3] or xp[x2 * n + x3]):
                        continue
                    for e in range(n):
                        y3 = (oy + e) % n
                        if (y3 == y1 or y3 == y2 or not yf[y3] or col[x3 * n + y3] >= 0
                                or col[x1 * n + y3] >= 0 or yp[y1 * n + y3] or yp[y2 * n + y3]):
                            continue
                        c[0] = x1; c[1] = y1; c[2] = x2
                        c[3] = y2; c[4] = x3; c[5] = y3
                        if not conflict(st, i, c):
                            return True
    return False


def stage1_run(int n, uint64_t seed, int64_t max_fail, bint complete):
    cdef int k = (n + 1) // 2
    cdef int cap = 2 * n + 6
    col_np = np.full(n * n, -1, dtype=np.int32)
    xp_np = np.zeros(n * n, dtype=np.uint8)
    yp_np = np.zeros(n * n, dtype=np.uint8)
    xf_np = np.ones(k * n, dtype=np.uint8)
    yf_np = np.ones(k * n, dtype=np.uint8)
    clx_np = np.zeros(k * cap, dtype=np.int32)
    cly_np = np.zeros(k * cap, dtype=np.int32)
    cc_np = np.zeros(k, dtype=np.int32)
    max_slots = n * n // 6 + 1
    slots_np = np.zeros((max_slots, 7), dtype=np.int32)
    order_np = np.arange(k * n, dtype=np.int64)
    cdef int32_t[::1] colv = col_np
    cdef uint8_t[::1] xpv = xp_np, ypv = yp_np, xfv = xf_np, yfv = yf_np
    cdef int32_t[::1] clxv = clx_np, clyv = cly_np, ccv = cc_np
    cdef int32_t[:, ::1] slots = slots_np
    cdef int64_t[::1] order = order_np
    cdef S1 st
    st.n = n
    st.k = k
    st.cap = cap
    st.col = &colv[0]
    st.xp = &xpv[0]
    st.yp = &ypv[0]
    st.xf = &xfv[0]
    st.yf = &yfv[0]
    st.clx = &clxv[0]
    st.cly = &clyv[0]
    st.ccount = &ccv[0]
    cdef Rng rng
    rng.state = seed
    cdef int64_t fails = 0, attempts = 0, sacc = 0, cacc = 0, nslots = 0
    cdef int64_t xs[3]
    cdef int64_t ys[3]
    cdef int64_t c[6]
    cdef int64_t p, jj, tmp, ox, oy
    cdef int i, x1
    with nogil:
        while fails < max_fail:
            i = <int>rng_below(&rng, k)
            draw_triple(&rng, n, xs)
            draw_triple(&rng, n, ys)
            attempts += 1
            c[0] = xs[0]; c[1] = ys[0]; c[2] = xs[1]
            c[3] = ys[1]; c[4] = xs[2]; c[5] = ys[2]
            if occupancy_ok(&st, i, c) and not conflict(&st, i, c):
                accept(&st, i, c, &slots[nslots, 0])
                nslots += 1
                sacc += 1
                fails = 0
            else:
                fails += 1
        if complete:
            p = k * n - 1
            while p > 0:
                jj = rng_below(&rng, p + 1)
                tmp = order[p]
                order[p] = order[jj]
                order[jj] = tmp
                p -= 1
            for p in range(k * n):
                i = <int>(order[p] // n)
                x1 = <int>(order[p] % n)
                if not st.xf[i * n + x1]:
                    continue
                oy = rng_below(&rng, n)
                ox = rng_below(&rng, n)
                if search(&st, i, x1, ox, oy, c):
                    accept(&st, i, c, &slots[nslots, 0])
                    nslots += 1
                    cacc += 1
    stats = {
        "sample_attempts": int(attempts),
        "sample_accepts": int(sacc),
        "completion_accepts": int(cacc),
    }
    return slots_np[:nslots].copy(), stats


# -- stage 2 -----------------------------------------------------------------

cdef inline bint ev_bad(int8_t kind, const int32_t[:, ::1] ev, int64_t j,
                        int32_t* c) noexcept nogil:
    if kind == 1:
        return (c[ev[j, 0]] == c[ev[j, 3]] and c[ev[j, 1]] == c[ev[j, 2]]
                and c[ev[j, 0]] != c[ev[j, 1]])
    return c[ev[j, 0]] == c[ev[j, 1]]


cdef inline void tree_set(uint8_t* tree, int64_t size, int64_t j, uint8_t v) noexcept nogil:
    cdef int64_t node = size + j
    tree[node] = v
    node >>= 1
    while node >= 1:
        tree[node] = tree[2 * node] | tree[2 * node + 1]
        node >>= 1


cdef inline int64_t tree_first(uint8_t* tree, int64_t size) noexcept nogil:
    cdef int64_t node = 1
    while node < size:
        if tree[2 * node]:
            node = 2 * node
        else:
            node = 2 * node + 1
    return node - size


def stage2_run(F, int64_t k0, double growth, int64_t max_rounds, uint64_t seed):
    eid, edges, kinds_np, ev64 = build_events(F)
    cdef int64_t nL = len(edges)
    cdef int64_t nE = len(ev64)
    ev_np = np.ascontiguousarray(ev64, dtype=np.int32).reshape(-1, 4)
    if nE == 0:
        ev_np = np.full((1, 4), -1, dtype=np.int32)
    kinds_c = np.ascontiguousarray(kinds_np, dtype=np.int8)
    if nE == 0:
        kinds_c = np.zeros(1, dtype=np.int8)
    # incidence CSR
    flat = ev_np[:nE].ravel()
    owner = np.repeat(np.arange(nE, dtype=np.int64), 4)
    keep = flat >= 0
    flat, owner = flat[keep], owner[keep]
    order = np.argsort(flat, kind="stable")
    inc_np = np.ascontiguousarray(owner[order], dtype=np.int64)
    if inc_np.size == 0:
        inc_np = np.zeros(1, dtype=np.int64)
    ptr_np = np.zeros(nL + 1, dtype=np.int64)
    if nL:
        np.cumsum(np.bincount(flat, minlength=nL), out=ptr_np[1:])
    cdef const int32_t[:, ::1] ev = ev_np
    cdef const int8_t[::1] kinds = kinds_c
    cdef const int64_t[::1] inc = inc_np
    cdef const int64_t[::1] ptr = ptr_np
    cdef int64_t size = 1
    while size < max(nE, 1):
        size *= 2
    c_np = np.zeros(max(nL, 1), dtype=np.int32)
    bad_np = np.zeros(max(nE, 1), dtype=np.uint8)
    tree_np = np.zeros(2 * size, dtype=np.uint8)
    cdef int32_t[::1] cv = c_np
    cdef uint8_t[::1] badv = bad_np
    cdef uint8_t[::1] treev = tree_np
    cdef int32_t* c = &cv[0]
    cdef uint8_t* bad = &badv[0]
    cdef uint8_t* tree = &treev[0]
    cdef Rng rng
    rng.state = seed
    cdef int64_t k = max(1, k0)
    cdef int64_t rounds_total = 0, restarts = 0, rounds, j, j2, e, t, q, node
    cdef bint ok, b
    while True:
        with nogil:
            for e in range(nL):
                c[e] = <int32_t>rng_below(&rng, k)
            for node in range(2 * size):
                tree[node] = 0
            for j in range(nE):
                bad[j] = ev_bad(kinds[j], ev, j, c)
                tree[size + j] = bad[j]
            node = size - 1
            while node >= 1:
                tree[node] = tree[2 * node] | tree[2 * node + 1]
                node -= 1
            rounds = 0
            ok = True
            while tree[1]:
                if rounds >= max_rounds:
                    ok = False
                    break
                j = tree_first(tree, size)
                for t in range(4):
                    e = ev[j, t]
                    if e >= 0:
                        c[e] = <int32_t>rng_below(&rng, k)
                for t in range(4):
                    e = ev[j, t]
                    if e < 0:
                        continue
                    for q in range(ptr[e], ptr[e + 1]):
                        j2 = inc[q]
                        b = ev_bad(kinds[j2], ev, j2, c)
                        if b != bad[j2]:
                            bad[j2] = b
                            tree_set(tree, size, j2, b)
                rounds += 1
        rounds_total += rounds
        if ok:
            break
        if k >= max(nL, 1):
            raise RuntimeError(
                f"stage 2 did not converge with palette {k} >= |L| = {nL} "
                f"after {rounds_total} resampling rounds")
        k = max(k + 1, <int64_t>math.ceil(k * growth))
        restarts += 1
    fresh = np.full(np.asarray(F).shape, -1, dtype=np.int32)
    if nL:
        fresh[edges[:, 0], edges[:, 1]] = c_np[:nL]
    counts = np.bincount(kinds_np.astype(np.int64), minlength=3) if nE else np.zeros(3, dtype=np.int64)
    info = {
        "palette": int(k),
        "rounds": int(rounds_total),
        "restarts": int(restarts),
        "events": {"A": int(counts[0]), "B": int(counts[1]), "C": int(counts[2])},
    }
    return fresh, info
