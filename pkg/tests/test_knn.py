import itertools

import numpy as np
import pytest

from oddcolor.graph import EdgeColoring, HostGraph
from oddcolor.knn import (
    CycleSlot,
    MatchingState,
    Stage2Config,
    bad_events,
    build_knn_coloring,
    canonical_cycle,
    check_stage1_properties,
    conflict_check,
    crossing_counts,
    random_greedy_stage1,
    stage2_lll,
)
from oddcolor.verify import scan_c4_odd

from oracles import naive_c4_all_even


@pytest.fixture(scope="module")
def s1_20():
    return random_greedy_stage1(20, 1)


def test_canonical_cycle():
    c = (3, 5, 1, 4, 2, 0)
    can = canonical_cycle(c)
    assert can[0] == 1 and can[1] < can[5]
    # every rotation/reflection maps to the same form
    rots = [c[r:] + c[:r] for r in (0, 2, 4)]
    refl = [tuple([s[0]] + list(reversed(s[1:]))) for s in rots]
    assert {canonical_cycle(s) for s in rots + refl} == {can}


def test_slot_validation_and_keys():
    with pytest.raises(ValueError):
        CycleSlot((0, 1, 0, 2, 3, 4), 1)
    s = CycleSlot((0, 0, 1, 1, 2, 2), 1)
    keys = s.keys()
    assert len(keys) == len(set(keys)) == 18


def test_conflict_check_empty_state():
    st = MatchingState(12)
    assert conflict_check(st, CycleSlot((0, 0, 1, 1, 2, 2), 1)) is False


CYCLE_I = (0, 0, 8, 1, 1, 9)  # edges (0,0),(8,0),(8,1),(1,1),(1,9),(0,9)


def test_conflict_detected_across_three_slots():
    # x=0, x'=1, y=0, y'=1: xy, x'y' color 1 in one slot; xy' and x'y color 2 in two slots.
    # No single slot may hold both (0,1) and (1,0): it would reuse the pair {x0, x1}.
    st = MatchingState(12)
    st.add(CycleSlot((0, 1, 4, 4, 5, 5), 2))
    st.add(CycleSlot((1, 0, 6, 6, 7, 7), 2))
    cand = CycleSlot(CYCLE_I, 1)
    assert {(0, 0), (1, 1)} <= set(cand.edges())
    assert st.occupancy_ok(cand)
    assert conflict_check(st, cand) is True
    far = CycleSlot((9, 9, 10, 10, 11, 11), 1)
    assert conflict_check(st, far) is False


def test_conflict_completed_by_second_matching():
    st = MatchingState(12)
    st.add(CycleSlot(CYCLE_I, 1))
    st.add(CycleSlot((0, 1, 4, 4, 5, 5), 2))
    cand = CycleSlot((1, 0, 6, 6, 7, 7), 2)
    assert st.occupancy_ok(cand)
    assert conflict_check(st, cand) is True
    assert conflict_check(st, CycleSlot((2, 2, 6, 6, 7, 7), 2)) is False


def test_same_color_alternating_blocked():
    st = MatchingState(12)
    st.add(CycleSlot((0, 0, 1, 1, 2, 2), 1))
    other = CycleSlot((0, 3, 1, 4, 5, 5), 1)
    assert not st.occupancy_ok(other)
    with pytest.raises(ValueError, match="occupancy"):
        conflict_check(st, other)


def test_stage1_properties(s1_20, backend):
    s1 = random_greedy_stage1(20, 1, backend=backend)
    assert np.array_equal(s1.F.matrix, s1_20.F.matrix)
    assert s1.slots and s1.F.num_colors <= 10
    rep = check_stage1_properties(s1, backend=backend)
    assert rep.prop1 and rep.prop2 and rep.prop2_violations == 0
    keys = [k for s in s1.slots for k in s.keys()]
    assert len(keys) == len(set(keys))


def test_stage1_n12():
    s1 = random_greedy_stage1(12, 3)
    assert (s1.F.matrix >= 0).any()
    assert check_stage1_properties(s1).prop1


def test_stage1_too_small():
    with pytest.raises(ValueError, match="n too small"):
        random_greedy_stage1(11, 0)
    with pytest.raises(ValueError, match="n too small"):
        build_knn_coloring(11)


def test_planted_conflict_detected(s1_20):
    m = s1_20.F.matrix.copy()
    cs = np.unique(m[m >= 0])
    # overwrite a 2x2 block with two opposite monochromatic pairs
    m[0, 0] = m[1, 1] = cs[0]
    m[0, 1] = m[1, 0] = cs[1]
    F = EdgeColoring.from_matrix(HostGraph.bipartite(20), m)
    rep = check_stage1_properties(F)
    assert not rep.prop2 and rep.prop2_violations >= 1
    assert not rep.prop1


def test_crossing_counts_naive(s1_20):
    m = s1_20.F.matrix
    n = 20
    L = m < 0
    got = crossing_counts(m)
    rng = np.random.default_rng(0)
    for _ in range(30):
        x, y = (int(v) for v in rng.integers(0, n, 2))
        want = sum(1 for x2 in range(n) for y2 in range(n)
                   if L[x2, y2] and m[x, y2] >= 0 and m[x, y2] == m[x2, y])
        assert got[x, y] == want


def test_stage2_zero_events(s1_20, backend):
    col, info = stage2_lll(s1_20, Stage2Config(seed=1), backend=backend)
    assert col.is_total
    F = s1_20.F.matrix
    fresh = np.where(F < 0, col.matrix, -1)
    assert bad_events(F, fresh) == []
    assert scan_c4_odd(col).ok
    # stage-1 ids unchanged, fresh ids follow
    assert np.array_equal(col.matrix[F >= 0], F[F >= 0])
    assert col.matrix[F < 0].min() == s1_20.F.num_colors


def test_stage2_empty_leftover():
    n = 12
    m = np.arange(n * n).reshape(n, n) % 5
    F = EdgeColoring.from_matrix(HostGraph.bipartite(n), m)
    out, info = stage2_lll(F)
    assert out is F and info["palette"] == 0


def test_palette_one_grows(s1_20, backend):
    col, info = stage2_lll(s1_20, Stage2Config(palette=1, max_rounds=200, seed=2), backend=backend)
    assert info["restarts"] >= 1 and info["palette"] > 1
    assert scan_c4_odd(col).ok


def test_bad_events_detects_each_kind():
    n = 4
    F = np.full((n, n), -1)
    F[0, 1] = F[1, 0] = 0
    fresh = np.full((n, n), -1)
    fresh[F < 0] = np.arange(int((F < 0).sum())) + 10
    assert bad_events(F, fresh) == []
    f = fresh.copy(); f[0, 0] = f[0, 2] = 50
    assert {e.kind for e in bad_events(F, f)} == {"A"}
    f = fresh.copy(); f[0, 0] = f[1, 1] = 60
    assert "C" in {e.kind for e in bad_events(F, f)}
    f = fresh.copy(); f[2, 2] = f[3, 3] = 70; f[2, 3] = f[3, 2] = 71
    assert "B" in {e.kind for e in bad_events(F, f)}


def test_config_validation():
    for kw in ({"delta": 0}, {"delta": 1}, {"growth": 1.0}, {"palette": 0}):
        with pytest.raises(ValueError):
            Stage2Config(**kw)
    assert Stage2Config().initial_palette(16) == 8
    assert Stage2Config().rounds(10) == 500


def test_build_determinism_and_validity(tmp_path, backend):
    from oddcolor.graph import write_coloring

    a, sa = build_knn_coloring(16, Stage2Config(seed=5), backend=backend)
    b, sb = build_knn_coloring(16, Stage2Config(seed=5), backend=backend)
    write_coloring(a, tmp_path / "a")
    write_coloring(b, tmp_path / "b")
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()
    assert sa["c4_violations"] == 0 and sa["stage1_colors_used"] <= 8
    n = 16
    pairs = list(itertools.combinations(range(n), 2))
    assert not any(naive_c4_all_even(a.matrix, x, x2, y, y2) for x, x2 in pairs for y, y2 in pairs)


def test_kernel_slots_replay_through_reference(s1_20):
    st = MatchingState(20)
    for slot in s1_20.slots:
        assert st.occupancy_ok(slot)
        assert conflict_check(st, slot) is False
        st.add(slot)
    assert len(st.chosen) == len(s1_20.slots)
