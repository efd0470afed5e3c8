"""Unit tests for the constructive engine: completion, track, charging,
lemma wins, lucky analysis, and the orchestrated pipeline."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import fixtures
from grinblat.construct import (
    ChargeLedger,
    LuckyData,
    Overrides,
    Telemetry,
    build_track,
    charge_scheme_2,
    charge_scheme_3,
    complete_assignment,
    extend_matching,
    final_win,
    find_compatible_pair,
    find_lucky,
    heavy_indices,
    hypothesis_bound,
    pick_heavy_pair_elements,
    select_nonconflicting,
    solve,
    try_direct_pair,
    try_five_heavy_left_win,
)
from grinblat.construct.lucky import _conflicting, exclusion_set
from grinblat.construct.pipeline import _initial_state
from grinblat.core import Instance, Matching, Partition, kernel, verify_matching
from grinblat.errors import (
    CompletionImpossible,
    HypothesisViolation,
    InternalLogicError,
)
from grinblat.gen import (
    FixtureSpec,
    gen_fixture_ledger,
    gen_planted_concentrated,
    gen_random_hypothesis,
)


def base_state(n=30, extra=None):
    return gen_fixture_ledger(FixtureSpec(n=n, extra=extra or {}))


# ---------------------------------------------------------------- direct pair


class TestDirectPair:
    @staticmethod
    def _tampered(extra_class):
        inst, sub = gen_planted_concentrated(30, 0, seed=3)
        rels = list(inst.relations)
        g = inst.ground_size
        rels[0] = Partition(list(rels[0].classes) + [tuple(extra_class)])
        inst2 = Instance(g + len(extra_class), rels)
        return _initial_state(inst2, sub, 0)

    def test_planted_has_no_direct_pair(self):
        inst, sub = gen_planted_concentrated(30, 0, seed=3)
        state = _initial_state(inst, sub, 0)
        assert try_direct_pair(state) is None

    def test_fresh_class_gives_pair(self):
        g = gen_planted_concentrated(30, 0, seed=3)[0].ground_size
        state = self._tampered([g, g + 1])
        pair = try_direct_pair(state)
        assert pair == (g, g + 1)
        assert state.relation_at(1).equivalent(*pair)
        assert set(pair).isdisjoint(state.b_set)

    def test_class_with_two_free_members(self):
        inst, sub = gen_planted_concentrated(30, 0, seed=3)
        g = inst.ground_size
        b_elem = sub[1][0]
        state = self._tampered([b_elem, g, g + 1])
        pair = try_direct_pair(state)
        assert pair == (g, g + 1)


# ------------------------------------------------------------------ completion


class TestCompleteAssignment:
    def test_bare_track_state_is_stuck(self):
        # relation 1's only options are cross pairs of C_2, whose elements
        # feed the shift chain that dead-ends at position t; every real win
        # supplies overrides for relations 1 and t together
        state, _ = base_state()
        with pytest.raises(CompletionImpossible):
            complete_assignment(state, Overrides({}))

    def test_chain_shift(self):
        state, _ = base_state(
            extra={1: [[("a", 4), ("x", "y")]], 6: [[("c", 4), ("d", 4)]]}
        )
        comp4, comp5, comp6 = state.comps[4], state.comps[5], state.comps[6]
        y = next(
            e
            for e in state.relation_at(1).class_of(comp4.a)
            if e not in (comp4.a, comp4.c)
        )
        m = complete_assignment(
            state, Overrides({1: (comp4.a, y), 6: (comp4.c, comp4.d)})
        )
        # position 4 lost its identity element and shifts to C_5's cross,
        # pushing position 5 onto C_6's cross
        assert m.pairs[3] in ((comp5.a, comp5.c), (comp5.b, comp5.d))
        assert m.pairs[4] in ((comp6.a, comp6.c), (comp6.b, comp6.d))
        assert len(m.pairs) == state.n
        for pos in range(1, state.n + 1):
            a, b = m.pairs[pos - 1]
            assert state.relation_at(pos).equivalent(a, b)

    def test_override_element_reuse_rejected(self):
        state, _ = base_state()
        comp2, comp3 = state.comps[2], state.comps[3]
        with pytest.raises(ValueError):
            complete_assignment(
                state, Overrides({2: (comp2.a, comp2.b), 3: (comp2.a, comp3.b)})
            )

    def test_non_equivalent_override_rejected(self):
        state, _ = base_state()
        comp = state.comps[20]
        with pytest.raises(ValueError):
            complete_assignment(state, Overrides({7: (comp.a, comp.b)}))

    def test_blocked_right_identity_raises(self):
        # consuming a right component's identity leaves that position with
        # no option at all
        state, _ = base_state(extra={6: [[("a", 20), ("b", 20)]]})
        comp = state.comps[20]
        with pytest.raises(CompletionImpossible):
            complete_assignment(state, Overrides({6: (comp.a, comp.b)}))


# ------------------------------------------------------------------ track


class TestBuildTrack:
    def test_planted_track_full_length(self):
        inst, sub = gen_planted_concentrated(60, 20, seed=5)
        state = _initial_state(inst, sub, 0)
        assert try_direct_pair(state) is None
        kind, payload = build_track(state)
        assert kind == "track"
        assert payload.extent == payload.t == 12
        for p in payload.left_positions():
            comp = payload.comps[p]
            assert comp.is_left
            # cross pair equivalent to the identity pair one relation up
            rel = payload.relation_at(p - 1)
            assert rel.equivalent(comp.a, comp.c)
            assert rel.equivalent(comp.b, comp.d)

    def test_bprime_distinct_after_track(self):
        inst, sub = gen_planted_concentrated(30, 0, seed=2)
        state = _initial_state(inst, sub, 0)
        kind, state = build_track(state)
        assert kind == "track"
        bprime = state.bprime_set
        assert len(bprime) == 2 * (state.n - 1) + 2 * (state.t - 1)

    def test_early_win_on_left_cross_pair(self):
        # two elements 1-equivalent across two different left components is a
        # win; easiest check: a fresh pair appears mid-track
        inst, sub = gen_planted_concentrated(60, 20, seed=1)
        # tamper: give relation 3 (position 4) an extra fresh class
        rels = list(inst.relations)
        g = inst.ground_size
        rels[3] = Partition(list(rels[3].classes) + [(g, g + 1)])
        inst2 = Instance(g + 2, rels)
        state = _initial_state(inst2, sub, 0)
        kind, payload = build_track(state)
        assert kind == "win"
        # build_track returns a position-ordered matching; remap and verify
        remapped = [None] * inst2.n
        for pos in range(1, inst2.n + 1):
            remapped[state.perm[pos]] = payload.pairs[pos - 1]
        assert verify_matching(inst2, Matching(remapped)).valid


# ------------------------------------------------------------- charge schemes


class TestChargeScheme2:
    def test_conservation_and_caps(self):
        state, ledger = base_state()
        assert sum(ledger.sigma) == len(kernel(state.relation_at(1)))
        assert sum(ledger.tau) == len(kernel(state.relation_at(state.t)))
        assert max(ledger.sigma) <= 4 and max(ledger.tau) <= 4

    def test_b_member_charged_to_own_component(self):
        state, ledger = base_state()
        # a_2 lies in K_1 through the track class {a_2, c_2}
        assert ledger.sigma[2] == 4
        assert set(ledger.S[2]) == {state.comps[2].c, state.comps[2].d}

    def test_special_cross_pair_charged_together(self):
        state, ledger = base_state(extra={6: [[("c", 4), ("d", 4)]]})
        comp = state.comps[4]
        assert ledger.tau[4] >= 2
        assert comp.c in ledger.T[4] and comp.d in ledger.T[4]
        assert ledger.t_partner[comp.c] == comp.d

    def test_s_sets_pairwise_disjoint(self):
        _, ledger = fixtures.five_heavy_case1()
        seen = set()
        for p, s in ledger.S.items():
            for e in s:
                assert e not in seen
                seen.add(e)


class TestFiveHeavyLeft:
    def test_fewer_than_five_returns_none(self):
        state, ledger = base_state()
        assert try_five_heavy_left_win(state, ledger) is None

    def test_case1(self):
        state, ledger = fixtures.five_heavy_case1()
        assert len(ledger.heavy_left()) == 5
        tel = Telemetry()
        m = try_five_heavy_left_win(state, ledger, tel)
        assert m is not None and tel.win_branch == "case1"
        comp3 = state.comps[3]
        # relation t (position 6) got the cross pair of C_3
        assert set(m.pairs[5]) == {comp3.c, comp3.d}
        assert _verify_positional(state, m)

    def test_case2a(self):
        state, ledger = fixtures.five_heavy_case2a()
        tel = Telemetry()
        m = try_five_heavy_left_win(state, ledger, tel)
        assert m is not None and tel.win_branch == "case2a"
        assert _verify_positional(state, m)

    def test_case2b(self):
        state, ledger = fixtures.five_heavy_case2b()
        tel = Telemetry()
        m = try_five_heavy_left_win(state, ledger, tel)
        assert m is not None and tel.win_branch == "case2b"
        comp3 = state.comps[3]
        # relation i_2 - 1 (position 2) holds (a', c'), relation 1 holds (b', d')
        assert set(m.pairs[1]) == {comp3.a, comp3.c}
        assert set(m.pairs[0]) == {comp3.b, comp3.d}
        assert _verify_positional(state, m)


def _verify_positional(state, m) -> bool:
    remapped = [None] * state.n
    for pos in range(1, state.n + 1):
        remapped[state.perm[pos]] = m.pairs[pos - 1]
    return verify_matching(state.inst, Matching(remapped)).valid


# ------------------------------------------------------------- heavy pairs


class TestPickHeavyPairElements:
    def test_disjoint_case(self):
        state, ledger = fixtures.pair_elements_disjoint()
        p = ledger.S[8][0]
        s = ledger.T[9][0]
        v1, w1, v2, w2 = pick_heavy_pair_elements(state, ledger, 8, 9)
        assert (v1, w1) == (state.comps[8].a, p)
        assert (v2, w2) == (state.comps[9].a, s)

    def test_crossing_needs_both_components(self):
        state, ledger = fixtures.pair_elements_crossing()
        with pytest.raises(InternalLogicError):
            pick_heavy_pair_elements(state, ledger, 8, 8)
        quad = pick_heavy_pair_elements(state, ledger, 8, 9)
        assert len(set(quad)) == 4

    def test_constrained_redraw_variant(self):
        state, ledger, q, s = fixtures.pair_elements_redraw()
        v1, w1, v2, w2 = pick_heavy_pair_elements(state, ledger, 8, 9, q=q, r=s)
        assert sum(1 for e in (q, s) if e in (w1, w2)) == 1
        assert state.relation_at(1).equivalent(v1, w1)
        assert state.relation_at(state.t).equivalent(v2, w2)
        assert len({v1, w1, v2, w2}) == 4


# ----------------------------------------------------------------- scheme 3


class TestChargeScheme3:
    def test_bprime_to_own_component(self):
        extra = {}
        fixtures.heavy_right(extra, 8, "h")
        state, ledger = base_state(extra=extra)
        kind, table = charge_scheme_3(state, ledger, 8)
        assert kind == "table"
        # own identity pair charged to position 8
        assert table[8][0] >= 2
        for pos, (cnt, outs) in table.items():
            assert cnt <= 4 and len(outs) <= 2

    def test_win_fresh_pair(self):
        state, ledger = fixtures.scheme3_win_fresh_pair()
        tel = Telemetry()
        kind, m = charge_scheme_3(state, ledger, 8, tel)
        assert kind == "win" and tel.win_branch == "fresh_pair"
        assert _verify_positional(state, m)
        # relation 1 used an S_8 element with its identity partner
        assert any(e in ledger.S[8] for e in m.pairs[0])

    def test_win_untainted_left(self):
        state, ledger = fixtures.scheme3_win_untainted_left()
        tel = Telemetry()
        kind, m = charge_scheme_3(state, ledger, 8, tel)
        assert kind == "win" and tel.win_branch == "untainted_left"
        assert _verify_positional(state, m)
        # relation t used a T_8 element
        assert any(e in ledger.T[8] for e in m.pairs[5])

    def test_uncharged_when_equivalent_to_s(self):
        extra = {}
        fixtures.heavy_right(extra, 8, "h")
        state, ledger = base_state(extra=extra)
        s_elem = ledger.S[8][0]
        # a fresh element 8-equivalent to an S_8 element stays uncharged;
        # pair it with a B element so no 7(a) win fires
        rels = list(state.inst.relations)
        g = state.inst.ground_size
        idx = state.perm[8]
        rels[idx] = Partition(list(rels[idx].classes) + [(s_elem, g)])
        state.inst = Instance(g + 1, rels)
        kind, table = charge_scheme_3(state, ledger, 8)
        assert kind == "table"
        total = sum(cnt for cnt, _ in table.values())
        k8 = len(kernel(state.relation_at(8)))
        u8 = len(set(ledger.U(8)) & kernel(state.relation_at(8)))
        # s_elem is uncharged as a U member (inside u8); g is uncharged
        # because it is 8-equivalent to an S_8 element
        assert total == k8 - u8 - 1


# ------------------------------------------------------------ lucky analysis


class TestLuckyAnalysis:
    def test_conflict_edge_and_two_coloring(self):
        state, ledger, W = fixtures.conflict_triple()
        lucky = LuckyData(jstar=10, hprime=(7, 8, 9), W=W)
        assert _conflicting(state, lucky, 7, 8)
        assert not _conflicting(state, lucky, 7, 9)
        assert not _conflicting(state, lucky, 8, 9)
        out = select_nonconflicting(state, lucky, c=48)
        assert out.hsecond == (7, 9)

    def test_no_conflicts_keeps_lowest(self):
        state, ledger, W = fixtures.jstar_split()
        lucky = LuckyData(jstar=10, hprime=(7, 8, 9), W=W)
        out = select_nonconflicting(state, lucky, c=32)
        assert out.hsecond == (7, 8)  # ceil(32/16) = 2 lowest

    def test_compatible_pair_skips_popular_blocked_index(self):
        state, ledger, W = fixtures.conflict_triple()
        # shared element between W_7 and W_8 is popular at c=4 (threshold 2);
        # planting it in U_7 forces k1 = 8
        wy = W[7][0]
        ledger2 = ChargeLedger(
            n=ledger.n,
            t=ledger.t,
            sigma=ledger.sigma,
            tau=ledger.tau,
            S={**ledger.S, 7: (wy,)},
            T=ledger.T,
            one_partner=ledger.one_partner,
            t_partner=ledger.t_partner,
        )
        lucky = LuckyData(jstar=10, hprime=(7, 8, 9), W=W, hsecond=(7, 8, 9))
        out, (k1, k2) = find_compatible_pair(state, ledger2, lucky, c=4)
        assert k1 == 8
        assert k2 == 9  # 7 conflicts with 8

    def test_find_lucky_prefers_larger_index_set(self):
        # synthetic tables: component 20 gets four i-charges from three
        # indices, component 21 from five; witness elements are fresh
        state, ledger = base_state()
        mk = lambda pos, i: (4, ((900 + 10 * i, state.comps[pos].a), (901 + 10 * i, state.comps[pos].b)))
        tables = {}
        for i in (7, 8, 9):
            tables[i] = {20: mk(20, i)}
        for i in (10, 11, 12, 13, 14):
            tables[i] = {21: mk(21, i)}
        lucky = find_lucky(state, ledger, tables, c=18, hypothesis_holds=False)
        assert lucky.jstar == 21
        # ceil((18-10)/4) = 2 lowest four-charge indices survive
        assert lucky.hprime == (10, 11)
        assert lucky.W[10] == (1000, 1001)

    def test_find_lucky_rejects_witness_in_bprime(self):
        state, ledger = base_state()
        bad = state.comps[2].a
        tables = {7: {20: (4, ((bad, state.comps[20].a), (950, state.comps[20].b)))}}
        with pytest.raises(InternalLogicError):
            find_lucky(state, ledger, tables, c=14, hypothesis_holds=False)

    def test_exclusion_bound_violation_detected(self):
        state, ledger, W = fixtures.jstar_unlucky()
        lucky = LuckyData(jstar=10, hprime=(11, 12), W=W, hsecond=(11, 12))
        with pytest.raises(InternalLogicError):
            final_win(state, ledger, lucky, (11, 12), c=0)


class TestFinalWin:
    def test_unlucky_cross_pair_redraw(self):
        state, ledger, W = fixtures.jstar_unlucky()
        lucky = LuckyData(jstar=10, hprime=(11, 12), W=W, hsecond=(11, 12))
        tel = Telemetry()
        m = final_win(state, ledger, lucky, (11, 12), c=48, telemetry=tel)
        assert _verify_positional(state, m)
        comp5 = state.comps[5]
        assert set(m.pairs[9]) == {comp5.a, comp5.b}
        # d_6 must have survived for position 5
        comp6 = state.comps[6]
        used = {e for p in m.pairs for e in p}
        assert not {comp6.c, comp6.d} <= (used - set(m.pairs[4]))

    def test_split_left_picks_unblocked_k(self):
        state, ledger, W = fixtures.jstar_split()
        lucky = LuckyData(jstar=10, hprime=(7, 8, 9), W=W, hsecond=(7, 8, 9))
        tel = Telemetry()
        m = final_win(state, ledger, lucky, (7, 8), c=48, telemetry=tel)
        assert _verify_positional(state, m)
        assert tel.events[-1]["win"] == "split_left"
        assert tel.events[-1]["k"] == 9


# ------------------------------------------------------------------ pipeline


class TestExtendMatching:
    def test_hypothesis_violation(self):
        inst = gen_random_hypothesis(30, 0, seed=1)
        sub = _some_sub(inst)
        with pytest.raises(HypothesisViolation):
            extend_matching(inst, sub, new_rel=0, c=10**6)

    def test_n1_wrapper(self):
        inst = Instance(4, [Partition([(0, 1), (2, 3)])])
        res = solve(inst, c=0, n_min=1)
        assert res.outcome == "matched"
        assert verify_matching(inst, res.matching).valid

    def test_random_instance(self):
        inst = gen_random_hypothesis(50, 5000, seed=9)
        res = solve(inst, c=5000)
        assert res.outcome == "matched"
        assert verify_matching(inst, res.matching).valid

    def test_planted_track_telemetry(self):
        inst, sub = gen_planted_concentrated(60, 20, seed=4)
        tel = Telemetry()
        m = extend_matching(inst, sub, new_rel=0, c=20, telemetry=tel)
        assert verify_matching(inst, m).valid
        track_events = [e for e in tel.events if e["phase"] == "build_track"]
        assert track_events and track_events[-1]["track_len"] == 11

    def test_deep_pipeline_reaches_final_win(self):
        inst, sub = gen_planted_concentrated(100, 32, seed=6)
        tel = Telemetry()
        m = extend_matching(inst, sub, new_rel=0, c=32, telemetry=tel)
        assert verify_matching(inst, m).valid
        phases = tel.phases()
        for phase in ("build_track", "charge_scheme_2", "charge_scheme_3", "lucky", "final_win"):
            assert phase in phases

    def test_heavy_count_assertion(self):
        inst, sub = gen_planted_concentrated(100, 32, seed=6)
        state = _initial_state(inst, sub, 0)
        kind, state = build_track(state)
        assert kind == "track"
        kind, ledger = charge_scheme_2(state)
        assert kind == "ledger"
        h = heavy_indices(state, ledger, c=32, hypothesis_holds=True)
        assert 5 * (len(h) + len(ledger.heavy_left())) >= state.n + 5 * 32


def _some_sub(inst):
    used = set()
    sub = {}
    for i in range(1, inst.n):
        for cl in inst.relations[i].classes:
            free = [e for e in cl if e not in used]
            if len(free) >= 2:
                sub[i] = (free[0], free[1])
                used.update(free[:2])
                break
    return sub


# ------------------------------------------------------------ property tests


@settings(max_examples=15, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=30, max_value=45))
def test_random_hypothesis_always_solved(seed, n):
    inst = gen_random_hypothesis(n, 200, seed)
    res = solve(inst, c=200)
    assert res.outcome == "matched"
    assert verify_matching(inst, res.matching).valid


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_planted_small_c_always_solved(seed):
    inst, sub = gen_planted_concentrated(40, 8, seed)
    tel = Telemetry()
    m = extend_matching(inst, sub, new_rel=0, c=8, telemetry=tel)
    assert verify_matching(inst, m).valid
    assert tel.win_branch is not None
