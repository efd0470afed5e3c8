"""Hand-built track states exercising the deep lemma engines.

Each builder returns (state, ledger) plus whatever bookkeeping the test
needs.  All use n=30 (t=6): left positions 2..6, right positions 7..30.

Conventions: a component j becomes heavy by giving relation 1 the classes
{a_j, x}, {b_j, y} (sigma 4) and relation t either two fresh partners
(right side) or two intra-component pairs (left side; anything else would
hand the t-charging scan an immediate win).  Component 2 already has
sigma 4 from the base track classes {a_2, c_2}, {b_2, d_2}, so it is
never pumped.
"""

from __future__ import annotations

from grinblat.gen import FixtureSpec, gen_fixture_ledger

N = 30  # t = 6


def _pump_sigma(extra: dict, j: int, tag: str) -> None:
    """sigma_j = 4 via two fresh 1-partners (only for j >= 3)."""
    extra.setdefault(1, []).extend(
        [[("a", j), ("x", f"s{tag}")], [("b", j), ("x", f"ss{tag}")]]
    )


def _heavy_left_cd(extra: dict, j: int) -> None:
    """tau_j = 4 via the special cross pair plus the identity pair."""
    extra.setdefault(6, []).extend([[("c", j), ("d", j)], [("a", j), ("b", j)]])


def _heavy_left_crossed(extra: dict, j: int) -> None:
    """tau_j = 4 via the two crossed intra-component pairs (a,d) and (b,c).

    Not usable for j = t: the identity pair {a_t, b_t} is itself a class of
    relation t, so a crossed class would merge with it and hand the win scan
    a same-part pair.  Component t gets the cd pump instead (its identity
    class already contributes tau 2).
    """
    extra.setdefault(6, []).extend([[("a", j), ("d", j)], [("b", j), ("c", j)]])


def _heavy_left_cd_only(extra: dict, j: int) -> None:
    """tau_j += 2 via the special cross pair alone (for j = t)."""
    extra.setdefault(6, []).append([("c", j), ("d", j)])


def _five_heavy_base(extra: dict) -> None:
    for j in range(3, 7):
        _pump_sigma(extra, j, str(j))


def five_heavy_case1():
    """C_{i_2} = C_3 carries c' ~t d'; the 1-pair comes from a later component."""
    extra: dict = {}
    _five_heavy_base(extra)
    for j in range(2, 6):
        if j == 3:
            _heavy_left_cd(extra, j)
        else:
            _heavy_left_crossed(extra, j)
    _heavy_left_cd_only(extra, 6)
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def five_heavy_case2a():
    """C_3 has a' ~t d' and a fresh 1-partner for b'."""
    extra: dict = {}
    _five_heavy_base(extra)
    for j in range(2, 6):
        _heavy_left_crossed(extra, j)
    _heavy_left_cd_only(extra, 6)
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def five_heavy_case2b():
    """C_3 has a' ~t d' and d' ~1 b', so the win reroutes through C_2's t-pair."""
    extra: dict = {
        1: [[("a", 3), ("x", "s3")], [("b", 3), ("d", 3)]],
    }
    for j in range(4, 7):
        _pump_sigma(extra, j, str(j))
    for j in range(2, 6):
        _heavy_left_crossed(extra, j)
    _heavy_left_cd_only(extra, 6)
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def heavy_right(extra: dict, i: int, tag: str) -> None:
    """Make right position i heavy: sigma 4 (fresh S) and tau 4 (fresh T)."""
    extra.setdefault(1, []).extend(
        [[("a", i), ("x", f"s{tag}")], [("b", i), ("x", f"ss{tag}")]]
    )
    extra.setdefault(6, []).extend(
        [[("a", i), ("x", f"t{tag}")], [("b", i), ("x", f"tt{tag}")]]
    )


def pair_elements_disjoint():
    """S_8 = {p}, T_9 = {s}: the direct disjoint heavy-pair case."""
    extra: dict = {
        1: [[("a", 8), ("x", "p")]],
        6: [[("a", 9), ("x", "s")]],
    }
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def pair_elements_crossing():
    """Component 8 crossed (a ~1 u, b ~1 v, a ~t v, b ~t u), so a single
    component cannot supply the four elements; component 9 escapes."""
    extra: dict = {
        1: [
            [("a", 8), ("x", "u")],
            [("b", 8), ("x", "v")],
            [("a", 9), ("x", "p")],
        ],
        6: [
            [("a", 8), ("x", "v")],
            [("b", 8), ("x", "u")],
            [("a", 9), ("x", "s")],
        ],
    }
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def pair_elements_redraw():
    """q sits in S_8 and T_8 at once; component 9 supplies the other side."""
    extra: dict = {
        1: [[("a", 8), ("x", "q")], [("a", 9), ("x", "p")]],
        6: [[("b", 8), ("x", "q")], [("a", 9), ("x", "s")]],
    }
    state, ledger = gen_fixture_ledger(FixtureSpec(n=N, extra=extra))
    q = ledger.S[8][0]
    s = ledger.T[9][0]
    return state, ledger, q, s


def scheme3_win_fresh_pair():
    """Heavy right 8 whose relation has a class fully outside B and S_8."""
    extra: dict = {}
    heavy_right(extra, 8, "h8")
    extra[8] = [[("x", "w1"), ("x", "w2")]]
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def scheme3_win_untainted_left():
    """Heavy right 8, untainted left C_2, a_2 ~8 fresh z."""
    extra: dict = {}
    heavy_right(extra, 8, "h8")
    extra[8] = [[("a", 2), ("x", "z")]]
    return gen_fixture_ledger(FixtureSpec(n=N, extra=extra))


def conflict_triple(jstar: int = 10):
    """H' = (7, 8, 9) with 7 and 8 conflicting (crossed shared witness set).

    Returns (state, ledger, W) where W maps each index to its witness pair.
    """
    extra: dict = {
        7: [[("a", jstar), ("x", "wy")], [("b", jstar), ("x", "wz")]],
        8: [[("a", jstar), ("x", "wz")], [("b", jstar), ("x", "wy")]],
        9: [[("a", jstar), ("x", "wu")], [("b", jstar), ("x", "wv")]],
    }
    state, ledger = gen_fixture_ledger(FixtureSpec(n=N, extra=extra))
    W = {k: _witness_pair(state, jstar, k) for k in (7, 8, 9)}
    return state, ledger, W


def _witness_pair(state, jstar: int, k: int) -> tuple[int, int]:
    comp = state.comps[jstar]
    rel = state.relation_at(k)
    return tuple(
        next(e for e in rel.class_of(v) if e != v) for v in (comp.a, comp.b)
    )


def jstar_unlucky(jstar: int = 10, k1: int = 11, k2: int = 12):
    """Final-win fixture whose first heavy-pair draw eats the cross pair of C_6.

    Relation jstar offers (a_5, b_5); consuming that pair pushes position 5
    onto the cross pair of C_6, so a draw eating both c_6 and d_6 cannot be
    completed.  The constrained redraw keeps d_6 alive via component k2.
    """
    extra: dict = {
        1: [[("a", k1), ("c", 6)], [("a", k2), ("x", "g")]],
        6: [[("b", k1), ("d", 6)], [("a", k2), ("x", "h")]],
        k1: [[("a", jstar), ("x", "w1")], [("b", jstar), ("x", "w2")]],
        k2: [[("a", jstar), ("x", "w3")], [("b", jstar), ("x", "w4")]],
        jstar: [[("a", 5), ("b", 5)]],
    }
    state, ledger = gen_fixture_ledger(FixtureSpec(n=N, extra=extra))
    W = {k: _witness_pair(state, jstar, k) for k in (k1, k2)}
    return state, ledger, W


def jstar_split(jstar: int = 10):
    """Final-win fixture in the two-left-components case; k = 9 is the only
    index of H'' = (7, 8, 9) whose T set avoids the freed d elements."""
    extra: dict = {
        1: [[("a", 9), ("x", "p")]],
        6: [
            [("a", 7), ("d", 4)],
            [("a", 8), ("d", 5)],
            [("b", 9), ("x", "s")],
        ],
        7: [[("a", jstar), ("x", "w71")], [("b", jstar), ("x", "w72")]],
        8: [[("a", jstar), ("x", "w81")], [("b", jstar), ("x", "w82")]],
        9: [[("a", jstar), ("x", "w91")], [("b", jstar), ("x", "w92")]],
        jstar: [[("a", 4), ("a", 5)]],
    }
    state, ledger = gen_fixture_ledger(FixtureSpec(n=N, extra=extra))
    W = {k: _witness_pair(state, jstar, k) for k in (7, 8, 9)}
    return state, ledger, W
