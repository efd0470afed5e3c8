"""Exact solver tests, cross-checked against an independent brute-force
enumerator."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from brute import brute_has_matching
from grinblat.core import Instance, Partition, verify_matching
from grinblat.gen import gen_lower_bound_family
from grinblat.oracle import exact_solve


class TestExactSolve:
    def test_empty_instance(self):
        res = exact_solve(Instance(0, []))
        assert res.outcome == "matched" and res.matching.pairs == ()

    def test_single_relation(self):
        res = exact_solve(Instance(3, [Partition([(0, 1, 2)])]))
        assert res.outcome == "matched"

    def test_relation_without_pairs(self):
        res = exact_solve(Instance(3, [Partition([])]))
        assert res.outcome == "proven-none" and res.nodes == 0

    def test_forced_backtracking(self):
        # relation 0 prefers (0,1) but only (2,3) leaves relation 1 alive
        inst = Instance(
            4, [Partition([(0, 1), (2, 3)]), Partition([(0, 1)])]
        )
        res = exact_solve(inst)
        assert res.outcome == "matched"
        assert verify_matching(inst, res.matching).valid

    def test_lower_bound_family_proven_none(self):
        for n in (2, 3, 4, 5):
            res = exact_solve(gen_lower_bound_family(n))
            assert res.outcome == "proven-none"

    def test_budget_reported_as_outcome(self):
        res = exact_solve(gen_lower_bound_family(6), budget=3)
        assert res.outcome == "budget"
        assert res.nodes >= 3

    def test_deterministic(self):
        inst = gen_lower_bound_family(4)
        r1, r2 = exact_solve(inst), exact_solve(inst)
        assert r1.nodes == r2.nodes and r1.outcome == r2.outcome


def _random_small_instance(rng: random.Random) -> Instance:
    ground = rng.randint(4, 14)
    n = rng.randint(1, 6)
    rels = []
    for _ in range(n):
        elems = list(range(ground))
        rng.shuffle(elems)
        k = rng.randint(1, 2)
        classes = []
        at = 0
        for _ in range(k):
            size = rng.choice((2, 3))
            if at + size > ground:
                break
            classes.append(tuple(elems[at : at + size]))
            at += size
        if not classes:
            classes = [tuple(elems[:2])]
        rels.append(Partition(classes))
    return Instance(ground, rels)


def test_exact_solve_agrees_with_brute_force():
    rng = random.Random(20260824)
    for _ in range(300):
        inst = _random_small_instance(rng)
        res = exact_solve(inst)
        expected = brute_has_matching(inst)
        assert (res.outcome == "matched") == expected
        if res.matching is not None:
            assert verify_matching(inst, res.matching).valid


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**9))
def test_exact_solve_agrees_with_brute_force_property(seed):
    inst = _random_small_instance(random.Random(seed))
    res = exact_solve(inst)
    assert (res.outcome == "matched") == brute_has_matching(inst)
