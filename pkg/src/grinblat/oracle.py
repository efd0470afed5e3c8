"""Exact ground-truth solvers.

exact_solve is a plain backtracking search over per-relation pair choices,
used to certify matchings and non-matchings at small scale.
search_unmatchable hunts for extremal witnesses: instances whose kernels
all reach a target size yet admit no rainbow matching.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .core import Instance, Matching, Partition, kernel
from .errors import GrinblatError


@dataclass(frozen=True)
class SolveResult:
    outcome: str  # "matched", "proven-none", or "budget"
    matching: Optional[Matching] = None
    nodes: int = 0


class _BudgetExhausted(GrinblatError):
    pass


def _pairs_of(p: Partition) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for cl in p.classes:
        out.extend(itertools.combinations(cl, 2))
    out.sort()
    return out


def exact_solve(inst: Instance, budget: Optional[int] = None) -> SolveResult:
    """Backtracking search; fail-first relation order, deterministic.

    A node is one attempted pair assignment.  Budget exhaustion is reported
    as an outcome, never an error.
    """
    n = inst.n
    if n == 0:
        return SolveResult("matched", Matching([]), 0)
    pair_lists = [_pairs_of(p) for p in inst.relations]
    if any(not pl for pl in pair_lists):
        return SolveResult("proven-none", None, 0)
    used: set[int] = set()
    chosen: dict[int, tuple[int, int]] = {}
    nodes = 0

    def rec() -> bool:
        nonlocal nodes
        open_rels = [i for i in range(n) if i not in chosen]
        if not open_rels:
            return True
        # fail-first: the relation with the fewest available pairs
        best_i, best_avail = -1, None
        for i in open_rels:
            avail = [
                (a, b) for a, b in pair_lists[i] if a not in used and b not in used
            ]
            if best_avail is None or len(avail) < len(best_avail):
                best_i, best_avail = i, avail
                if not avail:
                    break
        for a, b in best_avail:  # type: ignore[union-attr]
            nodes += 1
            if budget is not None and nodes > budget:
                raise _BudgetExhausted()
            used.add(a)
            used.add(b)
            chosen[best_i] = (a, b)
            if rec():
                return True
            del chosen[best_i]
            used.discard(a)
            used.discard(b)
        return False

    try:
        ok = rec()
    except _BudgetExhausted:
        return SolveResult("budget", None, nodes)
    if ok:
        return SolveResult("matched", Matching([chosen[i] for i in range(n)]), nodes)
    return SolveResult("proven-none", None, nodes)


@dataclass(frozen=True)
class SearchResult:
    witness: Optional[Instance]
    ground_size: int
    nodes: int
    exhausted: bool  # True when the whole space was covered without a find


def _partitions_23(elems: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of elems into blocks of size 2 or 3."""
    if not elems:
        yield ()
        return
    first, rest = elems[0], list(elems[1:])
    for size in (1, 2):
        for combo in itertools.combinations(rest, size):
            block = (first,) + combo
            remaining = [e for e in rest if e not in combo]
            for tail in _partitions_23(remaining):
                yield (block,) + tail


def _count_partitions_23(k: int) -> int:
    if k == 0:
        return 1
    if k == 1:
        return 0
    total = (k - 1) * _count_partitions_23(k - 2)
    if k >= 3:
        total += (k - 1) * (k - 2) // 2 * _count_partitions_23(k - 3)
    return total


def _shapes(k: int) -> list[tuple[int, ...]]:
    """Multisets of block sizes 2 and 3 summing to k, smallest-first order."""
    out = []
    for threes in range(k // 3 + 1):
        rem = k - 3 * threes
        if rem % 2 == 0:
            out.append(tuple([2] * (rem // 2) + [3] * threes))
    return sorted(out)


def search_unmatchable(
    n: int,
    kernel_target: int,
    max_ground: int,
    budget: int = 10**8,
    seed: int = 0,
) -> SearchResult:
    """DFS over canonical instances with every kernel exactly kernel_target.

    Restricting kernels to exactly the target loses no witnesses: dropping
    whole classes keeps an instance unmatchable, so a minimal witness sits
    at the target.  Relation 1 is fixed to consecutive canonical blocks per
    shape (killing the element-relabeling symmetry), and the remaining
    relations are chosen in nondecreasing candidate order (relations are
    exchangeable).  After a full deterministic pass, seeded shuffled passes
    reorder the candidates until the budget runs out.
    """
    if n < 1 or kernel_target < 2:
        return SearchResult(None, 0, 0, True)
    nodes = 0

    def certify(rels: list[Partition], ground: int) -> Optional[Instance]:
        nonlocal nodes
        inst = Instance(ground, rels)
        res = exact_solve(inst, budget=budget - nodes)
        nodes += res.nodes
        return inst if res.outcome == "proven-none" else None

    rng = random.Random(seed)
    for restart in range(64):
        if nodes >= budget:
            break
        found, complete = _search_pass(
            n, kernel_target, max_ground, budget, rng if restart else None, certify,
            lambda: nodes,
        )
        if found is not None:
            return SearchResult(found, found.ground_size, nodes, False)
        if restart == 0 and complete:
            # the deterministic pass covered everything; no point reshuffling
            return SearchResult(None, 0, nodes, True)
    return SearchResult(None, 0, nodes, False)


def _search_pass(n, kernel_target, max_ground, budget, rng, certify, node_count):
    """One pass over all (ground, shape) cells.  Returns (witness, complete)."""
    complete = True
    for ground in range(kernel_target, max_ground + 1):
        est = math.comb(ground, kernel_target) * _count_partitions_23(kernel_target)
        if node_count() + est > budget:
            complete = False
            break
        candidates: list[tuple[tuple[int, ...], ...]] = []
        for support in itertools.combinations(range(ground), kernel_target):
            candidates.extend(_partitions_23(support))
        if rng is not None:
            rng.shuffle(candidates)
        for shape in _shapes(kernel_target):
            # relation 1: consecutive blocks realizing the shape
            blocks, at = [], 0
            for sz in shape:
                blocks.append(tuple(range(at, at + sz)))
                at += sz
            rel1 = Partition(blocks)
            witness = _dfs_relations(
                n, ground, rel1, candidates, budget, certify, node_count
            )
            if witness is not None:
                return witness, False
            if node_count() >= budget:
                return None, False
    return None, complete


def _dfs_relations(n, ground, rel1, candidates, budget, certify, node_count):
    chosen: list[Partition] = [rel1]

    def rec(start: int) -> Optional[Instance]:
        if len(chosen) == n:
            return certify(list(chosen), ground)
        for idx in range(start, len(candidates)):
            if node_count() >= budget:
                return None
            chosen.append(Partition(candidates[idx]))
            found = rec(idx)
            if found is not None:
                return found
            chosen.pop()
        return None

    if n == 1:
        return certify([rel1], ground)
    return rec(0)


@dataclass(frozen=True)
class KernelEstimate:
    value: int
    witness: Optional[Instance]
    exhausted: bool


def min_unmatchable_kernel(
    n: int, max_ground: int = 12, budget: int = 10**7, seed: int = 0
) -> KernelEstimate:
    """Largest kernel target for which the bounded search finds a witness.

    Descends from 3n - 1; the 3n - 3 family guarantees termination.  The
    exhausted flag is True only when every failed target was fully covered.
    """
    exhausted = True
    for target in range(3 * n - 1, 1, -1):
        res = search_unmatchable(n, target, max_ground, budget=budget, seed=seed)
        if res.witness is not None:
            return KernelEstimate(target, res.witness, exhausted)
        exhausted = exhausted and res.exhausted
    return KernelEstimate(0, None, exhausted)
