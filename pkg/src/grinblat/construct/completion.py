"""Generic completion engine.

Every win branch of the constructive argument ends the same way: a handful
of relations get explicitly chosen pairs, and the rest fall back to their
component's identity pair or, for relations under the track, to one of the
two cross pairs of the component above them.  Rather than hand-coding each
chain-shift diagram, we pin the explicit pairs as overrides and search the
remaining <= 3 options per relation depth-first.
"""

from __future__ import annotations

from ..core import Matching
from ..errors import CompletionImpossible
from .state import Overrides, TrackState


def _options(state: TrackState, pos: int) -> list[tuple[int, int]]:
    opts: list[tuple[int, int]] = []
    if pos >= 2:
        comp = state.comps[pos]
        opts.append((comp.a, comp.b))
    if pos + 1 <= state.extent:
        above = state.comps[pos + 1]
        opts.append((above.a, above.c))
        opts.append((above.b, above.d))
    return opts


def complete_assignment(state: TrackState, ov: Overrides) -> Matching:
    """Assign every position a pair, honoring overrides; raise if impossible.

    Positions are processed in decreasing order; relation 1 has no identity
    pair, so callers must either override it or leave a cross pair of C_2
    free.  The result is in position order (callers map it back through
    the permutation).
    """
    assigned = ov.as_dict()
    for pos, (x, y) in assigned.items():
        if not (1 <= pos <= state.n):
            raise ValueError(f"override position {pos} out of range")
        if x == y:
            raise ValueError(f"degenerate override pair at position {pos}")
        if y not in state.relation_at(pos).class_of(x):
            raise ValueError(
                f"override pair ({x}, {y}) not equivalent under position {pos}"
            )
    consumed = set()
    for x, y in assigned.values():
        for e in (x, y):
            if e in consumed:
                raise ValueError(f"override element {e} used twice")
            consumed.add(e)

    result: dict[int, tuple[int, int]] = dict(assigned)

    def rec(pos: int) -> bool:
        if pos == 0:
            return True
        if pos in assigned:
            return rec(pos - 1)
        for x, y in _options(state, pos):
            if x not in consumed and y not in consumed:
                consumed.add(x)
                consumed.add(y)
                result[pos] = (x, y)
                if rec(pos - 1):
                    return True
                consumed.discard(x)
                consumed.discard(y)
        return False

    if not rec(state.n):
        raise CompletionImpossible(
            f"no completion under overrides {sorted(assigned)}; {state.digest()}"
        )
    return Matching([result[p] for p in range(1, state.n + 1)])
