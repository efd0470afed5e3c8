"""Per-heavy-component charging (Scheme 3) and its win patterns.

For a heavy right-side position i we first look for two ways to finish
outright: an i-equivalent pair avoiding both B and S_i, or an untainted
left component whose identity element is i-equivalent to something fresh.
If neither applies, K_i is charged to the right-side components, with a
small bounded set of elements allowed to stay uncharged.
"""

from __future__ import annotations

from typing import Optional

from ..core import kernel
from ..errors import CompletionImpossible, InternalLogicError
from .completion import complete_assignment
from .state import ChargeLedger, Overrides, Telemetry, TrackState


def tainted_left(state: TrackState, ledger: ChargeLedger, i: int) -> set[int]:
    """Left positions whose component meets T_i."""
    ti = set(ledger.T.get(i, ()))
    out = set()
    for j in state.left_positions():
        if ti.intersection(state.comps[j].elements):
            out.add(j)
    return out


def _try_win_fresh_pair(
    state: TrackState, ledger: ChargeLedger, i: int, telemetry: Optional[Telemetry]
):
    """An i-equivalent pair with both elements outside B and S_i."""
    avoid = state.b_set | set(ledger.S.get(i, ()))
    rel = state.relation_at(i)
    for cl in rel.classes:
        free = [x for x in cl if x not in avoid]
        if len(free) < 2:
            continue
        for ai in range(len(free)):
            for bi in range(ai + 1, len(free)):
                x, y = free[ai], free[bi]
                for u in ledger.S.get(i, ()):
                    if u in (x, y):
                        continue
                    try:
                        m = complete_assignment(
                            state, Overrides({i: (x, y), 1: (u, ledger.one_partner[u])})
                        )
                    except (CompletionImpossible, ValueError):
                        continue
                    if telemetry:
                        telemetry.record("heavy_win", win="fresh_pair", index=i)
                    return m
    return None


def _try_win_untainted_left(
    state: TrackState, ledger: ChargeLedger, i: int, telemetry: Optional[Telemetry]
):
    """An untainted left component with an identity element i-equivalent to a
    fresh element; relation i takes that pair and T_i pays for relation t."""
    bprime = state.bprime_set
    ti = set(ledger.T.get(i, ()))
    tainted = tainted_left(state, ledger, i)
    rel = state.relation_at(i)
    for j in state.left_positions():
        if j in tainted:
            continue
        comp = state.comps[j]
        for e in (comp.a, comp.b):
            for z in rel.class_of(e):
                if z == e or z in bprime or z in ti:
                    continue
                for v in ledger.T.get(i, ()):
                    part = ledger.t_partner[v]
                    if len({e, z, v, part}) != 4:
                        continue
                    try:
                        m = complete_assignment(
                            state, Overrides({i: (e, z), state.t: (v, part)})
                        )
                    except (CompletionImpossible, ValueError):
                        continue
                    if telemetry:
                        telemetry.record("heavy_win", win="untainted_left", index=i)
                    return m
    return None


def charge_scheme_3(
    state: TrackState,
    ledger: ChargeLedger,
    i: int,
    telemetry: Optional[Telemetry] = None,
):
    """Charge K_i to the right-side components, or finish with a win.

    Returns ("win", Matching) or ("table", {pos: (count, outsiders)}) where
    outsiders holds (element, identity partner) pairs charged from outside B'.
    """
    m = _try_win_fresh_pair(state, ledger, i, telemetry)
    if m is not None:
        return ("win", m)
    m = _try_win_untainted_left(state, ledger, i, telemetry)
    if m is not None:
        return ("win", m)

    rel = state.relation_at(i)
    bprime = state.bprime_set
    comp_of = state.component_of()
    ui = set(ledger.U(i))
    si = set(ledger.S.get(i, ()))
    tainted_ids = set()
    for j in tainted_left(state, ledger, i):
        comp = state.comps[j]
        tainted_ids.update((comp.a, comp.b))

    counts: dict[int, int] = {}
    outsiders: dict[int, list[tuple[int, int]]] = {}
    uncharged: list[int] = []
    for cl in rel.classes:
        right_members = [x for x in cl if comp_of.get(x, 0) > state.t]
        skip_members = [x for x in cl if x in si or x in tainted_ids]
        for x in cl:
            if x in ui:
                continue
            if x in bprime:
                counts[comp_of[x]] = counts.get(comp_of[x], 0) + 1
                continue
            if skip_members:
                uncharged.append(x)
                continue
            if not right_members:
                raise InternalLogicError(
                    "charge_scheme_3",
                    f"element {x} of relation at position {i} is dead; {state.digest()}",
                )
            p = min(comp_of[y] for y in right_members)
            counts[p] = counts.get(p, 0) + 1
            partner = min(y for y in right_members if comp_of[y] == p)
            outsiders.setdefault(p, []).append((x, partner))

    if len(uncharged) > 6:
        raise InternalLogicError(
            "charge_scheme_3", f"{len(uncharged)} uncharged elements for position {i}, cap is 6"
        )
    covered = sum(counts.values()) + len(uncharged) + len(ui & kernel(rel))
    if covered != len(kernel(rel)):
        raise InternalLogicError(
            "charge_scheme_3", f"charge accounting off for position {i}: {covered}"
        )
    table: dict[int, tuple[int, tuple[tuple[int, int], ...]]] = {}
    for p, cnt in counts.items():
        if cnt > 4:
            raise InternalLogicError(
                "charge_scheme_3", f"position {p} got {cnt} > 4 i-charges (i at {i})"
            )
        outs = tuple(outsiders.get(p, ()))
        if len(outs) > 2:
            raise InternalLogicError(
                "charge_scheme_3", f"position {p} got {len(outs)} > 2 outside i-charges"
            )
        table[p] = (cnt, outs)
    return ("table", table)


def pick_heavy_pair_elements(
    state: TrackState,
    ledger: ChargeLedger,
    i: int,
    j: int,
    q: Optional[int] = None,
    r: Optional[int] = None,
) -> tuple[int, int, int, int]:
    """Choose (v1, w1, v2, w2) with v1 ~1 w1 and v2 ~t w2, all four distinct,
    v's among the identity elements of C_i and C_j, w's in U_i and U_j.

    With q and r given, additionally require exactly one of them among
    {w1, w2}.  The search is exhaustive in a fixed order, so the result is
    deterministic; exhaustion raises InternalLogicError.
    """
    ci, cj = state.comps[i], state.comps[j]
    vs = [ci.a, ci.b] + ([cj.a, cj.b] if j != i else [])
    ws = list(ledger.U(i))
    for x in ledger.U(j):
        if x not in ws:
            ws.append(x)
    rel1 = state.relation_at(1)
    relt = state.relation_at(state.t)
    for v1 in vs:
        for w1 in ws:
            if w1 == v1 or not rel1.equivalent(v1, w1):
                continue
            for v2 in vs:
                if v2 in (v1, w1):
                    continue
                for w2 in ws:
                    if w2 in (v1, w1, v2) or not relt.equivalent(v2, w2):
                        continue
                    if q is not None:
                        hits = sum(1 for e in (q, r) if e in (w1, w2))
                        if hits != 1:
                            continue
                    return (v1, w1, v2, w2)
    raise InternalLogicError(
        "pick_heavy_pair_elements",
        f"no 1-/t-pair choice for components {i}, {j} (q={q}, r={r}); {state.digest()}",
    )
