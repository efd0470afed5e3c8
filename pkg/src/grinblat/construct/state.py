"""State carried through one extension step of the constructive solver.

Positions vs. relations: the argument freely renames relation indices
("without loss of generality ..."), so we keep an explicit permutation.
Internal *positions* run 1..n; position 1 is the relation being added,
positions 2..n carry the components of the existing matching.  ``perm[p]``
is the index of the relation (in the instance) sitting at position p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..core import Instance, Partition


@dataclass
class Component:
    """Identity pair (a, b), plus the cross pair (c, d) on left-side components."""

    pos: int
    a: int
    b: int
    c: Optional[int] = None
    d: Optional[int] = None

    @property
    def is_left(self) -> bool:
        return self.c is not None

    @property
    def elements(self) -> tuple[int, ...]:
        if self.is_left:
            return (self.a, self.b, self.c, self.d)
        return (self.a, self.b)

    @property
    def top(self) -> tuple[int, ...]:
        return (self.a, self.c) if self.is_left else (self.a,)

    @property
    def bottom(self) -> tuple[int, ...]:
        return (self.b, self.d) if self.is_left else (self.b,)


class TrackState:
    """Components, the index permutation, and the current track extent.

    Left-side positions are 2..extent; an extent of 1 means no track yet.
    """

    def __init__(self, inst: Instance, perm: list[int], comps: dict[int, Component], extent: int = 1):
        self.inst = inst
        self.n = inst.n
        self.perm = perm  # perm[p] = relation index at position p; perm[0] unused
        self.comps = comps  # position -> Component, positions 2..n
        self.extent = extent
        self.t = inst.n // 5

    def relation_at(self, pos: int) -> Partition:
        return self.inst.relations[self.perm[pos]]

    @property
    def b_set(self) -> set[int]:
        out: set[int] = set()
        for p in range(2, self.n + 1):
            c = self.comps[p]
            out.add(c.a)
            out.add(c.b)
        return out

    @property
    def bprime_set(self) -> set[int]:
        out = self.b_set
        for p in range(2, self.extent + 1):
            c = self.comps[p]
            out.add(c.c)
            out.add(c.d)
        return out

    def right_positions(self) -> range:
        return range(self.extent + 1, self.n + 1)

    def left_positions(self) -> range:
        return range(2, self.extent + 1)

    @property
    def right_set(self) -> set[int]:
        out: set[int] = set()
        for p in self.right_positions():
            c = self.comps[p]
            out.add(c.a)
            out.add(c.b)
        return out

    def component_of(self) -> dict[int, int]:
        """Map each tracked element to its component's position."""
        out: dict[int, int] = {}
        for p in range(2, self.n + 1):
            for x in self.comps[p].elements:
                out[x] = p
        return out

    def swap_positions(self, p: int, q: int) -> None:
        """Exchange the components (and relation bindings) at two positions."""
        if p == q:
            return
        self.perm[p], self.perm[q] = self.perm[q], self.perm[p]
        cp, cq = self.comps[p], self.comps[q]
        cp.pos, cq.pos = q, p
        self.comps[p], self.comps[q] = cq, cp

    def digest(self) -> str:
        """Short fingerprint for InternalLogicError payloads."""
        comps = ",".join(
            f"{p}:{self.comps[p].elements}" for p in sorted(self.comps)[:6]
        )
        return f"n={self.n} t={self.t} extent={self.extent} perm[:6]={self.perm[:6]} comps={comps}..."


@dataclass
class ChargeLedger:
    """Per-component charge counts and sets from the 1-/t-charging pass."""

    n: int
    t: int
    sigma: list[int]  # indexed by position; [0..1] unused
    tau: list[int]
    S: dict[int, tuple[int, ...]]  # non-identity elements 1-charged to the position
    T: dict[int, tuple[int, ...]]
    one_partner: dict[int, int]  # charged element -> identity element it is 1-equivalent to
    t_partner: dict[int, int]

    def U(self, pos: int) -> tuple[int, ...]:
        s = self.S.get(pos, ())
        out = list(s)
        for x in self.T.get(pos, ()):
            if x not in out:
                out.append(x)
        return tuple(out)

    def charges(self, pos: int) -> int:
        return self.sigma[pos] + self.tau[pos]

    def heavy_left(self) -> list[int]:
        return [p for p in range(2, self.t + 1) if self.charges(p) >= 7]

    def heavy_right(self) -> list[int]:
        return [p for p in range(self.t + 1, self.n + 1) if self.charges(p) >= 7]


@dataclass
class LuckyData:
    """Lucky component, witness sets, and the exclusion set of the final phase."""

    jstar: int
    hprime: tuple[int, ...]
    W: dict[int, tuple[int, int]]
    hsecond: tuple[int, ...] = ()
    popular: frozenset[int] = frozenset()
    Y: frozenset[int] = frozenset()


@dataclass(frozen=True)
class Overrides:
    """Pinned relation-position -> pair assignments for the completion engine."""

    assigned: tuple[tuple[int, tuple[int, int]], ...]

    def __init__(self, assigned: dict[int, tuple[int, int]]):
        object.__setattr__(self, "assigned", tuple(sorted(assigned.items())))

    def as_dict(self) -> dict[int, tuple[int, int]]:
        return dict(self.assigned)

    @property
    def consumed(self) -> frozenset[int]:
        out: set[int] = set()
        for _, (x, y) in self.assigned:
            out.add(x)
            out.add(y)
        return frozenset(out)


@dataclass
class Telemetry:
    """Structured step log emitted by one solve."""

    events: list[dict] = field(default_factory=list)

    def record(self, phase: str, **details) -> None:
        self.events.append({"phase": phase, **details})

    @property
    def phase_reached(self) -> str:
        return self.events[-1]["phase"] if self.events else "none"

    def phases(self) -> list[str]:
        return [e["phase"] for e in self.events]

    @property
    def win_branch(self) -> Optional[str]:
        for e in reversed(self.events):
            if "win" in e:
                return e["win"]
        return None
