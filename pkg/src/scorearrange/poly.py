"""Polynomial special cases and the route table that picks a solver.

=================================================  ============
regime                                             route
=================================================  ============
p = 0                                              p_zero
p = 1                                              p_one
only a chord cap j, p > j/(j+1)                    overcoverage
only a chord cap j = 1, p > 1/3                    two_coloring
anything else                                      exact
=================================================  ============

The region 2 <= j, j/(j+2) < p <= j/(j+1) has no known polynomial
algorithm and goes to the exact search like the NP-complete ones.
"""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .constraints import verify
from .exact import Limits, SearchTimeout, solve_exact
from .score import ConstraintProfile, Score, Selection, intervals


class DispatchError(ValueError):
    """A polynomial solver was called outside the regime it is valid for."""


class Route(str, enum.Enum):
    P_ZERO = "p_zero"
    P_ONE = "p_one"
    OVERCOVERAGE = "overcoverage"
    TWO_COLORING = "two_coloring"
    EXACT = "exact"


@dataclass
class SolveResult:
    status: str  # "sat" | "unsat" | "timeout"
    selection: Selection | None
    route: Route
    nodes_explored: int = 0

    def to_dict(self, score: Score) -> dict:
        return {
            "status": self.status,
            "selection": self.selection.ordered(score) if self.selection is not None else [],
            "route": self.route.value,
            "nodes_explored": self.nodes_explored,
        }

    def to_json(self, score: Score) -> str:
        return json.dumps(self.to_dict(score))


def solve_p_zero(score: Score, profile: ConstraintProfile) -> Selection:
    if profile.p != 0:
        raise DispatchError(f"p_zero route needs p = 0, got {profile.p}")
    return Selection()


def solve_p_one(score: Score, profile: ConstraintProfile) -> Selection | None:
    if profile.p != 1:
        raise DispatchError(f"p_one route needs p = 1, got {profile.p}")
    everything = Selection.all_parts(score)
    return everything if verify(score, everything, profile)[0] else None


def _only_chord_cap(profile: ConstraintProfile) -> bool:
    return profile.max_chord is not None and not profile.consonance and profile.min_segment_ticks is None


def solve_overcoverage(score: Score, profile: ConstraintProfile) -> Selection | None:
    """With p > j/(j+1) every note must be played, so N <= j everywhere."""
    j = profile.max_chord
    if not _only_chord_cap(profile) or not profile.p > Fraction(j, j + 1):
        raise DispatchError("overcoverage route needs only a chord cap j and p > j/(j+1)")
    if any(len(iv.instances) > j for iv in intervals(score)):
        return None
    return Selection.all_parts(score)


def solve_two_coloring(score: Score, profile: ConstraintProfile) -> Selection | None:
    """j = 1, p > 1/3: every instant has at most two notes and, if two,
    exactly one of their parts plays.  That is a 2-colouring of the
    overlap graph with solo notes pinned to "play".
    """
    if not _only_chord_cap(profile) or profile.max_chord != 1 or not profile.p > Fraction(1, 3):
        raise DispatchError("two_coloring route needs only a chord cap j = 1 and p > 1/3")
    grid = intervals(score)
    if profile.p > Fraction(1, 2):
        # both notes of an N=2 instant would be required, but only one fits
        if any(len(iv.instances) > 1 for iv in grid):
            return None
        return Selection.all_parts(score)

    n = len(score.parts)
    adj: list[set[int]] = [set() for _ in range(n)]
    forced = set()
    for iv in grid:
        parts = [inst.part for inst in iv.instances]
        if len(parts) >= 3:
            return None
        if len(parts) == 2:
            a, b = parts
            if a == b:
                return None  # one part holding both notes: all or nothing
            adj[a].add(b)
            adj[b].add(a)
        elif len(parts) == 1:
            forced.add(parts[0])

    play = [None] * n
    # seed forced parts first so their component inherits the pinned colour
    for root in sorted(forced) + list(range(n)):
        if play[root] is not None:
            continue
        play[root] = True
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if play[v] is None:
                    play[v] = not play[u]
                    queue.append(v)
                elif play[v] == play[u]:
                    return None
    if any(not play[i] for i in forced):
        return None
    chosen = Selection(frozenset(score.parts[i].id for i in range(n) if play[i]))
    ok, violations = verify(score, chosen, profile)
    if not ok:
        raise RuntimeError(f"two-colouring produced an invalid arrangement: {violations[:3]}")
    return chosen


def dispatch(score: Score, profile: ConstraintProfile) -> Route:
    p = profile.p
    if p == 0:
        return Route.P_ZERO
    if p == 1:
        return Route.P_ONE
    if _only_chord_cap(profile):
        j = profile.max_chord
        if p > Fraction(j, j + 1):
            return Route.OVERCOVERAGE
        if j == 1 and p > Fraction(1, 3):
            return Route.TWO_COLORING
    return Route.EXACT


_POLY = {
    Route.P_ZERO: solve_p_zero,
    Route.P_ONE: solve_p_one,
    Route.OVERCOVERAGE: solve_overcoverage,
    Route.TWO_COLORING: solve_two_coloring,
}


def solve(score: Score, profile: ConstraintProfile, limits: Limits = Limits()) -> SolveResult:
    """Dispatch and solve.  A timeout is reported as its own status."""
    route = dispatch(score, profile)
    if route is Route.EXACT:
        try:
            res = solve_exact(score, profile, limits)
        except SearchTimeout as e:
            return SolveResult("timeout", None, route, e.nodes_explored)
        return SolveResult("sat" if res.sat else "unsat", res.selection, route, res.nodes_explored)
    sel = _POLY[route](score, profile)
    return SolveResult("sat" if sel is not None else "unsat", sel, route)
