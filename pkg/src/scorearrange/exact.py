"""Complete depth-first search over part subsets.

Parts are decided in score order, include before exclude.  A branch is
cut as soon as the parts included so far break consonance, the chord-size
cap or the minimum segment length (all three only get worse as parts are
added), or when coverage fails even with every undecided part included.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations

from .constraints import DEFAULT_TABLE, ConsonanceTable
from .score import ConstraintProfile, Score, Selection, intervals

DEFAULT_MAX_PARTS = 24


class CapacityError(ValueError):
    """The score has more parts than the search is allowed to handle."""


class SearchTimeout(RuntimeError):
    """The time budget ran out before the search finished.  Not UNSAT."""

    def __init__(self, nodes_explored: int):
        super().__init__(f"time budget exceeded after {nodes_explored} nodes")
        self.nodes_explored = nodes_explored


@dataclass(frozen=True)
class Limits:
    max_parts: int = DEFAULT_MAX_PARTS
    time_budget: float | None = None  # seconds


@dataclass
class ExactResult:
    selection: Selection | None
    nodes_explored: int

    @property
    def sat(self) -> bool:
        return self.selection is not None


class _Compiled:
    """The interval grid flattened into bitmask-friendly tables."""

    def __init__(self, score: Score, profile: ConstraintProfile, table: ConsonanceTable):
        self.n = len(score.parts)
        self.p = profile.p
        self.j = profile.max_chord
        self.d = profile.min_segment_ticks
        grid = intervals(score)
        # per interval: (length, N, [(part, count)], instance list)
        self.rows = []
        for iv in grid:
            counts: dict[int, int] = {}
            for inst in iv.instances:
                counts[inst.part] = counts.get(inst.part, 0) + 1
            self.rows.append((iv.end - iv.start, len(iv.instances), tuple(counts.items()), iv.instances))
        # consonance reduces to forbidden pairs of parts (a part may clash with itself)
        self.clash = [0] * self.n
        if profile.consonance:
            for iv in grid:
                for a, b in combinations(iv.instances, 2):
                    if not table.consonant(a.pitch, b.pitch):
                        self.clash[a.part] |= 1 << b.part
                        self.clash[b.part] |= 1 << a.part

    def covered(self, mask: int) -> bool:
        num, den = self.p.numerator, self.p.denominator
        for _, total, counts, _ in self.rows:
            if total:
                kept = sum(c for part, c in counts if mask >> part & 1)
                if kept * den < num * total:
                    return False
        return True

    def clashes(self, mask: int, part: int) -> bool:
        return bool(self.clash[part] & (mask | 1 << part))

    def too_dense(self, mask: int) -> bool:
        j = self.j
        for _, _, counts, _ in self.rows:
            if sum(c for part, c in counts if mask >> part & 1) > j:
                return True
        return False

    def short_segment(self, mask: int) -> bool:
        d = self.d
        run_len = 0
        run_key = None
        for length, _, _, instances in self.rows:
            key = tuple((i.part, i.note) for i in instances if mask >> i.part & 1)
            if key == run_key:
                run_len += length
                continue
            if run_key and run_len < d:
                return True
            run_key, run_len = key, length
        return bool(run_key) and run_len < d

    def monotone_violation(self, mask: int) -> bool:
        if self.j is not None and self.too_dense(mask):
            return True
        if self.d is not None and self.short_segment(mask):
            return True
        return False


def solve_exact(
    score: Score,
    profile: ConstraintProfile,
    limits: Limits = Limits(),
    table: ConsonanceTable = DEFAULT_TABLE,
) -> ExactResult:
    """Return the first valid selection in include-first DFS order, or UNSAT.

    Raises :class:`CapacityError` when the score has too many parts and
    :class:`SearchTimeout` when ``limits.time_budget`` is exhausted.
    """
    n = len(score.parts)
    if n > limits.max_parts:
        raise CapacityError(f"{n} parts exceeds max_parts={limits.max_parts}")
    cx = _Compiled(score, profile, table)
    deadline = None if limits.time_budget is None else time.monotonic() + limits.time_budget
    full = (1 << n) - 1
    nodes = 0

    def dfs(depth: int, mask: int) -> int | None:
        nonlocal nodes
        nodes += 1
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout(nodes)
        # optimistic bound: everything not yet decided gets played
        undecided = full & ~((1 << depth) - 1)
        if not cx.covered(mask | undecided):
            return None
        if depth == n:
            return mask
        bit = 1 << depth
        with_part = mask | bit
        if not cx.clashes(mask, depth) and not cx.monotone_violation(with_part):
            found = dfs(depth + 1, with_part)
            if found is not None:
                return found
        return dfs(depth + 1, mask)

    try:
        found = dfs(0, 0)
    except SearchTimeout as e:
        e.nodes_explored = nodes
        raise
    if found is None:
        return ExactResult(None, nodes)
    chosen = frozenset(p.id for i, p in enumerate(score.parts) if found >> i & 1)
    return ExactResult(Selection(chosen), nodes)
