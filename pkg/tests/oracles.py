"""Independent reference implementations used only by the tests.

Nothing here imports the checkers or solvers under test; each oracle is
written from the definitions directly, favouring obviousness over speed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, product

from scorearrange.score import Note, Part, Score

CONSONANT = {0, 3, 4, 5, 7, 8, 9}


# -- SAT --------------------------------------------------------------------


def brute_force_models(num_vars, int_clauses, exactly_one=False):
    """Every satisfying assignment, by enumerating all 2^n candidates."""
    out = []
    for bits in product([False, True], repeat=num_vars):
        a = {v + 1: bits[v] for v in range(num_vars)}
        ok = True
        for c in int_clauses:
            hits = sum(1 for x in c if a[abs(x)] == (x > 0))
            if (hits != 1) if exactly_one else (hits == 0):
                ok = False
                break
        if ok:
            out.append(a)
    return out


def brute_force_sat(num_vars, int_clauses, exactly_one=False) -> bool:
    return bool(brute_force_models(num_vars, int_clauses, exactly_one))


# -- arrangements -----------------------------------------------------------


def naive_valid(score: Score, included: set[str], p, consonance=False, j=None, d=None) -> bool:
    """Tick-by-tick check of every constraint from the definitions."""
    end = max((n.onset + n.duration for part in score.parts for n in part.notes), default=0)

    def sounding(t, only_selected):
        return [
            (part.id, k, n.pitch)
            for part in score.parts
            if not only_selected or part.id in included
            for k, n in enumerate(part.notes)
            if n.onset <= t < n.onset + n.duration
        ]

    runs = []  # (active-instance set, length) runs over ticks
    for t in range(end):
        every = sounding(t, False)
        kept = sounding(t, True)
        if every and Fraction(len(kept), len(every)) < p:
            return False
        if consonance:
            for (_, _, a), (_, _, b) in combinations(kept, 2):
                if abs(a - b) % 12 not in CONSONANT:
                    return False
        if j is not None and len(kept) > j:
            return False
        key = frozenset((pid, k) for pid, k, _ in kept)
        if runs and runs[-1][0] == key:
            runs[-1][1] += 1
        else:
            runs.append([key, 1])
    if d is not None:
        for key, length in runs:
            if key and length < d:
                return False
    return True


class GridOracle:
    """Evaluates arbitrary part subsets against one precomputed time grid.

    Cheaper than :func:`naive_valid` (one row per elementary interval rather
    than per tick) so exhaustive 2^n enumeration stays fast.
    """

    def __init__(self, score: Score, p, consonance=False, j=None, d=None):
        self.ids = [part.id for part in score.parts]
        self.p, self.consonance, self.j, self.d = Fraction(p), consonance, j, d
        cuts = sorted({t for part in score.parts for n in part.notes for t in (n.onset, n.onset + n.duration)})
        self.rows = []
        for a, b in zip(cuts, cuts[1:]):
            inst = [
                (pi, k, n.pitch)
                for pi, part in enumerate(score.parts)
                for k, n in enumerate(part.notes)
                if n.onset <= a < n.onset + n.duration
            ]
            self.rows.append((b - a, inst))

    def valid(self, chosen: set[int]) -> bool:
        runs = []
        for length, inst in self.rows:
            kept = [x for x in inst if x[0] in chosen]
            if inst and Fraction(len(kept), len(inst)) < self.p:
                return False
            if self.j is not None and len(kept) > self.j:
                return False
            if self.consonance and any(abs(a[2] - b[2]) % 12 not in CONSONANT for a, b in combinations(kept, 2)):
                return False
            key = frozenset((x[0], x[1]) for x in kept)
            if runs and runs[-1][0] == key:
                runs[-1][1] += length
            else:
                runs.append([key, length])
        if self.d is not None and any(key and length < self.d for key, length in runs):
            return False
        return True

    def all_valid(self) -> list[frozenset[str]]:
        n = len(self.ids)
        out = []
        for mask in range(1 << n):
            chosen = {i for i in range(n) if mask >> i & 1}
            if self.valid(chosen):
                out.append(frozenset(self.ids[i] for i in chosen))
        return out

    def any_valid(self) -> bool:
        n = len(self.ids)
        return any(self.valid({i for i in range(n) if mask >> i & 1}) for mask in range(1 << n))


def oracle_for(score, profile) -> GridOracle:
    return GridOracle(score, profile.p, profile.consonance, profile.max_chord, profile.min_segment_ticks)


# -- random scores ----------------------------------------------------------


def random_score(rng: random.Random, max_parts=10, max_notes=40, horizon=16, pitches=range(58, 70), max_dur=6,
                 ticks_per_beat=None) -> Score:
    n_parts = rng.randint(1, max_parts)
    n_notes = rng.randint(0, max_notes)
    notes: list[list[Note]] = [[] for _ in range(n_parts)]
    for _ in range(n_notes):
        notes[rng.randrange(n_parts)].append(
            Note(rng.randrange(horizon), rng.randint(1, max_dur), rng.choice(list(pitches)))
        )
    tpb = ticks_per_beat if ticks_per_beat is not None else rng.choice([1, 2, 4])
    return Score(tuple(Part(f"P{i}", tuple(ns)) for i, ns in enumerate(notes)), tpb)


def sparse_score(rng: random.Random, max_parts=10) -> Score:
    """Monophonic parts whose notes rarely overlap three deep, so the j=1
    regimes see both satisfiable and unsatisfiable instances."""
    n_parts = rng.randint(1, max_parts)
    notes: list[list[Note]] = [[] for _ in range(n_parts)]
    t = 0
    for _ in range(rng.randint(1, 2 * n_parts + 2)):
        a, b = rng.sample(range(n_parts), 2) if n_parts > 1 else (0, 0)
        dur = rng.randint(1, 4)
        notes[a].append(Note(t, dur, 60))
        if a != b and rng.random() < 0.8:
            off = rng.randint(0, dur - 1)
            notes[b].append(Note(t + off, rng.randint(1, 3), 64))
        t += dur + rng.randint(0, 3)
    parts = []
    for i, ns in enumerate(notes):
        # keep each part monophonic: drop notes overlapping an earlier one in the same part
        kept, last_end = [], -1
        for n in sorted(ns):
            if n.onset >= last_end:
                kept.append(n)
                last_end = n.onset + n.duration
        parts.append(Part(f"P{i}", tuple(kept)))
    return Score(tuple(parts), 1)
