"""Polynomial-time validity checks for an arrangement.

Each ``check_*`` function returns a list of :class:`Violation`; an empty
list means the constraint holds.  :func:`verify` runs every check that the
profile activates and aggregates the results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .score import ConstraintProfile, Score, Selection, intervals, segments


@dataclass(frozen=True)
class ConsonanceTable:
    consonant_residues: frozenset[int] = frozenset({0, 3, 4, 5, 7, 8, 9})

    def __post_init__(self):
        object.__setattr__(self, "consonant_residues", frozenset(self.consonant_residues))
        if not all(0 <= r <= 11 for r in self.consonant_residues):
            raise ValueError("consonant residues must lie in 0..11")

    @property
    def dissonant_residues(self) -> frozenset[int]:
        return frozenset(range(12)) - self.consonant_residues

    def consonant(self, a: int, b: int) -> bool:
        return abs(a - b) % 12 in self.consonant_residues


DEFAULT_TABLE = ConsonanceTable()

KINDS = ("coverage", "dissonance", "chord_size", "segment_too_short")


@dataclass(frozen=True)
class Violation:
    kind: str
    tick_range: tuple[int, int]
    details: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown violation kind {self.kind!r}")
        start, end = self.tick_range
        if not start < end:
            raise ValueError(f"empty tick range {self.tick_range}")

    @property
    def start(self) -> int:
        return self.tick_range[0]

    @property
    def end(self) -> int:
        return self.tick_range[1]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "start": self.start, "end": self.end, "details": self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def consonant_interval(a: int, b: int, table: ConsonanceTable = DEFAULT_TABLE) -> bool:
    return table.consonant(a, b)


def chord_consonant(pitches: Iterable[int], table: ConsonanceTable = DEFAULT_TABLE) -> bool:
    """True iff no pair of pitches forms a dissonant interval."""
    return all(table.consonant(a, b) for a, b in combinations(list(pitches), 2))


def _selected(score: Score, sel: Selection):
    sel.validate(score)
    return {i for i, p in enumerate(score.parts) if p.id in sel}


def check_coverage(score: Score, sel: Selection, p: Fraction) -> list[Violation]:
    """At every instant at least a fraction ``p`` of sounding notes is kept."""
    chosen = _selected(score, sel)
    out = []
    for iv in intervals(score):
        total = len(iv.instances)
        if total == 0:
            continue
        kept = sum(1 for inst in iv.instances if inst.part in chosen)
        if kept * p.denominator < p.numerator * total:
            out.append(Violation("coverage", (iv.start, iv.end), f"{kept}/{total} notes kept, need >= {p}"))
    return out


def check_consonance(score: Score, sel: Selection, table: ConsonanceTable = DEFAULT_TABLE) -> list[Violation]:
    chosen = _selected(score, sel)
    out = []
    for iv in intervals(score):
        kept = [inst for inst in iv.instances if inst.part in chosen]
        bad = [
            (a, b)
            for a, b in combinations(kept, 2)
            if not table.consonant(a.pitch, b.pitch)
        ]
        if bad:
            desc = ", ".join(
                f"{score.parts[a.part].id}:{a.pitch}~{score.parts[b.part].id}:{b.pitch}" for a, b in bad
            )
            out.append(Violation("dissonance", (iv.start, iv.end), desc))
    return out


def check_max_chord(score: Score, sel: Selection, j: int) -> list[Violation]:
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    chosen = _selected(score, sel)
    out = []
    for iv in intervals(score):
        kept = sum(1 for inst in iv.instances if inst.part in chosen)
        if kept > j:
            out.append(Violation("chord_size", (iv.start, iv.end), f"{kept} simultaneous notes, max {j}"))
    return out


def check_min_segment(score: Score, sel: Selection, d: int) -> list[Violation]:
    """Every non-silent segment must last at least ``d`` ticks."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return [
        Violation("segment_too_short", (seg.start, seg.end), f"segment of {seg.length} ticks, need >= {d}")
        for seg in segments(score, sel)
        if seg.active and seg.length < d
    ]


def verify(
    score: Score,
    sel: Selection,
    profile: ConstraintProfile,
    table: ConsonanceTable = DEFAULT_TABLE,
) -> tuple[bool, list[Violation]]:
    sel.validate(score)
    violations = check_coverage(score, sel, profile.p)
    if profile.consonance:
        violations += check_consonance(score, sel, table)
    if profile.max_chord is not None:
        violations += check_max_chord(score, sel, profile.max_chord)
    if profile.min_segment_ticks is not None:
        violations += check_min_segment(score, sel, profile.min_segment_ticks)
    return not violations, violations


def is_valid(score: Score, sel: Selection, profile: ConstraintProfile) -> bool:
    return verify(score, sel, profile)[0]
