"""Tick-based score model: notes, parts, selections and the event timeline.

Time is measured in integer ticks.  A note sounds on the half-open interval
``[onset, onset + duration)``.  Every checker works on the grid of
inter-event intervals returned by :func:`intervals`, on which the set of
sounding note instances is constant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple


class ScoreError(ValueError):
    """Raised for malformed scores, selections or profiles."""


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into an exact fraction.

    Floats are refused on purpose: coverage boundaries such as 3/5 are
    not representable in binary floating point.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool) or isinstance(text, float):
        raise ScoreError(f"p must be given as an exact 'num/den', got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    try:
        num, _, den = s.partition("/")
        value = Fraction(int(num), int(den)) if den else Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise ScoreError(f"not a rational 'num/den': {text!r}") from None
    return value


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class Note:
    onset: int
    duration: int
    pitch: int

    def __post_init__(self):
        for name in ("onset", "duration", "pitch"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ScoreError(f"note {name} must be an integer, got {v!r}")
        if self.onset < 0:
            raise ScoreError(f"note onset must be >= 0, got {self.onset}")
        if self.duration < 1:
            raise ScoreError(f"note duration must be >= 1, got {self.duration}")
        if not 0 <= self.pitch <= 127:
            raise ScoreError(f"pitch out of range 0..127: {self.pitch}")

    @property
    def offset(self) -> int:
        return self.onset + self.duration

    def sounds_at(self, tick: int) -> bool:
        return self.onset <= tick < self.offset


def _note_key(n: Note):
    return (n.onset, n.pitch, n.duration)


@dataclass(frozen=True)
class Part:
    """One instrument line.  Notes are kept sorted by (onset, pitch)."""

    id: str
    notes: tuple[Note, ...] = ()

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ScoreError(f"part id must be a non-empty string, got {self.id!r}")
        object.__setattr__(self, "notes", tuple(sorted(self.notes, key=_note_key)))


@dataclass(frozen=True)
class Score:
    parts: tuple[Part, ...] = ()
    ticks_per_beat: int = 4

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not isinstance(self.ticks_per_beat, int) or self.ticks_per_beat < 1:
            raise ScoreError(f"ticks_per_beat must be a positive integer, got {self.ticks_per_beat!r}")
        seen = set()
        for part in self.parts:
            if part.id in seen:
                raise ScoreError(f"duplicate part id {part.id!r}")
            seen.add(part.id)

    @property
    def part_ids(self) -> list[str]:
        return [p.id for p in self.parts]

    def part(self, part_id: str) -> Part:
        for p in self.parts:
            if p.id == part_id:
                return p
        raise ScoreError(f"unknown part id {part_id!r}")

    def index_of(self, part_id: str) -> int:
        for i, p in enumerate(self.parts):
            if p.id == part_id:
                return i
        raise ScoreError(f"unknown part id {part_id!r}")

    @property
    def end(self) -> int:
        return max((n.offset for p in self.parts for n in p.notes), default=0)

    def note_count(self) -> int:
        return sum(len(p.notes) for p in self.parts)


@dataclass(frozen=True)
class Selection:
    """An arrangement: the set of parts kept in their entirety."""

    included: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "included", frozenset(self.included))

    def __contains__(self, part_id: str) -> bool:
        return part_id in self.included

    def __len__(self) -> int:
        return len(self.included)

    @classmethod
    def all_parts(cls, score: Score) -> "Selection":
        return cls(frozenset(score.part_ids))

    def ordered(self, score: Score) -> list[str]:
        """Included ids in score order."""
        return [pid for pid in score.part_ids if pid in self.included]

    def validate(self, score: Score) -> None:
        unknown = self.included - set(score.part_ids)
        if unknown:
            raise ScoreError(f"selection references unknown part(s): {sorted(unknown)}")


@dataclass(frozen=True)
class ConstraintProfile:
    """Coverage fraction plus whichever specific constraints are active."""

    p: Fraction
    consonance: bool = False
    max_chord: int | None = None
    min_segment_ticks: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", parse_rational(self.p))
        if not 0 <= self.p <= 1:
            raise ScoreError(f"p must lie in [0, 1], got {self.p}")
        if self.max_chord is not None and self.max_chord < 1:
            raise ScoreError(f"max_chord must be >= 1, got {self.max_chord}")
        if self.min_segment_ticks is not None and self.min_segment_ticks < 1:
            raise ScoreError(f"min_segment_ticks must be >= 1, got {self.min_segment_ticks}")

    @property
    def has_specific(self) -> bool:
        return self.consonance or self.max_chord is not None or self.min_segment_ticks is not None


class Instance(NamedTuple):
    """One articulated note: identity is (part index, note index)."""

    part: int
    note: int
    pitch: int


class Interval(NamedTuple):
    start: int
    end: int
    instances: tuple[Instance, ...]


class Segment(NamedTuple):
    start: int
    end: int
    active: frozenset[tuple[str, int]]

    @property
    def length(self) -> int:
        return self.end - self.start


def event_times(score: Score) -> list[int]:
    """Sorted, deduplicated onsets and offsets of every note."""
    times = set()
    for part in score.parts:
        for n in part.notes:
            times.add(n.onset)
            times.add(n.offset)
    return sorted(times)


def intervals(score: Score) -> list[Interval]:
    """Every inter-event interval with the note instances sounding on it.

    Instances carry part *indices*, so callers can evaluate any selection
    against one precomputed grid.
    """
    times = event_times(score)
    starts: dict[int, list[Instance]] = {}
    for pi, part in enumerate(score.parts):
        for ni, n in enumerate(part.notes):
            starts.setdefault(n.onset, []).append(Instance(pi, ni, n.pitch))
    out = []
    active: list[tuple[int, Instance]] = []
    for a, b in zip(times, times[1:]):
        active = [(off, inst) for off, inst in active if off > a]
        for inst in starts.get(a, ()):
            active.append((score.parts[inst.part].notes[inst.note].offset, inst))
        out.append(Interval(a, b, tuple(sorted(inst for _, inst in active))))
    return out


def sounding_notes(score: Score, sel: Selection, tick: int) -> list[tuple[str, Note]]:
    """Note instances from included parts sounding at ``tick``.

    Equal pitches in different parts, or repeated in one part, stay
    distinct entries.
    """
    sel.validate(score)
    return [
        (part.id, n)
        for part in score.parts
        if part.id in sel
        for n in part.notes
        if n.sounds_at(tick)
    ]


def segments(score: Score, sel: Selection) -> list[Segment]:
    """Maximal intervals on which the set of sounding instances is constant.

    Boundaries are the onsets and offsets of included notes only, so two
    back-to-back notes of the same pitch still produce two segments.
    Silent gaps between included notes appear as segments with an empty
    active set.
    """
    sel.validate(score)
    notes = [
        (part.id, ni, n)
        for part in score.parts
        if part.id in sel
        for ni, n in enumerate(part.notes)
    ]
    bounds = sorted({t for _, _, n in notes for t in (n.onset, n.offset)})
    out = []
    for a, b in zip(bounds, bounds[1:]):
        active = frozenset((pid, ni) for pid, ni, n in notes if n.onset <= a < n.offset)
        out.append(Segment(a, b, active))
    return out


# -- JSON -----------------------------------------------------------------

_SCORE_KEYS = ("ticks_per_beat", "parts")
_PART_KEYS = ("id", "notes")
_NOTE_KEYS = ("onset", "duration", "pitch")


def _check_keys(obj, keys: Iterable[str], what: str) -> None:
    if not isinstance(obj, dict):
        raise ScoreError(f"{what} must be a JSON object")
    keys = tuple(keys)
    extra = set(obj) - set(keys)
    if extra:
        raise ScoreError(f"unknown field(s) in {what}: {sorted(extra)}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ScoreError(f"missing field(s) in {what}: {missing}")


def score_to_dict(score: Score) -> dict:
    return {
        "ticks_per_beat": score.ticks_per_beat,
        "parts": [
            {
                "id": part.id,
                "notes": [
                    {"onset": n.onset, "duration": n.duration, "pitch": n.pitch}
                    for n in part.notes
                ],
            }
            for part in score.parts
        ],
    }


def score_from_dict(data: dict) -> Score:
    _check_keys(data, _SCORE_KEYS, "score")
    parts = []
    for pd in data["parts"]:
        _check_keys(pd, _PART_KEYS, "part")
        notes = []
        for nd in pd["notes"]:
            _check_keys(nd, _NOTE_KEYS, "note")
            notes.append(Note(nd["onset"], nd["duration"], nd["pitch"]))
        parts.append(Part(pd["id"], tuple(notes)))
    return Score(tuple(parts), data["ticks_per_beat"])


def dumps_score(score: Score) -> str:
    return json.dumps(score_to_dict(score), indent=2) + "\n"


def loads_score(text: str) -> Score:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScoreError(f"invalid score JSON: {e}") from None
    return score_from_dict(data)


def dumps_selection(sel: Selection, score: Score | None = None) -> str:
    ids = sel.ordered(score) if score is not None else sorted(sel.included)
    return json.dumps({"included": ids}) + "\n"


def loads_selection(text: str) -> Selection:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScoreError(f"invalid selection JSON: {e}") from None
    _check_keys(data, ("included",), "selection")
    ids = data["included"]
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise ScoreError("selection 'included' must be a list of part ids")
    return Selection(frozenset(ids))
