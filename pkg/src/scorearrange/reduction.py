"""Compile 3SAT / X3SAT formulas into scores whose valid arrangements are
exactly the satisfying assignments, and translate between the two.

Every variant lays out one gadget per 8-beat measure, in this order:

* forcing measures: a forced-true part plays alone, so it must be kept;
* false-literal measures: a forced-false part cannot be played next to
  the forced-true parts;
* variable measures: exactly one of ``Xi_true`` / ``Xi_false`` fits;
* clause measures: the coverage threshold is met only when the clause
  holds (at least one literal for 3SAT, exactly one for X3SAT).

Padding counts are the smallest that satisfy the relevant inequalities,
computed in exact arithmetic.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .cnf import CnfFormula, Semantics
from .constraints import check_coverage
from .score import ConstraintProfile, Note, Part, Score, ScoreError, Selection, format_rational, parse_rational

TICKS_PER_BEAT = 4
MEASURE_BEATS = 8
MEASURE = MEASURE_BEATS * TICKS_PER_BEAT

CONSONANCE = "consonance"
MAXCHORD = "maxchord"
TRANSITION = "transition"
VARIANTS = (CONSONANCE, MAXCHORD, TRANSITION)

# consonance variant pitches: 60/61 clash, 65 sits a fourth/major third
# above both, 66 clashes with 65
VAR_TRUE_PITCH = 60
VAR_FALSE_PITCH = 61
TRUE_PITCH = 65
FALSE_PITCH = 66
CLAUSE_PITCH = 60


class OutsideHardRegion(ValueError):
    """The max-j gadgets only work for 0 < p <= j/(j+2)."""


class MalformedWitness(ValueError):
    """A selection keeps both or neither part of some variable."""


# -- padding ----------------------------------------------------------------


@dataclass(frozen=True)
class PaddingPlan:
    """``t`` forced-true and ``f`` forced-false parts added to a measure
    holding ``slots`` literal parts, so that

        t / (t + f + slots)  <  p  <=  (t + 1) / (t + f + slots)

    i.e. no true literal fails coverage and one true literal meets it.
    """

    t: int
    f: int
    p: Fraction
    slots: int

    @property
    def size(self) -> int:
        return self.t + self.f + self.slots

    def satisfied(self) -> bool:
        return Fraction(self.t, self.size) < self.p <= Fraction(self.t + 1, self.size)


def _check_open_unit(p: Fraction) -> Fraction:
    p = parse_rational(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie strictly between 0 and 1, got {p}")
    return p


def _minimal_plan(p: Fraction, slots: int) -> PaddingPlan:
    # a solution exists once t + f + slots is a multiple of p's denominator
    extra = 0
    while True:
        for t in range(extra + 1):
            plan = PaddingPlan(t, extra - t, p, slots)
            if plan.satisfied():
                return plan
        extra += 1


def consonance_clause_padding(p) -> PaddingPlan:
    """Smallest t + f (then smallest t) for a three-literal clause measure."""
    return _minimal_plan(_check_open_unit(p), 3)


def consonance_variable_padding(p) -> PaddingPlan:
    """Same rule for a variable measure with its two candidate parts."""
    return _minimal_plan(_check_open_unit(p), 2)


def false_literal_trues(p) -> int:
    """Smallest k >= 1 with k/(k+1) >= p: k kept notes beside one dropped."""
    p = _check_open_unit(p)
    k = 1
    while Fraction(k, k + 1) < p:
        k += 1
    return k


def _check_hard_region(j: int, p: Fraction) -> Fraction:
    p = parse_rational(p)
    if j < 1:
        raise ValueError(f"j must be >= 1, got {j}")
    bound = Fraction(j, j + 2)
    if not 0 < p <= bound:
        raise OutsideHardRegion(f"need 0 < p <= j/(j+2) = {bound} for j={j}, got p={p}")
    return p


def _smallest_false_pad(j: int, p: Fraction, base: int) -> int:
    # smallest f with (j-1)/(base+f) < p <= j/(base+f)
    f = 0
    while Fraction(j - 1, base + f) >= p:
        f += 1
    if p > Fraction(j, base + f):
        raise OutsideHardRegion(f"no false padding f satisfies (j-1)/({base}+f) < p <= j/({base}+f) for j={j}, p={p}")
    return f


def maxchord_clause_padding(j: int, p) -> int:
    """False parts added to a clause measure of j-1 trues and 3 literals."""
    p = _check_hard_region(j, p)
    return _smallest_false_pad(j, p, j + 2)


def maxchord_variable_padding(j: int, p) -> int:
    """False parts added to a variable measure of j-1 trues and 2 candidates."""
    p = _check_hard_region(j, p)
    return _smallest_false_pad(j, p, j + 1)


# -- mapping ----------------------------------------------------------------


class Role(NamedTuple):
    kind: str  # forced_true | forced_false | var_true | var_false
    index: int

    def __str__(self) -> str:
        return f"{self.kind}({self.index})"

    @classmethod
    def parse(cls, text: str) -> "Role":
        m = re.fullmatch(r"(forced_true|forced_false|var_true|var_false)\((\d+)\)", text)
        if not m:
            raise ScoreError(f"malformed role {text!r}")
        return cls(m.group(1), int(m.group(2)))


class GadgetMeasure(NamedTuple):
    kind: str  # forcing | false_literal | variable | clause
    index: int  # forced part, variable or clause number (1-based)
    start: int
    end: int


@dataclass(frozen=True)
class ReductionMapping:
    variant: str
    p: Fraction
    j: int | None
    roles: dict[str, Role]
    formula_digest: str
    measures: tuple[GadgetMeasure, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ScoreError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "p", parse_rational(self.p))
        trues = {r.index for r in self.roles.values() if r.kind == "var_true"}
        falses = {r.index for r in self.roles.values() if r.kind == "var_false"}
        counts: dict[Role, int] = {}
        for r in self.roles.values():
            counts[r] = counts.get(r, 0) + 1
        if trues != falses or any(c > 1 for r, c in counts.items() if r.kind.startswith("var_")):
            raise ScoreError("every variable needs exactly one var_true and one var_false part")

    @property
    def variables(self) -> list[int]:
        return sorted({r.index for r in self.roles.values() if r.kind == "var_true"})

    def parts_with(self, kind: str) -> list[str]:
        return [pid for pid, r in self.roles.items() if r.kind == kind]

    def var_part(self, var: int, value: bool) -> str:
        want = Role("var_true" if value else "var_false", var)
        for pid, r in self.roles.items():
            if r == want:
                return pid
        raise KeyError(var)

    def profile(self) -> ConstraintProfile:
        """The constraint profile the compiled score is meant to be solved under."""
        if self.variant == CONSONANCE:
            return ConstraintProfile(self.p, consonance=True)
        if self.variant == MAXCHORD:
            return ConstraintProfile(self.p, max_chord=self.j)
        return ConstraintProfile(self.p, min_segment_ticks=2 * TICKS_PER_BEAT)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "p": format_rational(self.p),
            "j": self.j,
            "roles": {pid: str(r) for pid, r in self.roles.items()},
            "formula_digest": self.formula_digest,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "ReductionMapping":
        keys = {"variant", "p", "j", "roles", "formula_digest"}
        if not isinstance(data, dict) or set(data) != keys:
            raise ScoreError(f"mapping must have exactly the fields {sorted(keys)}")
        roles = {pid: Role.parse(r) for pid, r in data["roles"].items()}
        return cls(data["variant"], parse_rational(data["p"]), data["j"], roles, data["formula_digest"])

    @classmethod
    def loads(cls, text: str) -> "ReductionMapping":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ScoreError(f"invalid mapping JSON: {e}") from None
        return cls.from_dict(data)


# -- score building ---------------------------------------------------------


def true_id(k: int) -> str:
    return f"True_{k}"


def false_id(k: int) -> str:
    return f"False_{k}"


def var_id(i: int, value: bool) -> str:
    return f"X{i}_{'true' if value else 'false'}"


class _Builder:
    def __init__(self, formula: CnfFormula, n_true: int, n_false: int):
        self.notes: dict[str, list[Note]] = {}
        self.roles: dict[str, Role] = {}
        self.measures: list[GadgetMeasure] = []
        for k in range(1, n_true + 1):
            self._declare(true_id(k), Role("forced_true", k))
        for k in range(1, n_false + 1):
            self._declare(false_id(k), Role("forced_false", k))
        for i in range(1, formula.num_vars + 1):
            self._declare(var_id(i, True), Role("var_true", i))
            self._declare(var_id(i, False), Role("var_false", i))

    def _declare(self, pid: str, role: Role) -> None:
        self.notes[pid] = []
        self.roles[pid] = role

    def measure(self, kind: str, index: int, events) -> None:
        """``events``: (part id, beat offset, beats, pitch) within the measure."""
        start = len(self.measures) * MEASURE
        for pid, beat, beats, pitch in events:
            self.notes[pid].append(Note(start + beat * TICKS_PER_BEAT, beats * TICKS_PER_BEAT, pitch))
        self.measures.append(GadgetMeasure(kind, index, start, start + MEASURE))

    def build(self, variant: str, p: Fraction, j: int | None, formula: CnfFormula):
        score = Score(tuple(Part(pid, tuple(ns)) for pid, ns in self.notes.items()), TICKS_PER_BEAT)
        mapping = ReductionMapping(variant, p, j, dict(self.roles), formula.digest(), tuple(self.measures))
        return score, mapping


def _literal_part(lit) -> str:
    return var_id(lit.var, not lit.negated)


def _whole(pids, pitch):
    if isinstance(pitch, int):
        pitch = [pitch] * len(pids)
    return [(pid, 0, MEASURE_BEATS, q) for pid, q in zip(pids, pitch)]


def reduce_consonance(formula: CnfFormula, p) -> tuple[Score, ReductionMapping]:
    """3SAT -> arrangement with no dissonant pair and coverage >= p."""
    p = _check_open_unit(p)
    if formula.semantics is not Semantics.THREESAT:
        raise ValueError("the consonance reduction encodes 3SAT formulas")
    clause = consonance_clause_padding(p)
    var = consonance_variable_padding(p)
    n_false = max(clause.f, var.f)
    k_false = false_literal_trues(p) if n_false else 0
    n_true = max(clause.t, var.t, k_false)
    b = _Builder(formula, n_true, n_false)
    trues = [true_id(k) for k in range(1, n_true + 1)]
    falses = [false_id(k) for k in range(1, n_false + 1)]

    for k, pid in enumerate(trues, 1):
        b.measure("forcing", k, _whole([pid], TRUE_PITCH))
    for k, pid in enumerate(falses, 1):
        b.measure("false_literal", k, _whole(trues[:k_false], TRUE_PITCH) + _whole([pid], FALSE_PITCH))
    for i in range(1, formula.num_vars + 1):
        b.measure(
            "variable",
            i,
            _whole([var_id(i, True)], VAR_TRUE_PITCH)
            + _whole([var_id(i, False)], VAR_FALSE_PITCH)
            + _whole(trues[: var.t], TRUE_PITCH)
            + _whole(falses[: var.f], FALSE_PITCH),
        )
    for ci, c in enumerate(formula.clauses, 1):
        pids = [_literal_part(lit) for lit in c] + trues[: clause.t] + falses[: clause.f]
        b.measure("clause", ci, _whole(pids, CLAUSE_PITCH))
    return b.build(CONSONANCE, p, None, formula)


def _chromatic(pids):
    return _whole(pids, [60 + k for k in range(len(pids))])


def reduce_maxchord(formula: CnfFormula, j: int, p) -> tuple[Score, ReductionMapping]:
    """X3SAT -> arrangement with at most j simultaneous notes and coverage >= p."""
    p = _check_hard_region(j, p)
    if formula.semantics is not Semantics.X3SAT:
        raise ValueError("the max-chord reduction encodes X3SAT formulas")
    f_clause = maxchord_clause_padding(j, p)
    f_var = maxchord_variable_padding(j, p)
    n_false = max(f_clause, f_var)
    n_true = max(j - 1, j if n_false else 0)
    b = _Builder(formula, n_true, n_false)
    trues = [true_id(k) for k in range(1, n_true + 1)]
    falses = [false_id(k) for k in range(1, n_false + 1)]

    for k, pid in enumerate(trues, 1):
        b.measure("forcing", k, _chromatic([pid]))
    for k, pid in enumerate(falses, 1):
        b.measure("false_literal", k, _chromatic(trues[:j] + [pid]))
    for i in range(1, formula.num_vars + 1):
        b.measure("variable", i, _chromatic(trues[: j - 1] + [var_id(i, True), var_id(i, False)] + falses[:f_var]))
    for ci, c in enumerate(formula.clauses, 1):
        pids = trues[: j - 1] + [_literal_part(lit) for lit in c] + falses[:f_clause]
        b.measure("clause", ci, _chromatic(pids))
    return b.build(MAXCHORD, p, j, formula)


# transition gadgets: two staggered 2-beat notes on beats 3-4 and 4-5
_EARLY = (2, 2)
_LATE = (3, 2)
_PITCHES = {"anchor": 60, "pad": 62, "early": 64, "late": 67}


def _staggered(anchors, pads, early: str, late: str):
    events = [(pid, 0, MEASURE_BEATS, _PITCHES["anchor"]) for pid in anchors]
    events += [(pid, 0, MEASURE_BEATS, _PITCHES["pad"]) for pid in pads]
    events += [(early, *_EARLY, _PITCHES["early"]), (late, *_LATE, _PITCHES["late"])]
    return events


def _audit_score(events) -> Score:
    by_part: dict[str, list[Note]] = {}
    for pid, beat, beats, pitch in events:
        by_part.setdefault(pid, []).append(Note(beat * TICKS_PER_BEAT, beats * TICKS_PER_BEAT, pitch))
    return Score(tuple(Part(pid, tuple(ns)) for pid, ns in by_part.items()), TICKS_PER_BEAT)


def _covers(score: Score, kept, p: Fraction) -> bool:
    return not check_coverage(score, Selection(frozenset(kept)), p)


def transition_variable_padding(p) -> tuple[int, int]:
    """(anchors, false pads) for the staggered variable measure.

    Found by auditing the measure directly: keeping the anchors plus either
    candidate must meet coverage on every sub-interval, keeping the anchors
    alone must not.  Smallest total, then fewest anchors; at least one
    anchor so the outer beats are never silent.
    """
    p = _check_open_unit(p)
    total = 1
    while True:
        for k in range(1, total + 1):
            pad = total - k
            anchors = [f"a{i}" for i in range(k)]
            score = _audit_score(_staggered(anchors, [f"f{i}" for i in range(pad)], "x", "nx"))
            if (
                _covers(score, anchors + ["x"], p)
                and _covers(score, anchors + ["nx"], p)
                and not _covers(score, anchors, p)
            ):
                return k, pad
        total += 1


def transition_false_anchors(p) -> int:
    """Anchors for the false-literal measure, where a forced-true part takes
    the early slot and the candidate false part the late one."""
    p = _check_open_unit(p)
    k = 1
    while True:
        anchors = [f"a{i}" for i in range(k)]
        if _covers(_audit_score(_staggered(anchors, [], "t", "F")), anchors + ["t"], p):
            return k
        k += 1


def reduce_transition(formula: CnfFormula, p) -> tuple[Score, ReductionMapping]:
    """3SAT -> arrangement whose every non-silent segment lasts >= 2 beats."""
    p = _check_open_unit(p)
    if formula.semantics is not Semantics.THREESAT:
        raise ValueError("the transition reduction encodes 3SAT formulas")
    clause = consonance_clause_padding(p)
    n_anchor, n_pad = transition_variable_padding(p)
    n_false = max(clause.f, n_pad)
    k_false = transition_false_anchors(p) if n_false else 0
    n_true = max(clause.t, n_anchor, k_false + 1 if n_false else 0)
    b = _Builder(formula, n_true, n_false)
    trues = [true_id(k) for k in range(1, n_true + 1)]
    falses = [false_id(k) for k in range(1, n_false + 1)]

    for k, pid in enumerate(trues, 1):
        b.measure("forcing", k, _whole([pid], _PITCHES["anchor"]))
    for k, pid in enumerate(falses, 1):
        b.measure("false_literal", k, _staggered(trues[:k_false], [], trues[k_false], pid))
    for i in range(1, formula.num_vars + 1):
        b.measure("variable", i, _staggered(trues[:n_anchor], falses[:n_pad], var_id(i, True), var_id(i, False)))
    for ci, c in enumerate(formula.clauses, 1):
        pids = [_literal_part(lit) for lit in c] + trues[: clause.t] + falses[: clause.f]
        b.measure("clause", ci, _whole(pids, CLAUSE_PITCH))
    return b.build(TRANSITION, p, None, formula)


def reduce(formula: CnfFormula, variant: str, p, j: int | None = None) -> tuple[Score, ReductionMapping]:
    if variant == CONSONANCE:
        return reduce_consonance(formula, p)
    if variant == MAXCHORD:
        if j is None:
            raise ValueError("the max-chord reduction needs j")
        return reduce_maxchord(formula.with_semantics(Semantics.X3SAT), j, p)
    if variant == TRANSITION:
        return reduce_transition(formula, p)
    raise ValueError(f"unknown variant {variant!r}")


# -- assignment <-> arrangement ---------------------------------------------


def encode_assignment(mapping: ReductionMapping, assignment: dict[int, bool]) -> Selection:
    if set(assignment) != set(mapping.variables):
        raise ValueError(
            f"assignment covers variables {sorted(assignment)}, mapping has {mapping.variables}"
        )
    kept = set(mapping.parts_with("forced_true"))
    for pid, role in mapping.roles.items():
        if role.kind == "var_true" and assignment[role.index]:
            kept.add(pid)
        elif role.kind == "var_false" and not assignment[role.index]:
            kept.add(pid)
    return Selection(frozenset(kept))


def decode_selection(mapping: ReductionMapping, sel: Selection) -> dict[int, bool]:
    out = {}
    for i in mapping.variables:
        t = mapping.var_part(i, True) in sel
        f = mapping.var_part(i, False) in sel
        if t == f:
            which = "both" if t else "neither"
            raise MalformedWitness(f"variable {i}: {which} of its parts are selected")
        out[i] = t
    return out
