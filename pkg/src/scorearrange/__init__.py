"""Single-instrument arrangement: validity checks, solvers, and SAT reductions."""

from .cnf import CnfFormula, Literal, Semantics, dpll_solve, evaluate, gen_random, parse_dimacs, x3sat_to_sat
from .constraints import (
    ConsonanceTable,
    Violation,
    check_consonance,
    check_coverage,
    check_max_chord,
    check_min_segment,
    chord_consonant,
    consonant_interval,
    verify,
)
from .exact import CapacityError, Limits, SearchTimeout, solve_exact
from .poly import DispatchError, Route, SolveResult, dispatch, solve
from .reduction import (
    MalformedWitness,
    OutsideHardRegion,
    ReductionMapping,
    decode_selection,
    encode_assignment,
    reduce_consonance,
    reduce_maxchord,
    reduce_transition,
)
from .score import ConstraintProfile, Note, Part, Score, ScoreError, Selection, event_times, segments, sounding_notes

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CnfFormula",
    "ConsonanceTable",
    "ConstraintProfile",
    "DispatchError",
    "Limits",
    "Literal",
    "MalformedWitness",
    "Note",
    "OutsideHardRegion",
    "Part",
    "ReductionMapping",
    "Route",
    "Score",
    "ScoreError",
    "SearchTimeout",
    "Selection",
    "Semantics",
    "SolveResult",
    "Violation",
    "check_consonance",
    "check_coverage",
    "check_max_chord",
    "check_min_segment",
    "chord_consonant",
    "consonant_interval",
    "decode_selection",
    "dispatch",
    "dpll_solve",
    "encode_assignment",
    "evaluate",
    "event_times",
    "gen_random",
    "parse_dimacs",
    "reduce_consonance",
    "reduce_maxchord",
    "reduce_transition",
    "segments",
    "solve",
    "solve_exact",
    "sounding_notes",
    "verify",
    "x3sat_to_sat",
]
