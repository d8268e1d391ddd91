"""Command-line interface.

Exit codes:
  check    0 valid, 1 invalid, 2 usage or parse error
  solve    0 sat, 1 unsat, 2 usage or parse error, 3 timeout
  reduce   0 ok, 2 usage or parse error, 4 p outside the max-j hard region
  extract  0 ok, 2 usage or parse error, 5 malformed witness
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cnf
from .constraints import verify
from .exact import Limits
from .musicxml import write_musicxml
from .poly import dispatch, solve
from .reduction import VARIANTS, MalformedWitness, OutsideHardRegion, ReductionMapping, decode_selection, reduce
from .score import ConstraintProfile, dumps_score, loads_score, loads_selection, parse_rational

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_OUTSIDE = 4
EXIT_MALFORMED = 5


class _Usage(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Usage(f"cannot read {path}: {e.strerror}") from None


def _profile(args) -> ConstraintProfile:
    return ConstraintProfile(
        parse_rational(args.p),
        consonance=args.consonance,
        max_chord=args.max_chord,
        min_segment_ticks=args.min_segment_ticks,
    )


def _add_profile_flags(sp):
    sp.add_argument("--p", required=True, help="coverage fraction as num/den")
    sp.add_argument("--consonance", action="store_true", help="forbid dissonant simultaneous notes")
    sp.add_argument("--max-chord", type=int, metavar="J", help="at most J simultaneous notes")
    sp.add_argument("--min-segment-ticks", type=int, metavar="D", help="non-silent segments last >= D ticks")


def cmd_check(args) -> int:
    score = loads_score(_read(args.score))
    sel = loads_selection(_read(args.selection))
    ok, violations = verify(score, sel, _profile(args))
    for v in violations:
        print(v.to_json())
    return EXIT_OK if ok else EXIT_NO


def cmd_solve(args) -> int:
    score = loads_score(_read(args.score))
    profile = _profile(args)
    if args.route_only:
        print(json.dumps({"route": dispatch(score, profile).value}))
        return EXIT_OK
    limits = Limits(max_parts=args.max_parts, time_budget=args.time_budget)
    result = solve(score, profile, limits)
    print(result.to_json(score))
    return {"sat": EXIT_OK, "unsat": EXIT_NO, "timeout": EXIT_TIMEOUT}[result.status]


def cmd_reduce(args) -> int:
    formula = cnf.parse_dimacs(_read(args.cnf))
    try:
        score, mapping = reduce(formula, args.variant, parse_rational(args.p), args.j)
    except OutsideHardRegion as e:
        print(str(e), file=sys.stderr)
        return EXIT_OUTSIDE
    out = args.out
    Path(f"{out}.score.json").write_text(dumps_score(score), encoding="utf-8")
    Path(f"{out}.map.json").write_text(mapping.dumps(), encoding="utf-8")
    return EXIT_OK


def cmd_extract(args) -> int:
    score = loads_score(_read(args.score))
    mapping = ReductionMapping.loads(_read(args.mapping))
    sel = loads_selection(_read(args.selection))
    sel.validate(score)
    try:
        assignment = decode_selection(mapping, sel)
    except MalformedWitness as e:
        print(str(e), file=sys.stderr)
        return EXIT_MALFORMED
    print(cnf.format_witness(assignment))
    return EXIT_OK


def cmd_export_musicxml(args) -> int:
    write_musicxml(loads_score(_read(args.score)), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.vars < 3:
        raise _Usage("--vars must be at least 3")
    f = cnf.gen_random(args.vars, args.clauses, args.seed, cnf.Semantics(args.semantics))
    sys.stdout.write(cnf.to_dimacs(f))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorearrange", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("check", help="validate an arrangement against a profile")
    sp.add_argument("score")
    sp.add_argument("selection")
    _add_profile_flags(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("solve", help="find an arrangement or report UNSAT")
    sp.add_argument("score")
    _add_profile_flags(sp)
    sp.add_argument("--route-only", action="store_true", help="print the chosen solver and stop")
    sp.add_argument("--max-parts", type=int, default=24)
    sp.add_argument("--time-budget", type=float, default=None, metavar="SECONDS")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("reduce", help="compile a DIMACS formula into a score")
    sp.add_argument("cnf")
    sp.add_argument("--variant", choices=VARIANTS, required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--j", type=int, default=None)
    sp.add_argument("--out", required=True, help="output prefix for .score.json and .map.json")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("extract", help="decode an arrangement into a 'v ...' witness line")
    sp.add_argument("score")
    sp.add_argument("mapping")
    sp.add_argument("selection")
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("export-musicxml", help="write a score as MusicXML 3.1")
    sp.add_argument("score")
    sp.add_argument("out")
    sp.set_defaults(func=cmd_export_musicxml)

    sp = sub.add_parser("gen", help="print a random DIMACS formula")
    sp.add_argument("--vars", type=int, required=True)
    sp.add_argument("--clauses", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--semantics", choices=[s.value for s in cnf.Semantics], default="threesat")
    sp.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (_Usage, ValueError) as e:  # ScoreError, DimacsError, CapacityError included
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
