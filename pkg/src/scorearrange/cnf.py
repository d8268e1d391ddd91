"""3-literal CNF formulas under 3SAT or X3SAT (exactly-one) semantics,
a DIMACS reader/writer and a small DPLL solver used as ground truth.
"""

from __future__ import annotations

import enum
import hashlib
import random
from dataclasses import dataclass
from itertools import combinations


class DimacsError(ValueError):
    pass


class Semantics(str, enum.Enum):
    THREESAT = "threesat"
    X3SAT = "x3sat"


@dataclass(frozen=True, order=True)
class Literal:
    var: int
    negated: bool = False

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")

    @classmethod
    def from_int(cls, x: int) -> "Literal":
        if x == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(x), x < 0)

    def __int__(self) -> int:
        return -self.var if self.negated else self.var

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.negated)

    def value(self, assignment: dict[int, bool]) -> bool:
        return assignment[self.var] != self.negated

    def __str__(self) -> str:
        return ("¬" if self.negated else "") + f"x{self.var}"


Clause = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[Clause, ...]
    semantics: Semantics = Semantics.THREESAT

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        object.__setattr__(self, "semantics", Semantics(self.semantics))
        for c in self.clauses:
            if len(c) != 3:
                raise ValueError(f"clause {c} does not have exactly 3 literals")
            for lit in c:
                if lit.var > self.num_vars:
                    raise ValueError(f"literal {lit} exceeds num_vars={self.num_vars}")

    @classmethod
    def from_ints(cls, num_vars: int, clauses, semantics=Semantics.THREESAT) -> "CnfFormula":
        return cls(num_vars, tuple(tuple(Literal.from_int(x) for x in c) for c in clauses), semantics)

    def int_clauses(self) -> list[tuple[int, int, int]]:
        return [tuple(int(l) for l in c) for c in self.clauses]

    def with_semantics(self, semantics: Semantics) -> "CnfFormula":
        return CnfFormula(self.num_vars, self.clauses, semantics)

    def digest(self) -> str:
        return hashlib.sha256(to_dimacs(self).encode()).hexdigest()

    def __str__(self) -> str:
        return " ∧ ".join("(" + " ∨ ".join(map(str, c)) + ")" for c in self.clauses)


def parse_dimacs(text: str, semantics: Semantics = Semantics.THREESAT) -> CnfFormula:
    num_vars = num_clauses = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if num_vars is not None or len(fields) != 4 or fields[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {raw!r}")
            try:
                num_vars, num_clauses = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {raw!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token in {raw!r}") from None
    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")

    clauses = []
    current: list[int] = []
    for t in tokens:
        if t == 0:
            if len(current) != 3:
                raise DimacsError(f"clause {current} has {len(current)} literals, need exactly 3")
            clauses.append(tuple(current))
            current = []
        else:
            if abs(t) > num_vars:
                raise DimacsError(f"literal {t} exceeds declared {num_vars} variables")
            current.append(t)
    if current:
        raise DimacsError(f"unterminated clause {current}")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(num_vars, clauses, semantics)


def to_dimacs(f: CnfFormula) -> str:
    lines = []
    if f.semantics is Semantics.X3SAT:
        lines.append("c semantics x3sat")
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(str(x) for x in c) + " 0" for c in f.int_clauses()]
    return "\n".join(lines) + "\n"


def format_witness(assignment: dict[int, bool]) -> str:
    return "v " + " ".join(str(v if assignment[v] else -v) for v in sorted(assignment))


def _check_total(f: CnfFormula, a: dict[int, bool]) -> None:
    missing = [v for v in range(1, f.num_vars + 1) if v not in a]
    if missing:
        raise ValueError(f"assignment is not total; missing variables {missing}")


def evaluate(f: CnfFormula, a: dict[int, bool]) -> bool:
    """Truth of ``f`` under a total assignment.

    X3SAT counts true literal *occurrences*, so (x ∨ x ∨ y) with x true is
    already falsified.
    """
    _check_total(f, a)
    if f.semantics is Semantics.X3SAT:
        return all(sum(lit.value(a) for lit in c) == 1 for c in f.clauses)
    return all(any(lit.value(a) for lit in c) for c in f.clauses)


def x3sat_to_sat(f: CnfFormula) -> CnfFormula:
    """At-least-one clause plus pairwise at-most-one clauses per position."""
    if f.semantics is not Semantics.X3SAT:
        raise ValueError("x3sat_to_sat expects an X3SAT formula")
    out = []
    for c in f.clauses:
        out.append(c)
        for a, b in combinations(c, 2):
            out.append((-a, -b, -b))
    return CnfFormula(f.num_vars, tuple(out), Semantics.THREESAT)


def dpll_solve(f: CnfFormula) -> dict[int, bool] | None:
    """Deterministic DPLL: unit propagation, then branch on the lowest
    unassigned variable, true first.  Unconstrained variables default to
    false.
    """
    if f.semantics is Semantics.X3SAT:
        f = x3sat_to_sat(f)
    clauses = [frozenset(c) for c in f.int_clauses()]
    model = _dpll(clauses, {})
    if model is None:
        return None
    return {v: model.get(v, False) for v in range(1, f.num_vars + 1)}


def _assign(clauses: list[frozenset[int]], lit: int) -> list[frozenset[int]] | None:
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
            if not c:
                return None
        out.append(c)
    return out


def _dpll(clauses: list[frozenset[int]], model: dict[int, bool]) -> dict[int, bool] | None:
    model = dict(model)
    while True:
        unit = next((c for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        (lit,) = unit
        model[abs(lit)] = lit > 0
        clauses = _assign(clauses, lit)
        if clauses is None:
            return None
    if not clauses:
        return model
    var = min(abs(l) for c in clauses for l in c)
    for lit in (var, -var):
        reduced = _assign(clauses, lit)
        if reduced is None:
            continue
        found = _dpll(reduced, {**model, var: lit > 0})
        if found is not None:
            return found
    return None


def gen_random(num_vars: int, num_clauses: int, seed: int, semantics: Semantics = Semantics.THREESAT) -> CnfFormula:
    """Random formula whose clauses each use three distinct variables."""
    if num_vars < 3:
        raise ValueError("need at least 3 variables for distinct-variable clauses")
    rng = random.Random(seed)
    clauses = []
    for _ in range(num_clauses):
        vs = rng.sample(range(1, num_vars + 1), 3)
        clauses.append(tuple(Literal(v, rng.random() < 0.5) for v in vs))
    return CnfFormula(num_vars, tuple(clauses), semantics)
