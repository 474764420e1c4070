"""CNF formulas: DIMACS I/O, random 3-SAT generation, evaluation, simplification
and factor-graph construction.

Literals follow the DIMACS convention used throughout this package: a literal is
a signed integer, +v for variable v and -v for its negation (v is 1-based).
An assignment is a list of 0/1 values, index i holding the value of variable i+1.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field

from .errors import ContradictionError, ParseError


class FormulaWarning(UserWarning):
    """Non-fatal issues found while parsing or constructing formulas."""


def split_literal(lit: int) -> tuple[int, bool]:
    """Return (variable, is_positive) for a signed literal."""
    return abs(lit), lit > 0


@dataclass(frozen=True)
class Formula:
    """Immutable CNF formula over variables 1..num_vars.

    Clauses are tuples of signed literals. Duplicate literals within a clause
    are rejected; tautological clauses (x and -x together) are representable
    because parsers must tolerate them, but generators never produce them.
    """

    num_vars: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for idx, clause in enumerate(self.clauses):
            if not clause:
                raise ValueError(f"clause {idx} is empty")
            if len(set(clause)) != len(clause):
                raise ValueError(f"clause {idx} contains a duplicate literal")
            for lit in clause:
                v = abs(lit)
                if lit == 0 or v > self.num_vars:
                    raise ValueError(f"clause {idx}: literal {lit} out of range 1..{self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @property
    def num_literals(self) -> int:
        """Total literal count (the L in factor-graph edge counts)."""
        return sum(len(c) for c in self.clauses)

    def clause_vars(self, idx: int) -> tuple[int, ...]:
        return tuple(abs(l) for l in self.clauses[idx])

    def has_unit_clause(self) -> bool:
        return any(len(c) == 1 for c in self.clauses)

    def is_tautological_clause(self, idx: int) -> bool:
        seen = set(self.clauses[idx])
        return any(-lit in seen for lit in seen)


def parse_dimacs(text: str) -> Formula:
    """Parse DIMACS CNF text into a Formula.

    Comment lines start with 'c'; the header is 'p cnf N M'; clauses are
    whitespace-separated literals terminated by 0 and may span lines. A
    mismatch between the declared M and the clause count in the body is
    reported as a warning and the body wins. Tautological clauses and
    repeated literals are tolerated with a warning (repeats are dropped).
    """
    num_vars = None
    declared_clauses = None
    clauses = []
    current: list[int] = []
    current_start_line = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ParseError("duplicate problem header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                num_vars = int(parts[2])
                declared_clauses = int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if num_vars < 0 or declared_clauses < 0:
                raise ParseError("negative counts in header", lineno)
            continue
        if num_vars is None:
            raise ParseError(f"clause data before header: {line!r}", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                clauses.append(_clean_clause(current, num_vars, current_start_line))
                current = []
                current_start_line = None
            else:
                if abs(lit) > num_vars:
                    raise ParseError(f"literal {lit} exceeds declared {num_vars} variables", lineno)
                if current_start_line is None:
                    current_start_line = lineno
                current.append(lit)

    if num_vars is None:
        raise ParseError("missing 'p cnf' header", 1)
    if current:
        raise ParseError("unterminated clause at end of input", current_start_line)
    if declared_clauses != len(clauses):
        warnings.warn(
            f"header declares {declared_clauses} clauses but body has {len(clauses)}; using body",
            FormulaWarning,
            stacklevel=2,
        )
    return Formula(num_vars, tuple(clauses))


def _clean_clause(lits, num_vars, lineno):
    out = []
    seen = set()
    for lit in lits:
        if lit in seen:
            warnings.warn(
                f"line {lineno}: repeated literal {lit} in clause, dropping duplicate",
                FormulaWarning,
                stacklevel=3,
            )
            continue
        seen.add(lit)
        out.append(lit)
    if any(-lit in seen for lit in seen):
        warnings.warn(f"line {lineno}: tautological clause (kept)", FormulaWarning, stacklevel=3)
    return tuple(out)


def render_dimacs(f: Formula) -> str:
    """Serialize to DIMACS text, bit-exact: header line, one clause per line."""
    lines = [f"p cnf {f.num_vars} {f.num_clauses}"]
    for clause in f.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def generate_random_3sat(n: int, m: int, seed: int) -> Formula:
    """Uniform random 3-SAT: m clauses, each over 3 distinct variables with
    independent fair-coin signs. Duplicate clauses are allowed; tautologies
    cannot occur because the variables within a clause are distinct.
    """
    if n < 3:
        raise ValueError("need at least 3 variables for 3-SAT clauses")
    if m < 0:
        raise ValueError("clause count must be non-negative")
    rng = random.Random(seed)
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Formula(n, tuple(clauses))


def evaluate(f: Formula, assignment: list[int]) -> bool:
    """True iff every clause has at least one literal made true by the assignment."""
    if len(assignment) != f.num_vars:
        raise ValueError(f"assignment length {len(assignment)} != num_vars {f.num_vars}")
    for clause in f.clauses:
        for lit in clause:
            if assignment[abs(lit) - 1] == (1 if lit > 0 else 0):
                break
        else:
            return False
    return True


@dataclass
class SimplifyResult:
    """Residual formula after fixing variables, plus the bookkeeping maps.

    fixed holds every variable decided in the original index space, including
    values implied by unit propagation. The residual formula is densely
    renumbered; old_to_new / new_to_old translate between index spaces.
    """

    formula: Formula
    fixed: dict[int, int]
    old_to_new: dict[int, int]
    new_to_old: list[int]  # new_to_old[i] = original index of residual variable i+1

    def renumbering_csv(self) -> str:
        lines = ["old_index,new_index"]
        for new, old in enumerate(self.new_to_old, start=1):
            lines.append(f"{old},{new}")
        return "\n".join(lines) + "\n"


def simplify(f: Formula, fixed: dict[int, int]) -> SimplifyResult:
    """Apply a partial assignment: drop satisfied clauses, strip falsified
    literals, and unit-propagate to fixpoint.

    Raises ContradictionError if an empty clause arises. The residual keeps
    every undecided variable (even ones no clause mentions) so callers can
    map assignments back without gaps.
    """
    values: dict[int, int] = {}
    for var, val in fixed.items():
        if not (1 <= var <= f.num_vars):
            raise ValueError(f"fixed variable {var} out of range")
        if val not in (0, 1):
            raise ValueError(f"fixed value for {var} must be 0 or 1")
        if values.get(var, val) != val:
            raise ContradictionError(f"variable {var} fixed to both values")
        values[var] = val

    clauses = [list(c) for c in f.clauses]
    alive = [True] * len(clauses)
    changed = True
    while changed:
        changed = False
        for idx, clause in enumerate(clauses):
            if not alive[idx]:
                continue
            remaining = []
            satisfied = False
            for lit in clause:
                var = abs(lit)
                want = 1 if lit > 0 else 0
                if var in values:
                    if values[var] == want:
                        satisfied = True
                        break
                else:
                    remaining.append(lit)
            if satisfied:
                alive[idx] = False
                changed = True
                continue
            if not remaining:
                raise ContradictionError(f"clause {f.clauses[idx]} falsified")
            if len(remaining) == 1:
                lit = remaining[0]
                values[abs(lit)] = 1 if lit > 0 else 0
                alive[idx] = False
                changed = True
                continue
            if len(remaining) != len(clause):
                clauses[idx] = remaining
                changed = True

    survivors = [v for v in range(1, f.num_vars + 1) if v not in values]
    old_to_new = {old: new for new, old in enumerate(survivors, start=1)}
    new_clauses = []
    for idx, clause in enumerate(clauses):
        if alive[idx]:
            new_clauses.append(
                tuple((1 if lit > 0 else -1) * old_to_new[abs(lit)] for lit in clause)
            )
    residual = Formula(len(survivors), tuple(new_clauses))
    return SimplifyResult(residual, values, old_to_new, survivors)


@dataclass
class FactorGraph:
    """Bipartite clause/variable adjacency with dense edge ids.

    Edges are numbered 0..L-1 in (clause, literal-position) order; each edge
    carries the sign of the occurrence. var_edges[x-1] lists edges of C(x) in
    clause order, clause_edges[a] lists edges of V(a) in literal order.
    """

    num_vars: int
    num_clauses: int
    edge_clause: list[int]
    edge_var: list[int]
    edge_sign: list[int]
    var_edges: list[list[int]] = field(repr=False)
    clause_edges: list[list[int]] = field(repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edge_clause)

    def clauses_of(self, var: int) -> list[tuple[int, int]]:
        """C(x) as (clause index, sign) pairs in deterministic order."""
        return [(self.edge_clause[e], self.edge_sign[e]) for e in self.var_edges[var - 1]]

    def vars_of(self, clause: int) -> list[tuple[int, int]]:
        """V(a) as (variable, sign) pairs in literal order."""
        return [(self.edge_var[e], self.edge_sign[e]) for e in self.clause_edges[clause]]

    def cavity_clauses(self, edge: int) -> tuple[list[int], list[int]]:
        """For edge (a,x): the same-sign set C_a^s(x) and opposite-sign set
        C_a^u(x), as lists of clause indices (a itself excluded)."""
        var = self.edge_var[edge]
        sign = self.edge_sign[edge]
        same, opposite = [], []
        for e in self.var_edges[var - 1]:
            if e == edge:
                continue
            if self.edge_sign[e] == sign:
                same.append(self.edge_clause[e])
            else:
                opposite.append(self.edge_clause[e])
        return same, opposite


def build_factor_graph(f: Formula) -> FactorGraph:
    """Adjacency index for message passing. Rejects tautological clauses,
    which would give a variable two opposite-sign edges to one clause."""
    edge_clause, edge_var, edge_sign = [], [], []
    var_edges: list[list[int]] = [[] for _ in range(f.num_vars)]
    clause_edges: list[list[int]] = []
    for a, clause in enumerate(f.clauses):
        if f.is_tautological_clause(a):
            raise ValueError(f"clause {a} is tautological; factor graph undefined")
        edges = []
        for lit in clause:
            e = len(edge_clause)
            edge_clause.append(a)
            edge_var.append(abs(lit))
            edge_sign.append(1 if lit > 0 else -1)
            var_edges[abs(lit) - 1].append(e)
            edges.append(e)
        clause_edges.append(edges)
    return FactorGraph(
        f.num_vars, f.num_clauses, edge_clause, edge_var, edge_sign, var_edges, clause_edges
    )
