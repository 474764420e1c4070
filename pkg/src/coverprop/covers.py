"""Generalized assignments over {0,1,*} and cover combinatorics.

A generalized assignment is a string over '0', '1', '*' of length num_vars.
A cover is a generalized assignment where (1) every clause has a satisfying
literal or at least two '*' literals and (2) every 0/1 variable is supported,
i.e. is the sole satisfier of some clause whose other literals are all false.
Star-propagation (peeling) repeatedly stars unsupported variables; from a
satisfying assignment it always reaches a cover that extends to a solution.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .formula import Formula, simplify
from .errors import ContradictionError
from . import solver as slv

STAR = "*"

BRUTEFORCE_VAR_CAP = 16  # 3^16 ~ 43M generalized assignments


class CoverKind(Enum):
    TRUE_COVER = "TRUE"
    FALSE_COVER = "FALSE"
    TRIVIAL = "TRIVIAL"
    UNKNOWN = "UNKNOWN"  # classification budget ran out


@dataclass
class CoverRecord:
    assignment: str
    kind: CoverKind
    star_count: int

    @property
    def nontrivial(self) -> bool:
        return self.kind is not CoverKind.TRIVIAL


def assignment_to_generalized(values: list[int]) -> str:
    return "".join("1" if v else "0" for v in values)


def check_generalized(f: Formula, sigma: str) -> None:
    if len(sigma) != f.num_vars:
        raise ValueError(f"assignment length {len(sigma)} != num_vars {f.num_vars}")
    bad = set(sigma) - {"0", "1", STAR}
    if bad:
        raise ValueError(f"invalid symbols {bad!r} in generalized assignment")


def _literal_status(sigma: str, lit: int) -> int:
    """1 true, -1 false, 0 star."""
    c = sigma[abs(lit) - 1]
    if c == STAR:
        return 0
    return 1 if c == ("1" if lit > 0 else "0") else -1


def is_supported(f: Formula, sigma: str, var: int) -> bool:
    """True iff some clause relies on var: var's literal is true and every
    other literal of that clause is false (stars are not false)."""
    check_generalized(f, sigma)
    if sigma[var - 1] == STAR:
        raise ValueError(f"variable {var} is '*'; support is defined for 0/1 variables")
    for clause in f.clauses:
        sole = False
        ok = True
        for lit in clause:
            status = _literal_status(sigma, lit)
            if abs(lit) == var:
                if status != 1:
                    ok = False
                    break
                sole = True
            elif status != -1:
                ok = False
                break
        if ok and sole:
            return True
    return False


def unsupported_variables(f: Formula, sigma: str) -> list[int]:
    """All 0/1 variables without a supporting clause, ascending."""
    check_generalized(f, sigma)
    supported = [False] * (f.num_vars + 1)
    for clause in f.clauses:
        sole_var = None
        for lit in clause:
            status = _literal_status(sigma, lit)
            if status == 1:
                if sole_var is not None:
                    sole_var = None
                    break
                sole_var = abs(lit)
            elif status == 0:
                sole_var = None
                break
        if sole_var is not None:
            supported[sole_var] = True
    return [v for v in range(1, f.num_vars + 1) if sigma[v - 1] != STAR and not supported[v]]


def satisfies_clause_condition(f: Formula, sigma: str) -> bool:
    """Cover condition (1): every clause has a satisfying literal or >= 2 stars."""
    check_generalized(f, sigma)
    for clause in f.clauses:
        stars = 0
        satisfied = False
        for lit in clause:
            status = _literal_status(sigma, lit)
            if status == 1:
                satisfied = True
                break
            if status == 0:
                stars += 1
        if not satisfied and stars < 2:
            return False
    return True


def is_cover(f: Formula, sigma: str) -> bool:
    return satisfies_clause_condition(f, sigma) and not unsupported_variables(f, sigma)


@dataclass
class PeelResult:
    cover: str
    trace: list[tuple[int, int]]  # (star_count, unsupported_count) per step
    starred: list[int]  # variables starred, in order


class _SupportIndex:
    """Incremental support bookkeeping for peeling.

    Per clause: counts of true/false/star literals. A clause supports the
    variable of its unique true literal iff it has exactly one true literal
    and no stars. Per variable: number of supporting clauses.
    """

    def __init__(self, f: Formula, sigma: list[str]):
        self.f = f
        self.sigma = sigma
        n = f.num_vars
        self.true_count = []
        self.star_count = []
        self.sole_var = []  # supported variable per clause, or 0
        self.support_count = [0] * (n + 1)
        for clause in f.clauses:
            t = s = 0
            true_var = 0
            for lit in clause:
                st = _clause_lit_status(sigma, lit)
                if st == 1:
                    t += 1
                    true_var = abs(lit)
                elif st == 0:
                    s += 1
            self.true_count.append(t)
            self.star_count.append(s)
            sole = true_var if (t == 1 and s == 0) else 0
            self.sole_var.append(sole)
            if sole:
                self.support_count[sole] += 1

    def unsupported(self) -> list[int]:
        return [
            v
            for v in range(1, self.f.num_vars + 1)
            if self.sigma[v - 1] != STAR and self.support_count[v] == 0
        ]

    def star(self, var: int, occ: list[tuple[int, int]]) -> list[int]:
        """Turn var into '*'; returns variables that may have lost support."""
        touched = []
        old_char = self.sigma[var - 1]
        self.sigma[var - 1] = STAR
        for ci, lit in occ:
            was_true = old_char == ("1" if lit > 0 else "0")
            old_sole = self.sole_var[ci]
            if was_true:
                self.true_count[ci] -= 1
            self.star_count[ci] += 1
            # a clause with a star cannot support anyone
            if old_sole:
                self.support_count[old_sole] -= 1
                if self.support_count[old_sole] == 0:
                    touched.append(old_sole)
                self.sole_var[ci] = 0
        return touched


def _clause_lit_status(sigma_list, lit: int) -> int:
    c = sigma_list[abs(lit) - 1]
    if c == STAR:
        return 0
    return 1 if c == ("1" if lit > 0 else "0") else -1


def star_propagate(
    f: Formula,
    start: str,
    policy: str = "lowest",
    seed: int = 0,
    record_trace: bool = True,
) -> PeelResult:
    """Star unsupported variables until none remain.

    policy selects which unsupported variable goes next: 'lowest' (smallest
    index), 'random' (seeded), or 'queue' (FIFO discovery order). The start
    must already satisfy cover condition (1), otherwise peeling may not reach
    a cover and the call is rejected.
    """
    check_generalized(f, start)
    if policy not in ("lowest", "random", "queue"):
        raise ValueError(f"unknown peeling policy {policy!r}")
    if not satisfies_clause_condition(f, start):
        raise ValueError(
            "start violates cover condition (1): some clause has no satisfying "
            "literal and fewer than two '*' literals"
        )
    sigma = list(start)
    occ: list[list[tuple[int, int]]] = [[] for _ in range(f.num_vars + 1)]
    for ci, clause in enumerate(f.clauses):
        for lit in clause:
            occ[abs(lit)].append((ci, lit))
    index = _SupportIndex(f, sigma)
    pending = index.unsupported()
    n_unsupported = len(pending)
    stars = start.count(STAR)
    trace = [(stars, n_unsupported)] if record_trace else []
    starred: list[int] = []

    rng = random.Random(seed)
    if policy == "lowest":
        heap = list(pending)
        heapq.heapify(heap)
    elif policy == "queue":
        from collections import deque

        queue = deque(pending)
    else:
        pool = list(pending)

    def pop_next():
        while True:
            if policy == "lowest":
                if not heap:
                    return None
                v = heapq.heappop(heap)
            elif policy == "queue":
                if not queue:
                    return None
                v = queue.popleft()
            else:
                if not pool:
                    return None
                v = pool.pop(rng.randrange(len(pool)))
            if sigma[v - 1] != STAR and index.support_count[v] == 0:
                return v

    while True:
        v = pop_next()
        if v is None:
            break
        newly = index.star(v, occ[v])
        stars += 1
        n_unsupported -= 1
        for u in newly:
            if sigma[u - 1] != STAR:
                n_unsupported += 1
                if policy == "lowest":
                    heapq.heappush(heap, u)
                elif policy == "queue":
                    queue.append(u)
                else:
                    pool.append(u)
        starred.append(v)
        if record_trace:
            trace.append((stars, n_unsupported))
    result = "".join(sigma)
    return PeelResult(result, trace, starred)


def classify_cover(f: Formula, sigma: str, budget: int | None = None) -> CoverKind:
    """TRUE_COVER iff the formula restricted by sigma's 0/1 values is
    satisfiable (so the cover extends to a solution); FALSE_COVER otherwise;
    UNKNOWN if the solver budget runs out."""
    check_generalized(f, sigma)
    fixed = {v: int(sigma[v - 1]) for v in range(1, f.num_vars + 1) if sigma[v - 1] != STAR}
    try:
        res = simplify(f, fixed)
    except ContradictionError:
        return CoverKind.FALSE_COVER
    out = slv.dpll_solve(res.formula, budget=budget)
    if out.status is slv.SolveStatus.SAT:
        return CoverKind.TRUE_COVER
    if out.status is slv.SolveStatus.UNSAT:
        return CoverKind.FALSE_COVER
    return CoverKind.UNKNOWN


def make_record(f: Formula, sigma: str, budget: int | None = None) -> CoverRecord:
    stars = sigma.count(STAR)
    if stars == f.num_vars:
        kind = CoverKind.TRIVIAL
    else:
        kind = classify_cover(f, sigma, budget=budget)
    return CoverRecord(sigma, kind, stars)


def enumerate_covers_bruteforce(
    f: Formula, var_cap: int = BRUTEFORCE_VAR_CAP, classify_budget: int | None = None
) -> list[CoverRecord]:
    """Scan all 3^N generalized assignments and keep the covers.

    The scan is chunked and vectorized but otherwise a direct transcription of
    the cover definition, so it can serve as the oracle for the SAT-encoded
    enumeration. Refuses formulas with more variables than var_cap.
    """
    n = f.num_vars
    if n > var_cap:
        raise ValueError(f"brute force capped at {var_cap} variables (got {n})")
    total = 3**n
    chunk = 1 << 18
    found: list[str] = []
    symbols = np.array(["0", "1", STAR])
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = np.empty((hi - lo, n), dtype=np.int8)
        rem = idx
        for j in range(n):
            digits[:, j] = rem % 3
            rem = rem // 3
        ok = _cover_mask(f, digits)
        for row in digits[ok]:
            found.append("".join(symbols[row]))
    return [make_record(f, sigma, budget=classify_budget) for sigma in sorted(found)]


def _cover_mask(f: Formula, digits: np.ndarray) -> np.ndarray:
    """Vectorized cover predicate: digits rows over {0,1,2} with 2 = '*'."""
    rows = digits.shape[0]
    cond1 = np.ones(rows, dtype=bool)
    supported = np.zeros((rows, f.num_vars + 1), dtype=bool)
    decided_mask = digits != 2
    for clause in f.clauses:
        k = len(clause)
        true_cnt = np.zeros(rows, dtype=np.int8)
        star_cnt = np.zeros(rows, dtype=np.int8)
        sole_var = np.zeros(rows, dtype=np.int32)
        for lit in clause:
            col = digits[:, abs(lit) - 1]
            is_true = col == (1 if lit > 0 else 0)
            is_star = col == 2
            true_cnt += is_true
            star_cnt += is_star
            sole_var = np.where(is_true, abs(lit), sole_var)
        cond1 &= (true_cnt >= 1) | (star_cnt >= 2)
        sole = (true_cnt == 1) & (star_cnt == 0)
        if sole.any():
            rows_idx = np.nonzero(sole)[0]
            supported[rows_idx, sole_var[rows_idx]] = True
    cond2 = np.all(~decided_mask | supported[:, 1:], axis=1)
    return cond1 & cond2


@dataclass
class CoverEncoding:
    """SAT encoding of "is a cover of f" plus the decode bookkeeping.

    Variables of G: per original variable x, t_x = 2x-1 ("x is 1") and
    f_x = 2x ("x is 0"); star means neither. Per (clause, occurrence) edge e,
    a support indicator s_e = 2N + 1 + e meaning "clause e.clause relies on
    e.var as its sole satisfier".
    """

    g: Formula
    num_orig_vars: int
    edge_clause: list[int]
    edge_var: list[int]

    def t_var(self, x: int) -> int:
        return 2 * x - 1

    def f_var(self, x: int) -> int:
        return 2 * x

    def s_var(self, edge: int) -> int:
        return 2 * self.num_orig_vars + 1 + edge

    def decode(self, model: list[int]) -> str:
        out = []
        for x in range(1, self.num_orig_vars + 1):
            t = model[self.t_var(x) - 1]
            fv = model[self.f_var(x) - 1]
            if t and fv:
                raise ValueError(f"model sets both t and f for variable {x}")
            out.append("1" if t else "0" if fv else STAR)
        return "".join(out)

    def encode_cover(self, f: Formula, sigma: str) -> list[int]:
        """The unique G-model for a cover (used by bijection tests)."""
        model = [0] * self.g.num_vars
        for x in range(1, self.num_orig_vars + 1):
            if sigma[x - 1] == "1":
                model[self.t_var(x) - 1] = 1
            elif sigma[x - 1] == "0":
                model[self.f_var(x) - 1] = 1
        for e, (ci, var) in enumerate(zip(self.edge_clause, self.edge_var)):
            clause = f.clauses[ci]
            lit = next(l for l in clause if abs(l) == var)
            sole = _literal_status(sigma, lit) == 1 and all(
                _literal_status(sigma, other) == -1 for other in clause if other != lit
            )
            if sole:
                model[self.s_var(e) - 1] = 1
        return model

    def decode_map_csv(self) -> str:
        lines = ["g_var,role,orig_var,clause"]
        for x in range(1, self.num_orig_vars + 1):
            lines.append(f"{self.t_var(x)},t,{x},")
            lines.append(f"{self.f_var(x)},f,{x},")
        for e, (ci, var) in enumerate(zip(self.edge_clause, self.edge_var)):
            lines.append(f"{self.s_var(e)},s,{var},{ci}")
        return "\n".join(lines) + "\n"


def encode_covers_as_cnf(f: Formula) -> CoverEncoding:
    """Build a CNF formula G whose models are exactly the covers of f.

    Constraints: t_x and f_x exclusive; cover condition (1) per clause
    (satisfying literal or two stars, expanded over the not-t/not-f choices);
    s_e defined in both directions as "var's literal true and all other
    literals of the clause false"; and each assigned variable must have a
    supporting clause of matching sign.
    """
    edge_clause, edge_var = [], []
    for ci, clause in enumerate(f.clauses):
        if f.is_tautological_clause(ci):
            raise ValueError(f"clause {ci} is tautological; cover encoding undefined")
        for lit in clause:
            edge_clause.append(ci)
            edge_var.append(abs(lit))
    enc = CoverEncoding(
        Formula(0, ()), f.num_vars, edge_clause, edge_var
    )
    num_g_vars = 2 * f.num_vars + len(edge_clause)
    g_clauses: list[tuple[int, ...]] = []

    def sat_lit(lit: int) -> int:
        return enc.t_var(abs(lit)) if lit > 0 else enc.f_var(abs(lit))

    def false_lit(lit: int) -> int:
        return enc.f_var(abs(lit)) if lit > 0 else enc.t_var(abs(lit))

    for x in range(1, f.num_vars + 1):
        g_clauses.append((-enc.t_var(x), -enc.f_var(x)))

    for ci, clause in enumerate(f.clauses):
        sats = [sat_lit(lit) for lit in clause]
        k = len(clause)
        # Condition (1): satisfied, or >= 2 stars. With no satisfying literal,
        # "y is a star" is exactly "not false_lit(y)", so it suffices to demand,
        # for every position i, a non-falsifying variable among the others.
        for i in range(k):
            extra = [-false_lit(clause[j]) for j in range(k) if j != i]
            g_clauses.append(tuple(sats + extra))

    edge_index = 0
    for ci, clause in enumerate(f.clauses):
        for lit in clause:
            s = enc.s_var(edge_index)
            body = [sat_lit(lit)] + [false_lit(other) for other in clause if other != lit]
            for b in body:
                g_clauses.append((-s, b))
            g_clauses.append(tuple([s] + [-b for b in body]))
            edge_index += 1

    edges_of_var_pos: list[list[int]] = [[] for _ in range(f.num_vars + 1)]
    edges_of_var_neg: list[list[int]] = [[] for _ in range(f.num_vars + 1)]
    e = 0
    for ci, clause in enumerate(f.clauses):
        for lit in clause:
            (edges_of_var_pos if lit > 0 else edges_of_var_neg)[abs(lit)].append(e)
            e += 1
    for x in range(1, f.num_vars + 1):
        g_clauses.append(tuple([-enc.t_var(x)] + [enc.s_var(e) for e in edges_of_var_pos[x]]))
        g_clauses.append(tuple([-enc.f_var(x)] + [enc.s_var(e) for e in edges_of_var_neg[x]]))

    enc.g = Formula(num_g_vars, tuple(g_clauses))
    return enc


@dataclass
class CoverEnumeration:
    records: list[CoverRecord]
    complete: bool


def enumerate_covers_sat(
    f: Formula,
    limit: int | None = None,
    decision_budget: int | None = None,
    classify_budget: int | None = None,
) -> CoverEnumeration:
    """Enumerate covers through the SAT encoding: encode, enumerate models of
    G with blocking clauses, decode, classify. Exact iff the model enumeration
    completed below the limit."""
    enc = encode_covers_as_cnf(f)
    seen: set[str] = set()
    records: list[CoverRecord] = []

    def on_model(model):
        sigma = enc.decode(model)
        if sigma in seen:
            raise AssertionError("cover decoded twice; encoding is not injective")
        seen.add(sigma)
        return False  # do not store raw models

    result = slv.enumerate_models(enc.g, limit=limit, decision_budget=decision_budget,
                                  on_model=on_model)
    for sigma in sorted(seen):
        records.append(make_record(f, sigma, budget=classify_budget))
    return CoverEnumeration(records, result.complete)


def format_cover_line(record: CoverRecord) -> str:
    return " ".join(record.assignment) + " | " + record.kind.value


def parse_cover_line(line: str, num_vars: int) -> CoverRecord:
    body, _, kind = line.partition("|")
    tokens = body.split()
    if len(tokens) != num_vars:
        raise ValueError(f"expected {num_vars} tokens, got {len(tokens)}")
    sigma = "".join(tokens)
    bad = set(sigma) - {"0", "1", STAR}
    if bad:
        raise ValueError(f"invalid tokens {bad!r}")
    kind = kind.strip()
    kind_enum = CoverKind(kind) if kind else CoverKind.UNKNOWN
    return CoverRecord(sigma, kind_enum, sigma.count(STAR))
