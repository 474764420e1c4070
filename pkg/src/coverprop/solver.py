"""Exact and stochastic SAT solving.

dpll_solve is a chronological-backtracking DPLL with two-watched-literal unit
propagation, lowest-index branching and value 1 tried first; it is meant as an
auditable oracle, not a competitive solver. enumerate_models finds all models
via blocking clauses. walksat is the standard pick-unsat-clause local search
with noise and periodic restarts.
"""

from __future__ import annotations

import heapq
import logging
import random
from dataclasses import dataclass, field
from enum import Enum

from .formula import Formula, evaluate

log = logging.getLogger(__name__)


class SolveStatus(Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    flips: int = 0
    restarts: int = 0


@dataclass
class SolveResult:
    status: SolveStatus
    model: list[int] | None = None
    stats: SolveStats = field(default_factory=SolveStats)


@dataclass
class ModelEnumeration:
    """All models found, with a flag telling whether the count is exact."""

    models: list[list[int]]
    complete: bool
    stats: SolveStats


class _Dpll:
    """Watched-literal DPLL over encoded literals (2*(v-1) positive, +1 negative)."""

    def __init__(self, num_vars: int):
        self.n = num_vars
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars)]
        self.units: list[int] = []  # encoded literals from length-1 clauses
        self.val = [0] * (num_vars + 1)  # 0 unassigned, 1 pos-true, 2 pos-false
        self.trail: list[int] = []
        self.stats = SolveStats()
        self.contradictory = False

    @staticmethod
    def encode(lit: int) -> int:
        return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)

    def add_clause(self, lits: list[int]) -> None:
        enc = [self.encode(l) for l in lits]
        if not enc:
            self.contradictory = True
            return
        if len(enc) == 1:
            self.units.append(enc[0])
            return
        ci = len(self.clauses)
        self.clauses.append(enc)
        self.watches[enc[0]].append(ci)
        self.watches[enc[1]].append(ci)

    def reset(self) -> None:
        for v in range(1, self.n + 1):
            self.val[v] = 0
        self.trail = []

    def _assign(self, enc_lit: int) -> None:
        self.val[(enc_lit >> 1) + 1] = 1 + (enc_lit & 1)
        self.trail.append(enc_lit)

    def _lit_value(self, enc_lit: int) -> int:
        """0 unassigned, 1 true, -1 false."""
        v = self.val[(enc_lit >> 1) + 1]
        if v == 0:
            return 0
        return 1 if v == 1 + (enc_lit & 1) else -1

    def _propagate(self, qhead: int) -> bool:
        """Process trail from qhead; returns False on conflict."""
        val = self.val
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            self.stats.propagations += 1
            false_lit = p ^ 1
            wl = watches[false_lit]
            new_wl = []
            i = 0
            nw = len(wl)
            conflict = False
            while i < nw:
                ci = wl[i]
                i += 1
                clause = clauses[ci]
                # ensure the false literal sits at position 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                fv = val[(first >> 1) + 1]
                if fv == 1 + (first & 1):  # other watch already true
                    new_wl.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lk = clause[k]
                    vk = val[(lk >> 1) + 1]
                    if vk == 0 or vk == 1 + (lk & 1):  # not false
                        clause[1], clause[k] = clause[k], clause[1]
                        watches[lk].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                new_wl.append(ci)
                if fv == 0:
                    val[(first >> 1) + 1] = 1 + (first & 1)
                    trail.append(first)
                else:  # conflict: first watch false as well
                    new_wl.extend(wl[i:])
                    conflict = True
                    break
            watches[false_lit] = new_wl
            if conflict:
                return False
        return True

    def solve(self, decision_budget: int | None = None) -> SolveStatus:
        """Search from a clean assignment. Leaves the model in self.val on SAT."""
        self.reset()
        if self.contradictory:
            return SolveStatus.UNSAT
        seen = set()
        for u in self.units:
            if u ^ 1 in seen:
                return SolveStatus.UNSAT
            if u not in seen:
                seen.add(u)
                self._assign(u)
        if not self._propagate(0):
            return SolveStatus.UNSAT

        # decision stack entries: (trail length before decision, encoded literal, tried_other)
        stack: list[list[int]] = []
        next_var = 1
        while True:
            v = next_var
            while v <= self.n and self.val[v] != 0:
                v += 1
            if v > self.n:
                return SolveStatus.SAT
            next_var = v
            if decision_budget is not None and self.stats.decisions >= decision_budget:
                return SolveStatus.UNKNOWN
            self.stats.decisions += 1
            dec = 2 * (v - 1)  # positive literal: value 1 first
            stack.append([len(self.trail), dec, 0, next_var])
            self._assign(dec)
            while not self._propagate(len(self.trail) - 1):
                # conflict: backtrack to most recent decision with an untried value
                while stack and stack[-1][2]:
                    mark = stack.pop()
                    for lit in self.trail[mark[0]:]:
                        self.val[(lit >> 1) + 1] = 0
                    del self.trail[mark[0]:]
                if not stack:
                    return SolveStatus.UNSAT
                mark = stack[-1]
                for lit in self.trail[mark[0]:]:
                    self.val[(lit >> 1) + 1] = 0
                del self.trail[mark[0]:]
                mark[2] = 1
                flipped = mark[1] ^ 1
                self._assign(flipped)
                next_var = mark[3]

    def model(self) -> list[int]:
        return [1 if self.val[v] == 1 else 0 for v in range(1, self.n + 1)]


class _Cdcl:
    """Conflict-driven variant used for the heavy enumerations.

    Watched-literal propagation over a literal-indexed truth array, 1UIP
    clause learning with local minimization, activity-based branching (ties
    broken by variable index), phase saving with value 1 as the initial
    phase, Luby restarts and periodic learned-clause reduction. Everything
    is deterministic for a fixed input.
    """

    LUBY_UNIT = 128

    def __init__(self, num_vars: int):
        self.n = num_vars
        self.clauses: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.born: dict[int, int] = {}
        self.watches: list[list[int]] = [[] for _ in range(2 * num_vars)]
        self.units: list[int] = []
        self.val_lit = [0] * (2 * num_vars)  # per encoded literal: 0 / 1 true / -1 false
        self.level = [0] * num_vars  # per variable (0-based)
        self.reason = [-1] * num_vars
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.saved_phase = bytearray(num_vars)  # parity bit of preferred literal
        self.activity = [0.0] * num_vars
        self.var_inc = 1.0
        self.heap: list[tuple[float, int]] = []
        self.in_heap = bytearray(num_vars)
        self.stats = SolveStats()
        self.conflicts = 0
        self.contradictory = False
        self.max_learnts = 4000

    @staticmethod
    def encode(lit: int) -> int:
        return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)

    def add_clause(self, lits: list[int]) -> None:
        enc = [self.encode(l) for l in lits]
        if not enc:
            self.contradictory = True
            return
        if len(enc) == 1:
            self.units.append(enc[0])
            return
        self._attach(enc)

    def _attach(self, enc: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(enc)
        self.watches[enc[0]].append(ci)
        self.watches[enc[1]].append(ci)
        return ci

    def _bump(self, v0: int) -> None:
        act = self.activity[v0] + self.var_inc
        self.activity[v0] = act
        if act > 1e100:
            scale = 1e-100
            for u in range(self.n):
                self.activity[u] *= scale
            self.var_inc *= scale
            self.heap = [
                (-self.activity[u], u) for u in range(self.n) if self.val_lit[2 * u] == 0
            ]
            heapq.heapify(self.heap)
            for u in range(self.n):
                self.in_heap[u] = self.val_lit[2 * u] == 0
            return
        heapq.heappush(self.heap, (-act, v0))
        self.in_heap[v0] = 1

    def _assign(self, enc_lit: int, reason: int) -> None:
        v0 = enc_lit >> 1
        self.val_lit[enc_lit] = 1
        self.val_lit[enc_lit ^ 1] = -1
        self.level[v0] = len(self.trail_lim)
        self.reason[v0] = reason
        self.trail.append(enc_lit)

    def _propagate(self, qhead: int) -> tuple[int, int]:
        """Returns (new qhead, conflicting clause index or -1)."""
        val = self.val_lit
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        trail_append = trail.append
        trail_lim_len = len(self.trail_lim)
        level = self.level
        reason = self.reason
        props = 0
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            false_lit = p ^ 1
            wl = watches[false_lit]
            i = j = 0
            nw = len(wl)
            while i < nw:
                ci = wl[i]
                i += 1
                clause = clauses[ci]
                if clause[0] == false_lit:
                    clause[0] = clause[1]
                    clause[1] = false_lit
                first = clause[0]
                fv = val[first]
                if fv == 1:
                    wl[j] = ci
                    j += 1
                    continue
                moved = False
                for k in range(2, len(clause)):
                    lk = clause[k]
                    if val[lk] >= 0:
                        clause[1] = lk
                        clause[k] = false_lit
                        watches[lk].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = ci
                j += 1
                if fv == 0:
                    v0 = first >> 1
                    val[first] = 1
                    val[first ^ 1] = -1
                    level[v0] = trail_lim_len
                    reason[v0] = ci
                    trail_append(first)
                else:
                    wl[j:] = wl[i:]
                    self.stats.propagations += props
                    return qhead, ci
            del wl[j:]
        self.stats.propagations += props
        return qhead, -1

    def _backtrack(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        mark = self.trail_lim[target_level]
        val = self.val_lit
        heap = self.heap
        in_heap = self.in_heap
        activity = self.activity
        for lit in self.trail[mark:]:
            v0 = lit >> 1
            self.saved_phase[v0] = lit & 1
            val[lit] = 0
            val[lit ^ 1] = 0
            self.reason[v0] = -1
            if not in_heap[v0]:
                heapq.heappush(heap, (-activity[v0], v0))
                in_heap[v0] = 1
        del self.trail[mark:]
        del self.trail_lim[target_level:]

    def _analyze(self, confl: int) -> tuple[list[int], int, int]:
        seen = bytearray(self.n)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        level = self.level
        trail = self.trail
        while True:
            clause = self.clauses[confl]
            for q in clause:
                if q == p:
                    continue
                v0 = q >> 1
                if not seen[v0] and level[v0] > 0:
                    seen[v0] = 1
                    self._bump(v0)
                    if level[v0] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            v0 = p >> 1
            idx -= 1
            seen[v0] = 0
            counter -= 1
            if counter == 0:
                learnt[0] = p ^ 1
                break
            confl = self.reason[v0]
        # local minimization: drop literals implied by the rest of the clause
        if len(learnt) > 1:
            lset = set()
            for q in learnt:
                lset.add(q >> 1)
            kept = [learnt[0]]
            for q in learnt[1:]:
                r = self.reason[q >> 1]
                if r == -1:
                    kept.append(q)
                    continue
                for other in self.clauses[r]:
                    if other == q ^ 1:
                        continue
                    ov = other >> 1
                    if level[ov] > 0 and ov not in lset:
                        kept.append(q)
                        break
            learnt = kept
        levels = set()
        for q in learnt[1:]:
            levels.add(level[q >> 1])
        lbd = len(levels) + 1
        if len(learnt) == 1:
            return learnt, 0, lbd
        best = 1
        for i in range(2, len(learnt)):
            if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                best = i
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1], lbd

    def _reduce_db(self) -> None:
        # called at decision level 0 only, so no learned clause is a reason
        learnt_ids = sorted(self.lbd, key=lambda ci: (self.lbd[ci], -self.born[ci]))
        keep_n = len(learnt_ids) // 2
        drop = {ci for ci in learnt_ids[keep_n:] if self.lbd[ci] > 3}
        if not drop:
            self.max_learnts = int(self.max_learnts * 1.5)
            return
        old = self.clauses
        remap: dict[int, int] = {}
        new_clauses = []
        for ci, clause in enumerate(old):
            if ci in drop:
                continue
            remap[ci] = len(new_clauses)
            new_clauses.append(clause)
        self.clauses = new_clauses
        self.lbd = {remap[ci]: v for ci, v in self.lbd.items() if ci not in drop}
        self.born = {remap[ci]: v for ci, v in self.born.items() if ci not in drop}
        self.watches = [[] for _ in range(2 * self.n)]
        for ci, clause in enumerate(self.clauses):
            self.watches[clause[0]].append(ci)
            self.watches[clause[1]].append(ci)
        for v0 in range(self.n):
            self.reason[v0] = -1  # only level-0 assignments exist here
        self.max_learnts = int(self.max_learnts * 1.1) + 1

    @staticmethod
    def _luby(i: int) -> int:
        size, seq = 1, 0
        while size < i + 1:
            seq += 1
            size = 2 * size + 1
        while size - 1 != i:
            size = (size - 1) >> 1
            seq -= 1
            i = i % size
        return 1 << seq

    def solve(self, decision_budget: int | None = None) -> SolveStatus:
        if self.contradictory:
            return SolveStatus.UNSAT
        self.trail.clear()
        self.trail_lim.clear()
        val = self.val_lit
        for v0 in range(self.n):
            if val[2 * v0]:
                self.saved_phase[v0] = 0 if val[2 * v0] == 1 else 1  # steer to last model
                val[2 * v0] = 0
                val[2 * v0 + 1] = 0
            self.reason[v0] = -1
        self.heap = [(-self.activity[v0], v0) for v0 in range(self.n)]
        heapq.heapify(self.heap)
        for v0 in range(self.n):
            self.in_heap[v0] = 1
        seen_units = set()
        for u in self.units:
            if u ^ 1 in seen_units:
                return SolveStatus.UNSAT
            if u not in seen_units:
                seen_units.add(u)
                self._assign(u, -1)
        qhead, confl = self._propagate(0)
        if confl != -1:
            return SolveStatus.UNSAT

        heap = self.heap
        restart_idx = 0
        conflicts_until_restart = self.LUBY_UNIT * self._luby(restart_idx)
        conflicts_here = 0
        while True:
            if confl == -1:
                v0 = -1
                while heap:
                    act, cand = heapq.heappop(heap)
                    if self.activity[cand] != -act:
                        continue  # stale duplicate; a fresher entry exists
                    self.in_heap[cand] = 0
                    if val[2 * cand] == 0:
                        v0 = cand
                        break
                if v0 == -1:
                    for cand in range(self.n):
                        if val[2 * cand] == 0:
                            v0 = cand
                            break
                    if v0 == -1:
                        return SolveStatus.SAT
                if decision_budget is not None and self.stats.decisions >= decision_budget:
                    return SolveStatus.UNKNOWN
                self.stats.decisions += 1
                self.trail_lim.append(len(self.trail))
                self._assign(2 * v0 + self.saved_phase[v0], -1)
                qhead, confl = self._propagate(len(self.trail) - 1)
                continue
            # conflict
            self.conflicts += 1
            conflicts_here += 1
            self.var_inc /= 0.95
            if not self.trail_lim:
                return SolveStatus.UNSAT
            learnt, back_level, lbd = self._analyze(confl)
            self._backtrack(back_level)
            if len(learnt) == 1:
                self.units.append(learnt[0])
                self._assign(learnt[0], -1)
            else:
                ci = self._attach(learnt)
                self.lbd[ci] = lbd
                self.born[ci] = self.conflicts
                self._assign(learnt[0], ci)
            qhead, confl = self._propagate(len(self.trail) - 1)
            if confl == -1 and conflicts_here >= conflicts_until_restart:
                self._backtrack(0)
                restart_idx += 1
                conflicts_here = 0
                conflicts_until_restart = self.LUBY_UNIT * self._luby(restart_idx)
                if len(self.lbd) > self.max_learnts:
                    self._reduce_db()
                qhead, confl = self._propagate(0)
                if confl != -1:
                    return SolveStatus.UNSAT

    def model(self) -> list[int]:
        return [1 if self.val_lit[2 * v0] == 1 else 0 for v0 in range(self.n)]


def _fresh_dpll(f: Formula) -> _Dpll:
    solver = _Dpll(f.num_vars)
    for clause in f.clauses:
        solver.add_clause(list(clause))
    return solver


def _fresh_cdcl(f: Formula) -> _Cdcl:
    solver = _Cdcl(f.num_vars)
    for clause in f.clauses:
        solver.add_clause(list(clause))
    return solver


def dpll_solve(f: Formula, budget: int | None = None) -> SolveResult:
    """Complete search without clause learning. SAT results carry a model
    re-checked with evaluate; UNKNOWN means the decision budget ran out,
    never an error."""
    solver = _fresh_dpll(f)
    status = solver.solve(budget)
    if status is SolveStatus.SAT:
        model = solver.model()
        assert evaluate(f, model), "DPLL produced a non-model"
        return SolveResult(SolveStatus.SAT, model, solver.stats)
    return SolveResult(status, None, solver.stats)


def cdcl_solve(f: Formula, budget: int | None = None) -> SolveResult:
    """Complete search with clause learning, for inputs the plain DPLL cannot
    finish in reasonable time (notably the cover encodings)."""
    solver = _fresh_cdcl(f)
    status = solver.solve(budget)
    if status is SolveStatus.SAT:
        model = solver.model()
        assert evaluate(f, model), "CDCL produced a non-model"
        return SolveResult(SolveStatus.SAT, model, solver.stats)
    return SolveResult(status, None, solver.stats)


def enumerate_models(
    f: Formula,
    limit: int | None = None,
    decision_budget: int | None = None,
    on_model=None,
    engine: str = "cdcl",
) -> ModelEnumeration:
    """All models of f via repeated solving with blocking clauses.

    Each found model is excluded by a clause negating it and the solver is
    restarted (learned clauses persist across restarts with the cdcl engine;
    engine='dpll' keeps the learning-free search). The enumeration is exact
    iff the final call proves UNSAT within budget and the limit was not hit.
    on_model, when given, is called with each model; models are also
    collected unless on_model returns False.
    """
    if engine == "cdcl":
        solver = _fresh_cdcl(f)
    elif engine == "dpll":
        solver = _fresh_dpll(f)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    models: list[list[int]] = []
    count = 0
    while True:
        if limit is not None and count >= limit:
            return ModelEnumeration(models, False, solver.stats)
        remaining = None if decision_budget is None else decision_budget - solver.stats.decisions
        if remaining is not None and remaining <= 0:
            return ModelEnumeration(models, False, solver.stats)
        status = solver.solve(remaining)
        if status is SolveStatus.UNSAT:
            return ModelEnumeration(models, True, solver.stats)
        if status is SolveStatus.UNKNOWN:
            return ModelEnumeration(models, False, solver.stats)
        model = solver.model()
        assert evaluate(f, model), "enumeration produced a non-model"
        count += 1
        keep = True
        if on_model is not None:
            keep = on_model(model) is not False
        if keep:
            models.append(model)
        if f.num_vars == 0:
            return ModelEnumeration(models, True, solver.stats)
        blocking = [(-v if model[v - 1] else v) for v in range(1, f.num_vars + 1)]
        solver.add_clause(blocking)


def walksat(
    f: Formula,
    max_flips: int = 100_000,
    noise: float = 0.5,
    seed: int = 0,
    restart_interval: int | None = None,
    init: list[int] | None = None,
) -> SolveResult:
    """WalkSAT/SKC: pick a random unsatisfied clause; flip a break-0 variable
    if one exists, else with probability `noise` a random clause variable,
    else the minimum-break variable. Restarts from a fresh random assignment
    every restart_interval flips (default 100*n).
    """
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must be in [0, 1]")
    n = f.num_vars
    if restart_interval is None:
        restart_interval = max(1, 100 * n)
    rng = random.Random(seed)
    stats = SolveStats()

    clauses = [list(c) for c in f.clauses]
    m = len(clauses)
    occ_true_when_1: list[list[int]] = [[] for _ in range(n + 1)]  # clauses with +v
    occ_true_when_0: list[list[int]] = [[] for _ in range(n + 1)]  # clauses with -v
    for ci, clause in enumerate(clauses):
        for lit in clause:
            (occ_true_when_1 if lit > 0 else occ_true_when_0)[abs(lit)].append(ci)

    def fresh_assignment():
        return [rng.randint(0, 1) for _ in range(n)]

    values = list(init) if init is not None else fresh_assignment()
    if init is not None and len(values) != n:
        raise ValueError("init length mismatch")

    n_true = [0] * m
    unsat: list[int] = []
    unsat_pos = [-1] * m

    def rebuild():
        unsat.clear()
        for ci, clause in enumerate(clauses):
            t = 0
            for lit in clause:
                if values[abs(lit) - 1] == (1 if lit > 0 else 0):
                    t += 1
            n_true[ci] = t
            if t == 0:
                unsat_pos[ci] = len(unsat)
                unsat.append(ci)
            else:
                unsat_pos[ci] = -1

    def flip(v):
        old = values[v - 1]
        values[v - 1] = 1 - old
        was_true = occ_true_when_1[v] if old == 1 else occ_true_when_0[v]
        now_true = occ_true_when_0[v] if old == 1 else occ_true_when_1[v]
        for ci in was_true:
            n_true[ci] -= 1
            if n_true[ci] == 0:
                unsat_pos[ci] = len(unsat)
                unsat.append(ci)
        for ci in now_true:
            if n_true[ci] == 0:
                p = unsat_pos[ci]
                last = unsat[-1]
                unsat[p] = last
                unsat_pos[last] = p
                unsat.pop()
                unsat_pos[ci] = -1
            n_true[ci] += 1

    def break_count(v):
        own = occ_true_when_1[v] if values[v - 1] == 1 else occ_true_when_0[v]
        b = 0
        for ci in own:
            if n_true[ci] == 1:
                b += 1
        return b

    rebuild()
    flips_this_try = 0
    while stats.flips < max_flips:
        if not unsat:
            assert evaluate(f, values)
            return SolveResult(SolveStatus.SAT, list(values), stats)
        if flips_this_try >= restart_interval:
            values = fresh_assignment()
            rebuild()
            flips_this_try = 0
            stats.restarts += 1
            continue
        clause = clauses[unsat[rng.randrange(len(unsat))]]
        best_v = None
        best_b = None
        for lit in clause:
            b = break_count(abs(lit))
            if b == 0:
                best_v, best_b = abs(lit), 0
                break
            if best_b is None or b < best_b:
                best_v, best_b = abs(lit), b
        if best_b != 0 and rng.random() < noise:
            best_v = abs(clause[rng.randrange(len(clause))])
        flip(best_v)
        stats.flips += 1
        flips_this_try += 1
    if not unsat:
        assert evaluate(f, values)
        return SolveResult(SolveStatus.SAT, list(values), stats)
    return SolveResult(SolveStatus.UNKNOWN, None, stats)


def sample_solutions(
    f: Formula,
    k: int,
    seed: int = 0,
    max_flips: int = 100_000,
    noise: float = 0.5,
    restart_interval: int | None = None,
) -> list[list[int]]:
    """k models from independent seeded walksat runs. Duplicates are allowed
    (and logged); fewer than k models are returned with a warning when runs
    fail. This approximates but does not guarantee uniform sampling, so any
    statistics derived from it inherit the local-search bias.
    """
    if k < 1:
        raise ValueError("sample count must be >= 1")
    models = []
    failures = 0
    for i in range(k):
        run_seed = derive_seed(seed, i)
        res = walksat(f, max_flips=max_flips, noise=noise, seed=run_seed,
                      restart_interval=restart_interval)
        if res.status is SolveStatus.SAT:
            models.append(res.model)
        else:
            failures += 1
    if failures:
        log.warning("sample_solutions: %d of %d runs exhausted their flip budget", failures, k)
    distinct = len({tuple(m) for m in models})
    if models and distinct < len(models):
        log.info("sample_solutions: %d duplicates among %d samples", len(models) - distinct, len(models))
    return models


def derive_seed(master: int, *indices: int) -> int:
    """Stable per-task RNG seed derived from a master seed and indices."""
    x = master & 0xFFFFFFFFFFFFFFFF
    for idx in indices:
        x ^= (idx + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
        x = (x * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 31
        x = (x * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
        x ^= x >> 29
    return x


def parse_model(text: str, num_vars: int) -> list[int]:
    """Read a model given as whitespace-separated signed literals (an optional
    trailing 0 is ignored); unmentioned variables default to 0."""
    values = [0] * num_vars
    for tok in text.split():
        lit = int(tok)
        if lit == 0:
            continue
        v = abs(lit)
        if v > num_vars:
            raise ValueError(f"literal {lit} out of range")
        values[v - 1] = 1 if lit > 0 else 0
    return values


def render_model(model: list[int]) -> str:
    return " ".join(str(v if model[v - 1] else -v) for v in range(1, len(model) + 1))
