"""Survey-inspired decimation and the marginal estimators it is judged against.

Estimators come in two semantics. Solution semantics: frequencies over
satisfying assignments, exact (full enumeration) or sampled (walksat, with
its documented bias). Cover semantics: uniform frequencies over all covers
including the trivial one (exact), or frequencies over the covers reached by
peeling sampled solutions (the peeled estimator keeps duplicates, so it
weights covers by the solution mass that peels to them; the two cover
estimators measure different distributions and are tagged accordingly).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import covers as cov
from . import propagation as prop
from . import solver as slv
from .errors import ContradictionError
from .formula import Formula, build_factor_graph, evaluate, simplify


@dataclass
class DecimationConfig:
    fix_fraction: float = 0.01
    extreme_threshold: float = 0.0
    trivial_threshold: float = 0.01
    sp_eps: float = 1e-3
    sp_max_iters: int = 1000
    sp_damping: float = 0.0
    sp_init: str = "random"
    walksat_max_flips: int = 2_000_000
    walksat_noise: float = 0.5
    seed: int = 0
    budget_seconds: float | None = None

    def __post_init__(self):
        if not 0.0 < self.fix_fraction <= 1.0:
            raise ValueError("fix_fraction must be in (0, 1]")
        for name in ("extreme_threshold", "trivial_threshold"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class DecimationRound:
    round: int
    n_remaining: int
    sp_iters: int
    max_abs_m: float
    n_fixed: int
    status: str


@dataclass
class DecimationOutcome:
    status: str  # SOLVED | CONTRADICTION | SP_FAILED | BUDGET
    assignment: list[int] | None
    rounds: list[DecimationRound] = field(default_factory=list)
    residual: Formula | None = None

    def log_csv(self) -> str:
        lines = ["round,n_remaining,sp_iters,max_abs_m,n_fixed,status"]
        for r in self.rounds:
            lines.append(
                f"{r.round},{r.n_remaining},{r.sp_iters},{r.max_abs_m!r},{r.n_fixed},{r.status}"
            )
        return "\n".join(lines) + "\n"


def decimate(f: Formula, cfg: DecimationConfig) -> DecimationOutcome:
    """Fix the most magnetized variables round by round, simplify, rerun SP;
    hand the residual to walksat once the survey goes trivial.

    Solved outcomes are re-verified against the original formula. No
    backtracking: contradictions and walksat failures are reported as such.
    An unconverged SP run falls through to the walksat endgame rather than
    trusting unconverged biases.
    """
    start_time = time.monotonic()
    current = f
    to_orig = list(range(1, f.num_vars + 1))
    assignment: dict[int, int] = {}
    rounds: list[DecimationRound] = []
    round_no = 0

    def out_of_budget():
        return cfg.budget_seconds is not None and time.monotonic() - start_time > cfg.budget_seconds

    def finish_with_walksat(note: str) -> DecimationOutcome:
        res = slv.walksat(
            current,
            max_flips=cfg.walksat_max_flips,
            noise=cfg.walksat_noise,
            seed=slv.derive_seed(cfg.seed, 0xE4D, round_no),
        )
        if res.status is not slv.SolveStatus.SAT:
            rounds.append(DecimationRound(round_no, current.num_vars, 0, 0.0, 0, "SP_FAILED"))
            return DecimationOutcome("SP_FAILED", None, rounds, residual=current)
        for v in range(1, current.num_vars + 1):
            assignment[to_orig[v - 1]] = res.model[v - 1]
        full = [assignment.get(v, 0) for v in range(1, f.num_vars + 1)]
        assert evaluate(f, full), "decimation produced a non-solution"
        rounds.append(DecimationRound(round_no, current.num_vars, 0, 0.0, current.num_vars, note))
        return DecimationOutcome("SOLVED", full, rounds)

    while True:
        if out_of_budget():
            return DecimationOutcome("BUDGET", None, rounds, residual=current)
        if current.num_clauses == 0:
            # every clause satisfied; leftover variables are unconstrained
            for v in range(1, current.num_vars + 1):
                assignment.setdefault(to_orig[v - 1], 0)
            full = [assignment.get(v, 0) for v in range(1, f.num_vars + 1)]
            assert evaluate(f, full), "decimation produced a non-solution"
            rounds.append(DecimationRound(round_no, current.num_vars, 0, 0.0, current.num_vars, "FREE"))
            return DecimationOutcome("SOLVED", full, rounds)

        g = build_factor_graph(current)
        run = prop.sp_run(
            g,
            eps=cfg.sp_eps,
            max_iters=cfg.sp_max_iters,
            damping=cfg.sp_damping,
            init=cfg.sp_init,
            seed=slv.derive_seed(cfg.seed, round_no),
        )
        if run.status is prop.RunStatus.CONTRADICTION:
            rounds.append(
                DecimationRound(round_no, current.num_vars, run.iterations, 0.0, 0, "CONTRADICTION")
            )
            return DecimationOutcome("CONTRADICTION", None, rounds, residual=current)
        if run.status is prop.RunStatus.UNCONVERGED:
            return finish_with_walksat("WALKSAT_UNCONVERGED")

        try:
            table = prop.sp_biases(g, run.state)
        except ContradictionError:
            rounds.append(
                DecimationRound(round_no, current.num_vars, run.iterations, 0.0, 0, "CONTRADICTION")
            )
            return DecimationOutcome("CONTRADICTION", None, rounds, residual=current)
        m = table.magnetization
        max_abs = float(np.max(np.abs(m)))
        if max_abs < cfg.trivial_threshold:
            rounds.append(
                DecimationRound(round_no, current.num_vars, run.iterations, max_abs, 0, "TRIVIAL")
            )
            return finish_with_walksat("WALKSAT_ENDGAME")

        n_fix = max(1, int(np.ceil(cfg.fix_fraction * current.num_vars)))
        order = sorted(range(current.num_vars), key=lambda i: (-abs(m[i]), i))
        fixing: dict[int, int] = {}
        for i in order[:n_fix]:
            if abs(m[i]) <= 0.0 or abs(m[i]) < cfg.extreme_threshold:
                continue  # star-leaning or below threshold: leave unfixed
            fixing[i + 1] = 1 if m[i] > 0 else 0
        if not fixing:
            rounds.append(
                DecimationRound(round_no, current.num_vars, run.iterations, max_abs, 0, "NO_PICK")
            )
            return finish_with_walksat("WALKSAT_ENDGAME")

        try:
            res = simplify(current, fixing)
        except ContradictionError:
            rounds.append(
                DecimationRound(
                    round_no, current.num_vars, run.iterations, max_abs, len(fixing), "CONTRADICTION"
                )
            )
            return DecimationOutcome("CONTRADICTION", None, rounds, residual=current)
        for var, val in res.fixed.items():
            assignment[to_orig[var - 1]] = val
        to_orig = [to_orig[old - 1] for old in res.new_to_old]
        rounds.append(
            DecimationRound(
                round_no, current.num_vars, run.iterations, max_abs, len(res.fixed), "FIXED"
            )
        )
        current = res.formula
        round_no += 1


def _solution_table(counts: np.ndarray, total: int, estimator: str, complete: bool) -> prop.MarginalTable:
    if total == 0:
        raise ValueError("no solutions: solution marginals undefined")
    p_plus = counts / total
    return prop.MarginalTable(
        p_plus, 1.0 - p_plus, np.zeros_like(p_plus), semantics="solution",
        estimator=estimator, complete=complete,
    )


def exact_solution_marginals(f: Formula, model_cap: int = 100_000) -> prop.MarginalTable:
    """Frequencies over all satisfying assignments (uniform prior), via
    exhaustive enumeration. Raises if the formula is unsatisfiable or has
    more than model_cap models."""
    counts = np.zeros(f.num_vars)
    total = 0

    def on_model(model):
        nonlocal total
        counts[:] += model
        total += 1
        return False

    result = slv.enumerate_models(f, limit=model_cap + 1, on_model=on_model)
    if not result.complete:
        raise ValueError(f"model count exceeds cap {model_cap}")
    return _solution_table(counts, total, "exact", True)


def sampled_solution_marginals(
    f: Formula, k: int, seed: int = 0, max_flips: int = 100_000, noise: float = 0.5
) -> prop.MarginalTable:
    """Frequencies over k walksat samples; duplicates are kept. The estimate
    inherits whatever bias the sampler has relative to uniform."""
    models = slv.sample_solutions(f, k, seed=seed, max_flips=max_flips, noise=noise)
    if not models:
        raise ValueError("sampling produced no solutions")
    counts = np.sum(np.asarray(models, dtype=float), axis=0)
    return _solution_table(counts, len(models), "sampled", len(models) == k)


def _cover_table(records, n: int, estimator: str, complete: bool) -> prop.MarginalTable:
    if not records:
        raise ValueError("no covers: cover marginals undefined")
    p_plus = np.zeros(n)
    p_minus = np.zeros(n)
    for rec in records:
        sigma = rec if isinstance(rec, str) else rec.assignment
        for i, ch in enumerate(sigma):
            if ch == "1":
                p_plus[i] += 1
            elif ch == "0":
                p_minus[i] += 1
    p_plus /= len(records)
    p_minus /= len(records)
    return prop.MarginalTable(
        p_plus, p_minus, 1.0 - p_plus - p_minus, semantics="cover",
        estimator=estimator, complete=complete,
    )


def exact_cover_marginals(
    f: Formula,
    method: str = "sat",
    limit: int | None = None,
    decision_budget: int | None = None,
) -> prop.MarginalTable:
    """Uniform frequencies over all covers (trivial cover included)."""
    if method == "bruteforce":
        records = cov.enumerate_covers_bruteforce(f)
        complete = True
    elif method == "sat":
        enum = cov.enumerate_covers_sat(f, limit=limit, decision_budget=decision_budget)
        records, complete = enum.records, enum.complete
        if not complete:
            raise ValueError("cover enumeration incomplete; exact marginals unavailable")
    else:
        raise ValueError(f"unknown method {method!r}")
    return _cover_table(records, f.num_vars, "exact", complete)


def peeled_cover_marginals(
    f: Formula,
    k: int,
    seed: int = 0,
    policy: str = "lowest",
    max_flips: int = 100_000,
    noise: float = 0.5,
    solutions: list[list[int]] | None = None,
) -> prop.MarginalTable:
    """Frequencies over the covers obtained by star-propagating sampled
    solutions; duplicates kept, trivial-cover outcomes included. Pass
    `solutions` to peel a fixed solution set instead of sampling."""
    if solutions is None:
        solutions = slv.sample_solutions(f, k, seed=seed, max_flips=max_flips, noise=noise)
    if not solutions:
        raise ValueError("no solutions to peel")
    peeled = []
    for i, model in enumerate(solutions):
        start = cov.assignment_to_generalized(model)
        res = cov.star_propagate(f, start, policy=policy,
                                 seed=slv.derive_seed(seed, 0x9EE1, i), record_trace=False)
        peeled.append(res.cover)
    return _cover_table(peeled, f.num_vars, "peeled", len(peeled) == k)
