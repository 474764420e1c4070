"""Experiment harness: peeling trajectories, the cover phase transition,
cover growth with formula size, and magnetization scatter comparisons.

Every run emits CSV with the full parameter set as '# key=value' header
comments, so an artifact is reproducible from its own header plus the code.
Trials derive their RNG streams from (master seed, trial index); aggregation
is done in trial order, so results do not depend on worker scheduling.
Budget-capped runs record which trials completed; without a budget cap the
output is bit-for-bit a function of the parameters.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import covers as cov
from . import pipelines as pipe
from . import propagation as prop
from . import solver as slv
from .formula import Formula, build_factor_graph, generate_random_3sat

log = logging.getLogger(__name__)


@dataclass
class ExperimentSpec:
    kind: str  # peeling | transition | growth | scatter | decimation-bench
    params: dict

    def __post_init__(self):
        if self.params.get("trials", 1) < 1:
            raise ValueError("trials must be >= 1")
        if self.params.get("alpha", 1.0) <= 0:
            raise ValueError("alpha must be positive")


def _header(params: dict) -> list[str]:
    return [f"# {k}={params[k]}" for k in sorted(params)]


def _csv(params: dict, columns: str, rows: list[str], trailer: list[str] | None = None) -> str:
    lines = _header(params) + [columns] + rows + (trailer or [])
    return "\n".join(lines) + "\n"


def _map_trials(worker, args_list, threads: int):
    """Run worker over args preserving order; processes when threads > 1."""
    if threads <= 1 or len(args_list) <= 1:
        return [worker(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, args_list, chunksize=1))


def _sample_satisfiable(n, m, seed, k, max_flips, noise, max_regen=5):
    """Generate a formula and sample solutions, regenerating (with a new
    derived seed) when the sampler finds nothing; returns (formula, models,
    discarded) where discarded counts regenerated formulas."""
    discarded = 0
    for attempt in range(max_regen):
        f = generate_random_3sat(n, m, slv.derive_seed(seed, attempt))
        models = slv.sample_solutions(
            f, k, seed=slv.derive_seed(seed, attempt, 1), max_flips=max_flips, noise=noise
        )
        if models:
            return f, models, discarded
        discarded += 1
    return None, [], discarded


# ---------------------------------------------------------------- peeling

@dataclass
class PeelingRun:
    params: dict
    rows: list[tuple]  # (sample, step, stars, unsupported, terminal)
    trivial_fraction: float
    samples_used: int

    def to_csv(self) -> str:
        rows = [",".join(str(x) for x in r) for r in self.rows]
        trailer = [
            f"# samples_used={self.samples_used}",
            f"# trivial_fraction={self.trivial_fraction!r}",
        ]
        return _csv(self.params, "sample,step,stars,unsupported,terminal", rows, trailer)


def run_peeling(
    n: int,
    alpha: float,
    samples: int,
    seed: int,
    noise: float = 0.5,
    max_flips: int | None = None,
    policy: str = "lowest",
) -> PeelingRun:
    """Peel walksat samples of one random formula and trace (stars,
    unsupported) per step. Failed sampler runs shrink the sample count and
    are logged; the trivial/non-trivial split is reported, not asserted."""
    m = round(alpha * n)
    if max_flips is None:
        max_flips = 500 * n
    params = dict(kind="peeling", n=n, alpha=alpha, m=m, samples=samples, seed=seed,
                  noise=noise, max_flips=max_flips, policy=policy)
    f, models, discarded = _sample_satisfiable(n, m, seed, samples, max_flips, noise)
    params["formulas_discarded"] = discarded
    if f is None:
        log.warning("peeling: sampler failed on every formula attempt")
        return PeelingRun(params, [], float("nan"), 0)
    rows = []
    trivial = 0
    for i, model in enumerate(models):
        res = cov.star_propagate(f, cov.assignment_to_generalized(model), policy=policy,
                                 seed=slv.derive_seed(seed, 0xBEE1, i))
        terminal = "TRIVIAL" if res.cover.count(cov.STAR) == f.num_vars else "NONTRIVIAL"
        trivial += terminal == "TRIVIAL"
        for step, (stars, unsupported) in enumerate(res.trace):
            rows.append((i, step, stars, unsupported, terminal))
    frac = trivial / len(models) if models else float("nan")
    return PeelingRun(params, rows, frac, len(models))


# ------------------------------------------------------------- transition

def _transition_trial(args):
    n, m, trial_seed, limit, decision_budget = args
    f = generate_random_3sat(n, m, trial_seed)
    enum = cov.enumerate_covers_sat(f, limit=limit, decision_budget=decision_budget)
    nontrivial = sum(1 for r in enum.records if r.nontrivial)
    false = sum(1 for r in enum.records if r.kind is cov.CoverKind.FALSE_COVER)
    return enum.complete, nontrivial, false


@dataclass
class TransitionRun:
    params: dict
    rows: list[tuple]  # (alpha, n, formulas, complete, p_nontrivial, mean_nontrivial, mean_false)

    def to_csv(self) -> str:
        rows = [",".join(repr(x) if isinstance(x, float) else str(x) for x in r) for r in self.rows]
        return _csv(self.params, "alpha,n,formulas,complete,p_nontrivial,mean_nontrivial,mean_false", rows)


def run_transition(
    n: int,
    alphas: list[float],
    formulas_per_point: int,
    seed: int,
    limit: int | None = None,
    decision_budget: int | None = 2_000_000,
    threads: int = 1,
    budget_seconds: float | None = None,
) -> TransitionRun:
    """Cover existence probability and mean counts per clause ratio, via the
    SAT-encoded enumeration. Incomplete enumerations are counted separately
    and excluded from the exact statistics."""
    params = dict(kind="transition", n=n, alphas=list(alphas), formulas_per_point=formulas_per_point,
                  seed=seed, limit=limit, decision_budget=decision_budget)
    start = time.monotonic()
    rows = []
    for pi, alpha in enumerate(alphas):
        m = round(alpha * n)
        args = [
            (n, m, slv.derive_seed(seed, pi, i), limit, decision_budget)
            for i in range(formulas_per_point)
        ]
        if budget_seconds is not None and time.monotonic() - start > budget_seconds:
            rows.append((alpha, n, 0, 0, float("nan"), float("nan"), float("nan")))
            continue
        results = _map_trials(_transition_trial, args, threads)
        complete = [(nt, fc) for ok, nt, fc in results if ok]
        n_complete = len(complete)
        if n_complete:
            p_nontrivial = sum(1 for nt, _ in complete if nt > 0) / n_complete
            mean_nontrivial = sum(nt for nt, _ in complete) / n_complete
            mean_false = sum(fc for _, fc in complete) / n_complete
        else:
            p_nontrivial = mean_nontrivial = mean_false = float("nan")
        rows.append((alpha, n, len(results), n_complete, p_nontrivial, mean_nontrivial, mean_false))
    return TransitionRun(params, rows)


# ----------------------------------------------------------------- growth

def _growth_trial(args):
    n, m, trial_seed, samples, max_flips, noise = args
    f, models, discarded = _sample_satisfiable(n, m, trial_seed, samples, max_flips, noise)
    if f is None:
        return 0, 0, discarded
    nontrivial = 0
    for i, model in enumerate(models):
        res = cov.star_propagate(f, cov.assignment_to_generalized(model),
                                 seed=slv.derive_seed(trial_seed, i), record_trace=False)
        nontrivial += res.cover.count(cov.STAR) != f.num_vars
    return len(models), nontrivial, discarded


@dataclass
class GrowthRun:
    params: dict
    rows: list[tuple]  # (n, samples, nontrivial, p, expected_solutions, scaled)
    fit_rate: float | None

    def to_csv(self) -> str:
        rows = [",".join(repr(x) if isinstance(x, float) else str(x) for x in r) for r in self.rows]
        trailer = [f"# fit_rate_per_var={self.fit_rate!r}"]
        return _csv(self.params, "n,samples,nontrivial,p,expected_solutions,scaled", rows, trailer)


def expected_solution_count(n: int, alpha: float) -> float:
    """First-moment estimate (2 * (7/8)^alpha)^n of the solution count of a
    random 3-SAT formula at ratio alpha."""
    return (2.0 * (7.0 / 8.0) ** alpha) ** n


def run_growth(
    n_grid: list[int],
    alpha: float,
    formulas: int,
    samples_per_formula: int,
    seed: int,
    noise: float = 0.5,
    max_flips: int | None = None,
    threads: int = 1,
) -> GrowthRun:
    """Fraction of sampled solutions peeling to non-trivial covers, scaled by
    the expected solution count; reports the exponential fit of the scaled
    counts (censored zero-count points excluded)."""
    params = dict(kind="growth", n_grid=list(n_grid), alpha=alpha, formulas=formulas,
                  samples_per_formula=samples_per_formula, seed=seed, noise=noise,
                  max_flips=max_flips)
    rows = []
    xs, ys = [], []
    for ni, n in enumerate(n_grid):
        m = round(alpha * n)
        flips = max_flips if max_flips is not None else 500 * n
        args = [
            (n, m, slv.derive_seed(seed, ni, i), samples_per_formula, flips, noise)
            for i in range(formulas)
        ]
        results = _map_trials(_growth_trial, args, threads)
        samples = sum(r[0] for r in results)
        nontrivial = sum(r[1] for r in results)
        p = nontrivial / samples if samples else float("nan")
        scale = expected_solution_count(n, alpha)
        scaled = p * scale if samples else float("nan")
        rows.append((n, samples, nontrivial, p, scale, scaled))
        if samples and nontrivial > 0:
            xs.append(n)
            ys.append(math.log(scaled))
    fit_rate = None
    if len(xs) >= 2:
        slope = np.polyfit(np.asarray(xs, dtype=float), np.asarray(ys), 1)[0]
        fit_rate = math.exp(slope)
    return GrowthRun(params, rows, fit_rate)


# ---------------------------------------------------------------- scatter

@dataclass
class ScatterRun:
    params: dict
    rows: list[tuple]  # (var, m_x, m_y) with '' for absent estimators

    def to_csv(self) -> str:
        rows = []
        for var, mx, my in self.rows:
            sx = "" if mx is None else repr(float(mx))
            sy = "" if my is None else repr(float(my))
            rows.append(f"{var},{sx},{sy}")
        return _csv(self.params, "var,m_x,m_y", rows)


SCATTER_KINDS = ("sp-vs-cover", "cover-vs-solution", "bp-vs-solution")


def run_scatter(
    n: int,
    alpha: float,
    seed: int,
    which: str,
    exact_var_cap: int = 60,
    samples: int = 500,
    noise: float = 0.5,
    max_flips: int | None = None,
    sp_eps: float = 1e-3,
    sp_max_iters: int = 1000,
    bp_max_iters: int = 10000,
    bp_damping: float = 0.5,
    model_cap: int = 200_000,
    cover_decision_budget: int | None = 20_000_000,
) -> ScatterRun:
    """Per-variable magnetization pairs for one random formula.

    Cover and solution marginals are exact (enumeration) up to exact_var_cap
    variables, and estimated (peeled / sampled) beyond that; BP runs to the
    10000-iteration cutoff and uses whatever state it reached. A failed
    estimator leaves its column absent rather than aborting the run.
    """
    if which not in SCATTER_KINDS:
        raise ValueError(f"which must be one of {SCATTER_KINDS}")
    m = round(alpha * n)
    if max_flips is None:
        max_flips = 500 * n
    params = dict(kind="scatter", which=which, n=n, alpha=alpha, m=m, seed=seed,
                  exact_var_cap=exact_var_cap, samples=samples, noise=noise,
                  max_flips=max_flips, sp_eps=sp_eps, sp_max_iters=sp_max_iters,
                  bp_max_iters=bp_max_iters, bp_damping=bp_damping)
    f = generate_random_3sat(n, m, slv.derive_seed(seed, 0xF0))
    exact = n <= exact_var_cap
    params["exact_oracles"] = exact

    def sp_m():
        g = build_factor_graph(f)
        run = prop.sp_run(g, eps=sp_eps, max_iters=sp_max_iters, seed=slv.derive_seed(seed, 1))
        if run.status is not prop.RunStatus.CONVERGED:
            return None
        return prop.sp_biases(g, run.state).magnetization

    def bp_m():
        g = build_factor_graph(f)
        run = prop.plain_bp_run(g, max_iters=bp_max_iters, damping=bp_damping,
                                init="random", seed=slv.derive_seed(seed, 2))
        if run.status is prop.RunStatus.CONTRADICTION:
            return None
        return prop.plain_bp_marginals(g, run.state).magnetization

    def cover_m():
        try:
            if exact:
                return exact_cover_m()
            return pipe.peeled_cover_marginals(
                f, samples, seed=slv.derive_seed(seed, 3), max_flips=max_flips, noise=noise
            ).magnetization
        except (ValueError, RuntimeError) as exc:
            log.warning("cover estimator failed: %s", exc)
            return None

    def exact_cover_m():
        return pipe.exact_cover_marginals(
            f, method="sat", decision_budget=cover_decision_budget
        ).magnetization

    def solution_m():
        try:
            if exact:
                return pipe.exact_solution_marginals(f, model_cap=model_cap).magnetization
            return pipe.sampled_solution_marginals(
                f, samples, seed=slv.derive_seed(seed, 4), max_flips=max_flips, noise=noise
            ).magnetization
        except (ValueError, RuntimeError) as exc:
            log.warning("solution estimator failed: %s", exc)
            return None

    if which == "sp-vs-cover":
        mx, my = sp_m(), cover_m()
    elif which == "cover-vs-solution":
        mx, my = cover_m(), solution_m()
    else:
        mx, my = bp_m(), solution_m()
    rows = []
    for v in range(1, n + 1):
        rows.append((v, None if mx is None else mx[v - 1], None if my is None else my[v - 1]))
    return ScatterRun(params, rows)
