"""Message-passing engines on CNF factor graphs.

Three engines share the adjacency workspace:

* sp_update / sp_run: survey propagation over per-edge reals eta in [0,1],
  with the cavity products computed over same-sign and opposite-sign clause
  neighborhoods, and sp_biases turning a fixed point into per-variable
  (p_plus, p_minus, p_star) cover-style marginals.
* cover_bp_update: belief propagation for the request/warning reformulation
  whose solutions are exactly the covers. Messages are triples indexed by
  (request, warning) in {(0,0), (0,1), (1,0)}, renormalized each sweep.
  With the (1,0)=(0,0) constraint on variable-to-clause messages, the
  rescaled clause-to-variable triples reproduce the eta iteration exactly.
* plain_bp_update / plain_bp_run: textbook sum-product for "assignment
  satisfies all clauses" with uniform priors, giving solution marginals.

All sweeps are synchronous (Jacobi); updates read only the previous state.
Products use the empty-product-equals-one convention via padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContradictionError
from .formula import FactorGraph

C00, C01, C10 = 0, 1, 2  # triple layout: (r,w) = (0,0), (0,1), (1,0)


class RunStatus(Enum):
    CONVERGED = "CONVERGED"
    UNCONVERGED = "UNCONVERGED"
    CONTRADICTION = "CONTRADICTION"


class _Workspace:
    """Padded scatter/gather layouts for vectorized sweeps.

    Variable-sign rows: one row per (variable, sign); exclusive products over
    a row give the same-sign cavity product, row totals of the opposite row
    give the opposite-sign product. Clause rows likewise give the product over
    V(a)\\x. Padding cells hold neutral elements so empty products are 1.
    """

    def __init__(self, g: FactorGraph):
        self.g = g
        L = g.num_edges
        n = g.num_vars

        self.vs_row = np.empty(L, dtype=np.int64)
        self.vs_col = np.empty(L, dtype=np.int64)
        self.vs_opp_row = np.empty(L, dtype=np.int64)
        fill = [0] * (2 * n)
        for e in range(L):
            var0 = g.edge_var[e] - 1
            r = 2 * var0 + (0 if g.edge_sign[e] > 0 else 1)
            self.vs_row[e] = r
            self.vs_opp_row[e] = r ^ 1
            self.vs_col[e] = fill[r]
            fill[r] += 1
        self.vs_shape = (2 * n, max(fill, default=0) or 1)

        self.v_row = np.empty(L, dtype=np.int64)
        self.v_col = np.empty(L, dtype=np.int64)
        fill = [0] * n
        for e in range(L):
            var0 = g.edge_var[e] - 1
            self.v_row[e] = var0
            self.v_col[e] = fill[var0]
            fill[var0] += 1
        self.v_shape = (n, max(fill, default=0) or 1)

        self.c_row = np.asarray(g.edge_clause, dtype=np.int64)
        self.c_col = np.empty(L, dtype=np.int64)
        fill = [0] * g.num_clauses
        for e in range(L):
            a = g.edge_clause[e]
            self.c_col[e] = fill[a]
            fill[a] += 1
        self.c_shape = (g.num_clauses, max(fill, default=0) or 1)

        self.edge_positive = np.array([s > 0 for s in g.edge_sign], dtype=bool)

    def scatter_vs(self, values, fill=1.0):
        M = np.full(self.vs_shape, fill)
        M[self.vs_row, self.vs_col] = values
        return M

    def scatter_v(self, values, fill=1.0):
        M = np.full(self.v_shape, fill)
        M[self.v_row, self.v_col] = values
        return M

    def scatter_c(self, values, fill=1.0):
        M = np.full(self.c_shape, fill)
        M[self.c_row, self.c_col] = values
        return M


def _workspace(g: FactorGraph) -> _Workspace:
    ws = getattr(g, "_prop_workspace", None)
    if ws is None:
        ws = _Workspace(g)
        g._prop_workspace = ws
    return ws


def _excl_and_total(M):
    """Per-row products excluding each column, plus full row products."""
    cp = np.cumprod(M, axis=1)
    total = cp[:, -1].copy()
    prefix = np.empty_like(M)
    prefix[:, 0] = 1.0
    prefix[:, 1:] = cp[:, :-1]
    rcp = np.cumprod(M[:, ::-1], axis=1)[:, ::-1]
    suffix = np.empty_like(M)
    suffix[:, -1] = 1.0
    suffix[:, :-1] = rcp[:, 1:]
    return prefix * suffix, total


@dataclass
class SPState:
    eta: np.ndarray  # one per directed clause->variable edge, in [0,1]
    iterations: int = 0
    residual: float = float("inf")


def sp_init(g: FactorGraph, mode: str = "random", seed: int = 0, value: float = 0.5) -> SPState:
    """Initial eta: 'random' draws U(0,1) per edge (seeded), 'uniform' uses a constant."""
    if mode == "random":
        rng = np.random.default_rng(seed)
        eta = rng.uniform(0.0, 1.0, size=g.num_edges)
    elif mode == "uniform":
        if not 0.0 <= value <= 1.0:
            raise ValueError("uniform eta must lie in [0,1]")
        eta = np.full(g.num_edges, float(value))
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return SPState(eta)


def _sp_cavity_ratios(ws: _Workspace, eta: np.ndarray) -> np.ndarray:
    """Per edge (x->a): Pi_u / (Pi_u + Pi_s + Pi_0) from the current eta."""
    one_minus = 1.0 - eta
    excl, total = _excl_and_total(ws.scatter_vs(one_minus))
    prod_same = excl[ws.vs_row, ws.vs_col]
    prod_opp = total[ws.vs_opp_row]
    pi_u = prod_same * (1.0 - prod_opp)
    pi_s = prod_opp * (1.0 - prod_same)
    pi_0 = prod_same * prod_opp
    denom = pi_u + pi_s + pi_0
    if np.any(denom == 0.0):
        bad = int(np.argmax(denom == 0.0))
        raise ContradictionError(
            f"all cavity weights vanish on edge {bad} "
            f"(variable {ws.g.edge_var[bad]}): conflicting hard messages"
        )
    return pi_u / denom


def sp_update(g: FactorGraph, state: SPState, damping: float = 0.0) -> SPState:
    """One synchronous survey-propagation sweep with optional damping."""
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0,1)")
    ws = _workspace(g)
    ratio = _sp_cavity_ratios(ws, state.eta)
    excl, _ = _excl_and_total(ws.scatter_c(ratio))
    eta_raw = excl[ws.c_row, ws.c_col]
    if damping:
        eta_new = (1.0 - damping) * eta_raw + damping * state.eta
    else:
        eta_new = eta_raw
    residual = float(np.max(np.abs(eta_new - state.eta))) if len(eta_new) else 0.0
    return SPState(eta_new, state.iterations + 1, residual)


@dataclass
class SPRunResult:
    status: RunStatus
    state: SPState
    iterations: int  # sweeps with residual >= eps before convergence
    residuals: list[float]


def sp_run(
    g: FactorGraph,
    eps: float = 1e-3,
    max_iters: int = 1000,
    damping: float = 0.0,
    init: str = "random",
    seed: int = 0,
    init_value: float = 0.5,
    state: SPState | None = None,
) -> SPRunResult:
    """Iterate sp_update until the max-norm residual drops below eps.

    The reported iteration count excludes the final sub-eps sweep, so a state
    that is already a fixed point converges with 0 iterations.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if state is None:
        state = sp_init(g, mode=init, seed=seed, value=init_value)
    residuals: list[float] = []
    for sweep in range(max_iters):
        try:
            state = sp_update(g, state, damping=damping)
        except ContradictionError:
            return SPRunResult(RunStatus.CONTRADICTION, state, sweep, residuals)
        residuals.append(state.residual)
        if state.residual < eps:
            return SPRunResult(RunStatus.CONVERGED, state, sweep, residuals)
    return SPRunResult(RunStatus.UNCONVERGED, state, max_iters, residuals)


@dataclass
class MarginalTable:
    """Per-variable probabilities; solution semantics keeps p_star at zero."""

    p_plus: np.ndarray
    p_minus: np.ndarray
    p_star: np.ndarray
    semantics: str  # "cover" | "solution"
    estimator: str  # "sp" | "bp" | "exact" | "sampled" | "peeled"
    complete: bool = True

    def __post_init__(self):
        total = self.p_plus + self.p_minus + self.p_star
        if len(total) and (
            np.any(self.p_plus < -1e-12)
            or np.any(self.p_minus < -1e-12)
            or np.any(self.p_star < -1e-12)
            or np.any(np.abs(total - 1.0) > 1e-9)
        ):
            raise ValueError("marginals must be non-negative and sum to 1 within 1e-9")

    @property
    def magnetization(self) -> np.ndarray:
        return self.p_plus - self.p_minus

    @property
    def num_vars(self) -> int:
        return len(self.p_plus)

    def to_csv(self, include_tags: bool = False) -> str:
        header = "var,p_plus,p_minus,p_star,m"
        if include_tags:
            header += ",semantics,estimator"
        lines = [header]
        m = self.magnetization
        for i in range(self.num_vars):
            row = f"{i + 1},{self.p_plus[i]!r},{self.p_minus[i]!r},{self.p_star[i]!r},{m[i]!r}"
            if include_tags:
                row += f",{self.semantics},{self.estimator}"
            lines.append(row)
        return "\n".join(lines) + "\n"


def magnetization(table: MarginalTable) -> np.ndarray:
    """Per-variable p_plus - p_minus, in [-1, 1]."""
    return table.magnetization


def sp_biases(g: FactorGraph, state: SPState) -> MarginalTable:
    """Cover-style marginals from a (converged) SP state.

    Per variable x with positive/negative clause sets C+(x), C-(x):
    Pi_plus = (1 - prod_{C+}(1-eta)) * prod_{C-}(1-eta), Pi_minus symmetric,
    Pi_star = prod_{C(x)}(1-eta), normalized to probabilities.
    """
    ws = _workspace(g)
    _, total = _excl_and_total(ws.scatter_vs(1.0 - state.eta))
    tot_pos = total[0::2]
    tot_neg = total[1::2]
    pi_plus = (1.0 - tot_pos) * tot_neg
    pi_minus = (1.0 - tot_neg) * tot_pos
    pi_star = tot_pos * tot_neg
    denom = pi_plus + pi_minus + pi_star
    if np.any(denom == 0.0):
        bad = int(np.argmax(denom == 0.0)) + 1
        raise ContradictionError(f"variable {bad}: all bias weights vanish")
    return MarginalTable(
        pi_plus / denom, pi_minus / denom, pi_star / denom, semantics="cover", estimator="sp"
    )


@dataclass
class CoverBPState:
    """Triple-valued messages for the request/warning problem, both directions."""

    var_to_clause: np.ndarray  # (L, 3)
    clause_to_var: np.ndarray  # (L, 3)
    iterations: int = 0
    residual: float = float("inf")


def _normalize_triples(t: np.ndarray, what: str) -> np.ndarray:
    s = t.sum(axis=1)
    if np.any(s == 0.0):
        raise ContradictionError(f"all-zero {what} message triple")
    return t / s[:, None]


def cover_bp_init(g: FactorGraph, seed: int = 0, constrain: bool = False) -> CoverBPState:
    """Random positive normalized triples; constrain forces the
    var-to-clause (1,0) and (0,0) entries equal (the reduction assumption)."""
    rng = np.random.default_rng(seed)
    v = rng.uniform(0.1, 1.0, size=(g.num_edges, 3))
    c = rng.uniform(0.1, 1.0, size=(g.num_edges, 3))
    if constrain:
        v[:, C10] = v[:, C00]
    return CoverBPState(_normalize_triples(v, "var"), _normalize_triples(c, "clause"))


def cover_bp_matched_init(g: FactorGraph, eta: np.ndarray) -> CoverBPState:
    """Variable-to-clause triples that mirror an SP state, so that after each
    sweep the rescaled clause-to-variable (1,0) entry equals the eta produced
    by the corresponding sp_update sweep."""
    ws = _workspace(g)
    ratio = _sp_cavity_ratios(ws, np.asarray(eta, dtype=float))
    v = np.empty((g.num_edges, 3))
    v[:, C00] = 1.0 - ratio
    v[:, C01] = ratio
    v[:, C10] = 1.0 - ratio
    v = _normalize_triples(v, "var")
    c = np.full((g.num_edges, 3), 1.0 / 3.0)  # overwritten by the first sweep
    return CoverBPState(v, c)


def cover_bp_update(g: FactorGraph, state: CoverBPState) -> CoverBPState:
    """One sweep: clause-level messages from the previous variable-level ones,
    then variable-level messages from the fresh clause-level ones. Each triple
    is renormalized; an all-zero triple is a contradiction."""
    ws = _workspace(g)
    v = state.var_to_clause

    q = ws.scatter_c(v[:, C01])  # lambda_{y->a}(0,1)
    excl_q, _ = _excl_and_total(q)
    c10 = excl_q[ws.c_row, ws.c_col]
    excl_s, _ = _excl_and_total(ws.scatter_c(v[:, C00] + v[:, C01]))
    s_prod = excl_s[ws.c_row, ws.c_col]
    c00 = s_prod - c10

    w = ws.scatter_c(v[:, C10] - v[:, C00], fill=0.0)
    kmax = ws.c_shape[1]
    corr = np.zeros(ws.c_shape)
    cols = np.arange(kmax)
    for e in range(kmax):
        for i in range(kmax):
            if i == e:
                continue
            mask = cols[(cols != e) & (cols != i)]
            prod = np.prod(q[:, mask], axis=1) if len(mask) else np.ones(ws.c_shape[0])
            corr[:, e] += w[:, i] * prod
    c01 = c00 + corr[ws.c_row, ws.c_col]

    c = np.stack([c00, c01, c10], axis=1)
    c = _normalize_triples(c, "clause")

    excl00, tot00 = _excl_and_total(ws.scatter_vs(c[:, C00]))
    excl01, tot01 = _excl_and_total(ws.scatter_vs(c[:, C01]))
    excl_a, tot_a = _excl_and_total(ws.scatter_vs(c[:, C00] + c[:, C10]))
    a_same = excl_a[ws.vs_row, ws.vs_col]
    a_opp = tot_a[ws.vs_opp_row]
    q_same = excl01[ws.vs_row, ws.vs_col]
    q_opp = tot01[ws.vs_opp_row]
    z_same = excl00[ws.vs_row, ws.vs_col]
    z_opp = tot00[ws.vs_opp_row]

    v10 = a_same * q_opp
    v01 = q_same * (a_opp - z_opp)
    v00 = (a_same - z_same) * q_opp + z_same * z_opp
    v_new = np.stack([v00, v01, v10], axis=1)
    v_new = _normalize_triples(v_new, "var")

    residual = max(
        float(np.max(np.abs(v_new - state.var_to_clause))) if v_new.size else 0.0,
        float(np.max(np.abs(c - state.clause_to_var))) if c.size else 0.0,
    )
    return CoverBPState(v_new, c, state.iterations + 1, residual)


def cover_bp_rescaled_eta(state: CoverBPState) -> np.ndarray:
    """eta recovered from clause-to-variable triples: (1,0) / ((1,0) + (0,0))."""
    c = state.clause_to_var
    denom = c[:, C10] + c[:, C00]
    if np.any(denom == 0.0):
        raise ContradictionError("rescaling undefined: (1,0) and (0,0) entries both zero")
    return c[:, C10] / denom


@dataclass
class PlainBPState:
    m1: np.ndarray  # clause->variable message that the variable is 1
    iterations: int = 0
    residual: float = float("inf")


def plain_bp_init(g: FactorGraph, mode: str = "uniform", seed: int = 0) -> PlainBPState:
    if mode == "uniform":
        m1 = np.full(g.num_edges, 0.5)
    elif mode == "random":
        rng = np.random.default_rng(seed)
        m1 = rng.uniform(0.0, 1.0, size=g.num_edges)
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return PlainBPState(m1)


def plain_bp_update(g: FactorGraph, state: PlainBPState, damping: float = 0.5) -> PlainBPState:
    """One sum-product sweep for clause-satisfaction factors, uniform prior."""
    if not 0.0 <= damping < 1.0:
        raise ValueError("damping must lie in [0,1)")
    ws = _workspace(g)
    m1 = state.m1
    excl1, _ = _excl_and_total(ws.scatter_v(m1))
    excl0, _ = _excl_and_total(ws.scatter_v(1.0 - m1))
    nu1_raw = excl1[ws.v_row, ws.v_col]
    nu0_raw = excl0[ws.v_row, ws.v_col]
    s = nu1_raw + nu0_raw
    if np.any(s == 0.0):
        raise ContradictionError("variable-to-clause message normalizes to zero")
    nu1 = nu1_raw / s
    nu_unsat = np.where(ws.edge_positive, 1.0 - nu1, nu1)
    exclp, _ = _excl_and_total(ws.scatter_c(nu_unsat))
    p = exclp[ws.c_row, ws.c_col]
    mu_sat = 1.0 / (2.0 - p)
    mu_unsat = (1.0 - p) * mu_sat
    m1_raw = np.where(ws.edge_positive, mu_sat, mu_unsat)
    if damping:
        m1_new = (1.0 - damping) * m1_raw + damping * m1
    else:
        m1_new = m1_raw
    residual = float(np.max(np.abs(m1_new - m1))) if len(m1_new) else 0.0
    return PlainBPState(m1_new, state.iterations + 1, residual)


@dataclass
class PlainBPRunResult:
    status: RunStatus
    state: PlainBPState
    iterations: int
    residuals: list[float]


def plain_bp_run(
    g: FactorGraph,
    eps: float = 1e-3,
    max_iters: int = 10000,
    damping: float = 0.5,
    init: str = "uniform",
    seed: int = 0,
    state: PlainBPState | None = None,
) -> PlainBPRunResult:
    """Iterate plain_bp_update; marginals may be read off the final state
    whether or not the run converged."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if state is None:
        state = plain_bp_init(g, mode=init, seed=seed)
    residuals: list[float] = []
    for sweep in range(max_iters):
        try:
            state = plain_bp_update(g, state, damping=damping)
        except ContradictionError:
            return PlainBPRunResult(RunStatus.CONTRADICTION, state, sweep, residuals)
        residuals.append(state.residual)
        if state.residual < eps:
            return PlainBPRunResult(RunStatus.CONVERGED, state, sweep, residuals)
    return PlainBPRunResult(RunStatus.UNCONVERGED, state, max_iters, residuals)


def plain_bp_marginals(g: FactorGraph, state: PlainBPState) -> MarginalTable:
    """Solution marginals from the current messages (converged or not)."""
    ws = _workspace(g)
    _, tot1 = _excl_and_total(ws.scatter_v(state.m1))
    _, tot0 = _excl_and_total(ws.scatter_v(1.0 - state.m1))
    denom = tot1 + tot0
    if np.any(denom == 0.0):
        bad = int(np.argmax(denom == 0.0)) + 1
        raise ContradictionError(f"variable {bad}: marginal normalizes to zero")
    p_plus = tot1 / denom
    return MarginalTable(
        p_plus, 1.0 - p_plus, np.zeros_like(p_plus), semantics="solution", estimator="bp"
    )


def residuals_to_csv(residuals: list[float]) -> str:
    lines = ["iter,residual"]
    for i, r in enumerate(residuals, start=1):
        lines.append(f"{i},{r!r}")
    return "\n".join(lines) + "\n"
