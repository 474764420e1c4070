"""Shared test fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's optimized paths: model
enumeration scans all 2^n assignments with `evaluate`, cover enumeration
scans all 3^n generalized assignments with `is_cover`. Expected values in the
test modules were computed with these oracles and then frozen.
"""

from __future__ import annotations

import itertools
import random

from coverprop.formula import Formula
from coverprop import covers as cov
from coverprop.formula import evaluate

# Three-clause formula with solutions {000, 001, 010, 100, 111} and covers
# {111, ***}; starring any single variable of 111 breaks support of the rest.
EXAMPLE_A = Formula(3, ((1, -2, -3), (-1, 2, -3), (-1, -2, 3)))

# Four-clause formula with solutions {000, 111} and covers {000, 111, ***}.
EXAMPLE_B = Formula(3, ((1, 2, -3), (-1, 2), (-2, 3), (1, -3)))


def brute_force_models(f: Formula) -> list[list[int]]:
    """All satisfying assignments by scanning 2^n candidates."""
    out = []
    for bits in itertools.product((0, 1), repeat=f.num_vars):
        a = list(bits)
        if evaluate(f, a):
            out.append(a)
    return out


def brute_force_covers(f: Formula) -> list[str]:
    """All covers by scanning 3^n generalized assignments with is_cover."""
    out = []
    for chars in itertools.product("01*", repeat=f.num_vars):
        sigma = "".join(chars)
        if cov.is_cover(f, sigma):
            out.append(sigma)
    return sorted(out)


def random_tree_formula(n_target: int, seed: int, min_clause=2, max_clause=3) -> Formula:
    """Random formula whose factor graph is a tree, with no unit clauses.

    Grows clause by clause: the first clause takes fresh variables only; each
    later clause reuses exactly one existing variable and takes the rest
    fresh, which keeps the bipartite graph acyclic and connected.
    """
    if n_target < max_clause:
        raise ValueError("n_target too small")
    rng = random.Random(seed)
    clauses = []
    next_var = 1

    def fresh(k):
        nonlocal next_var
        vs = list(range(next_var, next_var + k))
        next_var += k
        return vs

    k = rng.randint(min_clause, max_clause)
    clauses.append(fresh(k))
    while True:
        k = rng.randint(min_clause, max_clause)
        if next_var - 1 + k - 1 > n_target:
            break
        reused = rng.randint(1, next_var - 1)
        clauses.append([reused] + fresh(k - 1))
    signed = tuple(
        tuple(v if rng.random() < 0.5 else -v for v in clause) for clause in clauses
    )
    return Formula(next_var - 1, signed)


def random_small_formula(rng: random.Random, n_lo=4, n_hi=12, alpha_lo=1.0, alpha_hi=6.0) -> Formula:
    from coverprop.formula import generate_random_3sat

    n = rng.randint(n_lo, n_hi)
    alpha = rng.uniform(alpha_lo, alpha_hi)
    m = max(1, round(alpha * n))
    return generate_random_3sat(n, m, rng.randrange(2**60))
