import random

import pytest

from coverprop.formula import Formula, evaluate, generate_random_3sat
from coverprop.solver import (
    SolveStatus,
    dpll_solve,
    enumerate_models,
    parse_model,
    render_model,
    sample_solutions,
    walksat,
)

from util import EXAMPLE_A, EXAMPLE_B, brute_force_models


def test_dpll_worked_example_sat():
    res = dpll_solve(EXAMPLE_A)
    assert res.status is SolveStatus.SAT
    assert evaluate(EXAMPLE_A, res.model)
    # oracle: 5 solutions exist for this formula
    assert res.model in brute_force_models(EXAMPLE_A)


def test_dpll_unsat_and_empty():
    assert dpll_solve(Formula(1, ((1,), (-1,)))).status is SolveStatus.UNSAT
    res = dpll_solve(Formula(2, ()))
    assert res.status is SolveStatus.SAT and len(res.model) == 2


def test_dpll_budget_unknown():
    f = generate_random_3sat(40, 170, seed=1)
    res = dpll_solve(f, budget=1)
    assert res.status in (SolveStatus.UNKNOWN, SolveStatus.SAT, SolveStatus.UNSAT)
    tight = dpll_solve(generate_random_3sat(60, 258, seed=5), budget=2)
    assert tight.status is SolveStatus.UNKNOWN or tight.stats.decisions <= 2


def test_enumerate_worked_examples():
    res = enumerate_models(EXAMPLE_B)
    assert res.complete
    assert sorted(res.models) == [[0, 0, 0], [1, 1, 1]]

    res = enumerate_models(Formula(2, ((1, 2),)))
    assert sorted(res.models) == [[0, 1], [1, 0], [1, 1]]

    assert enumerate_models(Formula(1, ((1,), (-1,)))).models == []


def test_enumerate_respects_limit():
    res = enumerate_models(Formula(3, ()), limit=5)
    assert len(res.models) == 5 and not res.complete
    res = enumerate_models(Formula(3, ()))
    assert len(res.models) == 8 and res.complete


def test_enumerate_matches_bruteforce_on_random_formulas():
    rng = random.Random(42)
    for _ in range(60):
        n = rng.randint(2, 10)
        m = rng.randint(1, 5 * n)
        f = generate_random_3sat(max(3, n), m, rng.randrange(2**30))
        expected = brute_force_models(f)
        got = enumerate_models(f)
        assert got.complete
        assert sorted(got.models) == expected


def test_enumerate_engines_agree():
    rng = random.Random(77)
    for _ in range(30):
        n = rng.randint(3, 9)
        f = generate_random_3sat(n, rng.randint(2, 4 * n), rng.randrange(2**30))
        a = enumerate_models(f, engine="dpll")
        b = enumerate_models(f, engine="cdcl")
        assert a.complete and b.complete
        assert sorted(a.models) == sorted(b.models) == brute_force_models(f)


def test_cdcl_solve_agrees_with_dpll():
    from coverprop.solver import cdcl_solve

    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(10, 30)
        f = generate_random_3sat(n, rng.randint(n, round(5.5 * n)), rng.randrange(2**30))
        a = dpll_solve(f)
        b = cdcl_solve(f)
        assert a.status == b.status
        if b.status is SolveStatus.SAT:
            assert evaluate(f, b.model)


def test_enumerate_on_model_callback_streams():
    seen = []

    def collect(m):
        seen.append(m)
        return False

    res = enumerate_models(EXAMPLE_B, on_model=collect)
    assert res.models == []
    assert sorted(seen) == [[0, 0, 0], [1, 1, 1]]


def test_walksat_finds_solutions():
    res = walksat(EXAMPLE_A, max_flips=10_000, seed=3)
    assert res.status is SolveStatus.SAT
    assert evaluate(EXAMPLE_A, res.model)


def test_walksat_zero_flips_on_satisfying_init():
    res = walksat(EXAMPLE_B, max_flips=100, seed=0, init=[1, 1, 1])
    assert res.status is SolveStatus.SAT
    assert res.stats.flips == 0
    assert res.model == [1, 1, 1]


def test_walksat_unsat_hits_budget():
    res = walksat(Formula(1, ((1,), (-1,))), max_flips=200, seed=0)
    assert res.status is SolveStatus.UNKNOWN
    assert res.stats.flips == 200


def test_walksat_reproducible():
    f = generate_random_3sat(30, 120, seed=9)
    a = walksat(f, max_flips=50_000, noise=0.5, seed=17)
    b = walksat(f, max_flips=50_000, noise=0.5, seed=17)
    assert a.status == b.status
    assert a.model == b.model
    assert a.stats == b.stats


def test_walksat_validates_noise():
    with pytest.raises(ValueError):
        walksat(EXAMPLE_A, noise=1.5)


def test_sample_solutions_all_verify():
    f = generate_random_3sat(25, 90, seed=2)
    models = sample_solutions(f, 20, seed=1, max_flips=50_000)
    assert len(models) == 20
    assert all(evaluate(f, m) for m in models)


def test_sample_solutions_unique_solution_formula():
    # forces 1,1: clauses (x)(y) so the only model is [1, 1]
    f = Formula(2, ((1,), (2,)))
    models = sample_solutions(f, 5, seed=0, max_flips=1000)
    assert models == [[1, 1]] * 5


def test_sample_solutions_rejects_zero():
    with pytest.raises(ValueError):
        sample_solutions(EXAMPLE_A, 0)


def test_model_import_export_roundtrip():
    model = [1, 0, 1, 1]
    text = render_model(model)
    assert text == "1 -2 3 4"
    assert parse_model(text, 4) == model
    assert parse_model("1 -2 3 4 0", 4) == model
    with pytest.raises(ValueError):
        parse_model("9", 4)
