import random

import pytest

from coverprop.errors import ContradictionError, ParseError
from coverprop.formula import (
    Formula,
    FormulaWarning,
    build_factor_graph,
    evaluate,
    generate_random_3sat,
    parse_dimacs,
    render_dimacs,
    simplify,
)

from util import EXAMPLE_A, EXAMPLE_B, brute_force_models


def test_parse_basic():
    f = parse_dimacs("p cnf 3 2\n1 -2 0\n2 3 0\n")
    assert f.num_vars == 3
    assert f.clauses == ((1, -2), (2, 3))


def test_parse_empty_body():
    f = parse_dimacs("p cnf 1 0\n")
    assert f.num_vars == 1
    assert f.clauses == ()


def test_parse_clause_count_mismatch_body_wins():
    text = "p cnf 3 4\n1 2 0\n2 3 0\n-1 3 0\n"
    with pytest.warns(FormulaWarning, match="declares 4"):
        f = parse_dimacs(text)
    assert f.num_clauses == 3


def test_parse_multiline_clause_and_comments():
    f = parse_dimacs("c hi\np cnf 4 1\n1 2\n3 -4 0\n")
    assert f.clauses == ((1, 2, 3, -4),)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ParseError, match="line 1"):
        parse_dimacs("p dimacs 3 1\n1 0\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_dimacs("p cnf 2 1\n1 5 0\n")
    with pytest.raises(ParseError, match="unterminated"):
        parse_dimacs("p cnf 2 1\n1 2\n")
    with pytest.raises(ParseError, match="header"):
        parse_dimacs("1 2 0\n")


def test_parse_tautology_tolerated_with_warning():
    with pytest.warns(FormulaWarning, match="tautological"):
        f = parse_dimacs("p cnf 2 1\n1 -1 2 0\n")
    assert f.clauses == ((1, -1, 2),)


def test_parse_duplicate_literal_dropped_with_warning():
    with pytest.warns(FormulaWarning, match="repeated"):
        f = parse_dimacs("p cnf 2 1\n1 1 2 0\n")
    assert f.clauses == ((1, 2),)


def test_roundtrip_random_formulas():
    for seed in range(20):
        f = generate_random_3sat(10, 30, seed)
        assert parse_dimacs(render_dimacs(f)) == f


def test_render_exact_format():
    f = Formula(3, ((1, -2), (2, 3)))
    assert render_dimacs(f) == "p cnf 3 2\n1 -2 0\n2 3 0\n"


def test_formula_invariants():
    with pytest.raises(ValueError):
        Formula(2, ((),))
    with pytest.raises(ValueError):
        Formula(2, ((1, 1),))
    with pytest.raises(ValueError):
        Formula(2, ((1, 3),))
    f = Formula(2, ((1, -2), (2,)))
    assert f.num_literals == 3


def test_generator_shape_and_determinism():
    f = generate_random_3sat(5000, 21000, seed=7)
    assert f.num_vars == 5000 and f.num_clauses == 21000
    assert all(len(set(abs(l) for l in c)) == 3 for c in f.clauses)
    assert generate_random_3sat(50, 210, seed=3) == generate_random_3sat(50, 210, seed=3)
    assert generate_random_3sat(50, 210, seed=3) != generate_random_3sat(50, 210, seed=4)


def test_generator_one_clause_three_vars():
    f = generate_random_3sat(3, 1, seed=0)
    assert sorted(abs(l) for l in f.clauses[0]) == [1, 2, 3]


def test_generator_rejects_small_n():
    with pytest.raises(ValueError):
        generate_random_3sat(2, 1, seed=0)


def test_generator_sign_pattern_frequencies():
    # over >= 10^4 clauses, each of the 8 sign patterns is ~1/8 within 3 sigma
    m = 16000
    f = generate_random_3sat(100, m, seed=11)
    counts = {}
    for clause in f.clauses:
        pattern = tuple(l > 0 for l in sorted(clause, key=abs))
        counts[pattern] = counts.get(pattern, 0) + 1
    p = 1 / 8
    sigma = (m * p * (1 - p)) ** 0.5
    assert len(counts) == 8
    for pattern, c in counts.items():
        assert abs(c - m * p) <= 3.3 * sigma, (pattern, c)


def test_evaluate_worked_example():
    # brute force over all 8 assignments: EXAMPLE_A has 5 solutions
    models = brute_force_models(EXAMPLE_A)
    assert models == [[0, 0, 0], [0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 1]]
    assert evaluate(EXAMPLE_A, [1, 1, 1])
    assert evaluate(EXAMPLE_A, [1, 0, 0])
    assert not evaluate(EXAMPLE_A, [0, 1, 1])


def test_evaluate_empty_formula_and_length_check():
    assert evaluate(Formula(2, ()), [0, 1])
    with pytest.raises(ValueError):
        evaluate(Formula(2, ()), [0])


def test_simplify_worked_example():
    # fixing x=1 in EXAMPLE_A leaves (y or -z) and (-y or z) over {y, z}
    res = simplify(EXAMPLE_A, {1: 1})
    assert res.fixed == {1: 1}
    assert res.new_to_old == [2, 3]
    assert res.formula == Formula(2, ((1, -2), (-1, 2)))


def test_simplify_identity_and_idempotence():
    assert simplify(EXAMPLE_B, {}).formula == EXAMPLE_B
    rng = random.Random(5)
    for _ in range(30):
        f = generate_random_3sat(12, rng.randint(10, 50), rng.randrange(2**30))
        fix = {rng.randint(1, 12): rng.randint(0, 1)}
        try:
            once = simplify(f, fix)
        except ContradictionError:
            continue
        again = simplify(once.formula, {})
        assert again.formula == once.formula
        assert again.fixed == {}


def test_simplify_contradiction():
    with pytest.raises(ContradictionError):
        simplify(Formula(1, ((1,), (-1,))), {})


def test_simplify_unit_propagation_chains():
    # (x)(x->y)(y->z) forces all three
    f = Formula(3, ((1,), (-1, 2), (-2, 3)))
    res = simplify(f, {})
    assert res.fixed == {1: 1, 2: 1, 3: 1}
    assert res.formula.num_vars == 0
    assert res.formula.num_clauses == 0


def test_simplify_renumbering_csv():
    res = simplify(EXAMPLE_A, {2: 1})
    assert res.renumbering_csv().splitlines()[0] == "old_index,new_index"
    assert res.renumbering_csv().splitlines()[1:] == ["1,1", "3,2"]


def test_factor_graph_worked_example():
    g = build_factor_graph(EXAMPLE_B)
    assert g.num_edges == EXAMPLE_B.num_literals == 9
    assert g.clauses_of(1) == [(0, 1), (1, -1), (3, 1)]
    assert g.clauses_of(2) == [(0, 1), (1, 1), (2, -1)]
    assert g.clauses_of(3) == [(0, -1), (2, 1), (3, -1)]
    # edge (a, x): same-sign others {d}, opposite-sign others {b}
    edge_ax = g.var_edges[0][0]
    same, opp = g.cavity_clauses(edge_ax)
    assert same == [3] and opp == [1]


def test_factor_graph_partition_identity():
    rng = random.Random(9)
    for _ in range(20):
        f = generate_random_3sat(15, rng.randint(10, 60), rng.randrange(2**30))
        g = build_factor_graph(f)
        for x in range(1, f.num_vars + 1):
            all_clauses = sorted(c for c, _ in g.clauses_of(x))
            for e in g.var_edges[x - 1]:
                same, opp = g.cavity_clauses(e)
                assert sorted(same + opp + [g.edge_clause[e]]) == all_clauses


def test_factor_graph_single_clause_star():
    g = build_factor_graph(Formula(3, ((1, -2, 3),)))
    assert g.num_edges == 3
    assert g.vars_of(0) == [(1, 1), (2, -1), (3, 1)]


def test_factor_graph_rejects_tautology():
    with pytest.raises(ValueError, match="tautological"):
        build_factor_graph(Formula(2, ((1, -1),)))
