import random

import pytest

from coverprop import covers as cov
from coverprop.covers import (
    CoverKind,
    classify_cover,
    encode_covers_as_cnf,
    enumerate_covers_bruteforce,
    enumerate_covers_sat,
    format_cover_line,
    is_cover,
    is_supported,
    parse_cover_line,
    star_propagate,
    unsupported_variables,
)
from coverprop.formula import Formula, generate_random_3sat
from coverprop.solver import enumerate_models

from util import EXAMPLE_A, EXAMPLE_B, brute_force_covers, random_small_formula, random_tree_formula


def test_is_supported_worked_examples():
    # EXAMPLE_A under 111: x alone satisfies clause 1, y clause 2, z clause 3
    for var in (1, 2, 3):
        assert is_supported(EXAMPLE_A, "111", var)
    # EXAMPLE_B under 111: x supported via (x or -z)
    assert is_supported(EXAMPLE_B, "111", 1)
    # under 100 in EXAMPLE_A, x=1 satisfies clause 1 but -y is also true
    assert not is_supported(EXAMPLE_A, "100", 1)


def test_is_supported_star_rejected():
    with pytest.raises(ValueError):
        is_supported(EXAMPLE_A, "1*1", 2)


def test_star_literal_does_not_count_as_false():
    # clause (x or y): with y = *, x is not the sole satisfier
    f = Formula(2, ((1, 2),))
    assert not is_supported(f, "1*", 1)
    assert is_supported(f, "10", 1)


def test_is_cover_worked_example_a():
    assert is_cover(EXAMPLE_A, "111")
    assert is_cover(EXAMPLE_A, "***")
    assert not is_cover(EXAMPLE_A, "110")
    assert not is_cover(EXAMPLE_A, "100")
    assert brute_force_covers(EXAMPLE_A) == ["***", "111"]


def test_is_cover_worked_example_b():
    assert brute_force_covers(EXAMPLE_B) == ["***", "000", "111"]


def test_star_propagate_already_cover_is_fixpoint():
    res = star_propagate(EXAMPLE_B, "000")
    assert res.cover == "000"
    assert res.starred == []
    assert res.trace == [(0, 0)]


def test_star_propagate_from_solution_gives_true_cover():
    rng = random.Random(4)
    for _ in range(25):
        f = random_small_formula(rng, n_lo=4, n_hi=10, alpha_lo=2.0, alpha_hi=4.5)
        models = enumerate_models(f, limit=5).models
        for model in models:
            start = cov.assignment_to_generalized(model)
            res = star_propagate(f, start)
            assert is_cover(f, res.cover)
            rec = cov.make_record(f, res.cover)
            assert rec.kind in (CoverKind.TRUE_COVER, CoverKind.TRIVIAL)
            # monotone star growth, one star per step
            stars = [s for s, _ in res.trace]
            assert stars == sorted(set(stars))
            assert res.trace[-1][1] == 0


def test_star_propagate_tree_formulas_reach_trivial_cover():
    from coverprop.solver import dpll_solve

    for seed in range(10):
        f = random_tree_formula(12, seed)
        model = dpll_solve(f).model
        res = star_propagate(f, cov.assignment_to_generalized(model))
        assert res.cover == cov.STAR * f.num_vars


def test_star_propagate_rejects_condition1_violation():
    # 110 falsifies the third clause of EXAMPLE_A with no stars in it
    with pytest.raises(ValueError, match="condition"):
        star_propagate(EXAMPLE_A, "110")


def test_star_propagate_policies_agree_on_fixpoint_reachability():
    # policies may reach different covers; all must be covers (reported, not asserted equal)
    rng = random.Random(11)
    disagreements = 0
    for _ in range(20):
        f = random_small_formula(rng, n_lo=4, n_hi=10, alpha_lo=2.5, alpha_hi=4.5)
        models = enumerate_models(f, limit=1).models
        if not models:
            continue
        start = cov.assignment_to_generalized(models[0])
        results = {
            policy: star_propagate(f, start, policy=policy, seed=1).cover
            for policy in ("lowest", "random", "queue")
        }
        assert all(is_cover(f, c) for c in results.values())
        if len(set(results.values())) > 1:
            disagreements += 1
    # informational: peeling order sensitivity exists in principle


def test_classify_cover():
    assert classify_cover(EXAMPLE_A, "111") is CoverKind.TRUE_COVER
    assert classify_cover(EXAMPLE_A, "***") is CoverKind.TRUE_COVER
    unsat = Formula(1, ((1,), (-1,)))
    # the all-star string is not a cover here (unit clauses), but classify
    # still answers the extension question
    assert classify_cover(unsat, "*") is CoverKind.FALSE_COVER


def test_bruteforce_enumeration_worked_examples():
    recs = enumerate_covers_bruteforce(EXAMPLE_A)
    assert [(r.assignment, r.kind) for r in recs] == [
        ("***", CoverKind.TRIVIAL),
        ("111", CoverKind.TRUE_COVER),
    ]
    recs = enumerate_covers_bruteforce(EXAMPLE_B)
    assert [(r.assignment, r.kind) for r in recs] == [
        ("***", CoverKind.TRIVIAL),
        ("000", CoverKind.TRUE_COVER),
        ("111", CoverKind.TRUE_COVER),
    ]


def test_bruteforce_matches_reference_oracle():
    rng = random.Random(7)
    for _ in range(40):
        f = random_small_formula(rng, n_lo=3, n_hi=8)
        fast = [r.assignment for r in enumerate_covers_bruteforce(f)]
        assert fast == brute_force_covers(f)


def test_bruteforce_cap():
    with pytest.raises(ValueError, match="capped"):
        enumerate_covers_bruteforce(generate_random_3sat(17, 10, 0))


def test_trivial_cover_law():
    rng = random.Random(3)
    for _ in range(40):
        f = random_small_formula(rng, n_lo=3, n_hi=9)
        all_star = cov.STAR * f.num_vars
        assert is_cover(f, all_star) == (not f.has_unit_clause())
    with_unit = Formula(3, ((1,), (1, 2, 3)))
    assert not is_cover(with_unit, "***")


def test_tree_formulas_have_only_trivial_cover():
    for seed in range(15):
        f = random_tree_formula(11, seed)
        recs = enumerate_covers_bruteforce(f)
        assert [r.assignment for r in recs] == [cov.STAR * f.num_vars]


def test_encoding_decode_bijection_small():
    rng = random.Random(19)
    for _ in range(40):
        f = random_small_formula(rng, n_lo=3, n_hi=9)
        enc = encode_covers_as_cnf(f)
        res = enumerate_models(enc.g)
        assert res.complete
        decoded = sorted(enc.decode(m) for m in res.models)
        assert len(set(decoded)) == len(decoded)
        assert decoded == brute_force_covers(f)
        # round trip: every cover encodes back to a satisfying model of G
        for m in res.models:
            sigma = enc.decode(m)
            assert enc.encode_cover(f, sigma) == m


def test_encoding_worked_example_model_count():
    enc = encode_covers_as_cnf(EXAMPLE_A)
    res = enumerate_models(enc.g)
    assert res.complete
    assert sorted(enc.decode(m) for m in res.models) == ["***", "111"]


def test_sat_enumeration_agrees_with_bruteforce():
    rng = random.Random(23)
    for _ in range(30):
        f = random_small_formula(rng, n_lo=3, n_hi=10)
        sat_enum = enumerate_covers_sat(f)
        assert sat_enum.complete
        assert [r.assignment for r in sat_enum.records] == brute_force_covers(f)
        brute = enumerate_covers_bruteforce(f)
        assert [(r.assignment, r.kind) for r in sat_enum.records] == [
            (r.assignment, r.kind) for r in brute
        ]


def test_sat_enumeration_unit_clause_formula():
    # unit clause kills the trivial cover; y can only be starred since its
    # sole (positive) occurrence is already satisfied by x
    f = Formula(2, ((1,), (1, 2)))
    expected = brute_force_covers(f)
    got = [r.assignment for r in enumerate_covers_sat(f).records]
    assert got == expected == ["1*"]


def test_sat_enumeration_limit_flags_incomplete():
    res = enumerate_covers_sat(EXAMPLE_B, limit=1)
    assert not res.complete
    assert len(res.records) == 1


def test_cover_file_format_roundtrip():
    rec = cov.make_record(EXAMPLE_A, "111")
    line = format_cover_line(rec)
    assert line == "1 1 1 | TRUE"
    back = parse_cover_line(line, 3)
    assert back.assignment == "111" and back.kind is CoverKind.TRUE_COVER
    trivial = parse_cover_line("* * * | TRIVIAL", 3)
    assert trivial.star_count == 3
