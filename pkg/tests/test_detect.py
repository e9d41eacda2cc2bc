"""Detection engines: deterministic, marked, randomized."""

import random

import pytest

from conftest import (
    detection_cases,
    gf2_rank,
    marked_detection_cases,
    random_formula,
)
from qmonomial.detect import (
    DetectConfig,
    DetectError,
    select_basis,
    detect_marked_q_monomial,
    detect_q_monomial,
    detect_q_monomial_randomized,
)
from qmonomial.fields import gf
from qmonomial.formula import MARKER_VAR, FormulaBuilder, expand, has_q_monomial, parse_formula


def test_trivial_yes():
    r = detect_q_monomial(parse_formula("(* x1 x2)"), DetectConfig(q=2, k=2))
    assert r.answer == "yes"
    assert r.witness_hash_index is not None


def test_square_annihilates_q2():
    r = detect_q_monomial(parse_formula("(* x1 x1)"), DetectConfig(q=2, k=2))
    assert r.answer == "no"
    assert r.witness_hash_index is None
    assert r.hash_functions_tried == r.family_size


def test_square_is_3_monomial():
    r = detect_q_monomial(parse_formula("(* x1 x1)"), DetectConfig(q=3, k=2))
    assert r.answer == "yes"


def test_cube_is_4_monomial_not_3():
    f = parse_formula("(* x1 (* x1 x1))")
    assert detect_q_monomial(f, DetectConfig(q=4, k=3)).answer == "yes"
    assert detect_q_monomial(f, DetectConfig(q=3, k=3)).answer == "no"


def test_select_basis_is_independent():
    for k in range(1, 21):
        basis = select_basis(k)
        assert len(basis) == k
        assert gf2_rank(basis) == k


def test_degree_above_domain_is_no():
    r = detect_q_monomial(parse_formula("(* x1 x2)"), DetectConfig(q=2, k=3))
    assert r.answer == "no"
    assert r.family_size == 0


def test_marker_in_unmarked_test_rejected():
    b = FormulaBuilder()
    f = b.build(b.mul(b.var(MARKER_VAR), b.var(1)))
    with pytest.raises(DetectError):
        detect_q_monomial(f, DetectConfig(q=2, k=1))


def test_config_validation():
    f = parse_formula("x1")
    with pytest.raises(DetectError):
        detect_q_monomial(f, DetectConfig(q=1, k=1))
    with pytest.raises(DetectError):
        detect_q_monomial(f, DetectConfig(q=2, k=0))
    with pytest.raises(DetectError):
        detect_q_monomial(f, DetectConfig(q=2, k=21))
    with pytest.raises(DetectError):
        detect_q_monomial(f, DetectConfig(q=2, k=1, engine="quantum"))
    with pytest.raises(DetectError):
        detect_marked_q_monomial(f, DetectConfig(q=2, k=1))  # needs marker_cap


def test_random_agreement_with_oracle():
    rng = random.Random(777)
    for f, q, k, expected in detection_cases(rng, 60):
        r = detect_q_monomial(f, DetectConfig(q=q, k=k))
        assert r.answer == ("yes" if expected else "no"), (f.to_text(), q, k)
        assert expected == has_q_monomial(expand(f), q, k)
        if not expected:
            # a no verdict only after the whole family came back zero
            assert r.hash_functions_tried == r.family_size
            assert r.witness_hash_index is None


def test_work_accounting_linear_in_rewrite_size():
    # group-algebra products per hash function stay within a fixed multiple
    # of the rewritten formula's gate count on the tested distribution
    rng = random.Random(788)
    for f, q, k, _ in detection_cases(rng, 20, n_vars=6, gates=12, kmax=3):
        from qmonomial.transform import transform_formula

        r = detect_q_monomial(f, DetectConfig(q=q, k=k))
        gates = transform_formula(f, q).c_dprime.gate_count
        assert r.op_counts["ga_mul_first_hash"] <= 16 * gates


def test_oracle_pit_mode_agrees():
    rng = random.Random(778)
    for f, q, k, expected in detection_cases(rng, 25):
        r = detect_q_monomial(f, DetectConfig(q=q, k=k, pit_mode="oracle"))
        assert r.answer == ("yes" if expected else "no")


def test_marked_trivial_cases():
    b = FormulaBuilder()
    f = b.build(b.mul(b.var(MARKER_VAR), b.var(1)))
    r = detect_marked_q_monomial(f, DetectConfig(q=2, k=1, marker_cap=1))
    assert r.answer == "yes"
    # w^2 x1 with cap t=1: only the exact marker degree is inspected
    b2 = FormulaBuilder()
    f2 = b2.build(b2.mul(b2.var(MARKER_VAR), b2.mul(b2.var(MARKER_VAR), b2.var(1))))
    r2 = detect_marked_q_monomial(f2, DetectConfig(q=2, k=1, marker_cap=1))
    assert r2.answer == "no"
    r3 = detect_marked_q_monomial(f2, DetectConfig(q=2, k=1, marker_cap=2))
    assert r3.answer == "yes"


def test_bare_marker_power_is_not_a_hit():
    # w^3 + w*x1: marker degree 3 exists, but with an empty residual; only
    # (t=1, k=1) describes an actual marked q-monomial
    b = FormulaBuilder()
    w3 = b.mul(b.var(MARKER_VAR), b.mul(b.var(MARKER_VAR), b.var(MARKER_VAR)))
    f = b.build(b.add(w3, b.mul(b.var(MARKER_VAR), b.var(1))))
    assert detect_marked_q_monomial(
        f, DetectConfig(q=2, k=1, marker_cap=3)).answer == "no"
    assert detect_marked_q_monomial(
        f, DetectConfig(q=2, k=1, marker_cap=1)).answer == "yes"
    assert detect_q_monomial_randomized(
        f, DetectConfig(q=2, k=1, marker_cap=3, seed=0)).answer == "no"


def test_constant_term_is_not_a_hit():
    # 1 + x1^2 has no multilinear monomial of any positive degree
    f = parse_formula("(+ #1 (* x1 x1))")
    assert detect_q_monomial(f, DetectConfig(q=2, k=2)).answer == "no"
    assert detect_q_monomial(f, DetectConfig(q=2, k=1)).answer == "no"
    assert detect_q_monomial_randomized(f, DetectConfig(q=2, k=2, seed=0)).answer == "no"


def test_lower_degree_terms_do_not_leak():
    # x1 + x2: q-monomials of degree 1 only; k = 2 must answer no
    f = parse_formula("(+ x1 x2)")
    assert detect_q_monomial(f, DetectConfig(q=2, k=2)).answer == "no"
    assert detect_q_monomial(f, DetectConfig(q=2, k=1)).answer == "yes"
    assert detect_q_monomial_randomized(f, DetectConfig(q=2, k=2, seed=0)).answer == "no"


def test_marked_random_agreement():
    rng = random.Random(779)
    for f, q, k, t, expected in marked_detection_cases(rng, 40):
        r = detect_marked_q_monomial(f, DetectConfig(q=q, k=k, marker_cap=t))
        assert r.answer == ("yes" if expected else "no"), (f.to_text, q, k, t)


def test_deterministic_reports_identical():
    rng = random.Random(780)
    for f, q, k, _ in detection_cases(rng, 8):
        cfg = DetectConfig(q=q, k=k)
        a = detect_q_monomial(f, cfg)
        b = detect_q_monomial(f, cfg)
        assert a == b


def test_indeterminate_surfaces_when_both_caps_block():
    f = parse_formula("(* x1 x2)")
    cfg = DetectConfig(q=2, k=2, list_cap=0, oracle_cap=0)
    r = detect_q_monomial(f, cfg)
    assert r.answer == "indeterminate"
    # the expansion fallback alone still decides it
    cfg2 = DetectConfig(q=2, k=2, list_cap=0)
    assert detect_q_monomial(f, cfg2).answer == "yes"


def test_randomized_yes_and_no():
    f = parse_formula("(* x1 x2)")
    r = detect_q_monomial_randomized(f, DetectConfig(q=2, k=2, seed=5))
    assert r.answer == "yes"
    f2 = parse_formula("(* x1 x1)")
    r2 = detect_q_monomial_randomized(f2, DetectConfig(q=2, k=2, seed=5))
    assert r2.answer == "no"


def test_randomized_soundness_on_no_instances():
    rng = random.Random(781)
    checked = 0
    for f, q, k, expected in detection_cases(rng, 40):
        if expected:
            continue
        r = detect_q_monomial_randomized(f, DetectConfig(q=q, k=k, seed=rng.randrange(2**32)))
        assert r.answer == "no"
        checked += 1
    assert checked >= 10


def test_randomized_agreement_with_deterministic():
    rng = random.Random(782)
    agree = 0
    total = 0
    for f, q, k, _ in detection_cases(rng, 30):
        det = detect_q_monomial(f, DetectConfig(q=q, k=k))
        ran = detect_q_monomial_randomized(f, DetectConfig(q=q, k=k, seed=17))
        total += 1
        agree += det.answer == ran.answer
    assert agree == total


def test_randomized_reproducible_given_seed():
    rng = random.Random(783)
    f = random_formula(rng, 4, 6)
    cfg = DetectConfig(q=2, k=2, seed=99)
    assert detect_q_monomial_randomized(f, cfg) == detect_q_monomial_randomized(f, cfg)


def test_randomized_marked():
    rng = random.Random(784)
    for f, q, k, t, expected in marked_detection_cases(rng, 15):
        cfg = DetectConfig(q=q, k=k, marker_cap=t, seed=3)
        r = detect_q_monomial_randomized(f, cfg)
        assert r.answer == ("yes" if expected else "no")


def test_field_override_does_not_change_verdict():
    rng = random.Random(785)
    for f, q, k, expected in detection_cases(rng, 10):
        r = detect_q_monomial(f, DetectConfig(q=q, k=k, field=gf(12)))
        assert r.answer == ("yes" if expected else "no")


def test_op_counts_populated():
    f = parse_formula("(* (+ x1 x2) (+ x3 x4))")
    r = detect_q_monomial(f, DetectConfig(q=2, k=2))
    assert r.op_counts["ga_mul"] > 0
    assert r.op_counts["pit_products"] > 0
    assert r.op_counts["ga_mul_first_hash"] > 0


def test_hash_provider_choices_agree():
    rng = random.Random(786)
    for f, q, k, expected in detection_cases(rng, 6, n_vars=4, gates=6, kmax=3):
        for provider in ("greedy", "splitter", "randomized"):
            r = detect_q_monomial(f, DetectConfig(q=q, k=k, hash_provider=provider))
            assert r.answer == ("yes" if expected else "no"), provider
