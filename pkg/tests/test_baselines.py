from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from algeval.baselines import (
    agreement_from_errors, majority_key, mv_grade, pair_error_rate, platanios_from_sketch, platanios_solve,
    single_error_rate,
)
from algeval.exact import DegenerateEquationError, Kind, sqrt_exact
from algeval.pair import pair_frequencies
from algeval.sketch import LabelStream

from conftest import ACCURACIES, PREVALENCE


def test_platanios_c_irrational_on_synthetic(synthetic_sketch):
    rep = platanios_from_sketch(synthetic_sketch)
    assert rep.agreement == (F(15961, 25000), F(28687, 50000), F(1948, 3125))
    assert rep.kind is Kind.IRRATIONAL
    assert rep.c * rep.c == rep.c_squared == F(226746939639, 3906250000000)
    assert rep.c == sqrt_exact(F(226746939639, 10)) / 625000


def test_platanios_branches_solve_their_equation():
    rep = platanios_solve(F(3, 4), F(7, 10), F(4, 5))
    opposite = {0: 2, 1: 1, 2: 0}
    for branch in rep.branches:
        for i, e in enumerate(branch):
            a_jk = rep.agreement[opposite[i]]
            assert (2 * e - 1) * (1 - 2 * a_jk) in (rep.c, -rep.c)


def test_platanios_perfect_agreement():
    rep = platanios_solve(1, 1, 1)
    assert rep.c == 0
    assert all(e == F(1, 2) for e in rep.branches[0])


def test_platanios_half_agreement_degenerate():
    with pytest.raises(DegenerateEquationError):
        platanios_solve(F(1, 2), F(3, 4), F(3, 4))


def test_pair_error_rate_synthetic():
    (a1, b1), (a2, b2) = ACCURACIES[:2]
    e12 = pair_error_rate(PREVALENCE, a1, b1, a2, b2)
    assert e12 == F(19, 20) * F(7, 25) * F(9, 50) + F(1, 20) * F(89, 100) * F(31, 50)
    e1 = single_error_rate(PREVALENCE, a1, b1)
    e2 = single_error_rate(PREVALENCE, a2, b2)
    assert agreement_from_errors(e1, e2, e12) == F(15961, 25000)
    assert e12 != e1 * e2
    assert pair_error_rate(F(1, 3), 1, 1, 1, 1) == 0


rate = st.fractions(0, 1, max_denominator=30)


@settings(max_examples=100, deadline=None)
@given(rate, rate, rate, rate, rate)
def test_agreement_identity_constant_one(p, a1, b1, a2, b2):
    f = pair_frequencies(p, a1, b1, a2, b2)
    e1, e2 = single_error_rate(p, a1, b1), single_error_rate(p, a2, b2)
    assert f["aa"] + f["bb"] == agreement_from_errors(e1, e2, pair_error_rate(p, a1, b1, a2, b2))


def test_mv_identical_classifiers_perfect():
    votes = ["a", "b", "b", "a", "b"]
    rep = mv_grade(LabelStream.from_decisions([(v, v, v) for v in votes]))
    assert rep.mv_key == votes and rep.Qa_mv == 2
    assert rep.accuracies == [(1, 1)] * 3
    for g in rep.gammas.values():
        assert g.gamma_a == 0 and g.gamma_b == 0


def test_mv_duplicate_pair_dominates():
    c1 = list("aabbabbaab")
    c3 = list("babababbba")
    rep = mv_grade(LabelStream.from_decisions(list(zip(c1, c1, c3))))
    assert rep.mv_key == c1
    ev1 = rep.evaluations[0]
    assert (ev1.psa, ev1.psb) == (1, 1)
    g = rep.gammas[1, 2]
    assert (g.gamma_a, g.gamma_b) == (0, 0)


def test_mv_self_consistency():
    rows = [("a", "b", "a"), ("b", "b", "a"), ("a", "a", "a"), ("b", "a", "b")]
    rep = mv_grade(LabelStream.from_decisions(rows))
    again = mv_grade(LabelStream.from_decisions([(k, k, k) for k in rep.mv_key]))
    assert again.mv_key == rep.mv_key and again.accuracies == [(1, 1)] * 3


def test_majority_needs_odd_voters():
    with pytest.raises(ValueError):
        majority_key([("a", "b")])
