import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from algeval.exact import (
    AlgebraicValue, DegenerateEquationError, Kind, MixedRadicandError, as_fraction, decimal_render,
    format_value, is_square, parse_value, payload_token, solve_quadratic, sqrt_exact,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)


def test_sqrt_of_perfect_square_is_rational():
    assert sqrt_exact(F(338964921, 400000000000000)) == F(18411, 20000000)
    assert sqrt_exact(F(9, 4)).kind is Kind.RATIONAL


def test_sqrt_classification():
    assert sqrt_exact(2).kind is Kind.IRRATIONAL
    assert sqrt_exact(-4).kind is Kind.IMAGINARY
    assert sqrt_exact(0) == 0


def test_radicand_is_squarefree():
    v = sqrt_exact(F(226746939639, 10)) / 625000
    assert v * v == F(226746939639, 3906250000000)
    assert v.kind is Kind.IRRATIONAL


@given(fractions)
def test_sqrt_squares_back(x):
    r = sqrt_exact(x)
    assert r * r == x


def test_mixed_radicands_rejected():
    with pytest.raises(MixedRadicandError):
        sqrt_exact(2) + sqrt_exact(3)


def test_compatible_radicands_combine():
    assert sqrt_exact(2) + sqrt_exact(8) == 3 * sqrt_exact(2)
    assert sqrt_exact(2) * sqrt_exact(8) == 4


@given(fractions, fractions, st.integers(min_value=2, max_value=50))
def test_sign_matches_float(r, c, d):
    v = AlgebraicValue(r, c, d)
    f = float(r) + float(c) * math.sqrt(d)
    if abs(f) > 1e-9:
        assert v.sign() == (1 if f > 0 else -1)


@given(fractions, fractions, st.integers(min_value=2, max_value=50))
def test_floor_exact(r, c, d):
    v = AlgebraicValue(r, c, d)
    n = math.floor(v)
    assert AlgebraicValue(n) <= v < AlgebraicValue(n + 1)


def test_quadratic_roots_verify():
    roots = solve_quadratic(1, -1, F(-1, 1))
    for x in roots:
        assert x * x - x - 1 == 0
    assert roots[0] < roots[1]


def test_quadratic_linear_and_degenerate():
    assert solve_quadratic(0, 2, -1) == (F(1, 2),)
    with pytest.raises(DegenerateEquationError) as exc:
        solve_quadratic(0, 0, 0)
    assert exc.value.has_solution
    with pytest.raises(DegenerateEquationError) as exc:
        solve_quadratic(0, 0, 1)
    assert not exc.value.has_solution


def test_decimal_render_fraction_and_surd():
    assert decimal_render(F(357, 443)) == "0.806"
    v = (59839 + sqrt_exact(657031321)) / 111804
    assert decimal_render(v) == "0.764"
    assert decimal_render(F(1, 8), 2) == "0.12"  # half to even
    assert decimal_render(sqrt_exact(-1)).startswith("IMAGINARY(")


def test_format_parse_round_trip():
    v = F(3, 7) + F(2, 5) * sqrt_exact(11)
    assert parse_value(format_value(v)) == v
    assert parse_value(payload_token(v)) == v
    assert payload_token(F(1, 2)) == "1/2"
    assert payload_token(sqrt_exact(-2)) == "IMAGINARY"


def test_as_fraction_rejects_irrational_and_float():
    with pytest.raises(ValueError):
        as_fraction(sqrt_exact(2))
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("19/20") == F(19, 20)


def test_is_square():
    assert is_square(18411 ** 2)
    assert not is_square(2267469396390)
    assert not is_square(-4)
