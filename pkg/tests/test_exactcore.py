from __future__ import annotations

from math import gcd

import pytest
from sympy import Rational

from folmmp import ParseError, PreconditionViolation
from folmmp.services.exactcore.utils import (
    UNBOUNDED,
    _continued_fraction,
    _degree,
    _format_polynomial,
    _hirzebruch_jung,
    _hirzebruch_jung_value,
    _homogeneous,
    _parse_polynomial,
    _poly_order,
    _polynomial,
    _terms,
)
from utils import jdumps, rparse, rstr, tsv


def test_parse_polynomial_keeps_rational_coefficients():
    f = _parse_polynomial("3/2*x^2*y - y^3")

    assert _terms(f) == {(2, 1): Rational(3, 2), (0, 3): Rational(-1)}
    assert _poly_order(f) == 3
    assert _degree(f) == 3


def test_parse_polynomial_converts_decimals_exactly():
    assert _terms(_parse_polynomial("0.25*x + y**2")) == {(1, 0): Rational(1, 4), (0, 2): Rational(1)}


def test_formatted_polynomial_parses_back():
    f = _parse_polynomial("3/2*x^2*y - y^3 + 7*x")

    assert _parse_polynomial(_format_polynomial(f)) == f


def test_parse_polynomial_rejects_unknown_variables():
    with pytest.raises(ParseError) as info:
        _parse_polynomial("z + x", line=4, column=3)

    assert info.value.line == 4
    assert info.value.column == 3
    assert "'z'" in str(info.value)
    assert info.value.code == 1


@pytest.mark.parametrize("text", ["x +* y", "", "x^(1/2)", "1/x"])
def test_parse_polynomial_rejects_malformed_text(text):
    with pytest.raises(ParseError):
        _parse_polynomial(text)


def test_homogeneous_parts_and_orders():
    f = _parse_polynomial("x^2 + x*y + y^3")

    assert _terms(_homogeneous(f, 2)) == {(2, 0): Rational(1), (1, 1): Rational(1)}
    assert _homogeneous(f, 1).is_zero
    with pytest.raises(PreconditionViolation):
        _poly_order(_polynomial({}))


def test_continued_fraction_is_canonical():
    assert _continued_fraction(8, 5).digits == (1, 1, 1, 2)
    assert _continued_fraction(8, 5).digit_sum == 5
    assert _continued_fraction(1, 1).digits == (1,)
    assert _continued_fraction(7, 1).digits == (7,)


def test_continued_fraction_values_over_a_grid():
    for p in range(1, 31):
        for q in range(1, p + 1):
            if gcd(p, q) != 1:
                continue
            expansion = _continued_fraction(p, q)
            assert expansion.value == Rational(p, q)
            assert len(expansion.digits) == 1 or expansion.digits[-1] >= 2


@pytest.mark.parametrize("p, q", [(2, 4), (3, 5), (0, 1)])
def test_continued_fraction_rejects_unnormalized_pairs(p, q):
    with pytest.raises(PreconditionViolation):
        _continued_fraction(p, q)


def test_hirzebruch_jung_chains():
    assert _hirzebruch_jung(5, 2) == [3, 2]
    assert _hirzebruch_jung(4, 3) == [2, 2, 2]
    assert _hirzebruch_jung(7, 3) == [3, 2, 2]
    assert _hirzebruch_jung(5, 1) == [5]


def test_hirzebruch_jung_values_recover_the_quotient():
    for m in range(2, 13):
        for b in range(1, m):
            if gcd(m, b) != 1:
                continue
            chain = _hirzebruch_jung(m, b)
            assert all(c >= 2 for c in chain)
            assert _hirzebruch_jung_value(chain) == Rational(m, b)


def test_hirzebruch_jung_rejects_non_coprime_weights():
    with pytest.raises(PreconditionViolation):
        _hirzebruch_jung(6, 4)


def test_rational_text_helpers():
    assert rparse("0.25") == Rational(1, 4)
    assert rparse("3/6") == Rational(1, 2)
    assert rparse(2) == Rational(2)
    assert rstr(Rational(2, 4)) == "1/2"
    assert rstr(Rational(-3)) == "-3"
    assert rstr(UNBOUNDED) == "unbounded"
    with pytest.raises(ValueError):
        rparse("one half")


def test_json_and_table_rendering():
    assert jdumps({"b": Rational(1, 3), "a": [Rational(2)]}) == '{\n  "a": [\n    "2"\n  ],\n  "b": "1/3"\n}'
    assert tsv(("p", "q"), [(1, Rational(1, 2))]) == "p\tq\n1\t1/2"
