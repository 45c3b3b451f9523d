from __future__ import annotations

import random

import pytest
from sympy import Rational

from folmmp import ParseError, PreconditionViolation
from folmmp.services.exactcore.utils import _parse_polynomial, _poly_order, _polynomial
from folmmp.services.germ.utils import (
    VectorFieldGerm,
    _blow_up,
    _boundary,
    _format_germ,
    _germ,
    _is_invariant_curve,
    _is_log_canonical_germ,
    _is_reduced,
    _linear_part,
    _parse_germ,
    _pullback_discrepancy,
    _saturate,
)


def _random_germ(rng: random.Random) -> VectorFieldGerm:
    # sparse coefficients of degree at most 4
    while True:
        a = {(i, j): rng.randint(-3, 3) for i in range(5) for j in range(5 - i) if rng.random() < 0.25}
        b = {(i, j): rng.randint(-3, 3) for i in range(5) for j in range(5 - i) if rng.random() < 0.25}
        a, b = _polynomial(a), _polynomial(b)
        if not (a.is_zero and b.is_zero):
            return _germ(a, b)


def test_saturation_divides_the_common_factor(germ):
    assert germ("dx: x^2, dy: x*y") == germ("dx: x, dy: y")
    assert germ("dx: x, dy: y").saturated


def test_saturation_is_idempotent(germ):
    g = germ("dx: x^2 - x*y, dy: x*y - y^2")

    assert _saturate(g) == g
    assert str(g) == "dx: x, dy: y"


def test_zero_vector_field_is_rejected():
    with pytest.raises(PreconditionViolation):
        VectorFieldGerm(_polynomial({}), _polynomial({}))


def test_linear_part_of_a_nilpotent_germ(germ):
    linear = _linear_part(germ("dx: y, dy: x^2"))

    assert linear.nilpotent
    assert not linear.zero
    assert linear.ratio is None


def test_linear_part_ratio_of_a_node(germ):
    linear = _linear_part(germ("dx: 2*x, dy: 3*y"))

    assert linear.eigenvalues == (2, 3)
    assert linear.ratio == (2, 3)


def test_log_canonicity_follows_the_linear_part(germ):
    assert _is_log_canonical_germ(germ("dx: x, dy: y"))
    assert _is_log_canonical_germ(germ("dx: x, dy: -y"))
    assert not _is_log_canonical_germ(germ("dx: y, dy: x^2"))
    assert not _is_log_canonical_germ(germ("dx: x^2, dy: y^2"))
    with pytest.raises(PreconditionViolation):
        _is_log_canonical_germ(germ("dx: 1, dy: 0"))


def test_reduced_points(germ):
    assert _is_reduced(germ("dx: x, dy: -y"))
    assert _is_reduced(germ("dx: x^2, dy: y"))
    assert _is_reduced(germ("dx: x, dy: -2*y"))
    assert not _is_reduced(germ("dx: x, dy: y"))
    assert not _is_reduced(germ("dx: y, dy: x^2"))


def test_blow_up_of_a_regular_point(germ):
    result = _blow_up(germ("dx: 1, dy: 0"))

    assert result.exceptional_invariant
    assert result.iota == 0
    assert result.foliation_discrepancy == 1
    assert len(result.new_singular_points) == 1

    point = result.new_singular_points[0]
    assert (point.chart, point.coordinate) == (1, 0)
    assert point.germ == germ("dx: x, dy: -y")


def test_blow_up_of_a_saddle(germ):
    result = _blow_up(germ("dx: x, dy: -y"))

    assert result.exceptional_invariant
    assert result.foliation_discrepancy == 0
    assert [p.germ for p in result.new_singular_points] == [germ("dx: x, dy: -2*y"), germ("dx: 2*x, dy: -y")]


def test_blow_up_of_the_radial_field(germ):
    result = _blow_up(germ("dx: x, dy: y"))

    assert not result.exceptional_invariant
    assert result.iota == 1
    assert result.foliation_discrepancy == -1
    assert result.transverse
    assert result.new_singular_points == ()


def test_zero_linear_part_gives_log_discrepancy_below_minus_one(germ):
    for text in ("dx: x^2, dy: y^2", "dx: x^2, dy: x*y + y^3", "dx: y^2, dy: x^3", "dx: x^3, dy: y^3"):
        result = _blow_up(germ(text))
        assert -result.foliation_discrepancy >= result.iota + 1


def test_blow_up_discrepancy_matches_the_pulled_back_form():
    rng = random.Random(20240611)

    for _ in range(50):
        g = _random_germ(rng)
        result = _blow_up(g)
        nu = min(_poly_order(f) for f in (g.a, g.b) if not f.is_zero)

        assert result.foliation_discrepancy == _pullback_discrepancy(g)
        assert result.foliation_discrepancy == 1 - nu - result.iota

        # zero linear part at a singular point
        if g.singular and _linear_part(g).zero:
            assert -result.foliation_discrepancy >= result.iota + 1


def test_blow_up_requires_saturated_germs():
    with pytest.raises(PreconditionViolation):
        _blow_up(VectorFieldGerm(_parse_polynomial("x^2"), _parse_polynomial("x*y")))


def test_invariant_curves(germ):
    saddle = germ("dx: x, dy: -y")

    assert _is_invariant_curve(saddle, _parse_polynomial("x"))
    assert _is_invariant_curve(saddle, _parse_polynomial("y"))
    assert not _is_invariant_curve(saddle, _parse_polynomial("y - x"))


def test_boundary_components_are_validated(germ):
    saddle = germ("dx: x, dy: -y")

    curve = _boundary(saddle, _parse_polynomial("y - x"), Rational(1, 2))
    assert not curve.invariant
    assert curve.coefficient == Rational(1, 2)

    with pytest.raises(PreconditionViolation):
        _boundary(saddle, _parse_polynomial("x"), Rational(1, 2), invariant=False)
    with pytest.raises(PreconditionViolation):
        _boundary(saddle, _parse_polynomial("x*y"), Rational(1, 2))
    with pytest.raises(PreconditionViolation):
        _boundary(saddle, _parse_polynomial("x + 1"), Rational(1, 2))
    with pytest.raises(PreconditionViolation):
        _boundary(saddle, _parse_polynomial("x"), Rational(3, 2))


def test_germ_file_with_header_comments_and_boundary():
    data = _parse_germ("folmmp-germ v1\n# a saddle\ndx: x, dy: -y\nboundary: y - x, 1/2, non-invariant\n")

    assert str(data.germ) == "dx: x, dy: -y"
    assert len(data.boundary) == 1
    assert _parse_germ(_format_germ(data)) == data


@pytest.mark.parametrize("text, line", [
    ("folmmp-germ v2\ndx: x, dy: y\n", 1),
    ("dx: x, dy: y\ndx: y, dy: x\n", 2),
    ("boundary: x, 1/2, invariant\ndx: x, dy: y\n", 1),
    ("dx: x, dy: y\nsomething else\n", 2),
    ("dx: 0, dy: 0\n", 1),
])
def test_malformed_germ_files(text, line):
    with pytest.raises(ParseError) as info:
        _parse_germ(text)

    assert info.value.line == line


def test_missing_germ_line():
    with pytest.raises(ParseError):
        _parse_germ("# nothing here\n")


def test_degree_cap_is_a_precondition():
    with pytest.raises(PreconditionViolation):
        _parse_germ("dx: x^5, dy: y", degree_cap=4)
