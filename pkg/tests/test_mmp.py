from __future__ import annotations

import json

import pytest
from sympy import Rational

from folmmp import CatalogueIncomplete, PreconditionViolation
from folmmp.services.restree.utils import AdjointParams
from folmmp.services.surface.utils import _adjoint_class, _contract_curve, _emit_surface, _intersect, _parse_surface
from folmmp.services.mmp.utils import (
    FOLIATION_NEGATIVE,
    VARIETY_NEGATIVE,
    MoriFiberSpace,
    NefModel,
    NotPseudoEffective,
    _annotate_point,
    _automorphism_bound,
    _components,
    _degree_bound_check,
    _epsilon_canonical_model,
    _eta_bound,
    _eta_lc_report,
    _run_adjoint_mmp,
    _run_log,
    _volume_report,
)


EPSILON = Rational(1, 10)
PARAMS = AdjointParams(EPSILON, 1)


def _chain_lines(d: int, length: int) -> list[str]:
    # degree d foliation on the plane, a regular point blown up and then a chain of saddle corners
    lines = ["base P2", f"kf {d - 1}*H", "point p regular", "blowup p as E1"]
    for k in range(1, length):
        choice = 1 if k == 1 else 1 + (k + d) % 2
        lines.append(f"blowup E{k}p{choice} as E{k + 1}")
    return lines


def _double_blow_up(surface):
    return surface("base P2", "kf -H", "point p regular", "blowup p as E1", "blowup E1p1 as E2")


def test_single_blow_up_is_contracted(surface):
    result = _run_adjoint_mmp(surface(*_chain_lines(0, 1)), PARAMS)

    assert len(result.steps) == 1
    step = result.steps[0]
    assert step.curve == "E1"
    assert step.ray == FOLIATION_NEGATIVE
    assert step.degree == Rational(-11, 10)
    assert step.preserved
    assert str(step.point) == "smooth"
    assert [(d.a_fol, d.a_var) for d in step.point.discrepancies] == [(1, 1)]
    assert isinstance(result.outcome, NefModel)
    assert result.model.rank == 1


def test_double_blow_up_contracts_the_minus_two_curve_first(surface):
    model = _double_blow_up(surface)
    result = _run_adjoint_mmp(model, PARAMS)

    assert [step.curve for step in result.steps] == ["E1", "E2"]
    first, second = result.steps

    assert first.ray == FOLIATION_NEGATIVE
    assert first.degree == -1
    assert first.self_intersection == -2
    assert first.point.quotient == (2, 1)
    assert str(first.point) == "1/2(1, 1)"
    assert [(d.a_fol, d.a_var) for d in first.point.discrepancies] == [(Rational(1, 2), 0)]

    assert second.point.index == 1
    assert [(d.a_fol, d.a_var) for d in second.point.discrepancies] == [(1, 1), (1, 2)]
    assert _components(model, ["E1", "E2"]) == [("E1", "E2")]


def test_line_through_nothing_gives_a_fibration_to_a_point(surface):
    result = _run_adjoint_mmp(surface(*_chain_lines(0, 1), "curve L class H invariant"), PARAMS)

    assert len(result.steps) == 1
    assert isinstance(result.outcome, MoriFiberSpace)
    assert result.outcome.base == "point"
    assert result.outcome.curve == "L"


def test_ruled_surface_is_a_mori_fiber_space_over_a_curve(surface):
    model = surface(
        "base F1",
        "kf -2*C0 - F",
        "curve F class F invariant",
        "curve C0 class C0 non-invariant",
    )
    result = _run_adjoint_mmp(model, PARAMS)

    assert result.steps == ()
    assert isinstance(result.outcome, MoriFiberSpace)
    assert result.outcome.curve == "F"
    assert result.outcome.base == "curve"
    assert str(result.outcome) == "MoriFiberSpace(F over a curve)"


@pytest.mark.parametrize("n", [2, 3, 4])
def test_contracted_negative_section_survives_emission(surface, n):
    model = surface(f"base F{n}", "kf C0", "curve C0 class C0 invariant", "curve F class F invariant")
    result = _run_adjoint_mmp(model, PARAMS)

    assert [(step.curve, step.ray) for step in result.steps] == [("C0", FOLIATION_NEGATIVE)]
    assert result.model.rank == 1

    # F . F becomes 1/n once C0 is contracted
    fibre = result.model.curve("F").divisor
    assert _intersect(fibre, fibre) == Rational(1, n)
    assert _parse_surface(_emit_surface(result.model)) == result.model


def test_declared_fibration_class(surface):
    result = _run_adjoint_mmp(surface("base F1", "kf -2*C0 - F", "fibration F"), PARAMS)

    assert isinstance(result.outcome, MoriFiberSpace)
    assert result.outcome.curve is None


def test_strictly_log_canonical_point_on_a_negative_curve(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "kf -H + E1",
        "curve E1 class E1 invariant",
        'point r germ "dx: x, dy: y" on E1',
    )
    result = _run_adjoint_mmp(model, AdjointParams(EPSILON, 0))

    assert result.outcome == NotPseudoEffective("E1", "r")
    assert result.steps == ()
    assert "relative to catalogue" in str(result.outcome)


def test_variety_negative_rays_come_after_foliation_negative_ones(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "exceptional E2",
        "kf -H + E1",
        "curve A class E2 invariant",
        "curve B class E1 invariant",
    )
    result = _run_adjoint_mmp(model, PARAMS)

    assert [(step.curve, step.ray) for step in result.steps] == [("B", FOLIATION_NEGATIVE), ("A", VARIETY_NEGATIVE)]


def test_minus_three_curve_gives_a_quotient_point(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "exceptional E2",
        "exceptional E3",
        "kf 2*E1",
        'curve C class "E1 - E2 - E3" invariant',
    )
    result = _run_adjoint_mmp(model, PARAMS)

    step = result.steps[0]
    assert step.point.quotient == (3, 1)
    assert [(d.a_fol, d.a_var) for d in step.point.discrepancies] == [(Rational(2, 3), Rational(-1, 3))]

    report = _eta_lc_report(result)
    assert report.margin == Rational(2, 3)
    assert report.bound == Rational(1, 11)
    assert report.holds


@pytest.mark.parametrize("d", range(4))
@pytest.mark.parametrize("length", range(1, 6))
def test_runs_over_blow_up_chains(surface, d, length):
    model = surface(*_chain_lines(d, length))
    result = _run_adjoint_mmp(model, PARAMS)

    assert isinstance(result.outcome, (NefModel, MoriFiberSpace))
    assert len(result.steps) <= model.rank - 1
    assert all(step.preserved for step in result.steps)

    # degrees recomputed from the initial model
    current = result.initial
    for step in result.steps:
        degree = _intersect(_adjoint_class(current, EPSILON), current.curve(step.curve).divisor)
        assert degree == step.degree
        assert degree < 0
        current = _contract_curve(current, step.curve)

    adjoint = _adjoint_class(result.model, EPSILON)
    assert all(_intersect(adjoint, curve.divisor) >= 0 for curve in result.model.curves)
    assert _eta_lc_report(result).holds


def test_mmp_preconditions(surface):
    plane = ("base P2", "kf -H", "curve L class H invariant")

    with pytest.raises(PreconditionViolation):
        _run_adjoint_mmp(surface(*plane), AdjointParams(Rational(1, 5), 1))
    with pytest.raises(PreconditionViolation):
        _run_adjoint_mmp(surface(*plane, "boundary L 1/2"), PARAMS)
    with pytest.raises(PreconditionViolation):
        _run_adjoint_mmp(surface(*plane, 'point q germ "dx: y, dy: x^2"'), PARAMS)
    with pytest.raises(PreconditionViolation):
        _run_adjoint_mmp(surface(*plane, 'point r germ "dx: x, dy: y"'), PARAMS)


def test_adjoint_negative_curve_without_fibration(surface):
    model = surface("base P2", "exceptional E1", "kf -H + E1", "curve L class H invariant")

    with pytest.raises(CatalogueIncomplete):
        _run_adjoint_mmp(model, PARAMS)


def test_canonical_model_with_both_parts_trivial(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "exceptional E2",
        "kf 2*H - E1 - E2",
        'curve C class "E1 - E2" invariant',
        "curve E2 class E2 non-invariant",
    )
    result = _run_adjoint_mmp(model, PARAMS)
    assert isinstance(result.outcome, NefModel)

    canonical = _epsilon_canonical_model(result)
    step = canonical.steps[0]
    assert (step.curve, step.case, step.t) == ("C", "iii", Rational(1, 2))
    assert step.point.quotient == (2, 1)

    remaining = canonical.model.curve("E2").divisor
    assert _intersect(_adjoint_class(canonical.model, EPSILON), remaining) == Rational(9, 10)


def test_canonical_model_with_variety_negative_curve(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "kf 2*H - 1/10*E1",
        "curve E1 class E1 non-invariant",
    )
    canonical = _epsilon_canonical_model(_run_adjoint_mmp(model, PARAMS))

    step = canonical.steps[0]
    assert step.case == "ii"
    assert step.preserved
    assert [(d.iota, d.a_fol, d.a_var) for d in step.point.discrepancies] == [(1, Rational(-1, 10), 1)]
    assert len(canonical.points) == 1


def test_canonical_model_needs_a_nef_outcome(surface):
    result = _run_adjoint_mmp(surface("base F1", "kf -2*C0 - F", "fibration F"), PARAMS)

    with pytest.raises(PreconditionViolation):
        _epsilon_canonical_model(result)


def test_annotation_subtracts_boundary_coefficients(surface):
    model = surface(
        "base P2",
        "exceptional E1",
        "kf -H + E1",
        "curve E1 class E1 invariant",
        'curve L class "H - E1" non-invariant',
        "boundary L 1/2",
    )
    point = _annotate_point(model, ("E1",))

    # a line of coefficient 1/2 through a regular point lowers both discrepancies by 1/2
    assert [(d.iota, d.a_fol, d.a_var) for d in point.discrepancies] == [(0, Rational(1, 2), Rational(1, 2))]


def test_run_log_lines(surface):
    result = _run_adjoint_mmp(surface(*_chain_lines(0, 1), "assume catalogue-complete"), PARAMS)
    records = [json.loads(line) for line in _run_log(result).splitlines()]

    assert records[0]["format"] == "folmmp-runlog v1"
    assert records[0]["epsilon"] == "1/10"
    assert records[0]["rank"] == 2
    assert records[0]["assumptions"] == ["catalogue-complete"]
    assert records[1]["record"] == "step"
    assert records[1]["degree"] == "-11/10"
    assert records[-1] == {"record": "outcome", "kind": "NefModel", "relative_to_catalogue": True}


def test_eta_bound():
    assert _eta_bound(Rational(1, 10), 1) == Rational(1, 11)
    assert _eta_bound(Rational(1, 10), 0) == 0


def test_degree_bound_chain():
    report = _degree_bound_check(2, Rational(1, 10), 3, Rational(6), Rational(1))

    assert report.m0 == 6
    assert report.sections == 10
    assert report.restriction == Rational(28, 5)
    assert report.vanishing
    assert report.bound == 6
    assert report.holds

    assert _degree_bound_check(2, Rational(1, 10), 4, Rational(1), Rational(1)).restriction == Rational(39, 5)
    with pytest.raises(PreconditionViolation):
        _degree_bound_check(0, Rational(1, 10), 3, Rational(1), Rational(1))


def test_automorphism_and_volume_bounds():
    assert _automorphism_bound(Rational(10), Rational(2)) == 5
    with pytest.raises(PreconditionViolation):
        _automorphism_bound(Rational(10), Rational(0))

    report = _volume_report(Rational(1), Rational(1, 10), Rational(1, 100))
    assert report.constant == 100
    assert report.bound == 100
    assert report.above
