from __future__ import annotations

from math import gcd

import pytest
from sympy import Rational

from folmmp import PreconditionViolation, Undecided, UnresolvedCenter
from folmmp.services.exactcore.utils import UNBOUNDED, _continued_fraction, _parse_polynomial
from folmmp.services.germ.utils import _boundary
from folmmp.services.restree.utils import (
    CANONICAL,
    NOT_LOG_CANONICAL,
    STRICTLY_LOG_CANONICAL,
    TERMINAL,
    AdjointParams,
    Certified,
    Refuted,
    _adjoint_lc_check,
    _adjoint_threshold,
    _boundary_refutation,
    _classify,
    _dot,
    _entry_bound,
    _grow,
    _log_terminal,
    _ps16_epsilon,
    _replay,
    _seidenberg_reduce,
    _strict_lc_resolution,
)


# germs with nilpotent linear part, all refuted for small epsilon at delta = 0
NILPOTENT = [
    "dx: y, dy: x^2",
    "dx: y, dy: x^3",
    "dx: x^2, dy: y^2",
    "dx: y^2, dy: x^2",
    "dx: x^2, dy: x*y + y^3",
    "dx: x^3, dy: y^3",
    "dx: x^2 + y^2, dy: x*y",
    "dx: x*y, dy: x^2 - y^2",
    "dx: y^2, dy: x^3",
    "dx: x^2 - y^3, dy: y^2",
    "dx: y^2, dy: x^2 + y^3",
]


# reduced germs, canonical and certified for every epsilon at delta = 1
REDUCED = [
    "dx: x, dy: -y",
    "dx: x, dy: -2*y",
    "dx: 2*x, dy: -3*y",
    "dx: x, dy: -y + x^2",
    "dx: x^2, dy: y",
    "dx: x^3, dy: y",
]


@pytest.mark.parametrize("text, kind, marker", [
    ("dx: 1, dy: 0", TERMINAL, "regular point"),
    ("dx: x, dy: -y", CANONICAL, "reduced"),
    ("dx: x^2, dy: y", CANONICAL, "saddle-node"),
    ("dx: y, dy: x^2", NOT_LOG_CANONICAL, "nilpotent linear part"),
    ("dx: x^2, dy: y^2", NOT_LOG_CANONICAL, "zero linear part"),
])
def test_classification_of_simple_germs(germ, text, kind, marker):
    result = _classify(germ(text))

    assert result.kind == kind
    assert result.marker == marker


def test_linear_nodes_are_strictly_log_canonical(germ):
    radial = _classify(germ("dx: x, dy: y"))
    node = _classify(germ("dx: x, dy: 2*y"))

    assert radial.kind == STRICTLY_LOG_CANONICAL
    assert radial.pair == (1, 1)
    assert not radial.log_terminal
    assert str(radial) == "StrictlyLogCanonical (1, 1)"
    assert node.kind == STRICTLY_LOG_CANONICAL
    assert node.pair == (1, 2)


def test_classification_needs_saturated_germs():
    from folmmp.services.germ.utils import VectorFieldGerm

    with pytest.raises(PreconditionViolation):
        _classify(VectorFieldGerm(_parse_polynomial("x^2"), _parse_polynomial("x*y")))


def test_reduction_tree_of_the_cusp_field(germ):
    tree = _seidenberg_reduce(germ("dx: y, dy: x^2"))

    assert tree.complete
    assert tree.depth == 3
    assert all(node.status != "truncated" for node in tree.nodes)

    last = max(tree.divisors, key=lambda divisor: divisor.depth)
    assert (last.a_fol, last.a_var) == (-1, 4)


def test_strict_lc_resolution_follows_the_euclidean_algorithm():
    tree = _strict_lc_resolution(3, 5)

    assert len(tree.divisors) == 4
    assert sum(divisor.iota for divisor in tree.divisors) == 1


def _euclid_steps(p: int, q: int) -> int:
    # subtractive steps down to (1, 1), plus the dicritical blow-up there
    steps = 1
    while p != q:
        p, q = (p - q, q) if p > q else (p, q - p)
        steps += 1
    return steps


def test_strict_lc_divisor_counts_match_subtractive_euclid():
    for total in range(2, 61):
        for p in range(1, total):
            q = total - p
            if gcd(p, q) != 1:
                continue

            assert len(_strict_lc_resolution(p, q).divisors) == _euclid_steps(p, q), (p, q)


def test_strict_lc_resolutions_over_small_pairs():
    for total in range(2, 15):
        for p in range(1, total):
            q = total - p
            if gcd(p, q) != 1:
                continue

            tree = _strict_lc_resolution(p, q)
            assert len(tree.divisors) == _continued_fraction(max(p, q), min(p, q)).digit_sum

            dicritical = [divisor for divisor in tree.divisors if divisor.iota == 1]
            assert len(dicritical) == 1
            assert dicritical[0].a_fol == -1
            assert dicritical[0].a_var == p + q - 1
            assert all(divisor.a_fol == 0 for divisor in tree.divisors if divisor.iota == 0)


@pytest.mark.parametrize("text", NILPOTENT)
@pytest.mark.parametrize("epsilon", [Rational(1, 6), Rational(1, 10), Rational(1, 100)])
def test_nilpotent_germs_are_refuted(germ, text, epsilon):
    g = germ(text)
    verdict = _adjoint_lc_check(g, AdjointParams(epsilon, 0))

    assert isinstance(verdict, Refuted)
    assert verdict.divisor.depth <= 4
    assert verdict.divisor.a_var <= 4
    assert verdict.divisor.a_fol <= -(verdict.divisor.iota + 1)
    assert verdict.value < verdict.bound

    # the witness path replays to the same coefficients
    replayed = _replay(g, verdict.centers)[-1]
    assert (replayed.iota, replayed.a_fol, replayed.a_var) == (verdict.divisor.iota, verdict.divisor.a_fol, verdict.divisor.a_var)


@pytest.mark.parametrize("text", NILPOTENT + REDUCED)
def test_depth_three_trees_keep_a_var_at_most_four(germ, text):
    tree = _grow(germ(text), depth=3, extend=3)

    assert tree.divisors
    assert all(divisor.depth <= 3 for divisor in tree.divisors)
    assert all(divisor.a_var <= 4 for divisor in tree.divisors)


def test_cusp_field_is_refuted_at_its_third_blow_up(germ):
    verdict = _adjoint_lc_check(germ("dx: y, dy: x^2"), AdjointParams(Rational(1, 10), 0))

    assert isinstance(verdict, Refuted)
    assert verdict.divisor.depth == 3
    assert (verdict.divisor.a_fol, verdict.divisor.a_var) == (-1, 4)
    assert str(verdict).startswith("Refuted(")


def test_higher_cusp_is_refuted_at_depth_two(germ):
    verdict = _adjoint_lc_check(germ("dx: y, dy: x^3"), AdjointParams(Rational(1, 10), 0))

    assert isinstance(verdict, Refuted)
    assert verdict.divisor.depth == 2
    assert (verdict.divisor.a_fol, verdict.divisor.a_var) == (-1, 2)


def test_reduced_points_are_certified(germ):
    for text in ("dx: x, dy: -y", "dx: x^2, dy: y", "dx: x, dy: -2*y"):
        verdict = _adjoint_lc_check(germ(text), AdjointParams(Rational(1, 10), 1))
        assert isinstance(verdict, Certified)
        assert str(verdict) == "Certified(true)"


@pytest.mark.parametrize("text", REDUCED)
def test_certification_is_monotone_in_epsilon(germ, text):
    g = germ(text)
    assert _classify(g).kind == CANONICAL

    assert isinstance(_adjoint_lc_check(g, AdjointParams(Rational(1, 5), 1)), Certified)
    for epsilon in (Rational(1, 6), Rational(1, 10), Rational(1, 37), Rational(1, 100), Rational(1, 1000)):
        assert isinstance(_adjoint_lc_check(g, AdjointParams(epsilon, 1)), Certified)


def test_radial_point_depends_on_delta(germ):
    radial = germ("dx: x, dy: y")

    assert isinstance(_adjoint_lc_check(radial, AdjointParams(Rational(1, 10), 1)), Refuted)
    assert isinstance(_adjoint_lc_check(radial, AdjointParams(Rational(1, 10), 0)), Certified)


def test_boundary_through_a_saddle(germ):
    saddle = germ("dx: x, dy: -y")
    boundary = (_boundary(saddle, _parse_polynomial("y - x"), Rational(1, 2)),)

    refuted = _adjoint_lc_check(saddle, AdjointParams(Rational(1, 10), 0), boundary)
    assert isinstance(refuted, Refuted)
    assert refuted.divisor.a_fol == Rational(-1, 2)
    assert refuted.divisor.a_var == Rational(1, 2)

    assert not isinstance(_adjoint_lc_check(saddle, AdjointParams(Rational(1, 2), 0), boundary), Refuted)


def test_adjoint_check_preconditions(germ):
    saddle = germ("dx: x, dy: -y")
    boundary = (_boundary(saddle, _parse_polynomial("y - x"), Rational(1)),)

    with pytest.raises(PreconditionViolation):
        _adjoint_lc_check(saddle, AdjointParams(Rational(1, 10), 1, search_depth=3))
    with pytest.raises(PreconditionViolation):
        _adjoint_lc_check(saddle, AdjointParams(Rational(1, 10), 1, klt=True), boundary)


@pytest.mark.parametrize("epsilon, delta", [(0, 1), (Rational(-1, 2), 1), (Rational(1, 10), 2), (Rational(1, 10), -1)])
def test_adjoint_params_are_validated(epsilon, delta):
    with pytest.raises(PreconditionViolation):
        AdjointParams(epsilon, delta)


def test_mmp_entry_needs_small_epsilon():
    AdjointParams(Rational(1, 10), 1).require_mmp()
    with pytest.raises(PreconditionViolation):
        AdjointParams(Rational(1, 5), 1).require_mmp()


def test_adjoint_thresholds(germ):
    assert _adjoint_threshold(germ("dx: y, dy: x^2"), 0) == Rational(1, 5)
    assert _adjoint_threshold(germ("dx: x, dy: y"), 1) == 1
    assert _adjoint_threshold(germ("dx: x, dy: 2*y"), 1) == Rational(1, 2)
    assert _adjoint_threshold(germ("dx: x, dy: -y"), 1) is UNBOUNDED


@pytest.mark.parametrize("text", NILPOTENT)
@pytest.mark.parametrize("delta", [Rational(0), Rational(1, 2), Rational(1)])
def test_thresholds_are_certified_across_delta(germ, text, delta):
    g = germ(text)
    try:
        threshold = _adjoint_threshold(g, delta)
    except UnresolvedCenter:
        pytest.skip(f"{text} needs an irrational center")
    except Undecided as ex:
        # refutations raise the candidate, only inconclusive checks stay undecided
        assert "Refuted" not in str(ex)
        return

    if threshold is UNBOUNDED:
        assert isinstance(_adjoint_lc_check(g, AdjointParams(Rational(1, 1000), delta)), Certified)
        return

    assert isinstance(_adjoint_lc_check(g, AdjointParams(threshold, delta)), Certified)
    assert not isinstance(_adjoint_lc_check(g, AdjointParams(threshold * Rational(9, 10), delta)), Certified)
    if delta == 0:
        assert threshold >= Rational(1, 5)


def test_threshold_past_a_refuted_candidate(germ):
    g = germ("dx: x^2, dy: x*y + y^3")
    threshold = _adjoint_threshold(g, Rational(1, 2))

    assert threshold is not UNBOUNDED
    assert isinstance(_adjoint_lc_check(g, AdjointParams(threshold, Rational(1, 2))), Certified)


def test_log_terminality(germ):
    assert _log_terminal(germ("dx: x, dy: -y"))
    assert _log_terminal(germ("dx: 1, dy: 0"))
    assert not _log_terminal(germ("dx: x, dy: y"))


def test_epsilon_scale_conversion():
    assert _ps16_epsilon(Rational(1, 10)) == Rational(1, 11)
    assert _ps16_epsilon(Rational(1, 11), inverse=True) == Rational(1, 10)
    with pytest.raises(PreconditionViolation):
        _ps16_epsilon(Rational(1), inverse=True)


def test_boundary_refutation_closed_form():
    result = _boundary_refutation(Rational(1, 2), 0, Rational(1, 10))

    assert result.ratio == Rational(9, 2)
    assert result.refuted
    assert result.threshold == Rational(1, 3)
    assert not _boundary_refutation(Rational(1, 2), 0, Rational(1, 2)).refuted


def test_entry_bound():
    assert _entry_bound(Rational(1, 2), Rational(9, 10)) == Rational(1, 9)
    assert _entry_bound(Rational(1, 10), Rational(1, 2)) == Rational(1, 19)
    assert _entry_bound(Rational(1), Rational(1, 2)) == Rational(1, 5)
    with pytest.raises(PreconditionViolation):
        _entry_bound(Rational(0), Rational(1, 2))


def test_dot_export(germ):
    text = _dot(_seidenberg_reduce(germ("dx: y, dy: x^2")))

    assert text.startswith("digraph resolution {\n")
    assert '"0" -> "0.1"' in text
    assert text.endswith("}\n")
