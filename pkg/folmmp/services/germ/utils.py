"""
foliation germs service module
rank one foliation germs at a smooth surface point are polynomial vector fields a(x, y)d/dx + b(x, y)d/dy,
this module saturates them, reads their linear part, blows them up at the origin with invariance and
discrepancy bookkeeping, locates the singular points on the exceptional divisor and parses the germ text format
"""


# standard imports
import logging
import re
from dataclasses import dataclass, field, replace

# pip install sympy
# exact polynomial arithmetic and factorisation
from sympy import ImmutableMatrix, Poly, QQ, Rational, sqrt

# exact arithmetic core
from folmmp.services.exactcore.utils import (
    X, Y, _terms, _poly_order, _degree, _homogeneous, _constant, _evaluate,
    _chart, _axis_order, _unshift, _translate, _restrict, _parse_polynomial, _format_polynomial,
)

# importing package errors
from folmmp import ParseError, PreconditionViolation, NonIsolatedSingularity, UnresolvedCenter

# global configurations
import config


# module logger
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VectorFieldGerm:
    """
    vector field a d/dx + b d/dy generating a foliation near the origin
    """
    a: Poly
    b: Poly
    saturated: bool = False

    def __post_init__(self):
        # a foliation needs a nonzero generator
        if self.a.is_zero and self.b.is_zero:
            raise PreconditionViolation("a germ needs a nonzero vector field")

    @property
    def singular(self) -> bool:
        return _constant(self.a) == 0 and _constant(self.b) == 0

    @property
    def degree(self) -> int:
        return max(_degree(self.a), _degree(self.b))

    def __str__(self) -> str:
        return f"dx: {_format_polynomial(self.a)}, dy: {_format_polynomial(self.b)}"


@dataclass(frozen=True)
class LinearPart:
    """
    jacobian of the coefficient pair at the origin, rows are (da/dx, da/dy) and (db/dx, db/dy)
    """
    matrix: ImmutableMatrix
    regular: bool = False

    @property
    def trace(self) -> Rational:
        return self.matrix.trace()

    @property
    def determinant(self) -> Rational:
        return self.matrix.det()

    @property
    def nilpotent(self) -> bool:
        return self.trace == 0 and self.determinant == 0

    @property
    def zero(self) -> bool:
        return self.matrix.is_zero_matrix

    @property
    def scalar(self) -> bool:
        # multiple of the identity
        return self.matrix[0, 1] == 0 and self.matrix[1, 0] == 0 and self.matrix[0, 0] == self.matrix[1, 1]

    @property
    def eigenvalues(self) -> tuple:
        """
        exact eigenvalues (possibly algebraic), ordered as the diagonal when the matrix is diagonal
        """
        if self.matrix[0, 1] == 0 and self.matrix[1, 0] == 0:
            return (self.matrix[0, 0], self.matrix[1, 1])

        # roots of t^2 - tr t + det
        root = sqrt(self.trace ** 2 - 4 * self.determinant)
        return ((self.trace + root) / 2, (self.trace - root) / 2)

    @property
    def ratio(self) -> tuple[int, int] | None:
        """
        coprime positive integers (p, q) with eigenvalues proportional to (p, q), None unless the ratio is a positive rational
        """
        # both eigenvalues rational and of the same sign
        if self.determinant <= 0:
            return None

        first, second = self.eigenvalues
        if not (first.is_Rational and second.is_Rational):
            return None

        ratio = Rational(first) / Rational(second)
        return (int(ratio.p), int(ratio.q))

    def __str__(self) -> str:
        rows = [[str(self.matrix[i, j]) for j in range(2)] for i in range(2)]
        return f"[[{', '.join(rows[0])}], [{', '.join(rows[1])}]]" + (" (regular point)" if self.regular else "")


@dataclass(frozen=True)
class BoundaryCurve:
    """
    boundary component through the origin: irreducible polynomial, coefficient and invariance flag
    """
    f: Poly
    coefficient: Rational
    invariant: bool

    def __str__(self) -> str:
        return f"boundary: {_format_polynomial(self.f)}, {self.coefficient}, {'invariant' if self.invariant else 'non-invariant'}"


@dataclass(frozen=True)
class SingularPoint:
    """
    point of the exceptional divisor, in chart 1 it is (0, coordinate), in chart 2 the origin,
    irrational points keep the irreducible factor of the restricted polynomial instead of a coordinate
    """
    chart: int
    coordinate: Rational | None
    multiplicity: int = 1
    minimal_polynomial: Poly | None = None
    germ: VectorFieldGerm | None = field(default=None, compare=False)

    @property
    def rational(self) -> bool:
        return self.minimal_polynomial is None

    def __str__(self) -> str:
        if not self.rational:
            return f"chart {self.chart} roots of {_format_polynomial(self.minimal_polynomial)}"

        return f"chart {self.chart} (0, {self.coordinate})"


@dataclass(frozen=True)
class BlowUpResult:
    """
    blow-up of a saturated germ at the origin
    charts[0] lives in (x, xy) coordinates with E = {x = 0}, charts[1] in (xy, y) coordinates with E = {y = 0}
    """
    germ: VectorFieldGerm
    charts: tuple[VectorFieldGerm, VectorFieldGerm]
    exceptional_invariant: bool
    foliation_discrepancy: Rational
    order: int
    pullback_order: int
    transverse: bool = False
    new_singular_points: tuple[SingularPoint, ...] = ()

    @property
    def iota(self) -> int:
        return 0 if self.exceptional_invariant else 1


def _germ(a: Poly, b: Poly) -> VectorFieldGerm:
    """
    saturated germ from a coefficient pair

    args:
        a (Poly): coefficient of d/dx
        b (Poly): coefficient of d/dy

    returns:
        VectorFieldGerm: saturated germ
    """
    return _saturate(VectorFieldGerm(a, b))


def _saturate(g: VectorFieldGerm) -> VectorFieldGerm:
    """
    divide both coefficients by their gcd, saturating twice equals saturating once

    args:
        g (VectorFieldGerm): germ

    returns:
        VectorFieldGerm: germ with coprime coefficients, flagged saturated
    """
    try:
        # gcd over QQ is monic, dividing by it keeps coefficients exact
        common = g.a.gcd(g.b)

        # units change nothing
        if common.is_ground:
            return g if g.saturated else replace(g, saturated=True)

        return VectorFieldGerm(g.a.exquo(common), g.b.exquo(common), saturated=True)
    except Exception as ex:
        # rethrow exception
        raise ex


def _linear_part(g: VectorFieldGerm) -> LinearPart:
    """
    jacobian of (a, b) at the origin, regular germs are reported with the regular marker

    args:
        g (VectorFieldGerm): germ

    returns:
        LinearPart: 2x2 exact matrix
    """
    # degree one coefficients
    a, b = _terms(g.a), _terms(g.b)
    matrix = ImmutableMatrix([
        [a.get((1, 0), 0), a.get((0, 1), 0)],
        [b.get((1, 0), 0), b.get((0, 1), 0)],
    ])

    return LinearPart(matrix, regular=not g.singular)


def _is_log_canonical_germ(g: VectorFieldGerm) -> bool:
    """
    log canonicity of a singular saturated germ, decided by non-nilpotency of its linear part

    args:
        g (VectorFieldGerm): saturated germ singular at the origin

    returns:
        bool: True iff the linear part is not nilpotent
    """
    # the question is vacuous at regular points
    if not g.singular:
        raise PreconditionViolation(f"germ {g} is regular at the origin")

    if not g.saturated:
        raise PreconditionViolation(f"germ {g} is not saturated")

    return not _linear_part(g).nilpotent


def _is_reduced(g: VectorFieldGerm) -> bool:
    """
    reduced (simple) singularity: non-nilpotent linear part with eigenvalue ratio outside the positive
    rationals, or a saddle-node (exactly one zero eigenvalue)

    args:
        g (VectorFieldGerm): germ singular at the origin

    returns:
        bool: True for reduced singular points
    """
    linear = _linear_part(g)

    # nilpotent germs are never reduced
    if linear.nilpotent:
        return False

    # saddle-node, one zero eigenvalue and a nonzero trace
    if linear.determinant == 0:
        return True

    return linear.ratio is None


def _is_invariant_curve(g: VectorFieldGerm, f: Poly) -> bool:
    """
    invariance of the curve {f = 0}: f divides a f_x + b f_y

    args:
        g (VectorFieldGerm): germ
        f (Poly): irreducible polynomial

    returns:
        bool: True when the curve is invariant
    """
    return (g.a * f.diff(X) + g.b * f.diff(Y)).rem(f).is_zero


def _boundary(g: VectorFieldGerm, f: Poly, coefficient: Rational, invariant: bool | None = None) -> BoundaryCurve:
    """
    validated boundary component through the origin

    args:
        g (VectorFieldGerm): germ the boundary lives on
        f (Poly): irreducible polynomial vanishing at the origin
        coefficient (Rational): coefficient in [0, 1]
        invariant (bool) (optional): declared invariance, checked against the germ when given

    returns:
        BoundaryCurve: the boundary component
    """
    coefficient = Rational(coefficient)

    # coefficients restricted to [0, 1]
    if not 0 <= coefficient <= 1:
        raise PreconditionViolation(f"boundary coefficient {coefficient} outside [0, 1]")

    # the component must pass through the point
    if f.is_zero or _constant(f) != 0:
        raise PreconditionViolation(f"boundary curve {_format_polynomial(f)} does not pass through the origin")

    # irreducible over the rationals
    _, factors = f.factor_list()
    if len(factors) != 1 or factors[0][1] != 1:
        raise PreconditionViolation(f"boundary curve {_format_polynomial(f)} is not irreducible")

    # declared flag must agree with the computation
    computed = _is_invariant_curve(g, f)
    if invariant is not None and invariant != computed:
        raise PreconditionViolation(f"boundary curve {_format_polynomial(f)} is declared {'invariant' if invariant else 'non-invariant'} but is {'invariant' if computed else 'non-invariant'}")

    return BoundaryCurve(f, coefficient, computed)


def _blow_up(g: VectorFieldGerm) -> BlowUpResult:
    """
    blow up a saturated germ at the origin

    args:
        g (VectorFieldGerm): saturated germ

    returns:
        BlowUpResult: chart germs, invariance of E, discrepancy and singular points on E
    """
    try:
        # the chart formulas assume coprime coefficients
        if not g.saturated:
            raise PreconditionViolation(f"germ {g} must be saturated before blowing up")

        # order of the dual form a dy - b dx and its leading homogeneous parts
        nu = min(_poly_order(f) for f in (g.a, g.b) if not f.is_zero)
        a_nu, b_nu = _homogeneous(g.a, nu), _homogeneous(g.b, nu)

        # E is not invariant exactly when the leading part is radial
        dicritical = (X * b_nu - Y * a_nu).is_zero
        iota = 1 if dicritical else 0

        # chart 1 (x, xy): x a, b - y a ; chart 2 (xy, y): a - x b, y b
        a1, b1 = _chart(g.a, 1), _chart(g.b, 1)
        a2, b2 = _chart(g.a, 2), _chart(g.b, 2)
        first = (X * a1, b1 - Y * a1)
        second = (a2 - X * b2, Y * b2)

        # dividing the maximal power of the exceptional coordinate
        l1 = min(_axis_order(f, 0) for f in first if not f.is_zero)
        l2 = min(_axis_order(f, 1) for f in second if not f.is_zero)
        charts = (
            _saturate(VectorFieldGerm(_unshift(first[0], 0, l1), _unshift(first[1], 0, l1))),
            _saturate(VectorFieldGerm(_unshift(second[0], 1, l2), _unshift(second[1], 1, l2))),
        )

        # both charts must agree with the radial criterion and with each other
        invariant = (_restrict(charts[0].a, 0).is_zero, _restrict(charts[1].b, 1).is_zero)
        if invariant[0] != (not dicritical) or invariant[1] != (not dicritical) or l1 != l2 or l1 != nu + iota:
            raise PreconditionViolation(f"inconsistent blow-up charts for {g}")

        # foliation discrepancy -(a(P) + iota - 1)
        discrepancy = Rational(-(nu + iota - 1))

        # a dicritical E is transverse when the chart fields are regular and transverse along it
        transverse = False
        if dicritical:
            restricted = _restrict(charts[0].a, 0)
            transverse = restricted.is_ground and not restricted.is_zero and _constant(charts[1].b) != 0

        result = BlowUpResult(g, charts, not dicritical, discrepancy, nu, l1, transverse)
        logger.debug("blow-up of %s: iota=%d, discrepancy=%s", g, iota, discrepancy)

        # singular points on E
        return replace(result, new_singular_points=_singular_points_on_exceptional(result))
    except Exception as ex:
        # rethrow exception
        raise ex


def _pullback_discrepancy(g: VectorFieldGerm) -> Rational:
    """
    discrepancy of the blow-up at the origin computed independently from the chart formulas:
    pull back w = a dy - b dx through x = u, y = uv and count the order along u = 0

    args:
        g (VectorFieldGerm): saturated germ

    returns:
        Rational: -(l(P) - 1)
    """
    # dy = u dv + v du, dx = du
    a = g.a.as_expr().subs(Y, X * Y)
    b = g.b.as_expr().subs(Y, X * Y)
    coefficients = [Poly(Y * a - b, X, Y, domain=QQ), Poly(X * a, X, Y, domain=QQ)]

    # order of the pulled back form along the exceptional divisor
    order = min(_axis_order(f, 0) for f in coefficients if not f.is_zero)

    return Rational(-(order - 1))


def _singular_points_on_exceptional(r: BlowUpResult) -> tuple[SingularPoint, ...]:
    """
    singular points of the transformed foliation along E, chart 1 points first ordered by coordinate,
    then irrational points, then the origin of chart 2 (the only point of E outside chart 1)

    args:
        r (BlowUpResult): blow-up result

    returns:
        tuple[SingularPoint]: points with exact coordinates and their local germs
    """
    first, second = r.charts

    # restrictions of the chart 1 field to E = {x = 0}
    a0, b0 = _restrict(first.a, 0), _restrict(first.b, 0)
    if a0.is_zero and b0.is_zero:
        raise NonIsolatedSingularity(f"transform of {r.germ} vanishes along the exceptional divisor")

    rational, irrational = [], []

    # common roots of the restrictions
    common = a0.gcd(b0)
    if not common.is_ground:
        _, factors = common.factor_list()
        for factor, multiplicity in factors:
            # linear factors give rational points
            if factor.degree() == 1:
                c1, c0 = factor.all_coeffs()
                coordinate = Rational(-c0 / c1)
                rational.append(SingularPoint(1, coordinate, multiplicity, germ=_localize(r, 1, coordinate)))
            else:
                irrational.append(SingularPoint(1, None, multiplicity, minimal_polynomial=factor))

    # chart 2 origin
    points = sorted(rational, key=lambda point: point.coordinate)
    points += sorted(irrational, key=lambda point: _format_polynomial(point.minimal_polynomial))
    if second.singular:
        points.append(SingularPoint(2, Rational(0), 1, germ=second))

    return tuple(points)


def _localize(r: BlowUpResult, chart: int, coordinate: Rational = 0) -> VectorFieldGerm:
    """
    local germ of the transformed foliation at a rational point of E

    args:
        r (BlowUpResult): blow-up result
        chart (int): 1 for points (0, c), 2 for the chart 2 origin
        coordinate (Rational): c for chart 1 points

    returns:
        VectorFieldGerm: germ translated so the point is the origin
    """
    # chart 2 is only used at its origin
    if chart == 2:
        if coordinate != 0:
            raise UnresolvedCenter(f"chart 2 points other than the origin lie in chart 1, got {coordinate}")
        return r.charts[1]

    germ = r.charts[0]
    return VectorFieldGerm(_translate(germ.a, 0, coordinate), _translate(germ.b, 0, coordinate), saturated=True)


def _strict_transform(f: Poly, chart: int) -> Poly:
    """
    strict transform of a curve through the origin in a blow-up chart

    args:
        f (Poly): polynomial vanishing at the origin
        chart (int): 1 or 2

    returns:
        Poly: chart polynomial divided by the power of the exceptional coordinate
    """
    return _unshift(_chart(f, chart), chart - 1, _poly_order(f))


def _transverse_at_origin(g: VectorFieldGerm, f: Poly) -> bool:
    """
    the foliation is regular at the origin and transverse there to the smooth curve {f = 0}

    args:
        g (VectorFieldGerm): germ
        f (Poly): polynomial vanishing at the origin

    returns:
        bool: True when regular and transverse
    """
    if g.singular:
        return False

    # derivative of f along the field at the origin
    return _evaluate(g.a * f.diff(X) + g.b * f.diff(Y), 0, 0) != 0


@dataclass(frozen=True)
class GermInput:
    """
    germ file content
    """
    germ: VectorFieldGerm
    boundary: tuple[BoundaryCurve, ...] = ()


# germ line: dx: <poly>, dy: <poly>
GERM_LINE = re.compile(r"^\s*dx\s*:\s*(?P<a>.*?)\s*,\s*dy\s*:\s*(?P<b>.*?)\s*$")

# boundary line: boundary: <poly>, <coefficient>, invariant|non-invariant
BOUNDARY_LINE = re.compile(r"^\s*boundary\s*:\s*(?P<f>.*?)\s*,\s*(?P<c>[^,]+?)\s*,\s*(?P<flag>invariant|non-invariant)\s*$")


def _parse_germ(text: str, degree_cap: int = config.DEGREE_CAP) -> GermInput:
    """
    parse the germ text format, an optional "folmmp-germ v1" header, one "dx: .., dy: .." line and
    optional boundary lines; comments start with "#"

    args:
        text (str): file content
        degree_cap (int): maximal total degree of the coefficients

    returns:
        GermInput: saturated germ and its boundary
    """
    germ, boundary, seen = None, [], False

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]

        # blank and comment lines
        if not line.strip():
            continue

        # versioned header, only as first statement
        if line.strip().startswith("folmmp-"):
            if seen or line.strip() != config.GERM_HEADER:
                raise ParseError(f"unsupported header {line.strip()!r}, expected {config.GERM_HEADER!r}", number, 1)
            seen = True
            continue
        seen = True

        # vector field line
        match = GERM_LINE.match(line)
        if match:
            if germ is not None:
                raise ParseError("duplicate germ line", number, 1)

            a = _parse_polynomial(match.group("a"), number, match.start("a") + 1)
            b = _parse_polynomial(match.group("b"), number, match.start("b") + 1)

            # polynomial degree cap
            if max(_degree(a), _degree(b)) > degree_cap:
                raise PreconditionViolation(f"line {number}: germ degree exceeds the cap {degree_cap}")

            # a zero field is not a foliation
            if a.is_zero and b.is_zero:
                raise ParseError("the zero vector field is not a foliation", number, match.start("a") + 1)

            germ = _germ(a, b)
            continue

        # boundary component line
        match = BOUNDARY_LINE.match(line)
        if match:
            if germ is None:
                raise ParseError("boundary line before the germ line", number, 1)

            f = _parse_polynomial(match.group("f"), number, match.start("f") + 1)
            try:
                coefficient = Rational(match.group("c"))
            except (TypeError, ValueError, SyntaxError) as ex:
                raise ParseError(f"invalid coefficient {match.group('c')!r}", number, match.start("c") + 1)

            boundary.append(_boundary(germ, f, coefficient, match.group("flag") == "invariant"))
            continue

        raise ParseError(f"unrecognized statement {line.strip()!r}", number, len(line) - len(line.lstrip()) + 1)

    # the germ line is mandatory
    if germ is None:
        raise ParseError("missing 'dx: ..., dy: ...' line", 1, 1)

    return GermInput(germ, tuple(boundary))


def _format_germ(data: GermInput) -> str:
    """
    germ text format with header, re-parses to an equal input

    args:
        data (GermInput): germ and boundary

    returns:
        str: file content
    """
    lines = [config.GERM_HEADER, str(data.germ)]
    lines.extend(str(curve) for curve in data.boundary)
    return "\n".join(lines) + "\n"
