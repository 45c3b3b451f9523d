"""
surface models service module
combinatorial projective foliated surfaces: picard lattices of iterated blow-ups of the plane and of hirzebruch
surfaces, exact divisor classes, curve catalogues with invariance flags and germ annotations, boundary,
blow-ups and contractions, and the versioned surface text format
"""


# standard imports
import logging
import shlex
from math import gcd
from dataclasses import dataclass, field, replace
from typing import Callable

# pip install sympy
# exact linear algebra and rational arithmetic
from sympy import ImmutableMatrix, Rational, Symbol, zeros

# exact arithmetic core and germ service
from folmmp.services.exactcore.utils import _polynomial, _parse_polynomial
from folmmp.services.germ.utils import VectorFieldGerm, _blow_up, _parse_germ

# importing package errors
from folmmp import FolmmpError, ParseError, PreconditionViolation

# importing generic utilities and global configurations
from utils import rparse, rstr
import config


# module logger
logger = logging.getLogger(__name__)


def _sign_changes(coefficients: list[Rational]) -> int:
    # descartes count on the nonzero coefficients
    signs = [c > 0 for c in coefficients if c != 0]
    return sum(1 for first, second in zip(signs, signs[1:]) if first != second)


def _signature(matrix: ImmutableMatrix) -> tuple[int, int, int]:
    """
    signature of a symmetric rational matrix from the characteristic polynomial, exact by descartes' rule
    since every root is real

    args:
        matrix (ImmutableMatrix): symmetric matrix

    returns:
        tuple[int, int, int]: (positive, negative, zero) eigenvalue counts
    """
    t = Symbol("t")
    coefficients = [Rational(c) for c in matrix.charpoly(t).all_coeffs()]

    # zero eigenvalues are the trailing zero coefficients
    zero = 0
    while coefficients and coefficients[-1] == 0:
        coefficients.pop()
        zero += 1

    degree = len(coefficients) - 1
    positive = _sign_changes(coefficients)
    negative = _sign_changes([c * (-1) ** (degree - k) for k, c in enumerate(coefficients)])

    return positive, negative, zero


@dataclass(frozen=True)
class PicardLattice:
    """
    integral intersection lattice, base is "P2" or "F<n>" and the remaining labels are exceptional classes
    """
    base: str
    labels: tuple[str, ...]
    matrix: ImmutableMatrix

    def __post_init__(self):
        n = len(self.labels)

        if len(set(self.labels)) != n:
            raise PreconditionViolation(f"duplicate lattice labels in {self.labels}")

        if self.matrix.shape != (n, n) or self.matrix != self.matrix.T:
            raise PreconditionViolation("intersection matrix must be square, symmetric and match the labels")

        if any(not entry.is_integer for entry in self.matrix):
            raise PreconditionViolation("intersection matrix entries must be integers")

        # hodge index
        if _signature(self.matrix) != (1, n - 1, 0):
            raise PreconditionViolation(f"intersection matrix signature must be (1, {n - 1})")

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def base_labels(self) -> tuple[str, ...]:
        return ("H",) if self.base == "P2" else ("F", "C0")

    @property
    def exceptional(self) -> tuple[str, ...]:
        return self.labels[len(self.base_labels):]

    def index(self, label: str) -> int:
        if label not in self.labels:
            raise PreconditionViolation(f"unknown lattice label {label!r}")
        return self.labels.index(label)

    def basis(self, label: str) -> "DivisorClass":
        coefficients = [Rational(0)] * self.rank
        coefficients[self.index(label)] = Rational(1)
        return DivisorClass(self, tuple(coefficients))

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, tuple(Rational(0) for _ in self.labels))

    @property
    def canonical(self) -> "DivisorClass":
        """
        canonical class of the blown up base, K = pullback of K_base + sum of exceptional classes
        """
        if self.base == "P2":
            k = -3 * self.basis("H")
        else:
            k = -2 * self.basis("C0") - (int(self.base[1:]) + 2) * self.basis("F")

        for label in self.exceptional:
            k = k + self.basis(label)

        return k

    def blow_up(self, label: str) -> "PicardLattice":
        """
        lattice of the blow-up at a point, the new class E has E^2 = -1 and is orthogonal to the old ones

        args:
            label (str): name of the new class

        returns:
            PicardLattice: lattice of rank + 1
        """
        if label in self.labels:
            raise PreconditionViolation(f"lattice label {label!r} already exists")

        n = self.rank
        matrix = zeros(n + 1, n + 1)
        matrix[:n, :n] = self.matrix
        matrix[n, n] = -1

        return PicardLattice(self.base, self.labels + (label,), ImmutableMatrix(matrix))

    def embed(self, divisor: "DivisorClass") -> "DivisorClass":
        """
        pull a class of a sublattice (a lattice before some blow-ups) back to this lattice

        args:
            divisor (DivisorClass): class on a prefix lattice

        returns:
            DivisorClass: same coefficients, zero on the new labels
        """
        if divisor.lattice == self:
            return divisor

        if self.labels[:divisor.lattice.rank] != divisor.lattice.labels or self.base != divisor.lattice.base:
            raise PreconditionViolation("class does not live on a sublattice of this lattice")

        return DivisorClass(self, divisor.coefficients + tuple(Rational(0) for _ in range(self.rank - divisor.lattice.rank)))

    def parse_class(self, text: str, line: int = 1, column: int = 1) -> "DivisorClass":
        """
        parse a linear combination of lattice labels such as "2*H - E1 + 1/2*E2"

        args:
            text (str): class text
            line (int): line in the source file
            column (int): column where the text starts

        returns:
            DivisorClass: the class
        """
        generators = tuple(Symbol(label) for label in self.labels)
        f = _parse_polynomial(text, line, column, generators)

        # linear and homogeneous
        terms = {exponent: coefficient for exponent, coefficient in f.as_dict().items() if coefficient != 0}
        if any(sum(exponent) != 1 for exponent in terms):
            raise ParseError(f"divisor class must be a linear combination of {', '.join(self.labels)}: {text.strip()!r}", line, column)

        coefficients = [Rational(0)] * self.rank
        for exponent, coefficient in terms.items():
            coefficients[exponent.index(1)] = Rational(coefficient)

        return DivisorClass(self, tuple(coefficients))


def _projective_plane() -> PicardLattice:
    # H^2 = 1
    return PicardLattice("P2", ("H",), ImmutableMatrix([[1]]))


def _hirzebruch(n: int) -> PicardLattice:
    # F^2 = 0, F.C0 = 1, C0^2 = -n
    if n < 0:
        raise PreconditionViolation(f"hirzebruch surfaces F_n need n >= 0, got {n}")
    return PicardLattice(f"F{n}", ("F", "C0"), ImmutableMatrix([[0, 1], [1, -n]]))


@dataclass(frozen=True)
class DivisorClass:
    lattice: PicardLattice = field(repr=False)
    coefficients: tuple[Rational, ...]

    def __post_init__(self):
        if len(self.coefficients) != self.lattice.rank:
            raise PreconditionViolation("class coefficients do not match the lattice rank")
        object.__setattr__(self, "coefficients", tuple(Rational(c) for c in self.coefficients))

    def _same(self, other: "DivisorClass") -> None:
        if not isinstance(other, DivisorClass) or other.lattice != self.lattice:
            raise PreconditionViolation("classes live on different lattices")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.lattice, tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.lattice, tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.lattice, tuple(-a for a in self.coefficients))

    def __mul__(self, scalar) -> "DivisorClass":
        return DivisorClass(self.lattice, tuple(Rational(scalar) * a for a in self.coefficients))

    __rmul__ = __mul__

    def dot(self, other: "DivisorClass") -> Rational:
        return _intersect(self, other)

    @property
    def integral(self) -> bool:
        return all(c.is_integer for c in self.coefficients)

    @property
    def primitive(self) -> bool:
        # integral with coprime coefficients
        if not self.integral or not any(self.coefficients):
            return False
        common = 0
        for c in self.coefficients:
            common = gcd(common, int(c))
        return common == 1

    def __str__(self) -> str:
        parts = []
        for label, c in zip(self.lattice.labels, self.coefficients):
            if c == 0:
                continue
            magnitude = abs(c)
            term = label if magnitude == 1 else f"{rstr(magnitude)}*{label}"
            if not parts:
                parts.append(f"-{term}" if c < 0 else term)
            else:
                parts.append(f"- {term}" if c < 0 else f"+ {term}")
        return " ".join(parts) if parts else "0"


def _intersect(a: DivisorClass, b: DivisorClass) -> Rational:
    """
    intersection number through the lattice matrix

    args:
        a (DivisorClass): first class
        b (DivisorClass): second class on the same lattice

    returns:
        Rational: a . b
    """
    a._same(b)
    matrix = a.lattice.matrix
    n = a.lattice.rank

    return sum((a.coefficients[i] * matrix[i, j] * b.coefficients[j] for i in range(n) for j in range(n) if a.coefficients[i] and b.coefficients[j]), Rational(0))


@dataclass(frozen=True)
class Curve:
    name: str
    divisor: DivisorClass
    invariant: bool
    genus: int = 0


@dataclass(frozen=True)
class MarkedPoint:
    """
    annotated point of the surface, curves lists (curve name, multiplicity) of the catalogue curves through it
    """
    name: str
    germ: VectorFieldGerm
    curves: tuple[tuple[str, int], ...] = ()

    def on(self, curve: str) -> bool:
        return any(name == curve for name, _ in self.curves)


@dataclass(frozen=True)
class ContractedCurve:
    name: str
    divisor: DivisorClass
    invariant: bool
    coefficient: Rational = Rational(0)
    genus: int = 0


@dataclass(frozen=True)
class FoliatedSurfaceModel:
    """
    foliated surface with boundary: lattice, K_X, K_F, curve catalogue, marked points, boundary coefficients,
    declared fibration classes and assumptions, and the curves contracted so far
    """
    lattice: PicardLattice
    k_x: DivisorClass
    k_f: DivisorClass
    curves: tuple[Curve, ...] = ()
    points: tuple[MarkedPoint, ...] = ()
    boundary: tuple[tuple[str, Rational], ...] = ()
    fibrations: tuple[DivisorClass, ...] = ()
    assumptions: tuple[str, ...] = ()
    contracted: tuple[ContractedCurve, ...] = ()

    def __post_init__(self):
        classes = [self.k_x, self.k_f] + [c.divisor for c in self.curves] + list(self.fibrations) + [c.divisor for c in self.contracted]
        if any(divisor.lattice != self.lattice for divisor in classes):
            raise PreconditionViolation("every class of a model must live on its lattice")

        names = [curve.name for curve in self.curves]
        if len(set(names)) != len(names):
            raise PreconditionViolation(f"duplicate curve names in {names}")

        if len({point.name for point in self.points}) != len(self.points):
            raise PreconditionViolation("duplicate point names")

        for point in self.points:
            for name, multiplicity in point.curves:
                if name not in names or multiplicity < 1:
                    raise PreconditionViolation(f"point {point.name} lies on unknown curve {name!r} or has multiplicity {multiplicity}")

        # boundary coefficients in [0, 1] on catalogue curves
        seen = set()
        for name, coefficient in self.boundary:
            if name not in names or name in seen:
                raise PreconditionViolation(f"boundary entry {name!r} is not a catalogue curve or is repeated")
            if not 0 <= coefficient <= 1:
                raise PreconditionViolation(f"boundary coefficient of {name} must lie in [0, 1], got {coefficient}")
            seen.add(name)

    @property
    def rank(self) -> int:
        return self.lattice.rank - len(self.contracted)

    def curve(self, name: str) -> Curve:
        for curve in self.curves:
            if curve.name == name:
                return curve
        raise PreconditionViolation(f"no catalogue curve {name!r}")

    def point(self, name: str) -> MarkedPoint:
        for point in self.points:
            if point.name == name:
                return point
        raise PreconditionViolation(f"no marked point {name!r}")

    def coefficient(self, name: str) -> Rational:
        return dict(self.boundary).get(name, Rational(0))

    def boundary_class(self, invariant: bool | None = None) -> DivisorClass:
        """
        boundary divisor, or its invariant / non-invariant part

        args:
            invariant (bool) (optional): True for the invariant part, False for the non-invariant part

        returns:
            DivisorClass: sum of coefficient times class
        """
        total = self.lattice.zero()
        for name, coefficient in self.boundary:
            curve = self.curve(name)
            if invariant is None or curve.invariant == invariant:
                total = total + coefficient * curve.divisor
        return total

    def points_on(self, name: str) -> tuple[MarkedPoint, ...]:
        return tuple(point for point in self.points if point.on(name))


def _adjoint_class(model: FoliatedSurfaceModel, epsilon: Rational) -> DivisorClass:
    """
    adjoint class (K_F + boundary non-invariant part) + epsilon (K_X + boundary)

    args:
        model (FoliatedSurfaceModel): model
        epsilon (Rational): adjoint parameter

    returns:
        DivisorClass: the adjoint class
    """
    return model.k_f + model.boundary_class(False) + Rational(epsilon) * (model.k_x + model.boundary_class())


def _foliation_part(model: FoliatedSurfaceModel) -> DivisorClass:
    return model.k_f + model.boundary_class(False)


def _variety_part(model: FoliatedSurfaceModel) -> DivisorClass:
    return model.k_x + model.boundary_class()


def _free_label(model: FoliatedSurfaceModel) -> str:
    taken = set(model.lattice.labels) | {curve.name for curve in model.curves}
    k = 1
    while f"E{k}" in taken:
        k += 1
    return f"E{k}"


def _extend(model: FoliatedSurfaceModel, label: str) -> FoliatedSurfaceModel:
    # new exceptional class added to the lattice, K_X gains E, nothing else changes
    lattice = model.lattice.blow_up(label)
    return FoliatedSurfaceModel(
        lattice,
        lattice.embed(model.k_x) + lattice.basis(label),
        lattice.embed(model.k_f),
        tuple(replace(curve, divisor=lattice.embed(curve.divisor)) for curve in model.curves),
        model.points,
        model.boundary,
        tuple(lattice.embed(f) for f in model.fibrations),
        model.assumptions,
    )


def _blow_up_model(model: FoliatedSurfaceModel, point: str, label: str | None = None) -> FoliatedSurfaceModel:
    """
    blow up a marked point: K_X gains E, K_F gains a_fol E with a_fol from the germ blow-up, curves through the
    point lose their multiplicity times E and the singular points found on E become new marked points

    args:
        model (FoliatedSurfaceModel): model without contracted curves
        point (str): marked point name
        label (str) (optional): name of the exceptional class and curve

    returns:
        FoliatedSurfaceModel: the blown up model
    """
    try:
        if model.contracted:
            raise PreconditionViolation("blow-ups are only supported before contractions")

        center = model.point(point)
        label = label or _free_label(model)
        if label in {curve.name for curve in model.curves}:
            raise PreconditionViolation(f"curve name {label!r} already exists")

        result = _blow_up(center.germ)
        extended = _extend(model, label)
        exceptional = extended.lattice.basis(label)
        incidence = dict(center.curves)

        # strict transforms
        curves = tuple(replace(curve, divisor=curve.divisor - incidence.get(curve.name, 0) * exceptional) for curve in extended.curves)
        curves += (Curve(label, exceptional, result.exceptional_invariant, 0),)

        # singular points on E replace the center
        points = tuple(p for p in model.points if p.name != point)
        index = 0
        for singular in result.new_singular_points:
            if not singular.rational:
                logger.warning("irrational singular points of %s on %s are not recorded", center.germ, label)
                continue
            index += 1
            points += (MarkedPoint(f"{label}p{index}", singular.germ, ((label, 1),)),)

        logger.debug("blow-up of %s as %s: iota=%d a_fol=%s", point, label, result.iota, result.foliation_discrepancy)
        return replace(extended, k_f=extended.k_f + result.foliation_discrepancy * exceptional, curves=curves, points=points)
    except Exception as ex:
        # rethrow exception
        raise ex


def _pushforward_class(model: FoliatedSurfaceModel, name: str) -> Callable[[DivisorClass], DivisorClass]:
    """
    pushforward along the contraction of a negative catalogue curve C, as the orthogonal projection
    A - (A.C / C^2) C; pullbacks of classes on the contracted surface are the classes orthogonal to C

    args:
        model (FoliatedSurfaceModel): model
        name (str): curve to contract

    returns:
        Callable: the projection
    """
    curve = model.curve(name).divisor
    square = _intersect(curve, curve)

    if square >= 0:
        raise PreconditionViolation(f"{name} has self-intersection {square} and cannot be contracted")

    def push(divisor: DivisorClass) -> DivisorClass:
        return divisor - (_intersect(divisor, curve) / square) * curve

    return push


def _contract_curve(model: FoliatedSurfaceModel, name: str) -> FoliatedSurfaceModel:
    """
    contract a negative catalogue curve, every class is projected and the curve moves to the contracted list

    args:
        model (FoliatedSurfaceModel): model
        name (str): curve to contract

    returns:
        FoliatedSurfaceModel: the contracted model
    """
    push = _pushforward_class(model, name)
    curve = model.curve(name)

    return FoliatedSurfaceModel(
        model.lattice,
        push(model.k_x),
        push(model.k_f),
        tuple(replace(c, divisor=push(c.divisor)) for c in model.curves if c.name != name),
        # points on C become infinitely near to the new point
        tuple(p for p in model.points if not p.on(name)),
        tuple(entry for entry in model.boundary if entry[0] != name),
        tuple(push(f) for f in model.fibrations),
        model.assumptions,
        model.contracted + (ContractedCurve(name, curve.divisor, curve.invariant, model.coefficient(name), curve.genus),),
    )


def _regular_germ() -> VectorFieldGerm:
    # d/dx, written "regular" in surface files
    return VectorFieldGerm(_polynomial({(0, 0): 1}), _polynomial({}), saturated=True)


def _column(line: str, token: str) -> int:
    return max(line.find(token), 0) + 1


def _integral_meets(model: FoliatedSurfaceModel, curve: Curve) -> None:
    # catalogue classes of a surface without contractions meet in integers
    for other in model.curves + (curve,):
        if not _intersect(curve.divisor, other.divisor).is_integer:
            raise PreconditionViolation(f"{curve.name} . {other.name} is not an integer")


def _flag(token: str, line: str, number: int) -> bool:
    if token not in ("invariant", "non-invariant"):
        raise ParseError(f"expected invariant or non-invariant, got {token!r}", number, _column(line, token))
    return token == "invariant"


def _parse_surface(text: str, degree_cap: int = config.DEGREE_CAP) -> FoliatedSurfaceModel:
    """
    parse the surface text format, a "folmmp-surface v1" header followed by one statement per line:
    base, exceptional, kf, curve, point, blowup, boundary, fibration, assume, contracted

    args:
        text (str): file content
        degree_cap (int): degree cap of point germs

    returns:
        FoliatedSurfaceModel: the model
    """
    model, header, kf, contracted = None, False, False, []

    # emitted files carry classes already projected by their contracted curves
    projected = any(line.split()[:1] == ["contracted"] for line in text.splitlines())

    for number, line in enumerate(text.splitlines(), start=1):
        try:
            tokens = shlex.split(line, comments=True)
        except ValueError as ex:
            raise ParseError(f"unbalanced quotes: {ex}", number, 1)

        # blank and comment lines
        if not tokens:
            continue

        # versioned header first
        if not header:
            if " ".join(tokens) != config.SURFACE_HEADER:
                raise ParseError(f"expected header {config.SURFACE_HEADER!r}, got {line.strip()!r}", number, 1)
            header = True
            continue

        keyword, rest = tokens[0], tokens[1:]

        try:
            if keyword == "base":
                if model is not None or len(rest) != 1:
                    raise ParseError("'base P2|F<n>' must be the first statement and appear once", number, 1)
                if rest[0] == "P2":
                    lattice = _projective_plane()
                elif rest[0].startswith("F") and rest[0][1:].isdigit():
                    lattice = _hirzebruch(int(rest[0][1:]))
                else:
                    raise ParseError(f"unknown base surface {rest[0]!r}", number, _column(line, rest[0]))
                model = FoliatedSurfaceModel(lattice, lattice.canonical, lattice.zero())
                continue

            if model is None:
                raise ParseError("the first statement must be 'base P2|F<n>'", number, 1)

            if keyword == "exceptional" and len(rest) == 1:
                model = _extend(model, rest[0])

            elif keyword == "kf" and rest:
                model = replace(model, k_f=model.lattice.parse_class(" ".join(rest), number, _column(line, rest[0])))
                kf = True

            elif keyword == "curve" and len(rest) in (4, 6) and rest[1] == "class":
                divisor = model.lattice.parse_class(rest[2], number, _column(line, rest[2]))
                genus = 0
                if len(rest) == 6:
                    if rest[4] != "genus" or not rest[5].isdigit():
                        raise ParseError("expected 'genus <g>'", number, _column(line, rest[4]))
                    genus = int(rest[5])
                curve = Curve(rest[0], divisor, _flag(rest[3], line, number), genus)
                if not projected:
                    _integral_meets(model, curve)
                model = replace(model, curves=model.curves + (curve,))

            elif keyword == "point" and len(rest) >= 2:
                name, index = rest[0], 1
                if rest[index] == "regular":
                    germ, index = _regular_germ(), index + 1
                elif rest[index] == "germ" and len(rest) > index + 1:
                    try:
                        germ = _parse_germ(rest[index + 1], degree_cap).germ
                    except ParseError as ex:
                        raise ParseError(f"point {name}: {ex}", number, _column(line, rest[index + 1]))
                    index += 2
                else:
                    raise ParseError("expected 'germ \"<germ text>\"' or 'regular'", number, _column(line, rest[index]))

                incidence = []
                if index < len(rest):
                    if rest[index] != "on" or index + 1 == len(rest):
                        raise ParseError("expected 'on <curve>[:mult] ...'", number, _column(line, rest[index]))
                    for entry in rest[index + 1:]:
                        curve, _, multiplicity = entry.partition(":")
                        if multiplicity and not multiplicity.isdigit():
                            raise ParseError(f"invalid multiplicity in {entry!r}", number, _column(line, entry))
                        incidence.append((curve, int(multiplicity or 1)))
                model = replace(model, points=model.points + (MarkedPoint(name, germ, tuple(incidence)),))

            elif keyword == "blowup" and len(rest) in (1, 3):
                if len(rest) == 3 and rest[1] != "as":
                    raise ParseError("expected 'blowup <point> [as <label>]'", number, _column(line, rest[1]))
                model = _blow_up_model(model, rest[0], rest[2] if len(rest) == 3 else None)

            elif keyword == "boundary" and len(rest) == 2:
                try:
                    coefficient = rparse(rest[1])
                except ValueError as ex:
                    raise ParseError(str(ex), number, _column(line, rest[1]))
                model = replace(model, boundary=model.boundary + ((rest[0], coefficient),))

            elif keyword == "fibration" and rest:
                model = replace(model, fibrations=model.fibrations + (model.lattice.parse_class(" ".join(rest), number, _column(line, rest[0])),))

            elif keyword == "assume" and len(rest) == 1:
                model = replace(model, assumptions=model.assumptions + (rest[0],))

            elif keyword == "contracted" and len(rest) in (4, 6, 8) and rest[1] == "class":
                divisor = model.lattice.parse_class(rest[2], number, _column(line, rest[2]))
                coefficient, genus = Rational(0), 0

                # optional "coefficient <c>" and "genus <g>" pairs
                for key, value in zip(rest[4::2], rest[5::2]):
                    if key == "coefficient":
                        try:
                            coefficient = rparse(value)
                        except ValueError as ex:
                            raise ParseError(str(ex), number, _column(line, value))
                    elif key == "genus" and value.isdigit():
                        genus = int(value)
                    else:
                        raise ParseError("expected 'coefficient <c>' or 'genus <g>'", number, _column(line, key))
                contracted.append(ContractedCurve(rest[0], divisor, _flag(rest[3], line, number), coefficient, genus))

            else:
                raise ParseError(f"unrecognized statement {line.strip()!r}", number, 1)
        except ParseError:
            raise
        except FolmmpError as ex:
            # semantic errors keep their code, located by line
            raise type(ex)(f"line {number}: {ex}")

    if not header:
        raise ParseError(f"missing header {config.SURFACE_HEADER!r}", 1, 1)

    if model is None or not kf:
        raise ParseError("a surface file needs 'base' and 'kf' statements", 1, 1)

    # contracted curves project every class, in file order
    for entry in contracted:
        square = _intersect(entry.divisor, entry.divisor)
        if square >= 0:
            raise PreconditionViolation(f"contracted curve {entry.name} has self-intersection {square}")

        def push(divisor: DivisorClass) -> DivisorClass:
            return divisor - (_intersect(divisor, entry.divisor) / square) * entry.divisor

        model = replace(
            model,
            k_x=push(model.k_x),
            k_f=push(model.k_f),
            curves=tuple(replace(c, divisor=push(c.divisor)) for c in model.curves),
            fibrations=tuple(push(f) for f in model.fibrations),
            contracted=model.contracted + (entry,),
        )

    return model


def _emit_surface(model: FoliatedSurfaceModel) -> str:
    """
    flat surface text of a model, re-parses to an equal model

    args:
        model (FoliatedSurfaceModel): model

    returns:
        str: file content
    """
    lines = [config.SURFACE_HEADER, f"base {model.lattice.base}"]
    lines.extend(f"exceptional {label}" for label in model.lattice.exceptional)
    lines.append(f"kf {model.k_f}")

    for curve in model.curves:
        lines.append(f"curve {curve.name} class {shlex.quote(str(curve.divisor))} {'invariant' if curve.invariant else 'non-invariant'} genus {curve.genus}")

    for point in model.points:
        germ = "regular" if point.germ == _regular_germ() else f"germ {shlex.quote(str(point.germ))}"
        incidence = " on " + " ".join(f"{name}:{multiplicity}" for name, multiplicity in point.curves) if point.curves else ""
        lines.append(f"point {point.name} {germ}{incidence}")

    lines.extend(f"boundary {name} {rstr(coefficient)}" for name, coefficient in model.boundary)
    lines.extend(f"fibration {f}" for f in model.fibrations)
    lines.extend(f"assume {flag}" for flag in model.assumptions)

    for entry in model.contracted:
        lines.append(f"contracted {entry.name} class {shlex.quote(str(entry.divisor))} {'invariant' if entry.invariant else 'non-invariant'} coefficient {rstr(entry.coefficient)} genus {entry.genus}")

    return "\n".join(lines) + "\n"
