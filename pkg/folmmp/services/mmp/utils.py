"""
adjoint minimal model program service module
runs the (K_F + boundary) + epsilon (K_X + boundary) mmp on catalogue surface models, contracts adjoint trivial
curves towards the canonical model, annotates the points created by contractions and evaluates the
arithmetic bounds (degree, automorphism, volume, eta log canonicity)
"""


# standard imports
import json
import logging
from dataclasses import dataclass, field
from math import comb

# pip install sympy
# exact linear algebra and rational arithmetic
from sympy import Matrix, Rational, floor

# importing services utilities
from folmmp.services.exactcore.utils import _hirzebruch_jung_value
from folmmp.services.restree.utils import (
    STRICTLY_LOG_CANONICAL, NOT_LOG_CANONICAL, UNKNOWN, AdjointParams, Refuted, Inconclusive, SingularityClass,
    _classify, _adjoint_lc_check,
)
from folmmp.services.surface.utils import (
    DivisorClass, FoliatedSurfaceModel, _adjoint_class, _foliation_part, _variety_part, _intersect, _contract_curve,
)

# importing package errors
from folmmp import CatalogueIncomplete, PreconditionViolation

# importing generic utilities and global configurations
from utils import jsonable
import config


# module logger
logger = logging.getLogger(__name__)


# ray types
FOLIATION_NEGATIVE = "FoliationNegative"
VARIETY_NEGATIVE = "VarietyNegative"
ADJOINT_ZERO = "AdjointZero"


@dataclass(frozen=True)
class PointDivisor:
    name: str
    iota: int
    a_fol: Rational
    a_var: Rational


@dataclass(frozen=True)
class ContractedPoint:
    """
    point created by contracting a connected set of catalogue curves, index is |det| of their gram matrix and
    quotient is (m, b) when the curves form a hirzebruch-jung chain
    """
    curves: tuple[str, ...]
    discrepancies: tuple[PointDivisor, ...]
    index: int
    quotient: tuple[int, int] | None = None

    def __str__(self) -> str:
        if self.quotient:
            return f"1/{self.quotient[0]}(1, {self.quotient[1]})"
        return "smooth" if self.index == 1 else f"index {self.index}"


@dataclass(frozen=True)
class MMPStep:
    index: int
    curve: str
    ray: str
    degree: Rational
    excess: Rational
    self_intersection: Rational
    point: ContractedPoint
    preserved: bool
    case: str | None = None
    t: Rational | None = None


@dataclass(frozen=True)
class NefModel:
    def __str__(self) -> str:
        return "NefModel (relative to catalogue)"


@dataclass(frozen=True)
class MoriFiberSpace:
    fibration: DivisorClass
    curve: str | None = None
    base: str = "curve"

    def __str__(self) -> str:
        return f"MoriFiberSpace({self.fibration} over a {self.base})"


@dataclass(frozen=True)
class NotPseudoEffective:
    """
    refusal to contract a foliation negative curve through a strictly log canonical point, relative to catalogue
    """
    curve: str
    point: str

    def __str__(self) -> str:
        return f"NotPseudoEffective({self.curve} through {self.point}, relative to catalogue)"


@dataclass(frozen=True)
class MMPResult:
    steps: tuple[MMPStep, ...]
    outcome: NefModel | MoriFiberSpace | NotPseudoEffective
    model: FoliatedSurfaceModel = field(repr=False)
    initial: FoliatedSurfaceModel = field(repr=False)
    params: AdjointParams
    classifications: tuple[tuple[str, SingularityClass], ...] = ()

    @property
    def assumptions(self) -> tuple[str, ...]:
        return self.initial.assumptions


@dataclass(frozen=True)
class CanonicalModel:
    model: FoliatedSurfaceModel = field(repr=False)
    steps: tuple[MMPStep, ...] = ()
    points: tuple[ContractedPoint, ...] = ()


def _components(model: FoliatedSurfaceModel, names: list[str]) -> list[tuple[str, ...]]:
    """
    connected components of a set of curves, two curves being adjacent when they meet

    args:
        model (FoliatedSurfaceModel): model holding the curves
        names (list[str]): curve names

    returns:
        list[tuple[str]]: components in catalogue order
    """
    order = [curve.name for curve in model.curves if curve.name in names]
    remaining, components = list(order), []

    while remaining:
        component = [remaining.pop(0)]
        frontier = list(component)
        while frontier:
            current = model.curve(frontier.pop()).divisor
            for name in list(remaining):
                if _intersect(current, model.curve(name).divisor) != 0:
                    remaining.remove(name)
                    component.append(name)
                    frontier.append(name)
        components.append(tuple(sorted(component, key=order.index)))

    return components


def _chain(model: FoliatedSurfaceModel, names: tuple[str, ...], gram: Matrix) -> list[int] | None:
    # rational curves of self-intersection <= -2 meeting transversally along a path
    k = len(names)
    if any(model.curve(name).genus != 0 or gram[i, i] > -2 for i, name in enumerate(names)):
        return None

    neighbours = {i: [j for j in range(k) if j != i and gram[i, j] != 0] for i in range(k)}
    if any(gram[i, j] not in (0, 1) for i in range(k) for j in range(k) if i != j):
        return None
    if any(len(n) > 2 for n in neighbours.values()) or sum(len(n) for n in neighbours.values()) != 2 * (k - 1):
        return None

    # walk from an end
    start = next(i for i in range(k) if len(neighbours[i]) <= 1)
    path, previous = [start], None
    while len(path) < k:
        following = [j for j in neighbours[path[-1]] if j != previous]
        previous = path[-1]
        path.append(following[0])

    return [int(-gram[i, i]) for i in path]


def _annotate_point(model: FoliatedSurfaceModel, names: tuple[str, ...]) -> ContractedPoint:
    """
    discrepancies of the point obtained by contracting a connected set of curves, solved from the gram system
    (K + boundary) . C_i = sum_j (a_j + c_j) C_j . C_i on the model before contraction

    args:
        model (FoliatedSurfaceModel): model in which the curves are still present
        names (tuple[str]): connected curves

    returns:
        ContractedPoint: annotation with per curve (iota, a_fol, a_var)
    """
    curves = [model.curve(name) for name in names]
    k = len(curves)
    gram = Matrix(k, k, lambda i, j: _intersect(curves[i].divisor, curves[j].divisor))

    if gram.det() == 0:
        raise PreconditionViolation(f"curves {', '.join(names)} have a degenerate intersection matrix")

    foliation, variety = _foliation_part(model), _variety_part(model)
    a_fol = gram.LUsolve(Matrix([_intersect(foliation, curve.divisor) for curve in curves]))
    a_var = gram.LUsolve(Matrix([_intersect(variety, curve.divisor) for curve in curves]))

    discrepancies = []
    for i, curve in enumerate(curves):
        coefficient = model.coefficient(curve.name)
        discrepancies.append(PointDivisor(
            curve.name,
            0 if curve.invariant else 1,
            Rational(a_fol[i]) - (0 if curve.invariant else coefficient),
            Rational(a_var[i]) - coefficient,
        ))

    index = abs(int(gram.det()))
    chain = _chain(model, names, gram)
    quotient = None
    if chain:
        # m / b is the value of the chain
        quotient = (index, int(index / _hirzebruch_jung_value(chain)))

    return ContractedPoint(tuple(names), tuple(discrepancies), index, quotient)


def _annotations(model: FoliatedSurfaceModel, params: AdjointParams) -> dict[str, SingularityClass]:
    """
    classify the marked points and check the adjoint inequality at each singular one

    args:
        model (FoliatedSurfaceModel): model
        params (AdjointParams): adjoint parameters

    returns:
        dict[str, SingularityClass]: classification per point
    """
    classifications = {}

    for point in model.points:
        result = _classify(point.germ, params.search_depth)
        if result.kind in (NOT_LOG_CANONICAL, UNKNOWN):
            raise PreconditionViolation(f"point {point.name} ({point.germ}) is {result}, the adjoint mmp needs log canonical points")

        if point.germ.singular:
            verdict = _adjoint_lc_check(point.germ, params)
            if isinstance(verdict, (Refuted, Inconclusive)):
                raise PreconditionViolation(f"point {point.name} is not certified (epsilon, delta)-adjoint log canonical: {verdict}")

        classifications[point.name] = result

    return classifications


def _preserved(model: FoliatedSurfaceModel, point: ContractedPoint, params: AdjointParams) -> bool:
    # remaining annotations and the new point keep the adjoint inequality
    for divisor in point.discrepancies:
        if not params.satisfied(divisor.a_fol + params.epsilon * divisor.a_var, divisor.iota):
            return False

    return all(
        not isinstance(_adjoint_lc_check(p.germ, params), (Refuted, Inconclusive))
        for p in model.points if p.germ.singular
    )


def _select_ray(model: FoliatedSurfaceModel, epsilon: Rational):
    """
    adjoint negative curve of negative self-intersection, invariant foliation negative curves first and then
    variety negative ones, lowest catalogue index within each type

    args:
        model (FoliatedSurfaceModel): model
        epsilon (Rational): adjoint parameter

    returns:
        tuple[Curve, str] | None: curve and ray type, None when no birational step exists
    """
    adjoint, foliation = _adjoint_class(model, epsilon), _foliation_part(model)
    found = {}

    for curve in model.curves:
        if _intersect(adjoint, curve.divisor) >= 0 or _intersect(curve.divisor, curve.divisor) >= 0:
            continue

        negative = _intersect(foliation, curve.divisor) < 0
        if negative and not curve.invariant:
            raise PreconditionViolation(f"non-invariant curve {curve.name} has negative foliation degree, the catalogue contradicts tangency counts")

        found.setdefault(FOLIATION_NEGATIVE if negative else VARIETY_NEGATIVE, curve)

    for ray in (FOLIATION_NEGATIVE, VARIETY_NEGATIVE):
        if ray in found:
            return found[ray], ray

    return None


def _fibration(model: FoliatedSurfaceModel, adjoint: DivisorClass) -> tuple[DivisorClass, str | None] | None:
    # catalogue curves of square zero first, then declared classes
    candidates = [(curve.divisor, curve.name) for curve in model.curves if _intersect(curve.divisor, curve.divisor) == 0]
    candidates += [(f, None) for f in model.fibrations]

    for divisor, name in candidates:
        if _intersect(divisor, divisor) == 0 and divisor.primitive and _intersect(adjoint, divisor) < 0:
            return divisor, name

    return None


def _contract(model: FoliatedSurfaceModel, initial: FoliatedSurfaceModel, contracted: list[str], name: str, params: AdjointParams, index: int, ray: str, case: str | None = None, t: Rational | None = None) -> tuple[FoliatedSurfaceModel, MMPStep]:
    # one contraction with its post hoc checks
    adjoint = _adjoint_class(model, params.epsilon)
    curve = model.curve(name)
    degree = _intersect(adjoint, curve.divisor)
    square = _intersect(curve.divisor, curve.divisor)

    following = _contract_curve(model, name)

    # adjoint class recomputed on the contracted model differs by a positive multiple of C
    excess = degree / square
    if adjoint - _adjoint_class(following, params.epsilon) != excess * curve.divisor:
        raise PreconditionViolation(f"contraction of {name} does not commute with the adjoint class")

    contracted.append(name)
    component = next(c for c in _components(initial, contracted) if name in c)
    point = _annotate_point(initial, component)
    preserved = _preserved(following, point, params)

    if not preserved:
        logger.warning("contraction of %s breaks the adjoint inequality at %s", name, point)

    logger.debug("step %d: %s %s degree=%s excess=%s point=%s", index, ray, name, degree, excess, point)
    return following, MMPStep(index, name, ray, degree, excess, square, point, preserved, case, t)


def _run_adjoint_mmp(model: FoliatedSurfaceModel, params: AdjointParams) -> MMPResult:
    """
    run the adjoint mmp on a catalogue model: contract adjoint negative curves of negative self-intersection
    until the adjoint class is nef on the catalogue or a mori fiber structure is found

    args:
        model (FoliatedSurfaceModel): model with classified point annotations
        params (AdjointParams): epsilon < 1/5, boundary coefficients at most 1 - delta

    returns:
        MMPResult: steps, outcome and final model
    """
    try:
        params.require_mmp()

        for name, coefficient in model.boundary:
            if coefficient > 1 - params.delta:
                raise PreconditionViolation(f"boundary coefficient {coefficient} of {name} exceeds 1 - delta = {1 - params.delta}")

        classifications = _annotations(model, params)
        current, steps, contracted = model, [], []

        def result(outcome) -> MMPResult:
            return MMPResult(tuple(steps), outcome, current, model, params, tuple(sorted(classifications.items())))

        while True:
            selected = _select_ray(current, params.epsilon)
            if selected is None:
                break

            curve, ray = selected

            # strictly log canonical points on a foliation negative curve
            if ray == FOLIATION_NEGATIVE:
                for point in current.points_on(curve.name):
                    if classifications[point.name].kind == STRICTLY_LOG_CANONICAL:
                        logger.info("foliation negative curve %s passes through strictly log canonical point %s", curve.name, point.name)
                        return result(NotPseudoEffective(curve.name, point.name))

            current, step = _contract(current, model, contracted, curve.name, params, len(steps) + 1, ray)
            steps.append(step)

        adjoint = _adjoint_class(current, params.epsilon)

        fibration = _fibration(current, adjoint)
        if fibration:
            return result(MoriFiberSpace(*fibration, base="curve"))

        negative = [curve for curve in current.curves if _intersect(adjoint, curve.divisor) < 0]
        if negative:
            # picard number one, the whole surface maps to a point
            if current.rank == 1:
                return result(MoriFiberSpace(negative[0].divisor, negative[0].name, base="point"))
            raise CatalogueIncomplete(f"curve {negative[0].name} is adjoint negative with non-negative self-intersection and no fibration is declared")

        return result(NefModel())
    except Exception as ex:
        # rethrow exception
        raise ex


def _perturbation(model: FoliatedSurfaceModel, name: str) -> Rational:
    """
    perturbation t for the contraction of a curve C on which both parts of the adjoint class vanish, the unit
    fraction below the first t where (K + boundary + t C) stops being negative on a curve meeting C

    args:
        model (FoliatedSurfaceModel): model
        name (str): the curve C

    returns:
        Rational: t
    """
    curve = model.curve(name).divisor
    variety = _variety_part(model)

    limit = Rational(1)
    for other in model.curves:
        meet = _intersect(curve, other.divisor)
        degree = _intersect(variety, other.divisor)
        if other.name != name and meet > 0 and degree < 0:
            limit = min(limit, -degree / meet)

    return Rational(1, int(floor(1 / limit)) + 1)


def _epsilon_canonical_model(result: MMPResult, params: AdjointParams | None = None) -> CanonicalModel:
    """
    contract every adjoint trivial curve of negative self-intersection of a nef outcome, recording the case:
    (i) foliation negative, (ii) variety negative, (iii) both parts trivial with the perturbation t

    args:
        result (MMPResult): run with a NefModel outcome
        params (AdjointParams) (optional): defaults to the run parameters

    returns:
        CanonicalModel: model whose adjoint class is positive on the remaining catalogue
    """
    try:
        params = params or result.params

        if not isinstance(result.outcome, NefModel):
            raise PreconditionViolation(f"canonical models need a nef outcome, got {result.outcome}")

        start = current = result.model
        steps, contracted = [], []

        while True:
            adjoint = _adjoint_class(current, params.epsilon)
            zero = [c for c in current.curves if _intersect(adjoint, c.divisor) == 0 and _intersect(c.divisor, c.divisor) < 0]
            if not zero:
                break

            curve = zero[0]
            foliation = _intersect(_foliation_part(current), curve.divisor)
            variety = _intersect(_variety_part(current), curve.divisor)

            t = None
            if foliation < 0:
                case = "i"
            elif variety < 0:
                case = "ii"
            else:
                case, t = "iii", _perturbation(current, curve.name)

            current, step = _contract(current, start, contracted, curve.name, params, len(steps) + 1, ADJOINT_ZERO, case, t)
            steps.append(step)

        # strict positivity on what is left
        adjoint = _adjoint_class(current, params.epsilon)
        for curve in current.curves:
            if _intersect(adjoint, curve.divisor) <= 0:
                raise CatalogueIncomplete(f"adjoint class is not positive on {curve.name} and the curve cannot be contracted")

        points = tuple(_annotate_point(start, component) for component in _components(start, contracted))
        return CanonicalModel(current, tuple(steps), points)
    except Exception as ex:
        # rethrow exception
        raise ex


@dataclass(frozen=True)
class EtaReport:
    margin: Rational
    bound: Rational
    holds: bool
    conditional: tuple[str, ...] = ()


def _eta_bound(epsilon: Rational, delta: Rational) -> Rational:
    # 1 - (1 + epsilon (1 - delta)) / (1 + epsilon)
    return 1 - (1 + epsilon * (1 - delta)) / (1 + epsilon)


def _eta_lc_report(result: MMPResult) -> EtaReport:
    """
    variety log discrepancy margin min(1, 1 + a_var, 1 - c) over the points created by the run and the final
    boundary, compared with 1 - (1 + epsilon (1 - delta)) / (1 + epsilon)

    args:
        result (MMPResult): completed run

    returns:
        EtaReport: margin, bound and the assumptions it is conditional on
    """
    names = [step.curve for step in result.steps]
    points = [_annotate_point(result.initial, component) for component in _components(result.initial, names)]

    margin = min(
        [Rational(1)]
        + [1 + divisor.a_var for point in points for divisor in point.discrepancies]
        + [1 - coefficient for _, coefficient in result.model.boundary]
    )
    bound = _eta_bound(result.params.epsilon, result.params.delta)

    return EtaReport(margin, bound, margin >= bound, result.assumptions)


@dataclass(frozen=True)
class DegreeBound:
    g: int
    tau: Rational
    m: int
    sections: int
    restriction: Rational
    m0: int
    adjoint_sq: Rational
    bound: Rational
    l_degree: Rational
    vanishing: bool
    holds: bool


def _degree_bound_check(g: int, tau: Rational, m: int, l_degree: Rational, adjoint_sq: Rational) -> DegreeBound:
    """
    evaluate the degree bound chain: binom(m + 2, 2) sections against m (1 + tau)(2g - 2) - g + 1 conditions
    on the curve, m0 = m g, and L . (K_F + tau K_X) <= m0 (K_F + tau K_X)^2

    args:
        g (int): genus, at least 1
        tau (Rational): adjoint parameter
        m (int): multiple, at least 1
        l_degree (Rational): L . (K_F + tau K_X)
        adjoint_sq (Rational): (K_F + tau K_X)^2, positive

    returns:
        DegreeBound: every intermediate number
    """
    tau, l_degree, adjoint_sq = Rational(tau), Rational(l_degree), Rational(adjoint_sq)

    if g < 1 or m < 1 or adjoint_sq <= 0:
        raise PreconditionViolation(f"degree bounds need g >= 1, m >= 1 and a positive adjoint square, got ({g}, {m}, {adjoint_sq})")

    sections = comb(m + 2, 2)
    restriction = m * (1 + tau) * (2 * g - 2) - g + 1
    m0 = m * g
    bound = m0 * adjoint_sq

    return DegreeBound(g, tau, m, sections, restriction, m0, adjoint_sq, bound, l_degree, sections > restriction, l_degree <= bound)


def _automorphism_bound(vol_up: Rational, vol_down: Rational) -> Rational:
    """
    order bound vol_up / vol_down of a group acting on a foliated surface

    args:
        vol_up (Rational): adjoint volume upstairs
        vol_down (Rational): adjoint volume of the quotient, positive

    returns:
        Rational: the ratio
    """
    vol_up, vol_down = Rational(vol_up), Rational(vol_down)

    if vol_down <= 0:
        raise PreconditionViolation(f"quotient volume must be positive, got {vol_down}")

    return vol_up / vol_down


@dataclass(frozen=True)
class VolumeReport:
    epsilon: Rational
    volume: Rational
    floor: Rational
    constant: Rational
    bound: Rational
    above: bool


def _volume_report(volume: Rational, epsilon: Rational, floor_value: Rational) -> VolumeReport:
    """
    compare a volume with the floor v(epsilon), C(epsilon) = 1 / v(epsilon) bounds automorphism groups by
    C(epsilon) vol

    args:
        volume (Rational): adjoint volume
        epsilon (Rational): adjoint parameter
        floor_value (Rational): configured v(epsilon), positive

    returns:
        VolumeReport: constant, bound and comparison
    """
    volume, floor_value = Rational(volume), Rational(floor_value)

    if floor_value <= 0:
        raise PreconditionViolation(f"volume floor must be positive, got {floor_value}")

    constant = 1 / floor_value
    return VolumeReport(Rational(epsilon), volume, floor_value, constant, _automorphism_bound(volume, floor_value), volume >= floor_value)


def _record(payload: dict) -> str:
    # one compact json line with sorted keys
    return json.dumps(jsonable(payload), sort_keys=True, separators=(",", ":"))


def _point_record(point: ContractedPoint) -> dict:
    return {
        "curves": point.curves,
        "index": point.index,
        "quotient": point.quotient,
        "discrepancies": [{"name": d.name, "iota": d.iota, "a_fol": d.a_fol, "a_var": d.a_var} for d in point.discrepancies],
    }


def _step_record(step: MMPStep) -> dict:
    return {
        "record": "step",
        "index": step.index,
        "curve": step.curve,
        "ray": step.ray,
        "case": step.case,
        "t": step.t,
        "degree": step.degree,
        "excess": step.excess,
        "self_intersection": step.self_intersection,
        "point": _point_record(step.point),
        "preserved": step.preserved,
    }


def _outcome_record(outcome) -> dict:
    payload = {"record": "outcome", "kind": type(outcome).__name__, "relative_to_catalogue": True}
    if isinstance(outcome, MoriFiberSpace):
        payload.update({"fibration": str(outcome.fibration), "curve": outcome.curve, "base": outcome.base})
    if isinstance(outcome, NotPseudoEffective):
        payload.update({"curve": outcome.curve, "point": outcome.point})
    return payload


def _run_log(result: MMPResult) -> str:
    """
    versioned json lines log of a run: header, one record per step, outcome

    args:
        result (MMPResult): completed run

    returns:
        str: log text
    """
    lines = [_record({
        "format": config.RUNLOG_HEADER,
        "epsilon": result.params.epsilon,
        "delta": result.params.delta,
        "rank": result.initial.rank,
        "assumptions": result.assumptions,
    })]
    lines.extend(_record(_step_record(step)) for step in result.steps)
    lines.append(_record(_outcome_record(result.outcome)))

    return "\n".join(lines) + "\n"
