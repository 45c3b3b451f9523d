"""
resolution trees service module
grows trees of infinitely near blow-up centers over a germ, keeping for every exceptional divisor the pair of
foliation / variety discrepancies, then uses them to classify singularities and to certify or refute
(epsilon, delta)-adjoint log canonicity by bounded search
"""


# standard imports
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

# pip install sympy
# exact rational arithmetic
from sympy import Poly, Rational

# exact arithmetic core
from folmmp.services.exactcore.utils import (
    UNBOUNDED, Unbounded, _polynomial, _terms, _poly_order, _homogeneous, _constant, _restrict, _translate,
    _format_polynomial, _continued_fraction,
)

# germ service
from folmmp.services.germ.utils import (
    VectorFieldGerm, BoundaryCurve, SingularPoint, BlowUpResult, _germ, _linear_part, _is_reduced,
    _blow_up, _localize, _strict_transform, _transverse_at_origin,
)

# importing package errors
from folmmp import PreconditionViolation, DepthExceeded, UnresolvedCenter, Undecided

# global configurations
import config


# module logger
logger = logging.getLogger(__name__)

# singularity kinds
TERMINAL = "Terminal"
CANONICAL = "Canonical"
STRICTLY_LOG_CANONICAL = "StrictlyLogCanonical"
NOT_LOG_CANONICAL = "NotLogCanonical"
UNKNOWN = "Unknown"

# tree node statuses
REGULAR = "regular"
REDUCED = "reduced"
BLOWN_UP = "blown-up"
TRUNCATED = "truncated"
IRRATIONAL = "irrational"


@dataclass(frozen=True)
class AdjointParams:
    """
    adjoint parameters, epsilon > 0 and delta in [0, 1]; klt switches every inequality to strict
    """
    epsilon: Rational
    delta: Rational
    search_depth: int = config.SEARCH_DEPTH
    klt: bool = False

    def __post_init__(self):
        # exact values only
        object.__setattr__(self, "epsilon", Rational(self.epsilon))
        object.__setattr__(self, "delta", Rational(self.delta))

        if self.epsilon <= 0:
            raise PreconditionViolation(f"epsilon must be positive, got {self.epsilon}")

        if not 0 <= self.delta <= 1:
            raise PreconditionViolation(f"delta must lie in [0, 1], got {self.delta}")

        if self.search_depth < 1:
            raise PreconditionViolation(f"search depth must be positive, got {self.search_depth}")

    def bound(self, iota: int) -> Rational:
        # (iota + epsilon)(delta - 1)
        return (iota + self.epsilon) * (self.delta - 1)

    def satisfied(self, value: Rational, iota: int) -> bool:
        """
        adjoint inequality for one exceptional coefficient

        args:
            value (Rational): a_fol + epsilon a_var
            iota (int): 1 for non-invariant divisors

        returns:
            bool: True when the coefficient respects the bound
        """
        return value > self.bound(iota) if self.klt else value >= self.bound(iota)

    def require_mmp(self) -> None:
        # the mmp theorems need epsilon < 1/5
        if self.epsilon >= Rational(config.EPSILON_CEILING):
            raise PreconditionViolation(f"the adjoint mmp requires epsilon < {config.EPSILON_CEILING}, got {self.epsilon}")


@dataclass(frozen=True)
class LocalCurve:
    """
    boundary component seen at a tree node, index refers to the tree boundary tuple
    """
    index: int
    f: Poly


@dataclass(frozen=True)
class ExceptionalDivisor:
    name: str
    node: str
    depth: int
    iota: int
    relative: Rational
    a_fol: Rational
    a_var: Rational
    self_intersection: int = -1
    transverse: bool = False

    def adjoint(self, epsilon: Rational) -> Rational:
        return self.a_fol + epsilon * self.a_var

    def __str__(self) -> str:
        return f"{self.name} iota={self.iota} a_fol={self.a_fol} a_var={self.a_var} self-intersection={self.self_intersection}"


@dataclass(frozen=True)
class TreeNode:
    """
    infinitely near point, axes name the exceptional divisors along {x = 0} and {y = 0} of the local chart
    """
    id: str
    depth: int
    germ: VectorFieldGerm | None
    point: SingularPoint | None = None
    axes: tuple[str | None, str | None] = (None, None)
    curves: tuple[LocalCurve, ...] = ()
    status: str = REDUCED
    divisor: str | None = None
    children: tuple[str, ...] = ()


@dataclass(frozen=True)
class ResolutionTree:
    germ: VectorFieldGerm
    nodes: tuple[TreeNode, ...]
    divisors: tuple[ExceptionalDivisor, ...]
    boundary: tuple[BoundaryCurve, ...] = ()
    adjacency: frozenset = frozenset()
    complete: bool = True

    def node(self, id: str) -> TreeNode:
        for node in self.nodes:
            if node.id == id:
                return node
        raise PreconditionViolation(f"no tree node {id!r}")

    def divisor(self, name: str) -> ExceptionalDivisor:
        for divisor in self.divisors:
            if divisor.name == name:
                return divisor
        raise PreconditionViolation(f"no exceptional divisor {name!r}")

    def path(self, id: str) -> tuple[TreeNode, ...]:
        # prefixes of a node id are its ancestors
        parts = id.split(".")
        return tuple(self.node(".".join(parts[:k])) for k in range(1, len(parts) + 1))

    @property
    def leaves(self) -> tuple[TreeNode, ...]:
        return tuple(node for node in self.nodes if not node.children)

    @property
    def depth(self) -> int:
        return max((divisor.depth for divisor in self.divisors), default=0)


@dataclass(frozen=True)
class SingularityClass:
    kind: str
    marker: str | None = None
    pair: tuple[int, int] | None = None
    eigenvalues: tuple | None = None
    log_terminal: bool | None = None

    def __str__(self) -> str:
        text = self.kind
        if self.pair:
            text += f" {self.pair}"
        if self.marker:
            text += f" ({self.marker})"
        return text


@dataclass(frozen=True)
class Certified:
    tree: ResolutionTree = field(repr=False)

    def __str__(self) -> str:
        return "Certified(true)"


@dataclass(frozen=True)
class Refuted:
    """
    sound counterexample: the blow-up path to a divisor violating the adjoint inequality
    """
    divisor: ExceptionalDivisor
    path: tuple[TreeNode, ...] = field(repr=False)
    value: Rational = Rational(0)
    bound: Rational = Rational(0)

    @property
    def centers(self) -> tuple[tuple[int, Rational], ...]:
        # centers after the root, in replay order
        return tuple((node.point.chart, node.point.coordinate) for node in self.path[1:])

    def __str__(self) -> str:
        route = " -> ".join(node.id for node in self.path)
        return f"Refuted({self.divisor.name} via {route}: a_fol + eps*a_var = {self.value} breaks the bound {self.bound})"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def __str__(self) -> str:
        return f"Inconclusive({self.reason})"


def _snc(axes: tuple[str | None, str | None], curves: tuple[LocalCurve, ...]) -> bool:
    """
    simple normal crossings of the exceptional axes and boundary curves at the origin

    args:
        axes (tuple): exceptional divisors along {x = 0} and {y = 0}
        curves (tuple[LocalCurve]): boundary curves through the point

    returns:
        bool: True when all are smooth, at most two, with independent tangents
    """
    forms = [(1, 0) if index == 0 else (0, 1) for index, name in enumerate(axes) if name]

    for curve in curves:
        # singular boundary curves are never snc
        if _poly_order(curve.f) != 1:
            return False
        linear = _terms(_homogeneous(curve.f, 1))
        forms.append((linear.get((1, 0), 0), linear.get((0, 1), 0)))

    if len(forms) > 2:
        return False

    return len(forms) < 2 or forms[0][0] * forms[1][1] - forms[0][1] * forms[1][0] != 0


def _needs_blow_up(germ: VectorFieldGerm, axes: tuple, curves: tuple[LocalCurve, ...]) -> bool:
    # non reduced singularities and non snc boundary points
    if germ.singular and not _is_reduced(germ):
        return True
    return not _snc(axes, curves)


def _curve_points(f: Poly) -> list[tuple[tuple, SingularPoint, Poly | None]]:
    """
    points where the strict transform of a boundary curve meets E, with its local equation there

    args:
        f (Poly): local equation of the curve at the blown up point

    returns:
        list: (key, point, local equation or None for irrational points)
    """
    points = []

    # chart 1 points (0, c)
    first = _strict_transform(f, 1)
    restricted = _restrict(first, 0)
    if not restricted.is_zero and restricted.degree() > 0:
        _, factors = restricted.factor_list()
        for factor, _ in factors:
            if factor.degree() == 1:
                c1, c0 = factor.all_coeffs()
                coordinate = Rational(-c0 / c1)
                points.append(((1, coordinate), SingularPoint(1, coordinate), _translate(first, 0, coordinate)))
            else:
                points.append(((1, _format_polynomial(factor)), SingularPoint(1, None, minimal_polynomial=factor), None))

    # chart 2 origin
    second = _strict_transform(f, 2)
    if _constant(second) == 0:
        points.append(((2, Rational(0)), SingularPoint(2, Rational(0)), second))

    return points


def _point_key(point: SingularPoint) -> tuple:
    return (point.chart, point.coordinate if point.rational else _format_polynomial(point.minimal_polynomial))


def _order(key: tuple) -> tuple:
    # chart 1 rational points by coordinate, then irrational ones, then chart 2
    chart, coordinate = key
    if chart == 2:
        return (2, 0, 0)
    return (1, 0, coordinate) if isinstance(coordinate, Rational) else (1, 1, coordinate)


def _child_axes(axes: tuple, name: str, point: SingularPoint) -> tuple:
    # chart 1 sees E as {x = 0} and the old {y = 0} only through its origin, chart 2 sees E as {y = 0}
    if point.chart == 2:
        return (axes[0], name)
    return (name, axes[1] if point.rational and point.coordinate == 0 else None)


def _ledger(result: BlowUpResult, through: list[str], curves: tuple[LocalCurve, ...], boundary: tuple[BoundaryCurve, ...], records: dict) -> tuple[Rational, Rational]:
    """
    discrepancies of a new exceptional divisor from the pullback recursion

    args:
        result (BlowUpResult): blow-up of the center
        through (list[str]): exceptional divisors through the center
        curves (tuple[LocalCurve]): boundary curves through the center
        boundary (tuple[BoundaryCurve]): boundary components of the tree
        records (dict): name -> (a_fol, a_var) of earlier divisors

    returns:
        tuple: (a_fol, a_var)
    """
    a_fol = result.foliation_discrepancy + sum((records[name][0] for name in through), Rational(0))
    a_var = 1 + sum((records[name][1] for name in through), Rational(0))

    # boundary multiplicities at the center
    for curve in curves:
        component, multiplicity = boundary[curve.index], _poly_order(curve.f)
        a_var -= component.coefficient * multiplicity
        if not component.invariant:
            a_fol -= component.coefficient * multiplicity

    return a_fol, a_var


def _grow(germ: VectorFieldGerm, boundary: tuple[BoundaryCurve, ...] = (), depth: int = config.SEARCH_DEPTH, extend: int = 0, budget: int = config.SEARCH_BUDGET) -> ResolutionTree:
    """
    breadth first growth of the blow-up tree; non reduced points and non snc boundary points are always blown up,
    with extend > 0 every other node is blown up too, up to extend extra levels

    args:
        germ (VectorFieldGerm): saturated germ at the root
        boundary (tuple[BoundaryCurve]): boundary components through the origin
        depth (int): maximal number of blow-ups along a branch
        extend (int): extra levels blown up beyond the reduction leaves
        budget (int): maximal number of nodes

    returns:
        ResolutionTree: the tree with its divisors and ledger
    """
    try:
        nodes, divisors, records, intersections = {}, [], {}, {}
        adjacency, complete = set(), True

        # pending entries: id, depth, germ, point, axes, curves, extra level
        queue = deque([("0", 0, germ, None, (None, None), tuple(LocalCurve(i, c.f) for i, c in enumerate(boundary)), 0)])

        while queue:
            id, level, local, point, axes, curves, extra = queue.popleft()

            # irrational centers are recorded, never continued
            if local is None:
                nodes[id] = TreeNode(id, level, None, point, axes, curves, IRRATIONAL)
                complete = False
                continue

            needed = _needs_blow_up(local, axes, curves)
            optional = not needed and extra < extend
            status = REDUCED if local.singular else REGULAR

            # stopping points
            if not needed and not optional:
                nodes[id] = TreeNode(id, level, local, point, axes, curves, status)
                continue

            if level >= depth or len(nodes) + len(queue) >= budget:
                nodes[id] = TreeNode(id, level, local, point, axes, curves, TRUNCATED if needed else status)
                complete = complete and not needed
                continue

            result = _blow_up(local)
            name = f"E{len(divisors) + 1}"
            through = [axis for axis in axes if axis]

            # ledger
            a_fol, a_var = _ledger(result, through, curves, boundary, records)
            records[name] = (a_fol, a_var)

            # self-intersections of divisors through the center drop by one
            for axis in through:
                intersections[axis] -= 1
            intersections[name] = -1

            # E separates the divisors meeting at the center and meets each of them once
            if len(through) == 2:
                adjacency.discard(frozenset(through))
            adjacency.update(frozenset((name, axis)) for axis in through)

            divisors.append((name, id, level + 1, result.iota, result.foliation_discrepancy, a_fol, a_var, result.transverse))
            logger.debug("tree node %s blown up: %s iota=%d a_fol=%s a_var=%s", id, name, result.iota, a_fol, a_var)

            # children: singular points, boundary meeting points and, when extending, the corners of E
            children = {}
            for singular in result.new_singular_points:
                children[_point_key(singular)] = [singular, []]
            for curve in curves:
                for key, meeting, local_equation in _curve_points(curve.f):
                    entry = children.setdefault(key, [meeting, []])
                    if local_equation is not None:
                        entry[1].append(LocalCurve(curve.index, local_equation))
            if optional:
                if axes[1]:
                    children.setdefault((1, Rational(0)), [SingularPoint(1, Rational(0)), []])
                if axes[0]:
                    children.setdefault((2, Rational(0)), [SingularPoint(2, Rational(0)), []])

            ids = []
            for k, key in enumerate(sorted(children, key=_order), start=1):
                child, local_curves = children[key]
                child_id = f"{id}.{k}"
                child_germ = _localize(result, child.chart, child.coordinate) if child.rational else None
                queue.append((child_id, level + 1, child_germ, child, _child_axes(axes, name, child), tuple(local_curves), extra + (1 if optional else 0)))
                ids.append(child_id)

            nodes[id] = TreeNode(id, level, local, point, axes, curves, BLOWN_UP, name, tuple(ids))

        # divisors with their final self-intersections
        ledger = tuple(
            ExceptionalDivisor(name, node, level, iota, relative, a_fol, a_var, intersections[name], transverse)
            for name, node, level, iota, relative, a_fol, a_var, transverse in divisors
        )

        return ResolutionTree(germ, tuple(nodes.values()), ledger, tuple(boundary), frozenset(adjacency), complete)
    except Exception as ex:
        # rethrow exception
        raise ex


def _seidenberg_reduce(g: VectorFieldGerm, max_depth: int = config.SEARCH_DEPTH, boundary: tuple[BoundaryCurve, ...] = ()) -> ResolutionTree:
    """
    reduction tree of a singular germ, every leaf is regular or reduced

    args:
        g (VectorFieldGerm): saturated germ singular at the origin
        max_depth (int): maximal number of blow-ups along a branch
        boundary (tuple[BoundaryCurve]) (optional): boundary components, non snc points are resolved too

    returns:
        ResolutionTree: the complete reduction tree
    """
    if not g.saturated:
        raise PreconditionViolation(f"germ {g} is not saturated")

    if not g.singular and not boundary:
        raise PreconditionViolation(f"germ {g} is regular at the origin")

    tree = _grow(g, boundary, max_depth)

    # incomplete trees are reported, never returned
    if any(node.status == TRUNCATED for node in tree.nodes):
        raise DepthExceeded(f"reduction of {g} does not terminate within {max_depth} blow-ups")

    if any(node.status == IRRATIONAL for node in tree.nodes):
        raise UnresolvedCenter(f"reduction of {g} needs a center with irrational coordinates")

    return tree


def _classify(g: VectorFieldGerm, depth: int = config.SEARCH_DEPTH) -> SingularityClass:
    """
    classify a saturated germ as terminal, canonical, strictly log canonical or not log canonical

    args:
        g (VectorFieldGerm): saturated germ
        depth (int): search depth for non linear germs with positive rational eigenvalue ratio

    returns:
        SingularityClass: kind with reduced-form data
    """
    try:
        if not g.saturated:
            raise PreconditionViolation(f"germ {g} is not saturated")

        # regular points
        if not g.singular:
            return SingularityClass(TERMINAL, "regular point", log_terminal=True)

        linear = _linear_part(g)

        # nilpotent linear part
        if linear.nilpotent:
            return SingularityClass(NOT_LOG_CANONICAL, "zero linear part" if linear.zero else "nilpotent linear part", log_terminal=False)

        # reduced points
        if _is_reduced(g):
            marker = "saddle-node" if linear.determinant == 0 else "reduced"
            return SingularityClass(CANONICAL, marker, eigenvalues=linear.eigenvalues, log_terminal=True)

        pair = linear.ratio

        # diagonalizable linear fields are already in normal form
        diagonalizable = linear.scalar or linear.eigenvalues[0] != linear.eigenvalues[1]
        if g.degree <= 1 and diagonalizable:
            return SingularityClass(STRICTLY_LOG_CANONICAL, pair=pair, eigenvalues=linear.eigenvalues, log_terminal=False)

        # otherwise the reduction tree decides
        needed = _continued_fraction(max(pair), min(pair)).digit_sum + 2
        try:
            tree = _seidenberg_reduce(g, max(depth, needed))
        except (DepthExceeded, UnresolvedCenter) as ex:
            logger.debug("classification of %s undecided: %s", g, ex)
            return SingularityClass(UNKNOWN, "resonant germ beyond the search depth", eigenvalues=linear.eigenvalues)

        log_terminal = all(d.a_fol > -d.iota for d in tree.divisors)
        if all(d.a_fol >= 0 for d in tree.divisors):
            return SingularityClass(CANONICAL, "non-reduced canonical", eigenvalues=linear.eigenvalues, log_terminal=True)

        if all(d.a_fol >= -d.iota for d in tree.divisors):
            return SingularityClass(STRICTLY_LOG_CANONICAL, pair=pair, eigenvalues=linear.eigenvalues, log_terminal=log_terminal)

        return SingularityClass(NOT_LOG_CANONICAL, "discrepancy below -iota", eigenvalues=linear.eigenvalues, log_terminal=False)
    except Exception as ex:
        # rethrow exception
        raise ex


def _violation(tree: ResolutionTree, params: AdjointParams) -> Refuted | None:
    # first divisor in breadth first order breaking the adjoint inequality
    for divisor in tree.divisors:
        value = divisor.adjoint(params.epsilon)
        if not params.satisfied(value, divisor.iota):
            logger.debug("refutation at %s: %s < %s", divisor.name, value, params.bound(divisor.iota))
            return Refuted(divisor, tree.path(divisor.node), value, params.bound(divisor.iota))
    return None


def _curve_transverse(tree: ResolutionTree, index: int) -> bool:
    # the foliation is regular and transverse to the boundary curve wherever the tree ends on it
    found = False
    for leaf in tree.leaves:
        for curve in leaf.curves:
            if curve.index != index:
                continue
            if leaf.germ is None or not _transverse_at_origin(leaf.germ, curve.f):
                return False
            found = True
    return found


def _closed(tree: ResolutionTree, params: AdjointParams) -> bool:
    """
    closure of a reduction tree: every later blow-up respects the adjoint inequality when each final component
    has mu = A + epsilon >= epsilon delta, or is non-invariant transverse with mu >= epsilon delta - 1 and meets
    no other such component

    args:
        tree (ResolutionTree): complete reduction tree
        params (AdjointParams): adjoint parameters

    returns:
        bool: True when the tree certifies the germ
    """
    theta = params.epsilon * params.delta

    def holds(value: Rational, bound: Rational) -> bool:
        return value > bound if params.klt else value >= bound

    compensated = set()

    # exceptional components
    for divisor in tree.divisors:
        mu = divisor.adjoint(params.epsilon) + params.epsilon
        if holds(mu, theta):
            continue
        if divisor.iota == 1 and divisor.transverse and holds(mu, theta - 1):
            compensated.add(divisor.name)
            continue
        return False

    # boundary components
    for index, component in enumerate(tree.boundary):
        iota = 0 if component.invariant else 1
        mu = -component.coefficient * (iota + params.epsilon) + params.epsilon
        if holds(mu, theta):
            continue
        if iota == 1 and _curve_transverse(tree, index) and holds(mu, theta - 1):
            compensated.add(f"D{index}")
            continue
        return False

    # compensated components never meet
    if any(pair <= compensated for pair in tree.adjacency):
        return False

    for leaf in tree.leaves:
        present = {axis for axis in leaf.axes if axis} | {f"D{curve.index}" for curve in leaf.curves}
        if len(present & compensated) > 1:
            return False

    return True


@lru_cache(maxsize=1024)
def _adjoint_lc_check(g: VectorFieldGerm, params: AdjointParams, boundary: tuple[BoundaryCurve, ...] = ()) -> Certified | Refuted | Inconclusive:
    """
    decide (epsilon, delta)-adjoint log canonicity of a germ by bounded search

    args:
        g (VectorFieldGerm): saturated germ
        params (AdjointParams): adjoint parameters, search depth at least 4
        boundary (tuple[BoundaryCurve]) (optional): boundary components through the origin

    returns:
        Certified | Refuted | Inconclusive: tri-state verdict
    """
    try:
        if params.search_depth < 4:
            raise PreconditionViolation(f"adjoint checks need a search depth of at least 4, got {params.search_depth}")

        if not g.saturated:
            raise PreconditionViolation(f"germ {g} is not saturated")

        if params.klt and any(component.coefficient >= 1 for component in boundary):
            raise PreconditionViolation("the klt variant requires boundary coefficients below 1")

        # reduction tree first
        tree = _grow(g, boundary, params.search_depth)
        witness = _violation(tree, params)
        if witness:
            return witness

        if tree.complete and _closed(tree, params):
            return Certified(tree)

        # bounded extension looking for a counterexample
        extended = _grow(g, boundary, params.search_depth, extend=config.SEARCH_EXTENSION)
        witness = _violation(extended, params)
        if witness:
            return witness

        if not tree.complete:
            return Inconclusive(f"reduction does not terminate within {params.search_depth} blow-ups")

        return Inconclusive("reduction leaves do not control further blow-ups and no counterexample was found")
    except Exception as ex:
        # rethrow exception
        raise ex


def _replay(germ: VectorFieldGerm, centers: tuple[tuple[int, Rational], ...], boundary: tuple[BoundaryCurve, ...] = ()) -> tuple[ExceptionalDivisor, ...]:
    """
    blow up the origin and then each recorded center in turn, recomputing the ledger from scratch

    args:
        germ (VectorFieldGerm): saturated germ
        centers (tuple): (chart, coordinate) of each center after the first, on the latest exceptional divisor
        boundary (tuple[BoundaryCurve]) (optional): boundary components through the origin

    returns:
        tuple[ExceptionalDivisor]: divisors E1, ..., En along the path
    """
    local, axes = germ, (None, None)
    curves = tuple(LocalCurve(i, component.f) for i, component in enumerate(boundary))
    records, created, hits = {}, [], {}

    for step in range(len(centers) + 1):
        result = _blow_up(local)
        name = f"E{step + 1}"
        through = [axis for axis in axes if axis]

        a_fol, a_var = _ledger(result, through, curves, boundary, records)
        records[name] = (a_fol, a_var)
        for axis in through:
            hits[axis] = hits.get(axis, 0) + 1
        created.append((name, step, result, a_fol, a_var))

        if step == len(centers):
            break

        # move to the next center
        chart, coordinate = centers[step]
        point = SingularPoint(chart, Rational(coordinate))
        following = []
        for curve in curves:
            for key, _, local_equation in _curve_points(curve.f):
                if key == _point_key(point) and local_equation is not None:
                    following.append(LocalCurve(curve.index, local_equation))

        local, axes, curves = _localize(result, chart, Rational(coordinate)), _child_axes(axes, name, point), tuple(following)

    return tuple(
        ExceptionalDivisor(name, ".".join(["0"] * (step + 1)), step + 1, result.iota, result.foliation_discrepancy, a_fol, a_var, -1 - hits.get(name, 0), result.transverse)
        for name, step, result, a_fol, a_var in created
    )


def _strict_lc_resolution(p: int, q: int) -> ResolutionTree:
    """
    reduction tree of p x d/dx + q y d/dy

    args:
        p (int): first eigenvalue
        q (int): second eigenvalue, coprime to p

    returns:
        ResolutionTree: chain following the euclidean algorithm, ending with the dicritical blow-up
    """
    if p < 1 or q < 1:
        raise PreconditionViolation(f"eigenvalues must be positive, got ({p}, {q})")

    # digit sum of the continued fraction bounds the chain length
    expansion = _continued_fraction(max(p, q), min(p, q))
    germ = _germ(_polynomial({(1, 0): p}), _polynomial({(0, 1): q}))

    return _seidenberg_reduce(germ, expansion.digit_sum)


def _adjoint_threshold(g: VectorFieldGerm, delta: Rational, depth: int = config.SEARCH_DEPTH, boundary: tuple[BoundaryCurve, ...] = ()) -> Rational | Unbounded:
    """
    smallest epsilon at which the germ is (epsilon, delta)-adjoint log canonical, every divisor of the reduction
    tree asks epsilon (a_var + 1 - delta) >= iota (delta - 1) - a_fol

    args:
        g (VectorFieldGerm): saturated singular germ
        delta (Rational): delta in [0, 1]
        depth (int): search depth
        boundary (tuple[BoundaryCurve]) (optional): boundary components through the origin

    returns:
        Rational | Unbounded: the threshold, or UNBOUNDED when no divisor constrains epsilon
    """
    try:
        delta = Rational(delta)
        tree = _seidenberg_reduce(g, depth, boundary)

        lower = []
        for divisor in tree.divisors:
            factor = divisor.a_var + 1 - delta
            needed = divisor.iota * (delta - 1) - divisor.a_fol

            # constraints must read epsilon >= value
            if factor > 0:
                lower.append(needed / factor)
            elif needed > 0:
                raise PreconditionViolation(f"{divisor.name} constrains epsilon from above, the certified set is not upward closed")

        threshold = max(lower, default=Rational(0))
        threshold = threshold if threshold > 0 else UNBOUNDED

        # the candidate must be certified, refutations below the tree leaves raise it to their own bound
        for _ in range(config.SEARCH_BUDGET):
            sample = Rational(1, 1000) if threshold is UNBOUNDED else threshold
            verdict = _adjoint_lc_check(g, AdjointParams(sample, delta, max(depth, 4)), tuple(boundary))

            if isinstance(verdict, Certified):
                return threshold
            if isinstance(verdict, Inconclusive):
                raise Undecided(f"threshold candidate {sample} of {g} is inconclusive: {verdict.reason}")

            witness = verdict.divisor
            factor = witness.a_var + 1 - delta
            needed = witness.iota * (delta - 1) - witness.a_fol
            if factor <= 0:
                raise PreconditionViolation(f"{witness.name} is violated for every epsilon, no threshold exists")

            logger.debug("threshold candidate %s refuted by %s, raised to %s", sample, witness.name, needed / factor)
            threshold = needed / factor

        raise Undecided(f"threshold of {g} not settled within {config.SEARCH_BUDGET} candidates")
    except Exception as ex:
        # rethrow exception
        raise ex


def _log_terminal(g: VectorFieldGerm, depth: int = config.SEARCH_DEPTH) -> bool:
    """
    log terminality: every divisor of the reduction tree has a_fol > -iota

    args:
        g (VectorFieldGerm): saturated germ
        depth (int): search depth

    returns:
        bool: True for log terminal germs
    """
    if not g.singular:
        return True

    return all(divisor.a_fol > -divisor.iota for divisor in _seidenberg_reduce(g, depth).divisors)


def _ps16_epsilon(epsilon: Rational, inverse: bool = False) -> Rational:
    """
    convert between the (epsilon, 1)-adjoint scale and the epsilon'-canonical scale, with
    (K_F + epsilon K_X) / (1 + epsilon) = (1 - epsilon') K_F + epsilon' K_X

    args:
        epsilon (Rational): value to convert
        inverse (bool): convert epsilon' back to epsilon

    returns:
        Rational: epsilon / (1 + epsilon), or epsilon' / (1 - epsilon') when inverse
    """
    epsilon = Rational(epsilon)

    if inverse:
        if not 0 < epsilon < 1:
            raise PreconditionViolation(f"epsilon' must lie in (0, 1), got {epsilon}")
        return epsilon / (1 - epsilon)

    if epsilon <= 0:
        raise PreconditionViolation(f"epsilon must be positive, got {epsilon}")

    return epsilon / (1 + epsilon)


@dataclass(frozen=True)
class BoundaryTest:
    ratio: Rational
    refuted: bool
    threshold: Rational


def _boundary_refutation(i0: Rational, iota: int, epsilon: Rational) -> BoundaryTest:
    """
    blow-up test for a boundary component of coefficient i0 through a log canonical point: the exceptional
    coefficient ratio (iota + i0 - epsilon (1 - i0)) / (iota + epsilon) exceeds 1 exactly when epsilon < i0 / (2 - i0)

    args:
        i0 (Rational): boundary coefficient in (0, 1]
        iota (int): invariance of the exceptional divisor
        epsilon (Rational): adjoint parameter

    returns:
        BoundaryTest: ratio, verdict and the closed form threshold
    """
    i0, epsilon = Rational(i0), Rational(epsilon)

    if not 0 < i0 <= 1 or epsilon <= 0 or iota not in (0, 1):
        raise PreconditionViolation(f"boundary test needs 0 < i0 <= 1, epsilon > 0 and iota in {{0, 1}}, got ({i0}, {iota}, {epsilon})")

    ratio = (iota + i0 - epsilon * (1 - i0)) / (iota + epsilon)
    return BoundaryTest(ratio, ratio > 1, i0 / (2 - i0))


def _entry_bound(i0: Rational, lambda_0: Rational) -> Rational:
    """
    explicit part of the boundary entry constant: min(1/5, i0 / (2 - i0), 1 / lambda_0 - 1)

    args:
        i0 (Rational): smallest boundary coefficient, in (0, 1]
        lambda_0 (Rational): configured acc constant in (0, 1)

    returns:
        Rational: the bound
    """
    i0, lambda_0 = Rational(i0), Rational(lambda_0)

    if not 0 < i0 <= 1 or not 0 < lambda_0 < 1:
        raise PreconditionViolation(f"entry bound needs 0 < i0 <= 1 and 0 < lambda_0 < 1, got ({i0}, {lambda_0})")

    return min(Rational(config.EPSILON_CEILING), i0 / (2 - i0), 1 / lambda_0 - 1)


def _jet(node: TreeNode) -> str:
    # 1-jet of the node germ
    if node.germ is None:
        return f"roots of {_format_polynomial(node.point.minimal_polynomial)}"

    linear = _linear_part(node.germ)
    if linear.regular:
        return f"regular ({_constant(node.germ.a)}, {_constant(node.germ.b)})"

    return f"linear part {linear}"


def _dot(tree: ResolutionTree) -> str:
    """
    graphviz text of a resolution tree, node ids are the tree paths

    args:
        tree (ResolutionTree): tree to export

    returns:
        str: "digraph resolution { ... }"
    """
    divisors = {divisor.name: divisor for divisor in tree.divisors}
    lines = ["digraph resolution {", "  node [shape=box];"]

    for node in tree.nodes:
        label = "\\n".join([node.id, _jet(node), node.status + (f" {node.divisor}" if node.divisor else "")])
        lines.append(f"  \"{node.id}\" [label=\"{label}\"];")

    for node in tree.nodes:
        for child in node.children:
            divisor = divisors[node.divisor]
            lines.append(f"  \"{node.id}\" -> \"{child}\" [label=\"{divisor}\"];")

    lines.append("}")
    return "\n".join(lines) + "\n"
