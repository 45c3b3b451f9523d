"""
cyclic quotient service module
foliations on cyclic quotient singularities 1/m(1, b): hirzebruch-jung chains, variety discrepancies from the
chain intersection matrix, foliation discrepancies from weighted blow-ups upstairs descended through the
foliated riemann-hurwitz formula, adjoint thresholds and the finite eigenvalue sets of strictly log canonical points
"""


# standard imports
import logging
from dataclasses import dataclass, field
from math import floor, gcd

# pip install sympy
# exact linear algebra and rational arithmetic
from sympy import Matrix, Rational

# exact arithmetic core
from folmmp.services.exactcore.utils import (
    UNBOUNDED, Unbounded, ContinuedFraction, _polynomial, _terms, _continued_fraction, _hirzebruch_jung,
)

# germ and resolution tree services
from folmmp.services.germ.utils import VectorFieldGerm, _germ
from folmmp.services.restree.utils import _replay

# importing package errors
from folmmp import PreconditionViolation


# module logger
logger = logging.getLogger(__name__)

# largest digit sum enumerated by the eigenvalue sets, the sets grow like 2^S
DIGIT_SUM_CAP = 24


@dataclass(frozen=True, order=True)
class EigenvaluePair:
    """
    normalized eigenvalue pair of a strictly log canonical point p x d/dx + q y d/dy
    """
    p: int
    q: int

    def __post_init__(self):
        if not self.p >= self.q >= 1 or gcd(self.p, self.q) != 1:
            raise PreconditionViolation(f"eigenvalue pairs are coprime with p >= q >= 1, got ({self.p}, {self.q})")

    @property
    def expansion(self) -> ContinuedFraction:
        return _continued_fraction(self.p, self.q)


def _d_dx() -> VectorFieldGerm:
    # default upstairs foliation
    return _germ(_polynomial({(0, 0): 1}), _polynomial({}))


@dataclass(frozen=True)
class CyclicQuotientGerm:
    """
    quotient of (C^2, upstairs) by (x, y) -> (xi x, xi^b y), xi a primitive m-th root of unity
    """
    m: int
    b: int
    upstairs: VectorFieldGerm = field(default_factory=_d_dx)

    def __post_init__(self):
        if not 1 <= self.b < self.m or gcd(self.m, self.b) != 1:
            raise PreconditionViolation(f"cyclic quotient data needs coprime 1 <= b < m, got ({self.m}, {self.b})")

        # x^i y^j d/dx has character 1 - i - b j, x^i y^j d/dy has character b - i - b j
        characters = {(1 - i - self.b * j) % self.m for i, j in _terms(self.upstairs.a)}
        characters |= {(self.b - i - self.b * j) % self.m for i, j in _terms(self.upstairs.b)}
        if len(characters) != 1:
            raise PreconditionViolation(f"upstairs germ {self.upstairs} is not equivariant under 1/{self.m}(1, {self.b})")

    @property
    def chain(self) -> list[int]:
        return _hirzebruch_jung(self.m, self.b)


@dataclass(frozen=True)
class QuotientDivisor:
    """
    exceptional curve of the minimal resolution, weights (alpha, beta) are the ray numerators over m
    """
    name: str
    c: int
    alpha: int
    beta: int
    ramification: int
    iota: int
    a_fol: Rational
    a_var: Rational

    def adjoint(self, epsilon: Rational) -> Rational:
        return self.a_fol + epsilon * self.a_var


@dataclass(frozen=True)
class QuotientResolution:
    germ: CyclicQuotientGerm
    divisors: tuple[QuotientDivisor, ...]
    residual: tuple[Rational, ...]

    @property
    def chain(self) -> list[int]:
        return [divisor.c for divisor in self.divisors]


def _hj_rays(m: int, b: int) -> list[tuple[int, int]]:
    """
    primitive rays of the toric resolution of 1/m(1, b) as integer numerators over m,
    w_0 = (0, m), w_1 = (1, b), w_(i+1) = c_i w_i - w_(i-1), ending at (m, 0)

    args:
        m (int): group order
        b (int): weight

    returns:
        list[tuple[int, int]]: rays w_0, ..., w_(r+1)
    """
    rays = [(0, m), (1, b)]
    for c in _hirzebruch_jung(m, b):
        (x0, y0), (x1, y1) = rays[-2], rays[-1]
        rays.append((c * x1 - x0, c * y1 - y0))

    # the chain closes on the other axis
    if rays[-1] != (m, 0):
        raise PreconditionViolation(f"hirzebruch-jung rays of 1/{m}(1, {b}) do not close, got {rays[-1]}")

    return rays


def _weighted_path(alpha: int, beta: int) -> tuple[tuple[int, int], ...]:
    """
    smooth blow-up centers realizing the monomial valuation of weights (alpha, beta), following the
    subtractive euclidean algorithm; each center is the origin of a chart of the previous blow-up

    args:
        alpha (int): weight of x
        beta (int): weight of y, coprime to alpha

    returns:
        tuple: (chart, 0) for each blow-up after the first
    """
    if alpha < 1 or beta < 1 or gcd(alpha, beta) != 1:
        raise PreconditionViolation(f"weights must be coprime positive integers, got ({alpha}, {beta})")

    centers = []
    while (alpha, beta) != (1, 1):
        # chart 2 keeps y as the smaller weight, chart 1 keeps x
        if alpha > beta:
            centers.append((2, Rational(0)))
            alpha -= beta
        else:
            centers.append((1, Rational(0)))
            beta -= alpha

    return tuple(centers)


def _cover_discrepancy(a: Rational, r: int, iota: int, epsilon: Rational) -> Rational:
    """
    coefficient upstairs of a divisor with downstairs coefficient a and ramification r: r a + (r - 1)(iota + epsilon)

    args:
        a (Rational): downstairs adjoint coefficient
        r (int): ramification index
        iota (int): invariance of the divisor
        epsilon (Rational): adjoint parameter, 0 for the foliation alone

    returns:
        Rational: upstairs coefficient
    """
    if r < 1:
        raise PreconditionViolation(f"ramification indices are positive, got {r}")

    return r * Rational(a) + (r - 1) * (iota + Rational(epsilon))


def _descend(a: Rational, r: int, weight: Rational) -> Rational:
    # inverse of the cover relation
    return (Rational(a) - (r - 1) * weight) / r


def _quotient_resolution(g: CyclicQuotientGerm) -> QuotientResolution:
    """
    minimal resolution of a foliated cyclic quotient point with the discrepancies of every chain curve;
    a_var solves the adjunction system, a_fol comes from the weighted blow-up upstairs, both are checked
    against the riemann-hurwitz descent

    args:
        g (CyclicQuotientGerm): quotient data

    returns:
        QuotientResolution: chain divisors and the residual of the linear system
    """
    try:
        chain = g.chain
        r = len(chain)

        # chain intersection matrix, adjunction gives (sum a_j E_j) . E_i = K . E_i = c_i - 2
        gram = Matrix(r, r, lambda i, j: -chain[i] if i == j else (1 if abs(i - j) == 1 else 0))
        rhs = Matrix([c - 2 for c in chain])
        solution = gram.LUsolve(rhs)
        residual = tuple(Rational(value) for value in gram * solution - rhs)

        divisors = []
        for index, (alpha, beta) in enumerate(_hj_rays(g.m, g.b)[1:-1]):
            # the ray is (alpha, beta) / m, the upstairs valuation is primitive with ramification m / gcd
            common = gcd(alpha, beta)
            weights, ramification = (alpha // common, beta // common), g.m // gcd(g.m, common)

            # upstairs divisor of the weighted blow-up
            upstairs = _replay(g.upstairs, _weighted_path(*weights))[-1]
            a_fol = _descend(upstairs.a_fol, ramification, upstairs.iota)
            a_var = _descend(upstairs.a_var, ramification, 1)

            # the two computations of a_var must agree
            if a_var != Rational(solution[index]):
                raise PreconditionViolation(f"variety discrepancy mismatch on E{index + 1} of 1/{g.m}(1, {g.b}): {a_var} != {solution[index]}")

            divisors.append(QuotientDivisor(f"E{index + 1}", chain[index], alpha, beta, ramification, upstairs.iota, a_fol, a_var))
            logger.debug("1/%d(1, %d) E%d: a_fol=%s a_var=%s", g.m, g.b, index + 1, a_fol, a_var)

        return QuotientResolution(g, tuple(divisors), residual)
    except Exception as ex:
        # rethrow exception
        raise ex


def _quotient_adjoint_threshold(m: int, b: int, upstairs: VectorFieldGerm | None = None) -> Rational | Unbounded:
    """
    largest epsilon with a_fol + epsilon a_var >= 0 on every chain curve

    args:
        m (int): group order, at least 3
        b (int): weight
        upstairs (VectorFieldGerm) (optional): upstairs germ, d/dx by default

    returns:
        Rational | Unbounded: min of a_fol / (-a_var) over curves with a_var < 0
    """
    if m < 3:
        raise PreconditionViolation(f"quotient thresholds need m >= 3, got {m}")

    germ = CyclicQuotientGerm(m, b, upstairs) if upstairs else CyclicQuotientGerm(m, b)
    ratios = [d.a_fol / -d.a_var for d in _quotient_resolution(germ).divisors if d.a_var < 0]

    return min(ratios) if ratios else UNBOUNDED


@dataclass(frozen=True)
class SweepRow:
    m: int
    b: int
    chain: tuple[int, ...]
    divisors: tuple[tuple[Rational, Rational], ...]
    threshold: Rational | Unbounded
    attains: bool
    terminal: bool


def _quotient_sweep(m: int) -> tuple[SweepRow, ...]:
    """
    thresholds of every 1/m(1, b) with d/dx upstairs, rows attaining 1/(m - 2) flagged

    args:
        m (int): group order, at least 3

    returns:
        tuple[SweepRow]: one row per admissible b
    """
    rows = []
    for b in range(1, m):
        if gcd(m, b) != 1:
            continue

        resolution = _quotient_resolution(CyclicQuotientGerm(m, b))
        threshold = _quotient_adjoint_threshold(m, b)

        rows.append(SweepRow(
            m, b, tuple(resolution.chain),
            tuple((d.a_fol, d.a_var) for d in resolution.divisors),
            threshold,
            threshold == Rational(1, m - 2),
            all(d.a_fol > 0 for d in resolution.divisors),
        ))

    return tuple(rows)


@dataclass(frozen=True)
class CoverDivisor:
    """
    prime divisor upstairs over the prime divisor image downstairs
    """
    name: str
    image: str
    ramification: int
    iota: int


def _rh_pullback(downstairs: dict[str, tuple[int, Rational]], ramification: tuple[CoverDivisor, ...], epsilon: Rational) -> dict[str, tuple[int, Rational]]:
    """
    foliated riemann-hurwitz: the upstairs adjoint divisor is the pullback plus (r - 1)(iota + epsilon) on each
    ramification divisor

    args:
        downstairs (dict): name -> (iota, coefficient) of the downstairs adjoint divisor
        ramification (tuple[CoverDivisor]): upstairs divisors with their images and ramification indices
        epsilon (Rational): adjoint parameter

    returns:
        dict: name -> (iota, coefficient) upstairs
    """
    upstairs = {}
    for divisor in ramification:
        if divisor.image not in downstairs:
            raise PreconditionViolation(f"{divisor.name} maps to unknown divisor {divisor.image}")

        iota, coefficient = downstairs[divisor.image]

        # invariance is preserved by finite covers
        if iota != divisor.iota:
            raise PreconditionViolation(f"{divisor.name} has iota {divisor.iota} but its image {divisor.image} has iota {iota}")

        upstairs[divisor.name] = (iota, _cover_discrepancy(coefficient, divisor.ramification, iota, epsilon))

    return upstairs


def _quotient_boundary(ramification: dict[str, int]) -> dict[str, Rational]:
    """
    branch boundary sum (r_D - 1) / r_D D making the quotient crepant for the adjoint divisor

    args:
        ramification (dict): divisor -> ramification index

    returns:
        dict: divisor -> coefficient
    """
    if any(r < 1 for r in ramification.values()):
        raise PreconditionViolation("ramification indices are positive")

    return {name: Rational(r - 1, r) for name, r in ramification.items()}


def _canonical_digits(limit: int, prefix: tuple[int, ...] = ()):
    # canonical continued fractions with digit sum <= limit, last digit >= 2 unless single
    total = sum(prefix)
    if prefix and (len(prefix) == 1 or prefix[-1] >= 2):
        yield prefix
    for digit in range(1, limit - total + 1):
        yield from _canonical_digits(limit, prefix + (digit,))


def _eigenvalue_set(epsilon_prime: Rational) -> frozenset[EigenvaluePair]:
    """
    normalized pairs (p, q) whose continued fraction digit sum is at most 1 / epsilon'

    args:
        epsilon_prime (Rational): positive parameter

    returns:
        frozenset[EigenvaluePair]: the finite set
    """
    epsilon_prime = Rational(epsilon_prime)
    if epsilon_prime <= 0:
        raise PreconditionViolation(f"epsilon' must be positive, got {epsilon_prime}")

    limit = int(floor(1 / epsilon_prime))
    if limit > DIGIT_SUM_CAP:
        raise PreconditionViolation(f"digit sums above {DIGIT_SUM_CAP} are not enumerated, got 1/epsilon' = {1 / epsilon_prime}")

    pairs = set()
    for digits in _canonical_digits(limit):
        value = ContinuedFraction(digits).value
        pairs.add(EigenvaluePair(int(value.p), int(value.q)))

    return frozenset(pairs)
