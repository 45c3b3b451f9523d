"""
exact arithmetic core shared by every other service
this module provides bivariate polynomials over the rationals (sympy poly objects with sparse terms),
polynomial text parsing, continued fractions and hirzebruch-jung expansions, no floating point is ever involved
"""


# standard imports
import logging
from dataclasses import dataclass
from math import gcd
from tokenize import TokenError

# pip install sympy
# exact rational arithmetic, sparse polynomials and continued fractions
from sympy import QQ, Poly, Rational, Symbol, symbols
from sympy.ntheory.continued_fraction import continued_fraction, continued_fraction_reduce
from sympy.parsing.sympy_parser import parse_expr, standard_transformations, convert_xor, rationalize
from sympy.polys.polyerrors import PolynomialError, CoercionFailed, GeneratorsNeeded

# importing package errors
from folmmp import ParseError, PreconditionViolation


# module logger
logger = logging.getLogger(__name__)

# germ coordinates, every bivariate polynomial is a Poly over QQ in (x, y)
X, Y = symbols("x y")

# polynomial text parsing rules: "^" as power, decimals kept exact
TRANSFORMATIONS = standard_transformations + (convert_xor, rationalize)


@dataclass(frozen=True)
class Unbounded:
    """
    explicit marker for thresholds no divisor constrains
    """
    def __str__(self) -> str:
        return "unbounded"


# shared marker instance
UNBOUNDED = Unbounded()


@dataclass(frozen=True)
class ContinuedFraction:
    """
    canonical continued fraction [u_1, ..., u_k] with u_k >= 2 when k >= 2
    """
    digits: tuple[int, ...]

    @property
    def value(self) -> Rational:
        return Rational(continued_fraction_reduce(list(self.digits)))

    @property
    def digit_sum(self) -> int:
        return sum(self.digits)


def _polynomial(terms: dict[tuple[int, int], Rational]) -> Poly:
    """
    build a bivariate polynomial from an exponent map, zero coefficients are dropped

    args:
        terms (dict): mapping (i, j) -> coefficient of x^i y^j

    returns:
        Poly: polynomial over QQ in (x, y)
    """
    # no stored zero coefficients
    terms = {exponent: Rational(coefficient) for exponent, coefficient in terms.items() if coefficient != 0}

    # empty maps are the zero polynomial
    if not terms:
        return Poly(0, X, Y, domain=QQ)

    return Poly.from_dict(terms, X, Y, domain=QQ)


def _terms(f: Poly) -> dict[tuple[int, int], Rational]:
    """
    sparse exponent map of a polynomial, without zero coefficients

    args:
        f (Poly): bivariate polynomial

    returns:
        dict: mapping (i, j) -> coefficient
    """
    return {exponent: Rational(coefficient) for exponent, coefficient in f.as_dict().items() if coefficient != 0}


def _poly_order(f: Poly) -> int:
    """
    order of a polynomial at the origin, the minimal total degree among its terms

    args:
        f (Poly): nonzero bivariate polynomial

    returns:
        int: order at the origin
    """
    # the zero polynomial has no order
    if f.is_zero:
        raise PreconditionViolation("the zero polynomial has no order")

    return min(i + j for i, j in _terms(f))


def _degree(f: Poly) -> int:
    # total degree, the zero polynomial counts as degree 0
    return 0 if f.is_zero else max(i + j for i, j in _terms(f))


def _homogeneous(f: Poly, k: int) -> Poly:
    # degree k homogeneous part
    return _polynomial({(i, j): c for (i, j), c in _terms(f).items() if i + j == k})


def _constant(f: Poly) -> Rational:
    # value at the origin
    return _terms(f).get((0, 0), Rational(0))


def _evaluate(f: Poly, x: Rational, y: Rational) -> Rational:
    """
    exact value of f at a rational point

    args:
        f (Poly): bivariate polynomial
        x (Rational): first coordinate
        y (Rational): second coordinate

    returns:
        Rational: f(x, y)
    """
    return sum((c * Rational(x) ** i * Rational(y) ** j for (i, j), c in _terms(f).items()), Rational(0))


def _chart(f: Poly, chart: int) -> Poly:
    """
    substitute a standard blow-up chart into f, chart 1 is (x, y) -> (x, xy), chart 2 is (x, y) -> (xy, y)

    args:
        f (Poly): bivariate polynomial
        chart (int): 1 or 2

    returns:
        Poly: f composed with the chart map
    """
    # chart 1 sends x^i y^j to x^(i+j) y^j, chart 2 to x^i y^(i+j)
    if chart == 1:
        return _polynomial({(i + j, j): c for (i, j), c in _terms(f).items()})

    if chart == 2:
        return _polynomial({(i, i + j): c for (i, j), c in _terms(f).items()})

    raise PreconditionViolation(f"unknown blow-up chart {chart}")


def _axis_order(f: Poly, axis: int) -> int:
    """
    order of vanishing of f along a coordinate axis, axis 0 is {x = 0} and axis 1 is {y = 0}

    args:
        f (Poly): nonzero bivariate polynomial
        axis (int): 0 or 1

    returns:
        int: largest k with x^k (resp. y^k) dividing f
    """
    if f.is_zero:
        raise PreconditionViolation("the zero polynomial has no axis order")

    return min(exponent[axis] for exponent in _terms(f))


def _unshift(f: Poly, axis: int, k: int) -> Poly:
    """
    divide f by x^k (axis 0) or y^k (axis 1), the power must divide f

    args:
        f (Poly): bivariate polynomial
        axis (int): 0 or 1
        k (int): power to divide

    returns:
        Poly: the quotient
    """
    # shifting exponents down along the requested axis
    shifted = {}
    for (i, j), c in _terms(f).items():
        i, j = (i - k, j) if axis == 0 else (i, j - k)
        if min(i, j) < 0:
            raise PreconditionViolation(f"{'xy'[axis]}^{k} does not divide {_format_polynomial(f)}")
        shifted[(i, j)] = c

    return _polynomial(shifted)


def _translate(f: Poly, x: Rational = 0, y: Rational = 0) -> Poly:
    """
    move a rational point to the origin, returns f(x + x0, y + y0)

    args:
        f (Poly): bivariate polynomial
        x (Rational): first coordinate of the point
        y (Rational): second coordinate of the point

    returns:
        Poly: translated polynomial
    """
    # nothing to do at the origin
    if x == 0 and y == 0:
        return f

    return Poly(f.as_expr().subs({X: X + Rational(x), Y: Y + Rational(y)}, simultaneous=True), X, Y, domain=QQ)


def _restrict(f: Poly, axis: int) -> Poly:
    """
    restriction of f to a coordinate axis as a univariate polynomial, axis 0 restricts to {x = 0} (variable y)

    args:
        f (Poly): bivariate polynomial
        axis (int): 0 or 1

    returns:
        Poly: univariate polynomial over QQ
    """
    # keeping terms not divisible by the axis variable
    variable = Y if axis == 0 else X
    terms = {(exponent[1 - axis],): c for exponent, c in _terms(f).items() if exponent[axis] == 0}

    return Poly.from_dict(terms, variable, domain=QQ) if terms else Poly(0, variable, domain=QQ)


def _parse_polynomial(text: str, line: int = 1, column: int = 1, generators: tuple[Symbol, ...] = (X, Y)) -> Poly:
    """
    parse a human readable polynomial such as "3/2*x^2*y - y^3" with exact rational coefficients

    args:
        text (str): polynomial text, "^" and "**" both denote powers
        line (int): line of the text in its file, for error locations
        column (int): column where the text starts, for error locations
        generators (tuple[Symbol]): allowed variables

    returns:
        Poly: polynomial over QQ in the given generators
    """
    # empty text is a syntax error, not the zero polynomial
    if not text.strip():
        raise ParseError("empty polynomial", line, column)

    try:
        # restricting names to the generators so stray symbols are caught below
        expression = parse_expr(text, local_dict={str(g): g for g in generators}, transformations=TRANSFORMATIONS)
    except SyntaxError as ex:
        raise ParseError(f"invalid polynomial {text.strip()!r}", line, column + max((ex.offset or 1) - 1, 0))
    except (TokenError, TypeError, ValueError, AttributeError) as ex:
        raise ParseError(f"invalid polynomial {text.strip()!r}: {ex}", line, column)

    # unknown variables or functions
    stray = getattr(expression, "free_symbols", set()) - set(generators)
    if stray:
        name = sorted(str(symbol) for symbol in stray)[0]
        raise ParseError(f"unknown variable {name!r}", line, column + max(text.find(name), 0))

    try:
        return Poly(expression, *generators, domain=QQ)
    except (PolynomialError, CoercionFailed, GeneratorsNeeded, TypeError, ValueError) as ex:
        raise ParseError(f"not a polynomial with rational coefficients: {text.strip()!r}", line, column)


def _format_polynomial(f: Poly) -> str:
    """
    human readable text of a polynomial, re-parses to the same polynomial

    args:
        f (Poly): polynomial

    returns:
        str: text using "^" for powers
    """
    return str(f.as_expr()).replace("**", "^")


def _continued_fraction(p: int, q: int) -> ContinuedFraction:
    """
    canonical continued fraction of p/q

    args:
        p (int): numerator, p >= q
        q (int): denominator, coprime to p

    returns:
        ContinuedFraction: digits with p/q = u_1 + 1/(u_2 + ...)
    """
    # normalized coprime input only
    if p < 1 or q < 1 or gcd(p, q) != 1 or p < q:
        raise PreconditionViolation(f"continued fraction needs coprime p >= q >= 1, got ({p}, {q})")

    # sympy returns the canonical expansion (last digit >= 2 unless single digit)
    return ContinuedFraction(tuple(int(u) for u in continued_fraction(Rational(p, q))))


def _hirzebruch_jung(m: int, b: int) -> list[int]:
    """
    hirzebruch-jung expansion m/b = c_1 - 1/(c_2 - ...) of the cyclic quotient 1/m(1, b)

    args:
        m (int): group order
        b (int): weight, 1 <= b < m, coprime to m

    returns:
        list[int]: chain [c_1, ..., c_r], all c_i >= 2
    """
    # valid cyclic quotient data only
    if not 1 <= b < m or gcd(m, b) != 1:
        raise PreconditionViolation(f"hirzebruch-jung expansion needs coprime 1 <= b < m, got ({m}, {b})")

    # ceiling euclidean algorithm on integers: m/b = c - 1/(b/(c*b - m))
    chain = []
    while b:
        c = -(-m // b)
        chain.append(c)
        m, b = b, c * b - m

    return chain


def _hirzebruch_jung_value(chain: list[int]) -> Rational:
    """
    reverse recursion of a hirzebruch-jung chain

    args:
        chain (list[int]): [c_1, ..., c_r]

    returns:
        Rational: c_1 - 1/(c_2 - 1/(... - 1/c_r))
    """
    if not chain:
        raise PreconditionViolation("empty hirzebruch-jung chain")

    # numerator / denominator pair of the tail value
    numerator, denominator = chain[-1], 1
    for c in reversed(chain[:-1]):
        numerator, denominator = c * numerator - denominator, numerator

    return Rational(numerator, denominator)
