"""
this module provides the command line endpoints of the cyclic quotient service
it handles eigenvalue set enumeration and quotient adjoint threshold tables
"""


# pip install click
# command line interface composition toolkit
import click

# pip install sympy
# exact rational arithmetic
from sympy import Rational

# importing base config parameters, and generic utilities
from utils import jdumps, rstr, tsv
from folmmp import FolmmpError, Settings, RATIONAL, abort

# importing service utilities used in current routing context
from folmmp.services.quotient.utils import _eigenvalue_set, _quotient_sweep


# command group instance
_quotient = click.Group("_quotient")


@_quotient.command("eigenvalues")
@click.option("--epsilon", type=RATIONAL, required=True, help="parameter epsilon' > 0, digit sums are bounded by 1/epsilon'")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def eigenvalues(settings: Settings, epsilon, as_json: bool):
    """
    eigenvalue pairs (p, q) with continued fraction digit sum at most 1/epsilon'
    """
    try:
        pairs = sorted(_eigenvalue_set(epsilon))
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    rows = [(pair.p, pair.q, "[" + ",".join(str(u) for u in pair.expansion.digits) + "]", pair.expansion.digit_sum) for pair in pairs]
    if as_json:
        click.echo(jdumps({"epsilon": epsilon, "pairs": [dict(zip(("p", "q", "digits", "digit_sum"), row)) for row in rows]}))
        return

    click.echo(tsv(("p", "q", "digits", "digit_sum"), rows))


@_quotient.command("quotient-threshold")
@click.option("--m", "m", type=int, required=True, help="group order, at least 3")
@click.option("--b", "b", type=int, default=None, help="single weight instead of the sweep over b")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def quotient_threshold(settings: Settings, m: int, b: int | None, as_json: bool):
    """
    adjoint thresholds of the cyclic quotients 1/m(1, b) with d/dx upstairs
    """
    try:
        if m < 3:
            abort(2, f"quotient thresholds need m >= 3, got {m}")
        rows = [row for row in _quotient_sweep(m) if b is None or row.b == b]
        if not rows:
            abort(2, f"b = {b} is not a weight of 1/{m}(1, b)")
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    if as_json:
        click.echo(jdumps({"m": m, "target": Rational(1, m - 2), "rows": [{
            "b": row.b,
            "chain": row.chain,
            "divisors": [{"a_fol": a_fol, "a_var": a_var} for a_fol, a_var in row.divisors],
            "threshold": row.threshold,
            "attains": row.attains,
            "terminal": row.terminal,
        } for row in rows]}))
        return

    click.echo(tsv(("m", "b", "chain", "divisors", "threshold", "attains"), [(
        row.m,
        row.b,
        "[" + ",".join(str(c) for c in row.chain) + "]",
        ";".join(f"({rstr(a_fol)},{rstr(a_var)})" for a_fol, a_var in row.divisors),
        row.threshold,
        "yes" if row.attains else "no",
    ) for row in rows]))
