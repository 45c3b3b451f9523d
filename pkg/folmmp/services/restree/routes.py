"""
this module provides the command line endpoints of the resolution trees service
it handles germ files for classification, reduction trees with dot export,
adjoint log canonicity checks and adjoint thresholds
"""


# importing required modules
from typing import IO

# pip install click
# command line interface composition toolkit
import click

# importing base config parameters, and generic utilities
from utils import jdumps, rstr, tsv
from folmmp import FolmmpError, Settings, RATIONAL, abort

# importing service utilities used in current routing context
from folmmp.services.germ.utils import GermInput, _parse_germ
from folmmp.services.restree.utils import (
    AdjointParams, Refuted, Inconclusive, _classify, _seidenberg_reduce, _grow,
    _adjoint_lc_check, _adjoint_threshold, _dot,
)


# command group instance
_restree = click.Group("_restree")


def _load(stream: IO, settings: Settings) -> GermInput:
    # germ file with the configured degree cap
    return _parse_germ(stream.read(), settings.degree_cap)


@_restree.command("classify-germ")
@click.argument("file", type=click.File("r", encoding="utf-8"))
@click.option("--depth", type=int, default=None, help="search depth for resonant germs")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def classify_germ(settings: Settings, file: IO, depth: int | None, as_json: bool):
    """
    classify the singularity of a germ file
    """
    try:
        data = _load(file, settings)
        result = _classify(data.germ, depth or settings.search_depth)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    if as_json:
        click.echo(jdumps({
            "germ": str(data.germ),
            "kind": result.kind,
            "marker": result.marker,
            "pair": result.pair,
            "eigenvalues": result.eigenvalues,
            "log_terminal": result.log_terminal,
        }))
        return

    click.echo(str(result))


@_restree.command("resolve")
@click.argument("file", type=click.File("r", encoding="utf-8"))
@click.option("--dot", "dot", type=click.Path(dir_okay=False, writable=True), default=None, help="write the tree as graphviz text")
@click.option("--depth", type=int, default=None, help="maximal blow-ups along a branch")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def resolve(settings: Settings, file: IO, dot: str | None, depth: int | None, as_json: bool):
    """
    reduction tree of a germ, one row per exceptional divisor
    """
    try:
        data = _load(file, settings)
        depth = depth or settings.search_depth

        # regular germs without boundary have a trivial tree
        tree = _seidenberg_reduce(data.germ, depth, data.boundary) if data.germ.singular or data.boundary else _grow(data.germ, (), depth)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    # dot export
    if dot:
        with open(dot, "w", encoding="utf-8") as stream:
            stream.write(_dot(tree))

    rows = [(d.name, d.node, d.depth, d.iota, d.a_fol, d.a_var, d.self_intersection) for d in tree.divisors]
    if as_json:
        click.echo(jdumps({
            "germ": str(data.germ),
            "divisors": [dict(zip(("name", "node", "depth", "iota", "a_fol", "a_var", "self_intersection"), row)) for row in rows],
            "leaves": [{"node": leaf.id, "status": leaf.status} for leaf in tree.leaves],
        }))
        return

    click.echo(tsv(("divisor", "node", "depth", "iota", "a_fol", "a_var", "self_intersection"), rows))


@_restree.command("adjoint-check")
@click.argument("file", type=click.File("r", encoding="utf-8"))
@click.option("--epsilon", type=RATIONAL, default=None, help="adjoint parameter epsilon > 0")
@click.option("--delta", type=RATIONAL, default=None, help="adjoint parameter delta in [0, 1]")
@click.option("--depth", type=int, default=None, help="search depth, at least 4")
@click.option("--klt", is_flag=True, default=False, help="strict inequalities")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def adjoint_check(settings: Settings, file: IO, epsilon, delta, depth: int | None, klt: bool, as_json: bool):
    """
    decide (epsilon, delta)-adjoint log canonicity of a germ file, exits 3 when inconclusive
    """
    try:
        data = _load(file, settings)
        params = AdjointParams(
            epsilon if epsilon is not None else settings.epsilon,
            delta if delta is not None else settings.delta,
            depth or settings.search_depth,
            klt,
        )
        verdict = _adjoint_lc_check(data.germ, params, data.boundary)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    if as_json:
        payload = {"verdict": type(verdict).__name__, "epsilon": params.epsilon, "delta": params.delta}
        if isinstance(verdict, Refuted):
            payload.update({
                "divisor": verdict.divisor.name,
                "iota": verdict.divisor.iota,
                "a_fol": verdict.divisor.a_fol,
                "a_var": verdict.divisor.a_var,
                "value": verdict.value,
                "bound": verdict.bound,
                "path": [node.id for node in verdict.path],
            })
        if isinstance(verdict, Inconclusive):
            payload["reason"] = verdict.reason
        click.echo(jdumps(payload))
    else:
        click.echo(str(verdict))

    # inconclusive verdicts exit with code 3
    if isinstance(verdict, Inconclusive):
        abort(3, verdict.reason)


@_restree.command("adjoint-threshold")
@click.argument("file", type=click.File("r", encoding="utf-8"))
@click.option("--delta", type=RATIONAL, default=None, help="adjoint parameter delta in [0, 1]")
@click.option("--depth", type=int, default=None, help="search depth")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def adjoint_threshold(settings: Settings, file: IO, delta, depth: int | None, as_json: bool):
    """
    smallest epsilon certifying (epsilon, delta)-adjoint log canonicity of a germ file
    """
    try:
        data = _load(file, settings)
        delta = delta if delta is not None else settings.delta
        threshold = _adjoint_threshold(data.germ, delta, depth or settings.search_depth, data.boundary)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    if as_json:
        click.echo(jdumps({"germ": str(data.germ), "delta": delta, "threshold": threshold}))
        return

    click.echo(rstr(threshold))
