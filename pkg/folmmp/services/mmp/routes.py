"""
this module provides the command line endpoints of the adjoint mmp service
it handles surface model runs with json lines logs, canonical models and the bound calculators
"""


# importing required modules
from typing import IO

# pip install click
# command line interface composition toolkit
import click

# importing base config parameters, and generic utilities
from utils import jdumps, rparse, rstr, tsv
from folmmp import FolmmpError, Settings, RATIONAL, abort

# importing service utilities used in current routing context
from folmmp.services.restree.utils import AdjointParams, _entry_bound
from folmmp.services.surface.utils import FoliatedSurfaceModel, _parse_surface, _emit_surface, _adjoint_class, _intersect
from folmmp.services.mmp.utils import (
    MMPStep, _run_adjoint_mmp, _epsilon_canonical_model, _eta_lc_report, _degree_bound_check, _automorphism_bound,
    _volume_report, _run_log, _step_record, _outcome_record, _point_record,
)


# command group instance
_mmp = click.Group("_mmp")


def _load(stream: IO, settings: Settings) -> FoliatedSurfaceModel:
    # surface file with the configured degree cap for point germs
    return _parse_surface(stream.read(), settings.degree_cap)


def _params(settings: Settings, epsilon, delta, depth: int | None) -> AdjointParams:
    # flags win over settings, adjoint checks need depth 4 at least
    return AdjointParams(
        epsilon if epsilon is not None else settings.epsilon,
        delta if delta is not None else settings.delta,
        max(depth or settings.search_depth, 4),
    )


def _write(path: str | None, content: str) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as stream:
            stream.write(content)


def _rows(steps: tuple[MMPStep, ...]) -> list[tuple]:
    return [(
        step.index,
        step.curve,
        step.ray,
        step.case or "-",
        step.t if step.t is not None else "-",
        step.degree,
        step.excess,
        step.self_intersection,
        step.point,
        "yes" if step.preserved else "no",
    ) for step in steps]


STEP_HEADER = ("step", "curve", "ray", "case", "t", "degree", "excess", "self_intersection", "point", "preserved")


def _surface_options(function):
    # options shared by the model commands
    for option in reversed((
        click.argument("file", type=click.File("r", encoding="utf-8")),
        click.option("--epsilon", type=RATIONAL, default=None, help="adjoint parameter, below 1/5"),
        click.option("--delta", type=RATIONAL, default=None, help="adjoint parameter delta in [0, 1]"),
        click.option("--depth", type=int, default=None, help="search depth of point checks"),
        click.option("--emit", "emit", type=click.Path(dir_okay=False, writable=True), default=None, help="write the final surface model"),
        click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output"),
    )):
        function = option(function)
    return function


@_mmp.group("mmp")
def mmp():
    """
    adjoint minimal model program on surface models
    """


@mmp.command("run")
@_surface_options
@click.option("--log", "log", type=click.Path(dir_okay=False, writable=True), default=None, help="write the json lines run log")
@click.pass_obj
def run(settings: Settings, file: IO, epsilon, delta, depth: int | None, emit: str | None, as_json: bool, log: str | None):
    """
    run the adjoint mmp, exits 3 when the catalogue is incomplete
    """
    try:
        result = _run_adjoint_mmp(_load(file, settings), _params(settings, epsilon, delta, depth))
        report = _eta_lc_report(result)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    _write(log, _run_log(result))
    _write(emit, _emit_surface(result.model))

    if as_json:
        click.echo(jdumps({
            "epsilon": result.params.epsilon,
            "delta": result.params.delta,
            "steps": [_step_record(step) for step in result.steps],
            "outcome": _outcome_record(result.outcome),
            "eta": {"margin": report.margin, "bound": report.bound, "holds": report.holds},
            "assumptions": report.conditional,
        }))
        return

    click.echo(tsv(STEP_HEADER, _rows(result.steps)))
    click.echo(str(result.outcome))
    click.echo(f"eta margin {rstr(report.margin)} against bound {rstr(report.bound)}: {'holds' if report.holds else 'fails'}")
    if report.conditional:
        click.echo(f"conditional on: {', '.join(report.conditional)}")


@_mmp.command("canonical-model")
@_surface_options
@click.pass_obj
def canonical_model(settings: Settings, file: IO, epsilon, delta, depth: int | None, emit: str | None, as_json: bool):
    """
    run the adjoint mmp and contract the adjoint trivial curves of the nef model
    """
    try:
        result = _run_adjoint_mmp(_load(file, settings), _params(settings, epsilon, delta, depth))
        canonical = _epsilon_canonical_model(result)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    _write(emit, _emit_surface(canonical.model))

    steps = result.steps + canonical.steps
    adjoint = _adjoint_class(canonical.model, result.params.epsilon)
    degrees = [(curve.name, _intersect(adjoint, curve.divisor)) for curve in canonical.model.curves]

    if as_json:
        click.echo(jdumps({
            "epsilon": result.params.epsilon,
            "delta": result.params.delta,
            "steps": [_step_record(step) for step in steps],
            "points": [_point_record(point) for point in canonical.points],
            "degrees": [{"curve": name, "degree": degree} for name, degree in degrees],
        }))
        return

    click.echo(tsv(STEP_HEADER, _rows(steps)))
    click.echo(tsv(("curve", "adjoint_degree"), degrees))


@_mmp.group("bounds")
def bounds():
    """
    arithmetic of the degree, automorphism, volume and boundary entry bounds
    """


@bounds.command("degree")
@click.option("--g", "g", type=int, required=True, help="genus, at least 1")
@click.option("--m", "m", type=int, required=True, help="multiple, at least 1")
@click.option("--tau", type=RATIONAL, default=None, help="defaults to the configured constant tau")
@click.option("--l-degree", "l_degree", type=RATIONAL, required=True, help="L . (K_F + tau K_X)")
@click.option("--adjoint-sq", "adjoint_sq", type=RATIONAL, required=True, help="(K_F + tau K_X)^2")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def degree(settings: Settings, g: int, m: int, tau, l_degree, adjoint_sq, as_json: bool):
    """
    evaluate the degree bound chain
    """
    try:
        report = _degree_bound_check(g, tau if tau is not None else settings.constant("tau"), m, l_degree, adjoint_sq)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    rows = [
        ("g", report.g), ("tau", report.tau), ("m", report.m), ("sections", report.sections),
        ("restriction", report.restriction), ("vanishing", report.vanishing), ("m0", report.m0),
        ("adjoint_sq", report.adjoint_sq), ("bound", report.bound), ("l_degree", report.l_degree), ("holds", report.holds),
    ]
    if as_json:
        click.echo(jdumps(dict(rows)))
        return

    click.echo(tsv(("quantity", "value"), [(name, str(value).lower() if isinstance(value, bool) else value) for name, value in rows]))


@bounds.command("aut")
@click.option("--vol-up", "vol_up", type=RATIONAL, required=True, help="adjoint volume of the surface")
@click.option("--vol-down", "vol_down", type=RATIONAL, required=True, help="adjoint volume of the quotient")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
def aut(vol_up, vol_down, as_json: bool):
    """
    order bound of an automorphism group
    """
    try:
        ratio = _automorphism_bound(vol_up, vol_down)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    click.echo(jdumps({"vol_up": vol_up, "vol_down": vol_down, "bound": ratio}) if as_json else rstr(ratio))


@bounds.command("volume")
@click.option("--volume", type=RATIONAL, required=True, help="adjoint volume")
@click.option("--epsilon", type=RATIONAL, default=None, help="key of the configured volume floor")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def volume(settings: Settings, volume, epsilon, as_json: bool):
    """
    compare a volume with the configured floor v(epsilon)
    """
    try:
        epsilon = epsilon if epsilon is not None else rparse(settings.epsilon)
        entry = settings.floor(epsilon)
        report = _volume_report(volume, epsilon, entry.rational)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    rows = [
        ("epsilon", report.epsilon), ("volume", report.volume), ("floor", report.floor),
        ("constant", report.constant), ("bound", report.bound), ("above", str(report.above).lower()),
    ]
    if as_json:
        click.echo(jdumps({**dict(rows), "above": report.above, "provenance": entry.provenance}))
        return

    click.echo(tsv(("quantity", "value"), rows))


@bounds.command("entry")
@click.option("--i0", "i0", type=RATIONAL, required=True, help="smallest boundary coefficient")
@click.option("--lambda0", "lambda_0", type=RATIONAL, default=None, help="defaults to the configured constant lambda_0")
@click.option("--json", "as_json", is_flag=True, default=False, help="machine readable output")
@click.pass_obj
def entry(settings: Settings, i0, lambda_0, as_json: bool):
    """
    explicit part of the boundary entry constant
    """
    try:
        lambda_0 = lambda_0 if lambda_0 is not None else settings.constant("lambda_0")
        bound = _entry_bound(i0, lambda_0)
    except FolmmpError as ex:
        # rethrow exception
        abort(ex.code, str(ex))

    click.echo(jdumps({"i0": i0, "lambda_0": lambda_0, "bound": bound}) if as_json else rstr(bound))
