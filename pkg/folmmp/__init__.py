"""
this module handles the core initialization of the folmmp toolkit, including:
- command line application group setup and runtime configuration
- error hierarchy shared by every service, carrying process exit codes
- service module registration
"""


# standard imports
import logging
from typing import Any, NoReturn

# pip install click
# command line interface composition toolkit
import click

# pip install pydantic
# runtime configuration validation
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

# pip install pyyaml
# configuration files loading
import yaml

# importing base config parameters, and generic utilities
import config
from utils import rparse, rstr


# package logger, services loggers are children of this one
logger = logging.getLogger(config.APP_NAME)


class FolmmpError(Exception):
    """
    base error of the toolkit, code is the process exit status reported by the command line
    """
    code = 1


class ParseError(FolmmpError):
    """
    malformed text input (germ files, surface files, polynomials, configuration), located by line and column
    """
    code = 1

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column

        # location prefix only when known
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class PreconditionViolation(FolmmpError):
    code = 2


class NonIsolatedSingularity(PreconditionViolation):
    """
    the transformed foliation vanishes along the whole exceptional divisor, input was not saturated
    """


class CatalogueIncomplete(FolmmpError):
    code = 3


class DepthExceeded(FolmmpError):
    code = 3


class Undecided(FolmmpError):
    """
    a decision procedure could neither certify nor refute within its search bounds
    """
    code = 3


class UnresolvedCenter(FolmmpError):
    """
    continuation requested at a point of the exceptional divisor with irrational coordinates
    """
    code = 3


class Abort(click.ClickException):
    """
    click exception carrying a custom exit code
    """
    def __init__(self, code: int, description: str):
        super().__init__(description)
        self.exit_code = code


def abort(code: int, description: str) -> NoReturn:
    """
    stop the running command with the given exit code and message (printed to stderr by click)

    args:
        code (int): process exit code, 1 parse error, 2 precondition violation, 3 inconclusive / incomplete
        description (str): explanation printed after "Error:"
    """
    raise Abort(code, description)


class Constant(BaseModel):
    """
    external constant entry, a rational value with the provenance it was taken from
    """
    model_config = ConfigDict(frozen=True)

    value: str
    provenance: str = Field(min_length=1)

    @field_validator("value", mode="before")
    @classmethod
    def _exact(cls, value: Any) -> str:
        # numbers coming from yaml are converted through their text form
        value = str(value)
        rparse(value)
        return value

    @property
    def rational(self):
        return rparse(self.value)


class Settings(BaseModel):
    """
    runtime configuration, defaults from config.py overlaid by a yaml file and then by command flags
    """
    model_config = ConfigDict(frozen=True)

    epsilon: str = config.EPSILON
    delta: str = config.DELTA
    search_depth: int = Field(config.SEARCH_DEPTH, ge=1)
    degree_cap: int = Field(config.DEGREE_CAP, ge=1)
    constants: dict[str, Constant] = Field(default_factory=lambda: {key: Constant(**value) for key, value in config.EXTERNAL_CONSTANTS.items()})
    volume_floor: dict[str, Constant] = Field(default_factory=lambda: {key: Constant(**value) for key, value in config.VOLUME_FLOOR.items()})

    @field_validator("epsilon", mode="before")
    @classmethod
    def _epsilon(cls, value: Any) -> str:
        value = str(value)
        if rparse(value) <= 0:
            raise ValueError("epsilon must be positive")
        return value

    @field_validator("delta", mode="before")
    @classmethod
    def _delta(cls, value: Any) -> str:
        value = str(value)
        if not 0 <= rparse(value) <= 1:
            raise ValueError("delta must lie in [0, 1]")
        return value

    @field_validator("volume_floor", mode="before")
    @classmethod
    def _floor_keys(cls, value: Any) -> Any:
        # keys normalized to "p/q" so lookups by rational succeed
        if isinstance(value, dict):
            return {rstr(rparse(str(key))): item for key, item in value.items()}
        return value

    def constant(self, name: str):
        """
        rational value of an external constant

        args:
            name (str): constants table key (tau, lambda_0, E_I, M)

        returns:
            Rational: the configured value
        """
        if name not in self.constants:
            raise PreconditionViolation(f"external constant {name!r} is not configured")

        return self.constants[name].rational

    def floor(self, epsilon) -> Constant:
        """
        configured volume floor v(epsilon)

        args:
            epsilon (Rational): adjoint parameter

        returns:
            Constant: the table entry
        """
        # floors are keyed by exact epsilon
        entry = self.volume_floor.get(rstr(epsilon))
        if entry is None:
            raise PreconditionViolation(f"no volume floor v({rstr(epsilon)}) is configured")

        return entry


class RationalType(click.ParamType):
    """
    click parameter type for exact rationals given as "p/q", integers or finite decimals
    """
    name = "rational"

    def convert(self, value: Any, param: click.Parameter | None, ctx: click.Context | None):
        try:
            return rparse(value)
        except ValueError as ex:
            self.fail(str(ex), param, ctx)


# shared parameter instance
RATIONAL = RationalType()


def configure(path: str | None = None, **flags: Any) -> Settings:
    """
    build the runtime settings, configuration file values override defaults and flags override both

    args:
        path (str) (optional): yaml configuration file
        **flags: command line values, None entries are ignored

    returns:
        Settings: validated settings
    """
    document = {}

    try:
        # yaml document overlay
        if path:
            with open(path, encoding="utf-8") as stream:
                document = yaml.safe_load(stream) or {}

            # only mappings are meaningful as configuration
            if not isinstance(document, dict):
                raise ParseError("configuration file must contain a mapping", 1, 1)

        # constants tables are merged with defaults instead of replacing them
        for key, defaults in (("constants", config.EXTERNAL_CONSTANTS), ("volume_floor", config.VOLUME_FLOOR)):
            if key in document:
                document[key] = {**defaults, **(document[key] or {})}

        # flags win over file values
        document.update({key: value for key, value in flags.items() if value is not None})

        return Settings(**document)
    except yaml.YAMLError as ex:
        # yaml marks are zero based
        mark = getattr(ex, "problem_mark", None)
        raise ParseError(f"invalid yaml: {getattr(ex, 'problem', ex)}", mark.line + 1 if mark else None, mark.column + 1 if mark else None)
    except ValidationError as ex:
        # first failing field is enough to locate the problem
        error = ex.errors()[0]
        raise ParseError(f"invalid configuration {'.'.join(str(part) for part in error['loc'])}: {error['msg']}")


@click.group(name=config.APP_NAME, help=config.APP_TITLE)
@click.version_option(config.APP_VERSION, prog_name=config.APP_NAME)
@click.option("--config", "path", type=click.Path(exists=True, dir_okay=False), default=None, help="yaml configuration file")
@click.option("--verbose", is_flag=True, default=False, help="debug logging on stderr")
@click.pass_context
def application(context: click.Context, path: str | None, verbose: bool) -> None:
    # debug logging when requested
    if verbose:
        logger.setLevel(logging.DEBUG)

    try:
        # settings are shared with every command through the context object
        context.obj = configure(path)
    except FolmmpError as ex:
        abort(ex.code, str(ex))


def register(blueprint: click.Group) -> None:
    """
    register every command of a service group on the application

    args:
        blueprint (click.Group): service commands container
    """
    for name, command in sorted(blueprint.commands.items()):
        application.add_command(command, name)


# importing service modules
from folmmp.services.restree.routes import _restree
from folmmp.services.quotient.routes import _quotient
from folmmp.services.mmp.routes import _mmp

# register service command groups with application
register(_restree)
register(_quotient)
register(_mmp)
