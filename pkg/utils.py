"""
utility module containing multi-use functions and local helpers used throughout the project scope
this module provides colored terminal output, exact rational text conversion and
deterministic json / tsv emitters shared by every service
"""


# standard imports
import json
import logging
from typing import Any, Iterable

# pip install colorama
# cross-platform terminal colored inputs
from colorama import Fore, Style

# pip install sympy
# exact rational arithmetic
from sympy import Rational, Integer


# prints colored terminal output using colorama
def sprint(color: str, content: str) -> None:
    """
    print colored terminal text using colorama

    args:
        color (str): color to print the text in, must be a valid "colorama.Fore" color name
        content (str): actual text to print in color
    """
    print(f"{getattr(Fore, color.upper(), Fore.RESET)}{content}{Style.RESET_ALL}")


class ColorFormatter(logging.Formatter):
    """
    logging formatter coloring the level name with colorama, used for the stderr handler
    """
    COLORS = {
        "DEBUG": Fore.CYAN,
        "INFO": Fore.GREEN,
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "CRITICAL": Fore.MAGENTA,
    }

    def format(self, record: logging.LogRecord) -> str:
        # copy record so other handlers keep the plain level name
        record = logging.makeLogRecord(record.__dict__)
        record.levelname = f"{self.COLORS.get(record.levelname, Fore.RESET)}{record.levelname}{Style.RESET_ALL}"
        return super().format(record)


def rparse(text: str | int | Rational) -> Rational:
    """
    parse an exact rational from "p/q", integer or finite decimal text

    args:
        text (str | int | Rational): value to parse, decimals are converted exactly

    returns:
        Rational: the parsed value in lowest terms

    raises:
        ValueError: when the text is not an exact rational
    """
    # already exact values pass through
    if isinstance(text, (int, Rational)):
        return Rational(text)

    try:
        # sympy keeps "0.25" exact as 1/4 when given as a string
        value = Rational(str(text).strip())
    except (TypeError, ValueError, SyntaxError, ZeroDivisionError) as ex:
        raise ValueError(f"not an exact rational: {text!r}") from ex

    return value


def rstr(value: Any) -> str:
    """
    format an exact rational as "p/q" (or "p" for integers), other values with str()

    args:
        value (Any): rational, integer or any printable value

    returns:
        str: canonical text representation
    """
    if isinstance(value, (int, Integer)) and not isinstance(value, bool):
        return str(int(value))

    if isinstance(value, Rational):
        return f"{value.p}" if value.q == 1 else f"{value.p}/{value.q}"

    return str(value)


def jsonable(value: Any) -> Any:
    """
    recursively convert exact values into json friendly structures, rationals become "p/q" strings

    args:
        value (Any): nested structure of dicts, lists, tuples and scalars

    returns:
        Any: structure made of dicts, lists, strings, numbers, booleans and None
    """
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}

    if isinstance(value, (list, tuple, set, frozenset)):
        items = [jsonable(item) for item in value]
        return sorted(items, key=json.dumps) if isinstance(value, (set, frozenset)) else items

    if value is None or isinstance(value, (bool, str)):
        return value

    if isinstance(value, int):
        return value

    return rstr(value)


def jdumps(payload: Any) -> str:
    """
    deterministic json serialization (sorted keys, exact rationals as strings)

    args:
        payload (Any): structure to serialize

    returns:
        str: json text
    """
    return json.dumps(jsonable(payload), indent=2, sort_keys=True)


def tsv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    """
    render a tab separated table with a header line, cells formatted with rstr()

    args:
        header (Iterable[str]): column names
        rows (Iterable[Iterable[Any]]): table rows

    returns:
        str: table text without trailing newline
    """
    lines = ["\t".join(header)]
    lines.extend("\t".join(rstr(cell) for cell in row) for row in rows)
    return "\n".join(lines)
