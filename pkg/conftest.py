"""
shared fixtures of the test suite: germ and surface builders, and a command line runner
"""


# standard imports
import os
import sys

# repository root holds config.py and utils.py next to the package
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# pip install pytest
# testing framework
import pytest

# pip install click
# command line interface composition toolkit
from click.testing import CliRunner

from folmmp.services.germ.utils import VectorFieldGerm, _parse_germ
from folmmp.services.surface.utils import FoliatedSurfaceModel, _parse_surface


@pytest.fixture
def germ():
    # saturated germ from "dx: ..., dy: ..." text
    def build(text: str) -> VectorFieldGerm:
        return _parse_germ(text).germ
    return build


@pytest.fixture
def surface():
    # model from surface statements, the header is added here
    def build(*lines: str) -> FoliatedSurfaceModel:
        return _parse_surface("\n".join(("folmmp-surface v1",) + lines) + "\n")
    return build


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
