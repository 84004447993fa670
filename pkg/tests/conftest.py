"""Shared fixtures"""

import json
import random

import pytest
from typer.testing import CliRunner

from src.algebra.exact_linalg import RatMatrix
from src.algebra.poly_toolkit import IntPoly, f_poly, h_poly
from src.utils.logger import setup_logger


@pytest.fixture(autouse=True)
def quiet_logger():
    setup_logger("WARNING")
    yield


@pytest.fixture
def rng():
    return random.Random(20240517)


@pytest.fixture
def h3() -> IntPoly:
    return h_poly(3)


@pytest.fixture
def h4() -> IntPoly:
    return h_poly(4)


@pytest.fixture
def f67() -> IntPoly:
    return f_poly(6, 7)


@pytest.fixture
def heisenberg() -> RatMatrix:
    return RatMatrix.from_rows([[0, 0], [1, 0]])


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


def last_json(output: str):
    """The JSON document printed last; log lines may precede it"""
    lines = [line for line in output.strip().splitlines() if line.strip()]
    return json.loads(lines[-1])


def matrix_arg(M: RatMatrix) -> str:
    return json.dumps(M.to_json())
