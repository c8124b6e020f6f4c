import math

import numpy as np
import pytest

from crossed_z2.config import get_settings
from crossed_z2.crossed import crossed_product
from crossed_z2.ktheory import IntMatrix
from crossed_z2.models import build_circle, build_m2_demo
from crossed_z2.numkernel import TolerancePolicy


def rational_rank(matrix: IntMatrix) -> int:
    """Rank over the rationals, computed without the Smith normal form."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    return int(matrix.to_sympy().rank())


def gcd_of_entries(matrix: IntMatrix) -> int:
    """Greatest common divisor of all entries, 0 for the zero matrix."""
    return math.gcd(*(x for row in matrix.entries for x in row))


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def tol():
    return TolerancePolicy(abs_tol=1e-10, rel_tol=1e-8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def m2_demo():
    return build_m2_demo()


@pytest.fixture
def m2_crossed(m2_demo, tol):
    _, sigma = m2_demo
    return crossed_product(sigma, tol)


@pytest.fixture
def flip4(tol):
    return build_circle(4, "flip", tol)


@pytest.fixture
def conj4(tol):
    return build_circle(4, "conj", tol)
