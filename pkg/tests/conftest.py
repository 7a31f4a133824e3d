import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from visserlab.poly_core import Polynomial
from visserlab.zero_location import GeneratorSpec, generate_zero_free

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

P_GRID = (0.0, 0.25, 0.5, 1.0, 2.0, 3.0, math.inf)
FINITE_P = P_GRID[:-1]


def poly(*coeffs) -> Polynomial:
    """Ascending coefficients a_0, a_1, ..."""
    return Polynomial(tuple(complex(c) for c in coeffs))


def dense_mean(P: Polynomial, p: float, nodes: int = 1 << 20) -> float:
    """Brute-force L_p mean from direct evaluation on a dense grid."""
    z = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    v = np.abs(np.polyval(np.array(P.coeffs)[::-1], z))
    if p == 0:
        return float(np.exp(np.mean(np.log(v))))
    if math.isinf(p):
        return float(v.max())
    return float(np.mean(v**p) ** (1 / p))


finite = st.floats(-4, 4, allow_nan=False, allow_infinity=False)
coefficient = st.builds(complex, finite, finite)


@st.composite
def polynomials(draw, min_degree=1, max_degree=8):
    n = draw(st.integers(min_degree, max_degree))
    coeffs = draw(st.lists(coefficient, min_size=n, max_size=n))
    lead = draw(coefficient.filter(lambda c: abs(c) > 0.1))
    return Polynomial(tuple(coeffs) + (lead,))


@st.composite
def zero_free_polynomials(draw, rho=1.0, min_degree=1, max_degree=8, outer=4.0):
    n = draw(st.integers(min_degree, max_degree))
    seed = draw(st.integers(0, 2**32 - 1))
    P, _ = generate_zero_free(GeneratorSpec(n, rho, outer * rho, seed))
    return P


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log(pytestconfig):
    return pytestconfig.acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
