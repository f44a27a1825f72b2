import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from iqho.polygauss import PolyGaussFn

settings.register_profile(
    "iqho", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("iqho")

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
thetas = st.floats(-1.4, 1.4, allow_nan=False)


@st.composite
def polygauss(draw, max_degree=4, re_alpha=(0.3, 3.0)):
    """Decaying polynomial-times-Gaussian with a nonzero top coefficient."""
    d = draw(st.integers(0, max_degree))
    coeffs = [draw(cplx) for _ in range(d)] + [complex(draw(st.floats(0.5, 2.0)),
                                                       draw(finite))]
    alpha = complex(draw(st.floats(*re_alpha)), draw(finite))
    beta = complex(draw(st.floats(-1.0, 1.0)), draw(finite))
    gamma = complex(draw(st.floats(-0.5, 0.5)), draw(finite))
    return PolyGaussFn(coeffs, alpha, beta, gamma)


def random_compatible_pair(rng, max_degree=6):
    """f, g with Re(conj(alpha_f) + alpha_g) >= 0.4, drawn from ``rng``."""
    def one(re_lo):
        d = int(rng.integers(0, max_degree + 1))
        c = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        alpha = complex(rng.uniform(re_lo, 2.5), rng.uniform(-2, 2))
        beta = complex(rng.uniform(-1, 1), rng.uniform(-1.5, 1.5))
        gamma = complex(rng.uniform(-0.3, 0.3), rng.uniform(-math.pi, math.pi))
        return PolyGaussFn(c, alpha, beta, gamma)
    return one(0.2), one(0.2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
