import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from trigsos.arith import Gaussian
from trigsos.trigpoly import ComplexPoly, TrigPoly, mul_star

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def record_acceptance(number, title, ok, detail=""):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


EXAMPLE = TrigPoly(5, [Gaussian(1, 1)])  # 5 + (1+i) z^-1 + (1-i) z


def random_positive(rng: random.Random, max_deg=6, max_height=4, cs=None):
    """f = s s* + c with s in Z[i][z] of degree <= max_deg and c > 0."""
    deg = rng.randint(0, max_deg)
    coeffs = [Gaussian(rng.randint(-max_height, max_height), rng.randint(-max_height, max_height)) for _ in range(deg + 1)]
    if not coeffs[-1]:
        coeffs[-1] = Gaussian(1)
    c = rng.choice(cs or [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), 1, 2, 4])
    return mul_star(ComplexPoly(coeffs)) + c
