import itertools
import math

import numpy as np
import pytest

from hhsimplex.geometry import Simplex


@pytest.fixture
def unit_triangle():
    return Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@pytest.fixture
def unit_interval():
    return Simplex([0.0, 1.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20141216)


def grundmann_moller_mean(f, vertices, s):
    """Mean of f over the simplex with the Grundmann-Moller rule of index s.

    Exact for polynomials of degree <= 2s + 1.  Kept independent of the
    barycentric expansion in hhsimplex.quadrature.
    """
    vertices = np.asarray(vertices, dtype=float)
    n = vertices.shape[0] - 1
    d = 2 * s + 1
    total = weight_sum = 0.0
    for i in range(s + 1):
        w = (-1) ** i * 2.0 ** (-2 * s) * (d + n - 2 * i) ** d / math.factorial(i) / math.factorial(d + n - i)
        denom = d + n - 2 * i
        for beta in itertools.product(range(s - i + 1), repeat=n + 1):
            if sum(beta) != s - i:
                continue
            lam = (2 * np.array(beta) + 1) / denom
            total += w * float(f(lam @ vertices))
            weight_sum += w
    return total / weight_sum


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    verdict = "PASS" if passed else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number}: {verdict}  {title}" + (f"  [{detail}]" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
