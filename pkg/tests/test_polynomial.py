import numpy as np
import pytest

from hhsimplex.polynomial import Polynomial


def test_arithmetic_and_eval():
    x = Polynomial.variable(0, 2)
    y = Polynomial.variable(1, 2)
    p = (x + 2 * y) ** 2 - 3
    assert p.terms == {(2, 0): 1.0, (1, 1): 4.0, (0, 2): 4.0, (0, 0): -3.0}
    assert p.degree == 2
    assert p(np.array([1.0, 2.0])) == pytest.approx(22.0)
    np.testing.assert_allclose(p(np.array([[1.0, 2.0], [0.0, 0.0]])), [22.0, -3.0])


def test_quadratic_constructor():
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    p = Polynomial.quadratic(A, [1.0, -1.0], 0.5)
    pts = np.random.default_rng(0).standard_normal((20, 2))
    expected = np.einsum("ni,ij,nj->n", pts, A, pts) + pts @ [1.0, -1.0] + 0.5
    np.testing.assert_allclose(p(pts), expected, rtol=1e-13)


def test_zero_terms_dropped_and_validation():
    assert Polynomial({(1,): 0.0}, 1).terms == {}
    with pytest.raises(ValueError):
        Polynomial({(1, 2): 1.0}, 1)
    with pytest.raises(ValueError):
        Polynomial.variable(0, 2) + Polynomial.variable(0, 3)
    with pytest.raises(ValueError):
        Polynomial.variable(0, 2)(np.ones(3))
