import numpy as np
import pytest

from hhsimplex.convexfns import (CATALOG_NAMES, TestFunction, catalog, catalog_entry,
                                 midpoint_convexity_check, quadratic)
from hhsimplex.geometry import Simplex, random_simplex
from hhsimplex.polynomial import Polynomial
from hhsimplex.quadrature import EvaluationError


def test_catalog_shape_and_determinism():
    for n in (1, 2, 5):
        fns = catalog(n, 3)
        assert [f.name for f in fns] == list(CATALOG_NAMES)
        again = catalog(n, 3)
        x = np.random.default_rng(0).standard_normal((10, n))
        for f, g in zip(fns, again):
            np.testing.assert_array_equal(f(x), g(x))
    assert not np.allclose(catalog(2, 1)[0](np.ones(2)), catalog(2, 2)[0](np.ones(2)))


def test_catalog_metadata():
    fns = {f.name: f for f in catalog(3, 0)}
    assert fns["affine"].kind == "affine" and fns["affine"].polynomial.degree == 1
    assert fns["quadratic"].kind == "psd_quadratic" and fns["quadratic"].polynomial.degree == 2
    assert fns["quartic"].polynomial.degree == 4
    for name in ("max_affine", "norm", "log_sum_exp"):
        assert fns[name].polynomial is None and fns[name].is_convex
    assert not fns["neg_sq_norm"].is_convex


@pytest.mark.parametrize("n", [1, 2, 4])
def test_polynomial_forms_agree_with_eval(n):
    x = np.random.default_rng(n).standard_normal((1000, n)) * 2
    for f in catalog(n, 7):
        if f.polynomial is not None:
            np.testing.assert_allclose(f.polynomial(x), f(x), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_convex_entries_pass_midpoint_check(seed):
    for n in (1, 2, 3):
        unit = Simplex.standard(n)
        for f in catalog(n, seed):
            verdict = midpoint_convexity_check(f, unit, 10_000, seed)
            assert verdict.passed == f.is_convex, f.name


def test_midpoint_examples():
    sq = TestFunction.from_polynomial("x2", Polynomial({(2,): 1.0}, 1))
    assert midpoint_convexity_check(sq, Simplex([0.0, 1.0]), 10_000, 0)
    neg = TestFunction.from_polynomial("-x2", Polynomial({(2,): -1.0}, 1), is_convex=False)
    verdict = midpoint_convexity_check(neg, Simplex([-1.0, 1.0]), 10_000, 0)
    assert not verdict.passed
    x, y = verdict.witness
    assert neg((x + y) / 2) > (neg(x) + neg(y)) / 2


def test_midpoint_affine_zero_slack(rng):
    f = catalog(3, 0)[0]
    verdict = midpoint_convexity_check(f, random_simplex(3, rng), 10_000, rng)
    assert verdict.passed and abs(verdict.max_excess) <= verdict.tolerance


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_midpoint_non_finite():
    f = TestFunction("log", lambda x: np.log(x[..., 0]))
    with pytest.raises(EvaluationError):
        midpoint_convexity_check(f, Simplex([-1.0, 1.0]), 100, 0)


def test_custom_scalar_function_is_vectorised():
    f = TestFunction.custom("abs", lambda p: abs(p[0] - 0.3))
    assert f(np.array([1.0])) == pytest.approx(0.7)
    np.testing.assert_allclose(f(np.array([[0.0], [1.0]])), [0.3, 0.7])


def test_indefinite_quadratic_not_declared_convex():
    f = quadratic(np.diag([1.0, -1.0]))
    assert not f.is_convex and f.kind == "custom"


def test_catalog_entry_lookup():
    assert catalog_entry("norm", 2).name == "norm"
    with pytest.raises(KeyError):
        catalog_entry("cubic", 2)
