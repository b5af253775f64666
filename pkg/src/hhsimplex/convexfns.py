"""Test functions with convexity metadata and a randomized midpoint falsifier."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import logsumexp

from .geometry import as_simplex
from .polynomial import Polynomial
from .quadrature import EvaluationError, as_rng, sample_uniform_batch

KINDS = ("affine", "psd_quadratic", "max_affine", "norm_p", "log_sum_exp", "custom")


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A real function on R^n, vectorised over leading axes.

    ``polynomial`` is set exactly when the function is a polynomial; it is
    what the exact quadrature path consumes.
    """

    __test__ = False  # not a pytest class

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    is_convex: bool = True
    polynomial: Optional[Polynomial] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.func(x), dtype=float)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_polynomial(cls, name: str, poly: Polynomial, kind: str = "custom",
                        is_convex: bool = True) -> "TestFunction":
        return cls(name, poly, kind, is_convex, poly)

    @classmethod
    def custom(cls, name: str, func: Callable, is_convex: bool = True,
               vectorized: bool = False, polynomial: Optional[Polynomial] = None) -> "TestFunction":
        """Wrap a user function; scalar functions of one point are vectorised here."""
        if not vectorized:
            scalar = func

            def func(x):
                x = np.asarray(x, dtype=float)
                if x.ndim == 1:
                    return scalar(x)
                flat = x.reshape(-1, x.shape[-1])
                return np.array([scalar(p) for p in flat], dtype=float).reshape(x.shape[:-1])

        return cls(name, func, "custom", is_convex, polynomial)


def affine(c, d: float = 0.0, name: str = "affine") -> TestFunction:
    return TestFunction.from_polynomial(name, Polynomial.linear(c, d), "affine")


def quadratic(A, b=None, c: float = 0.0, name: str = "quadratic") -> TestFunction:
    """x^T A x + b.x + c; declared convex only if A is positive semidefinite."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    sym = (A + A.T) / 2
    psd = bool(np.linalg.eigvalsh(sym).min() >= -1e-12 * max(1.0, np.abs(sym).max()))
    poly = Polynomial.quadratic(A, b, c)
    return TestFunction.from_polynomial(name, poly, "psd_quadratic" if psd else "custom", psd)


def sq_norm(n: int) -> TestFunction:
    """|x|^2, i.e. x^2 on the line and x^2 + y^2 in the plane."""
    return quadratic(np.eye(n), name="sq_norm")


def max_affine(A, c, name: str = "max_affine") -> TestFunction:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float)
    return TestFunction(name, lambda x: np.max(x @ A.T + c, axis=-1), "max_affine")


def euclidean_norm(center, name: str = "norm") -> TestFunction:
    center = np.asarray(center, dtype=float)
    return TestFunction(name, lambda x: np.linalg.norm(x - center, axis=-1), "norm_p")


def log_sum_exp(A, c, name: str = "log_sum_exp") -> TestFunction:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float)
    return TestFunction(name, lambda x: logsumexp(x @ A.T + c, axis=-1), "log_sum_exp")


def power_sum(A, c, power: int = 4, name: str = "quartic") -> TestFunction:
    """sum_j (a_j.x + c_j)^power, convex for even *power*."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float)
    poly = sum((Polynomial.linear(a, cj) ** power for a, cj in zip(A, c)),
               Polynomial.constant(0.0, A.shape[1]))
    return TestFunction(name, lambda x: np.sum((x @ A.T + c) ** power, axis=-1),
                        "custom", power % 2 == 0, poly)


def neg_sq_norm(n: int) -> TestFunction:
    """-|x|^2, the strictly concave control."""
    return TestFunction.from_polynomial("neg_sq_norm", -Polynomial.quadratic(np.eye(n)),
                                        "custom", is_convex=False)


CATALOG_NAMES = ("affine", "sq_norm", "quadratic", "quartic", "max_affine", "norm",
                 "log_sum_exp", "neg_sq_norm")
NONCONVEX_NAMES = ("neg_sq_norm",)


def catalog(n: int, seed: int = 0) -> list[TestFunction]:
    """Deterministic catalog of test functions on R^n, in :data:`CATALOG_NAMES` order.

    The last entry is a non-convex control.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng([int(seed), n])
    M = rng.standard_normal((n, n))
    fns = [
        affine(rng.standard_normal(n), float(rng.standard_normal())),
        sq_norm(n),
        quadratic(M.T @ M, rng.standard_normal(n), float(rng.standard_normal())),
        power_sum(rng.standard_normal((2, n)) / np.sqrt(n), rng.standard_normal(2) / 2),
    ]
    m = int(rng.integers(3, 7))
    fns.append(max_affine(rng.standard_normal((m, n)), rng.standard_normal(m)))
    fns.append(euclidean_norm(0.5 * rng.standard_normal(n)))
    m = int(rng.integers(3, 6))
    fns.append(log_sum_exp(rng.standard_normal((m, n)), rng.standard_normal(m)))
    fns.append(neg_sq_norm(n))
    return fns


def catalog_entry(name: str, n: int, seed: int = 0) -> TestFunction:
    for f in catalog(n, seed):
        if f.name == name:
            return f
    raise KeyError(f"no catalog function named {name!r}; choose from {', '.join(CATALOG_NAMES)}")


@dataclass(frozen=True)
class ConvexityVerdict:
    passed: bool
    n_pairs: int
    tolerance: float
    max_excess: float
    witness: Optional[tuple[np.ndarray, np.ndarray]] = None

    def __bool__(self) -> bool:
        return self.passed


def midpoint_convexity_check(f: Callable, domain, n_pairs: int = 10_000, rng=None) -> ConvexityVerdict:
    """Look for x, y in *domain* with f((x + y) / 2) > (f(x) + f(y)) / 2 + tol.

    ``tol = 1e-10 * (1 + max |f| observed)``.  Passing is evidence, not proof.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    domain = as_simplex(domain)
    rng = as_rng(rng)
    x = sample_uniform_batch(domain, n_pairs, rng)
    y = sample_uniform_batch(domain, n_pairs, rng)
    mid = (x + y) / 2
    fx, fy, fm = (np.atleast_1d(np.asarray(f(p), dtype=float)) for p in (x, y, mid))
    for vals, pts in ((fx, x), (fy, y), (fm, mid)):
        bad = ~np.isfinite(vals)
        if np.any(bad):
            raise EvaluationError(pts[np.argmax(bad)])
    tol = 1e-10 * (1.0 + max(np.abs(fx).max(), np.abs(fy).max(), np.abs(fm).max()))
    excess = fm - (fx + fy) / 2
    worst = int(np.argmax(excess))
    if excess[worst] > tol:
        return ConvexityVerdict(False, n_pairs, tol, float(excess[worst]), (x[worst], y[worst]))
    return ConvexityVerdict(True, n_pairs, tol, float(excess[worst]))
