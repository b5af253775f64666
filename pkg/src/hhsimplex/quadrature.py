"""Mean values (1/Vol) * integral of f over embedded simplices.

Three routes: evaluation at the single vertex of a 0-simplex, an exact rule
for polynomials, and Monte Carlo with a z * standard-error bound.

The exact rule substitutes x = sum_i lam_i v_i into every monomial and uses
the Dirichlet moments of the uniform distribution on a k-simplex::

    mean(lam^b) = k! * prod(b_i!) / (k + |b|)!
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Callable, Literal, Optional

import numpy as np

from .geometry import as_simplex
from .polynomial import Polynomial

DEGREE_CAP = 8
METHODS = ("exact_polynomial", "monte_carlo", "point_evaluation")

_CHUNK = 1 << 16
# relative rounding allowance for the exact rule, applied to a bound on the
# magnitude of every intermediate term
_EXACT_ROUNDING = 1e-13


class EvaluationError(ArithmeticError):
    """A function returned a non-finite value; ``point`` is where."""

    def __init__(self, point):
        self.point = np.asarray(point, dtype=float)
        super().__init__(f"non-finite function value at {self.point.tolist()}")


class DegreeCapError(ValueError):
    pass


@dataclass(frozen=True)
class MeanValueEstimate:
    value: float
    method: str
    error_bound: float = 0.0
    sample_count: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuadratureConfig:
    method: Literal["auto", "exact", "mc"] = "auto"
    mc_samples: int = 100_000
    z: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if self.method not in ("auto", "exact", "mc"):
            raise ValueError(f"method must be auto, exact or mc, not {self.method!r}")
        if self.mc_samples < 2:
            raise ValueError("mc_samples must be >= 2")
        if not self.z > 0:
            raise ValueError("z must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_uniform_batch(s, count: int, rng) -> np.ndarray:
    """*count* uniform points on *s* as a ``(count, n)`` array.

    Barycentric weights are normalised standard exponentials, which makes them
    Dirichlet(1, ..., 1) distributed.
    """
    s = as_simplex(s)
    rng = as_rng(rng)
    if s.dim == 0:
        return np.repeat(s.vertices, count, axis=0)
    w = rng.standard_exponential((count, s.dim + 1))
    w /= w.sum(axis=1, keepdims=True)
    return w @ s.vertices


def sample_uniform(s, rng) -> np.ndarray:
    return sample_uniform_batch(s, 1, rng)[0]


def _evaluate(f: Callable, points: np.ndarray) -> np.ndarray:
    vals = np.atleast_1d(np.asarray(f(points), dtype=float))
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise EvaluationError(points[np.argmax(bad)])
    return vals


def _mc_values(f: Callable, s, count: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(count)
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        out[start:stop] = _evaluate(f, sample_uniform_batch(s, stop - start, rng))
    return out


def mc_mean(f: Callable, s, n_samples: int, rng=None, z: float = 3.0,
            workers: int = 1) -> MeanValueEstimate:
    """Monte Carlo mean of *f* over *s* with ``error_bound = z * sd / sqrt(n)``.

    With ``workers > 1`` the samples are split into contiguous shares drawn
    from independent child streams of *rng*; the result is then determined by
    (seed, n_samples, workers).
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    s = as_simplex(s)
    rng = as_rng(rng)
    if workers == 1:
        values = _mc_values(f, s, n_samples, rng)
    else:
        shares = np.diff(np.linspace(0, n_samples, workers + 1).astype(int))
        children = rng.spawn(workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _mc_values(f, s, *a), zip(shares, children)))
        values = np.concatenate(parts)
    if np.all(values == values[0]):
        return MeanValueEstimate(float(values[0]), "monte_carlo", 0.0, n_samples)
    sd = float(np.std(values, ddof=1))
    return MeanValueEstimate(float(np.mean(values)), "monte_carlo",
                             z * sd / math.sqrt(n_samples), n_samples)


@lru_cache(maxsize=64)
def _monomial_basis(nvars: int, degree: int):
    """Exponent tuples of total degree <= *degree*, graded, plus shift maps.

    ``shifts[i][j]`` is the index of ``basis[j] + e_i`` for every ``j`` in the
    prefix of degree < *degree*.
    """
    basis = [e for d in range(degree + 1)
             for e in sorted(_compositions(d, nvars), reverse=True)]
    index = {e: j for j, e in enumerate(basis)}
    lower = sum(1 for e in basis if sum(e) < degree)
    shifts = []
    for i in range(nvars):
        unit = tuple(int(t == i) for t in range(nvars))
        shifts.append(np.array([index[tuple(a + b for a, b in zip(basis[j], unit))]
                                for j in range(lower)], dtype=np.intp))
    k = nvars - 1
    weights = np.array([math.factorial(k) * math.prod(math.factorial(b) for b in e)
                        / math.factorial(k + sum(e)) for e in basis])
    return basis, shifts, lower, weights


def _compositions(total: int, parts: int):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        bounds = (-1,) + cut + (total + parts - 1,)
        yield tuple(bounds[i + 1] - bounds[i] - 1 for i in range(parts))


def dirichlet_moment(exponents) -> float:
    """Mean of prod(lam_i ** b_i) over a k-simplex, k = len(exponents) - 1."""
    k = len(exponents) - 1
    return (math.factorial(k) * math.prod(math.factorial(b) for b in exponents)
            / math.factorial(k + sum(exponents)))


def _polynomial_of(f) -> Polynomial:
    poly = f if isinstance(f, Polynomial) else getattr(f, "polynomial", None)
    if poly is None:
        raise TypeError("exact quadrature needs a polynomial")
    return poly


def exact_mean_poly(f, s) -> MeanValueEstimate:
    """Exact mean of a polynomial over *s* by expansion in barycentric coordinates.

    *f* is a :class:`Polynomial` or anything with a ``polynomial`` attribute.
    The returned ``error_bound`` is a floating-point rounding allowance only.
    """
    poly = _polynomial_of(f)
    s = as_simplex(s)
    if poly.nvars != s.ambient_dim:
        raise ValueError(f"polynomial in {poly.nvars} variables, simplex in R^{s.ambient_dim}")
    degree = poly.degree
    if degree > DEGREE_CAP:
        raise DegreeCapError(f"degree {degree} exceeds the cap of {DEGREE_CAP}")
    nlam = s.dim + 1
    basis, shifts, lower, weights = _monomial_basis(nlam, degree)
    V = s.vertices
    size = len(basis)

    one = np.zeros(size)
    one[0] = 1.0
    memo: dict[tuple[int, ...], np.ndarray] = {(0,) * poly.nvars: one}

    def expand(alpha):
        # vector of alpha's lam-coefficients, built as parent * x_d
        if alpha in memo:
            return memo[alpha]
        d = max(i for i, e in enumerate(alpha) if e)
        parent = expand(alpha[:d] + (alpha[d] - 1,) + alpha[d + 1:])
        out = np.zeros(size)
        head = parent[:lower]
        for i in range(nlam):
            out[shifts[i]] += V[i, d] * head
        memo[alpha] = out
        return out

    total = np.zeros(size)
    for alpha, c in poly.terms.items():
        total += c * expand(alpha)
    value = math.fsum(total * weights)

    vmax = np.abs(V).max(axis=0)
    magnitude = sum(abs(c) * math.prod(float(vmax[d]) ** e for d, e in enumerate(alpha))
                    for alpha, c in poly.terms.items())
    bound = _EXACT_ROUNDING * (degree + 1) * magnitude
    return MeanValueEstimate(value, "exact_polynomial", bound, 0)


def point_value(f: Callable, point) -> MeanValueEstimate:
    point = np.asarray(point, dtype=float)
    val = float(np.asarray(f(point), dtype=float))
    if not math.isfinite(val):
        raise EvaluationError(point)
    return MeanValueEstimate(val, "point_evaluation", 0.0, 0)


def mean_value(f: Callable, s, cfg: Optional[QuadratureConfig] = None, rng=None) -> MeanValueEstimate:
    """Dispatch: point evaluation for 0-simplices, exact for polynomials, else MC.

    ``cfg.method == "exact"`` insists on the exact rule and ``"mc"`` forces
    Monte Carlo on every simplex of positive dimension.
    """
    cfg = cfg or QuadratureConfig()
    s = as_simplex(s)
    if s.dim == 0:
        return point_value(f, s.vertices[0])
    poly = f if isinstance(f, Polynomial) else getattr(f, "polynomial", None)
    if cfg.method == "exact" or (cfg.method == "auto" and poly is not None):
        return exact_mean_poly(f, s)
    return mc_mean(f, s, cfg.mc_samples, rng, z=cfg.z, workers=cfg.workers)
