"""Sparse multivariate polynomials in expanded monomial form."""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Sequence

import numpy as np


class Polynomial:
    """``sum_a c_a * x^a`` with exponent tuples ``a`` of length ``nvars``.

    Evaluation is vectorised over leading axes: ``p(X)`` with ``X`` of shape
    ``(..., nvars)`` returns an array of shape ``(...)``.
    """

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Mapping[Sequence[int], float], nvars: int):
        if nvars < 1:
            raise ValueError("a polynomial needs at least one variable")
        clean: dict[tuple[int, ...], float] = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {nvars} variables")
            coeff = float(coeff)
            if coeff != 0.0:
                clean[exps] = clean.get(exps, 0.0) + coeff
        self.terms = clean
        self.nvars = nvars

    @classmethod
    def constant(cls, c: float, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = 1
        return cls({tuple(exps): 1.0}, nvars)

    @classmethod
    def linear(cls, coeffs, const: float = 0.0) -> "Polynomial":
        coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
        nvars = coeffs.size
        terms = {(0,) * nvars: const}
        for i, c in enumerate(coeffs):
            terms[tuple(int(j == i) for j in range(nvars))] = c
        return cls(terms, nvars)

    @classmethod
    def quadratic(cls, A, b=None, c: float = 0.0) -> "Polynomial":
        """x^T A x + b.x + c."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        nvars = A.shape[0]
        p = cls.linear(np.zeros(nvars) if b is None else b, c)
        terms = dict(p.terms)
        for i in range(nvars):
            for j in range(nvars):
                exps = [0] * nvars
                exps[i] += 1
                exps[j] += 1
                key = tuple(exps)
                terms[key] = terms.get(key, 0.0) + A[i, j]
        return cls(terms, nvars)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def _check(self, other: "Polynomial"):
        if other.nvars != self.nvars:
            raise ValueError("polynomials over different variable counts")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other, self.nvars)
        self._check(other)
        terms = defaultdict(float, self.terms)
        for e, c in other.terms.items():
            terms[e] += c
        return Polynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial({e: c * other for e, c in self.terms.items()}, self.nvars)
        self._check(other)
        terms: defaultdict = defaultdict(float)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
        return Polynomial(terms, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1.0, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.nvars,):
            raise ValueError(f"expected trailing dimension {self.nvars}, got {x.shape}")
        out = np.zeros(x.shape[:-1])
        powers: dict[tuple[int, int], np.ndarray] = {}
        for exps, c in self.terms.items():
            term = np.full(x.shape[:-1], c)
            for i, e in enumerate(exps):
                if e:
                    if (i, e) not in powers:
                        powers[i, e] = x[..., i] ** e
                    term *= powers[i, e]
            out += term
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self.terms!r}, nvars={self.nvars})"
