"""Numerical checks of the refined left-hand Hermite-Hadamard chain.

Every check compares two mean-value estimates ``a <= b`` and passes iff::

    a.value <= b.value + a.error_bound + b.error_bound

Means over the family members Delta^[K] of one (function, simplex) pair are
cached in a :class:`FamilyMeans` table so that the theorem sweep and the
corollaries share estimates.  Monte Carlo estimates draw from per-subset
streams derived from one base seed.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import (SubsetIndex, barycenter, build_delta_k, check_nondegenerate,
                       proper_subsets)
from .quadrature import MeanValueEstimate, QuadratureConfig, mean_value, point_value
from .subdivision import barycenter_average, dr_level

#: Beyond this dimension the theorem sweep samples subset pairs.
EXHAUSTIVE_MAX_N = 6
SAMPLED_PAIRS = 256
DR_TOL = 1e-12


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Comparison:
    """Outcome of checking ``left <= right``."""

    label: str
    left_label: str
    right_label: str
    left: MeanValueEstimate
    right: MeanValueEstimate
    slack: float
    tolerance: float
    passed: bool

    @property
    def violation(self) -> float:
        return max(0.0, -self.slack)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "left": self.left_label,
            "right": self.right_label,
            "left_estimate": self.left.to_dict(),
            "right_estimate": self.right.to_dict(),
            "slack": self.slack,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.passed else "fail",
        }


def compare(left: MeanValueEstimate, right: MeanValueEstimate, label: str = "",
            left_label: str = "left", right_label: str = "right") -> Comparison:
    tol = left.error_bound + right.error_bound
    return Comparison(label, left_label, right_label, left, right,
                      right.value - left.value, tol, left.value <= right.value + tol)


def _stream_id(f) -> int:
    return zlib.crc32(str(getattr(f, "name", "f")).encode())


def _method_config(cfg: QuadratureConfig) -> dict:
    return asdict(cfg)


class FamilyMeans:
    """Lazily computed means of *f* over every Delta^[K] of *base*."""

    def __init__(self, f: Callable, base, cfg: Optional[QuadratureConfig] = None, seed: int = 0):
        self.f = f
        self.base = check_nondegenerate(base)
        self.cfg = cfg or QuadratureConfig()
        self.seed = int(seed)
        self.n = self.base.dim
        self._cache: dict[tuple[int, ...], MeanValueEstimate] = {}

    def subset(self, K) -> SubsetIndex:
        return SubsetIndex.of(K, self.n)

    def __getitem__(self, K) -> MeanValueEstimate:
        K = self.subset(K)
        if K.members not in self._cache:
            rng = np.random.default_rng([self.seed, _stream_id(self.f), K.bitmask])
            self._cache[K.members] = mean_value(self.f, build_delta_k(self.base, K), self.cfg, rng)
        return self._cache[K.members]

    def full(self) -> MeanValueEstimate:
        return self[()]


def _means(f, base, cfg, seed, means: Optional[FamilyMeans]) -> FamilyMeans:
    if means is not None:
        return means
    return FamilyMeans(f, base, cfg, seed)


@dataclass(frozen=True)
class HHBounds:
    left: float
    mid: MeanValueEstimate
    right: float
    comparisons: tuple[Comparison, Comparison]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    def to_dict(self) -> dict:
        return {"left": self.left, "mid": self.mid.to_dict(), "right": self.right,
                "comparisons": [c.to_dict() for c in self.comparisons]}


def hh_bounds(f: Callable, s, cfg: Optional[QuadratureConfig] = None, seed: int = 0,
              means: Optional[FamilyMeans] = None) -> HHBounds:
    """f(barycenter) <= mean of f over s <= mean of f at the vertices."""
    s = check_nondegenerate(s)
    table = _means(f, s, cfg, seed, means)
    left = point_value(f, barycenter(s))
    mid = table.full()
    vertex_values = np.atleast_1d(np.asarray(f(s.vertices), dtype=float))
    right = MeanValueEstimate(math.fsum(vertex_values) / len(vertex_values), "point_evaluation")
    comps = (compare(left, mid, "hh left", "f(b)", "mean(Delta)"),
             compare(mid, right, "hh right", "mean(Delta)", "vertex mean"))
    return HHBounds(left.value, mid, right.value, comps)


def theorem_main_check(f: Callable, base, K, L, cfg: Optional[QuadratureConfig] = None,
                       seed: int = 0, means: Optional[FamilyMeans] = None) -> Comparison:
    """mean over Delta^[L] <= mean over Delta^[K] for K a subset of L, L proper."""
    table = _means(f, base, cfg, seed, means)
    K, L = table.subset(K), table.subset(L)
    if not K.issubset(L):
        raise PreconditionError(f"K={K} is not a subset of L={L}")
    if not L.is_proper():
        raise PreconditionError("L must be a proper subset of N")
    return compare(table[L], table[K], f"theorem K={K} L={L}", f"mean[{L}]", f"mean[{K}]")


def subset_pairs(n: int, rng=None, sample_size: int = SAMPLED_PAIRS) -> list[tuple[SubsetIndex, SubsetIndex]]:
    """Pairs K strictly inside L, L proper; exhaustive for n <= EXHAUSTIVE_MAX_N."""
    if n <= EXHAUSTIVE_MAX_N:
        pairs = []
        for L in proper_subsets(n):
            for c in range(L.card):
                for K in itertools.combinations(L.members, c):
                    pairs.append((SubsetIndex(K, n), L))
        return pairs
    rng = np.random.default_rng(rng)
    pairs = []
    for _ in range(sample_size):
        size = int(rng.integers(1, n + 1))
        L = np.sort(rng.choice(n + 1, size, replace=False))
        K = L[rng.random(size) < 0.5][: size - 1]
        pairs.append((SubsetIndex(tuple(K), n), SubsetIndex(tuple(L), n)))
    return pairs


@dataclass(frozen=True)
class ChainReport:
    function_id: str
    simplex_digest: str
    dimension: int
    entries: list[tuple[SubsetIndex, MeanValueEstimate]]
    comparisons: list[Comparison]
    seed: int
    method_config: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.comparisons)

    def to_dict(self) -> dict:
        return {
            "function_id": self.function_id,
            "simplex_digest": self.simplex_digest,
            "dimension": self.dimension,
            "entries": [{"K": list(K.members), "estimate": e.to_dict()} for K, e in self.entries],
            "comparisons": [c.to_dict() for c in self.comparisons],
            "seed": self.seed,
            "method_config": self.method_config,
        }


def first_chain(n: int) -> list[SubsetIndex]:
    """The lexicographically first maximal chain {} < {0} < {0,1} < ... ."""
    return [SubsetIndex(tuple(range(i)), n) for i in range(n + 1)]


def corollary_chain(f: Callable, base, chain: Sequence, cfg: Optional[QuadratureConfig] = None,
                    seed: int = 0, means: Optional[FamilyMeans] = None) -> ChainReport:
    """Means along K_0 < K_1 < ... with |K_i| = i, each checked against its predecessor."""
    table = _means(f, base, cfg, seed, means)
    chain = [table.subset(K) for K in chain]
    if not chain or len(chain) > table.n + 1:
        raise PreconditionError("chain must hold between 1 and n + 1 subsets")
    for i, K in enumerate(chain):
        if K.card != i:
            raise PreconditionError(f"chain entry {i} has cardinality {K.card}")
        if i and not chain[i - 1].issubset(K):
            raise PreconditionError(f"chain entry {i - 1} is not contained in entry {i}")
    entries = [(K, table[K]) for K in chain]
    comps = [compare(entries[i + 1][1], entries[i][1], f"chain {entries[i + 1][0]} <= {entries[i][0]}",
                     f"mean[{entries[i + 1][0]}]", f"mean[{entries[i][0]}]")
             for i in range(len(entries) - 1)]
    return ChainReport(str(getattr(f, "name", "f")), table.base.digest(), table.n, entries, comps,
                       table.seed, _method_config(table.cfg))


@dataclass(frozen=True)
class SubsetAverage:
    """A_k: the average of the means over all Delta^[K] with |K| = k."""

    k: int
    per_subset: list[tuple[SubsetIndex, MeanValueEstimate]]
    estimate: MeanValueEstimate

    @property
    def value(self) -> float:
        return self.estimate.value

    def to_dict(self) -> dict:
        return {"k": self.k, "value": self.estimate.value, "error_bound": self.estimate.error_bound,
                "per_subset": [{"K": list(K.members), "value": e.value, "error_bound": e.error_bound}
                               for K, e in self.per_subset]}


def subset_average(table: FamilyMeans, k: int) -> SubsetAverage:
    if not 0 <= k <= table.n:
        raise PreconditionError(f"k={k} must lie in 0..{table.n}")
    per = [(K, table[K]) for K in proper_subsets(table.n, k)]
    methods = {e.method for _, e in per}
    method = next(m for m in ("monte_carlo", "exact_polynomial", "point_evaluation") if m in methods)
    count = len(per)
    est = MeanValueEstimate(math.fsum(e.value for _, e in per) / count, method,
                            math.fsum(e.error_bound for _, e in per) / count,
                            sum(e.sample_count for _, e in per))
    return SubsetAverage(k, per, est)


@dataclass(frozen=True)
class AverageComparison:
    lower: SubsetAverage
    upper: SubsetAverage
    comparison: Comparison

    @property
    def passed(self) -> bool:
        return self.comparison.passed

    def to_dict(self) -> dict:
        return {"lower": self.lower.to_dict(), "upper": self.upper.to_dict(),
                "comparison": self.comparison.to_dict()}


def corollary_avg_k(f: Callable, base, k: int, cfg: Optional[QuadratureConfig] = None,
                    seed: int = 0, means: Optional[FamilyMeans] = None) -> AverageComparison:
    """A_k <= mean over the whole simplex."""
    table = _means(f, base, cfg, seed, means)
    avg = subset_average(table, k)
    full = subset_average(table, 0)
    return AverageComparison(avg, full, compare(avg.estimate, full.estimate, f"average A_{k} <= mean(Delta)",
                                                f"A_{k}", "mean(Delta)"))


def corollary_avg_monotone(f: Callable, base, k: int, l: int, cfg: Optional[QuadratureConfig] = None,
                           seed: int = 0, means: Optional[FamilyMeans] = None) -> AverageComparison:
    """A_l <= A_k for k < l."""
    if not k < l:
        raise PreconditionError(f"need k < l, got k={k}, l={l}")
    table = _means(f, base, cfg, seed, means)
    a_k, a_l = subset_average(table, k), subset_average(table, l)
    return AverageComparison(a_l, a_k, compare(a_l.estimate, a_k.estimate, f"average A_{l} <= A_{k}",
                                               f"A_{l}", f"A_{k}"))


@dataclass(frozen=True)
class DRRow:
    p: int
    count: int
    average: float
    nondecreasing: bool
    below_mean: bool


@dataclass(frozen=True)
class DRSeries:
    function_id: str
    rows: list[DRRow]
    reference: MeanValueEstimate
    final_gap: float

    @property
    def passed(self) -> bool:
        return all(r.nondecreasing and r.below_mean for r in self.rows)

    def to_dict(self) -> dict:
        return {"function_id": self.function_id, "rows": [asdict(r) for r in self.rows],
                "reference": self.reference.to_dict(), "final_gap": self.final_gap}


def _dr_slack(a: float, b: float) -> float:
    return DR_TOL * max(1.0, abs(a), abs(b))


def dr_convergence_report(f: Callable, root, p_max: int, cfg: Optional[QuadratureConfig] = None,
                          seed: int = 0) -> DRSeries:
    """Barycenter averages over subdivision levels 0..p_max against the mean over *root*.

    Each row records whether the average did not drop below its predecessor
    and whether it stays below the reference mean (plus its error bound).
    """
    root = check_nondegenerate(root)
    if p_max < 0:
        raise ValueError("p_max must be nonnegative")
    levels = [dr_level(root, p_max)]  # fail fast on the cap
    rng = np.random.default_rng([int(seed), _stream_id(f), 0])
    ref = mean_value(f, root, cfg or QuadratureConfig(), rng)
    rows: list[DRRow] = []
    prev = None
    for p in range(p_max + 1):
        level = levels[0] if p == p_max else dr_level(root, p)
        avg = barycenter_average(f, level)
        up = prev is None or avg >= prev - _dr_slack(avg, prev)
        below = avg <= ref.value + ref.error_bound + _dr_slack(avg, ref.value)
        rows.append(DRRow(p, len(level), avg, up, below))
        prev = avg
    return DRSeries(str(getattr(f, "name", "f")), rows, ref, abs(rows[-1].average - ref.value))


@dataclass
class InstanceReport:
    """Every check for one (function, simplex) pair."""

    function_id: str
    is_convex: bool
    simplex_digest: str
    dimension: int
    hh: HHBounds
    theorem: list[Comparison]
    chain: ChainReport
    averages: list[AverageComparison]
    monotone: list[AverageComparison]
    seed: int
    method_config: dict

    def comparisons(self) -> list[Comparison]:
        out = list(self.hh.comparisons) + list(self.theorem) + list(self.chain.comparisons)
        out += [a.comparison for a in self.averages] + [m.comparison for m in self.monotone]
        return out

    def failures(self) -> list[Comparison]:
        return [c for c in self.comparisons() if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def to_dict(self) -> dict:
        return {
            "function_id": self.function_id,
            "is_convex": self.is_convex,
            "simplex_digest": self.simplex_digest,
            "dimension": self.dimension,
            "seed": self.seed,
            "method_config": self.method_config,
            "hh_bounds": self.hh.to_dict(),
            "theorem": [c.to_dict() for c in self.theorem],
            "chain": self.chain.to_dict(),
            "corollary_avg_k": [a.to_dict() for a in self.averages],
            "corollary_avg_monotone": [m.to_dict() for m in self.monotone],
            "passed": self.passed,
        }


def verify_instance(f: Callable, base, cfg: Optional[QuadratureConfig] = None,
                    seed: int = 0) -> InstanceReport:
    """Run the HH bounds, the theorem over all subset pairs, the first maximal
    chain, and both averaged corollaries for every k < l."""
    table = FamilyMeans(f, base, cfg, seed)
    n = table.n
    theorem = [theorem_main_check(f, base, K, L, means=table)
               for K, L in subset_pairs(n, rng=[table.seed, _stream_id(f)])]
    return InstanceReport(
        function_id=str(getattr(f, "name", "f")),
        is_convex=bool(getattr(f, "is_convex", True)),
        simplex_digest=table.base.digest(),
        dimension=n,
        hh=hh_bounds(f, table.base, means=table),
        theorem=theorem,
        chain=corollary_chain(f, base, first_chain(n), means=table),
        averages=[corollary_avg_k(f, base, k, means=table) for k in range(n + 1)],
        monotone=[corollary_avg_monotone(f, base, k, l, means=table)
                  for k in range(n + 1) for l in range(k + 1, n + 1)],
        seed=table.seed,
        method_config=_method_config(table.cfg),
    )
