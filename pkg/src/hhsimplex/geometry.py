"""Simplices embedded in R^n, their volumes, and the nested family Delta^[K].

A simplex is stored as a ``(k + 1, n)`` array of vertex coordinates, so an
intrinsic k-simplex may live in a larger ambient space.  The family member
``Delta^[K]`` keeps the vertices indexed by ``N \\ K``, each pulled toward the
vertices in ``K``::

    x_j^[K] = sum_{i in K} x_i / (n + 1) + (n + 1 - |K|) / (n + 1) * x_j
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

#: Relative Gram-determinant threshold below which a simplex is degenerate.
EPS_DEGENERATE = 1e-12


class GeometryError(ValueError):
    """Invalid geometric input (shape mismatch, bad index, bad subset)."""


class DegenerateSimplexError(GeometryError):
    """The vertices of a simplex are (numerically) affinely dependent."""


def _as_points(values, name: str = "points") -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise GeometryError(f"{name} must be a non-empty (count, dim) array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"{name} contain non-finite coordinates")
    return arr


def as_vector(x) -> np.ndarray:
    """Coerce *x* to a finite 1-d float array of length >= 1."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise GeometryError(f"expected a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError("vector has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class Simplex:
    """Ordered vertex list of a k-simplex in R^n.

    ``vertices`` is a read-only ``(k + 1, n)`` array.  A 1-d input is read as
    a list of points on the real line, so ``Simplex([0, 1])`` is the unit
    interval.
    """

    vertices: np.ndarray

    def __post_init__(self):
        arr = _as_points(self.vertices, "vertices")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @property
    def dim(self) -> int:
        """Intrinsic dimension k."""
        return self.vertices.shape[0] - 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self) -> int:
        return self.vertices.shape[0]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.vertices)

    def __repr__(self) -> str:
        return f"Simplex({self.vertices.tolist()!r})"

    def max_edge_length(self) -> float:
        return max_edge_length(self.vertices)

    def allclose(self, other: "Simplex", atol: float) -> bool:
        return (self.vertices.shape == other.vertices.shape
                and bool(np.all(np.abs(self.vertices - other.vertices) <= atol)))

    def digest(self) -> str:
        """Short stable hash of the vertex coordinates, for reports."""
        h = hashlib.sha256(np.ascontiguousarray(self.vertices, dtype="<f8").tobytes())
        h.update(repr(self.vertices.shape).encode())
        return h.hexdigest()[:16]

    @classmethod
    def standard(cls, n: int) -> "Simplex":
        """conv{0, e_1, ..., e_n}."""
        if n < 1:
            raise GeometryError("dimension must be >= 1")
        return cls(np.vstack([np.zeros(n), np.eye(n)]))


def as_simplex(s) -> Simplex:
    return s if isinstance(s, Simplex) else Simplex(s)


@dataclass(frozen=True)
class SubsetIndex:
    """A subset K of N = {0, ..., n}, kept sorted."""

    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        members = tuple(sorted(int(i) for i in self.members))
        if len(set(members)) != len(members):
            raise GeometryError(f"duplicate indices in {members}")
        if any(i < 0 or i > self.n for i in members):
            raise GeometryError(f"indices {members} not within 0..{self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: "Iterable[int] | SubsetIndex", n: int) -> "SubsetIndex":
        if isinstance(members, SubsetIndex):
            if members.n != n:
                raise GeometryError(f"subset is over 0..{members.n}, expected 0..{n}")
            return members
        return cls(tuple(members), n)

    @property
    def card(self) -> int:
        return len(self.members)

    @property
    def bitmask(self) -> int:
        return sum(1 << i for i in self.members)

    def complement(self) -> tuple[int, ...]:
        return tuple(j for j in range(self.n + 1) if j not in self.members)

    def is_proper(self) -> bool:
        return self.card <= self.n

    def with_member(self, l: int) -> "SubsetIndex":
        return SubsetIndex(self.members + (l,), self.n)

    def issubset(self, other: "SubsetIndex") -> bool:
        return set(self.members) <= set(other.members)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


def proper_subsets(n: int, card: int | None = None) -> list[SubsetIndex]:
    """All K with K a proper subset of {0..n}, by cardinality then lexicographically."""
    sizes = range(n + 1) if card is None else [card]
    out = []
    for c in sizes:
        if not 0 <= c <= n:
            raise GeometryError(f"cardinality {c} out of range 0..{n}")
        out.extend(SubsetIndex(comb, n) for comb in itertools.combinations(range(n + 1), c))
    return out


def max_edge_length(points: np.ndarray) -> float:
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def barycenter(s) -> np.ndarray:
    return as_simplex(s).vertices.mean(axis=0)


def homothety_apply(a, lam: float, x) -> np.ndarray:
    """Image of *x* under the homothety with center *a* and ratio *lam*.

    *x* may also be a stack of points with trailing dimension ``len(a)``.
    """
    a = as_vector(a)
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != a.shape:
        raise GeometryError(f"dimension mismatch: center {a.shape}, point {x.shape}")
    if not math.isfinite(lam):
        raise GeometryError("homothety ratio must be finite")
    return a + lam * (x - a)


def _edge_factor(vertices: np.ndarray):
    """Return (|det R|, Gram det) of the edge matrices of a stack of simplices.

    ``vertices`` has shape ``(..., k + 1, n)``.  |det R| from a QR factorisation
    of the edge matrix equals sqrt(det(E^T E)) but does not square the condition
    number.
    """
    edges = vertices[..., 1:, :] - vertices[..., :1, :]
    r = np.linalg.qr(np.swapaxes(edges, -1, -2), mode="r")
    root = np.abs(np.prod(np.diagonal(r, axis1=-2, axis2=-1), axis=-1))
    return root, root ** 2


def _max_edge_lengths(vertices: np.ndarray) -> np.ndarray:
    diff = vertices[..., :, None, :] - vertices[..., None, :, :]
    return np.sqrt((diff ** 2).sum(-1)).max(axis=(-1, -2))


def volumes(vertices, check: bool = True) -> np.ndarray:
    """k-volumes of a stack of k-simplices given as a ``(count, k + 1, n)`` array."""
    vertices = np.asarray(vertices, dtype=float)
    k = vertices.shape[-2] - 1
    if k == 0:
        return np.ones(vertices.shape[:-2])
    if k > vertices.shape[-1]:
        raise DegenerateSimplexError(f"{k + 1} vertices cannot be independent in R^{vertices.shape[-1]}")
    root, gram = _edge_factor(vertices)
    if check:
        bad = gram <= EPS_DEGENERATE * _max_edge_lengths(vertices) ** (2 * k)
        if np.any(bad):
            raise DegenerateSimplexError(f"{int(np.count_nonzero(bad))} degenerate simplices")
    return root / math.factorial(k)


def is_degenerate(s) -> bool:
    s = as_simplex(s)
    if s.dim == 0:
        return False
    if s.dim > s.ambient_dim:
        return True
    _, gram = _edge_factor(s.vertices)
    return bool(gram <= EPS_DEGENERATE * s.max_edge_length() ** (2 * s.dim))


def check_nondegenerate(s) -> Simplex:
    s = as_simplex(s)
    if is_degenerate(s):
        raise DegenerateSimplexError(f"degenerate {s.dim}-simplex: {s!r}")
    return s


def volume(s) -> float:
    """k-dimensional volume sqrt(det(E^T E)) / k!; a 0-simplex has volume 1."""
    s = as_simplex(s)
    if s.dim == 0:
        return 1.0
    check_nondegenerate(s)
    return float(volumes(s.vertices[None], check=False)[0])


def face_opposite(s, vertex_index: int) -> Simplex:
    s = as_simplex(s)
    if s.dim < 1:
        raise GeometryError("a point has no proper faces")
    if not 0 <= vertex_index <= s.dim:
        raise GeometryError(f"vertex index {vertex_index} out of range 0..{s.dim}")
    return Simplex(np.delete(s.vertices, vertex_index, axis=0))


def build_delta_k(base, k_set) -> Simplex:
    """The (n - |K|)-simplex Delta^[K], vertices ordered by increasing j not in K."""
    base = check_nondegenerate(base)
    n = base.dim
    K = SubsetIndex.of(k_set, n)
    if not K.is_proper():
        raise GeometryError("K = N leaves no vertices")
    v = base.vertices
    shift = v[list(K.members)].sum(axis=0) / (n + 1)
    weight = (n + 1 - K.card) / (n + 1)
    return Simplex(shift + weight * v[list(K.complement())])


def delta_l_via_homothety(base, k_set, l: int) -> Simplex:
    """Build Delta^[K + {l}] by shrinking the face of Delta^[K] opposite x_l^[K].

    The ratio is (n - |K|) / (n + 1 - |K|) and the center is x_l^[K].
    """
    base = as_simplex(base)
    n = base.dim
    K = SubsetIndex.of(k_set, n)
    rest = K.complement()
    if l not in rest:
        raise GeometryError(f"l={l} must lie in N \\ K = {rest}")
    if len(rest) < 2:
        raise GeometryError("K + {l} would equal N")
    delta_k = build_delta_k(base, K)
    pos = rest.index(l)
    center = delta_k.vertices[pos]
    face = face_opposite(delta_k, pos)
    ratio = (n - K.card) / (n + 1 - K.card)
    return Simplex(homothety_apply(center, ratio, face.vertices))


def random_simplex(n: int, rng: np.random.Generator, scale: float = 1.0,
                   k: int | None = None, max_tries: int = 100) -> Simplex:
    """Gaussian random non-degenerate k-simplex in R^n (k defaults to n)."""
    k = n if k is None else k
    for _ in range(max_tries):
        s = Simplex(scale * rng.standard_normal((k + 1, n)))
        if not is_degenerate(s):
            return s
    raise DegenerateSimplexError("could not draw a non-degenerate simplex")


def load_vertices(rows: Sequence[Sequence[float]]) -> Simplex:
    """Simplex from a JSON-style list of vertex coordinate lists."""
    if not isinstance(rows, (list, tuple)) or not rows:
        raise GeometryError("simplex must be a non-empty array of vertex arrays")
    lengths = {len(r) if isinstance(r, (list, tuple)) else -1 for r in rows}
    if len(lengths) != 1 or -1 in lengths:
        raise GeometryError("all vertices must be coordinate arrays of one length")
    return Simplex(np.array(rows, dtype=float))
