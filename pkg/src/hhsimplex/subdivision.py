"""Recursive barycentric splitting of a simplex and cones over its pieces.

One split step replaces each vertex of an m-simplex in turn by the barycenter,
giving m + 1 pieces of equal volume.  Level p holds ``(m + 1) ** p`` pieces;
children of piece i come before children of piece i + 1, and within one split
the order follows the replaced vertex.

Levels are materialised as one ``(count, m + 1, n)`` array.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import (GeometryError, Simplex, as_simplex, check_nondegenerate,
                       volumes)

#: Largest number of members a level may hold.
LEVEL_CAP = 10 ** 6


class LevelCapError(RuntimeError):
    """Requested subdivision level would exceed :data:`LEVEL_CAP` members."""


@dataclass(frozen=True, eq=False)
class SubdivisionLevel:
    level: int
    vertices: np.ndarray  # (count, m + 1, n)

    def __len__(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1] - 1

    @property
    def simplices(self) -> list[Simplex]:
        return [Simplex(v) for v in self.vertices]

    def barycenters(self) -> np.ndarray:
        return self.vertices.mean(axis=1)

    def volumes(self) -> np.ndarray:
        return volumes(self.vertices, check=False)


def _split_stack(stack: np.ndarray) -> np.ndarray:
    count, m1, n = stack.shape
    b = stack.mean(axis=1)
    children = np.repeat(stack[:, None, :, :], m1, axis=1)
    idx = np.arange(m1)
    children[:, idx, idx, :] = b[:, None, :]
    return children.reshape(count * m1, m1, n)


def barycentric_split(s) -> list[Simplex]:
    """The m + 1 simplices obtained by swapping each vertex for the barycenter."""
    s = check_nondegenerate(s)
    if s.dim < 1:
        raise GeometryError("cannot split a 0-simplex")
    return [Simplex(v) for v in _split_stack(s.vertices[None])]


def dr_level(root, p: int, cap: int = LEVEL_CAP) -> SubdivisionLevel:
    """Level *p* of the recursive barycentric subdivision of *root*.

    A 0-simplex is its own subdivision at every level.
    """
    root = check_nondegenerate(root)
    if p < 0:
        raise ValueError("level must be nonnegative")
    m = root.dim
    count = (m + 1) ** p
    if count > cap:
        raise LevelCapError(
            f"level {p} of a {m}-simplex has {count} members, above the cap of {cap}")
    stack = np.array(root.vertices)[None]
    if m == 0:
        return SubdivisionLevel(p, stack)
    for _ in range(p):
        stack = _split_stack(stack)
    return SubdivisionLevel(p, stack)


def barycenter_average(f: Callable, level: SubdivisionLevel) -> float:
    """Mean of *f* over the barycenters of the members of *level*."""
    values = np.asarray(f(level.barycenters()), dtype=float)
    return float(np.mean(values))


def cone_over(base_face, apex) -> Simplex:
    """conv(base_face + {apex}); apex is appended as the last vertex."""
    base_face = as_simplex(base_face)
    apex = np.asarray(apex, dtype=float).reshape(1, -1)
    if apex.shape[1] != base_face.ambient_dim:
        raise GeometryError("apex dimension does not match the face")
    return check_nondegenerate(Simplex(np.vstack([base_face.vertices, apex])))


def cone_level(level: SubdivisionLevel, apex) -> np.ndarray:
    """Stacked vertices of the cones over every member of *level*."""
    apex = np.asarray(apex, dtype=float)
    tips = np.broadcast_to(apex, (len(level), 1, apex.shape[-1]))
    return np.concatenate([level.vertices, tips], axis=1)
