"""Point clouds and pairwise distances.

A cloud carries two coordinate arrays of identical shape: ``initial`` is
frozen at construction and is what grouping weights are later built from,
``current`` is what the optimizer moves.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import EmptyInputError, NonFiniteCoordinateError, RaggedDimensionsError


class PointCloud:
    """m points in R^n with frozen initial coordinates.

    ``initial`` is read-only; ``current`` may be mutated freely (the
    optimizer does so in place). Use :func:`new_cloud` to build one from
    raw point data with validation.
    """

    __slots__ = ("initial", "current")

    def __init__(self, initial, current=None):
        initial = np.array(initial, dtype=np.float64, copy=True)
        initial.setflags(write=False)
        self.initial = initial
        if current is None:
            current = initial.copy()
        else:
            current = np.array(current, dtype=np.float64, copy=True)
            if current.shape != initial.shape:
                raise RaggedDimensionsError(
                    f"current shape {current.shape} != initial shape {initial.shape}"
                )
        self.current = current

    @property
    def m(self):
        return self.initial.shape[0]

    @property
    def n(self):
        return self.initial.shape[1]

    def copy(self):
        return PointCloud(self.initial, self.current)

    def __repr__(self):
        return f"PointCloud(m={self.m}, n={self.n})"


def new_cloud(points) -> PointCloud:
    """Validate raw point data and wrap it in a PointCloud.

    Accepts any nested sequence convertible to a (m, n) float array.
    Raises EmptyInputError, RaggedDimensionsError or
    NonFiniteCoordinateError on bad input.
    """
    if isinstance(points, np.ndarray):
        arr = points.astype(np.float64, copy=True)
    else:
        points = list(points)
        if len(points) == 0:
            raise EmptyInputError("no points supplied")
        lengths = {len(np.atleast_1d(p)) for p in points}
        if len(lengths) > 1:
            raise RaggedDimensionsError(f"mixed point dimensions: {sorted(lengths)}")
        arr = np.asarray(points, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("no points supplied")
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise RaggedDimensionsError(f"expected (m, n) point array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteCoordinateError(f"non-finite coordinate at point {bad[0]}, axis {bad[1]}")
    return PointCloud(arr)


def pairwise_distances(cloud: PointCloud, which: str = "current") -> np.ndarray:
    """Symmetric (m, m) Euclidean distance matrix with a zero diagonal."""
    if which == "current":
        pts = cloud.current
    elif which == "initial":
        pts = cloud.initial
    else:
        raise ValueError(f"which must be 'current' or 'initial', got {which!r}")
    if pts.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(pts))
