"""Vietoris-Rips filtrations over point clouds.

A simplex enters the complex at the maximum pairwise distance among its
vertices. The filtration enumerates every simplex of dimension up to
``max_dim + 1`` whose appearance radius is within the cap, ordered by
(value, dimension, lexicographic vertex order). The extra dimension is
required so that death events in dimension ``max_dim`` are visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, NamedTuple

import numpy as np

from . import _kernels
from .cloud import PointCloud, pairwise_distances
from .errors import DimensionTooLargeError, VertexSimplexError

MAX_TARGET_DIMENSION = 3


@dataclass(frozen=True)
class Simplex:
    """A combinatorial simplex: a strictly increasing tuple of vertex ids."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        v = self.vertices
        if len(v) == 0:
            raise ValueError("a simplex needs at least one vertex")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"vertices must be strictly increasing, got {v}")
        if v[0] < 0:
            raise ValueError(f"negative vertex id in {v}")

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __repr__(self):
        return f"Simplex{self.vertices}"


class FiltrationEntry(NamedTuple):
    simplex: Simplex
    value: float


def simplex_diameter(simplex: Simplex, distances: np.ndarray) -> float:
    """Appearance radius: max pairwise distance among the vertices (0 for a vertex)."""
    m = distances.shape[0]
    for v in simplex.vertices:
        if v >= m:
            raise IndexError(f"vertex {v} outside distance matrix of size {m}")
    if simplex.dimension == 0:
        return 0.0
    best = 0.0
    for a, b in combinations(simplex.vertices, 2):
        d = distances[a, b]
        if d > best:
            best = d
    return float(best)


def max_edge(simplex: Simplex, distances: np.ndarray) -> tuple[int, int]:
    """The vertex pair realizing the diameter; ties resolve to the
    lexicographically smallest pair. Undefined for vertices."""
    if simplex.dimension == 0:
        raise VertexSimplexError(f"simplex {simplex.vertices} has no edges")
    m = distances.shape[0]
    for v in simplex.vertices:
        if v >= m:
            raise IndexError(f"vertex {v} outside distance matrix of size {m}")
    best = -1.0
    arg = None
    for a, b in combinations(simplex.vertices, 2):
        d = distances[a, b]
        if d > best:
            best = d
            arg = (a, b)
    return arg


def enclosing_radius(distances: np.ndarray) -> float:
    """min over points of the max distance to any other point.

    Beyond this radius the complex is a cone (some vertex neighbors
    everything), hence acyclic above dimension 0; it is the default cap
    when positive-dimensional diagrams are wanted.
    """
    return float(np.min(np.max(distances, axis=1)))


class Filtration:
    """All simplices of a Rips complex in filtration order, array-backed.

    ``values``, ``dims`` and ``verts`` (vertex ids padded with -1) are
    parallel arrays in the total order (value, dim, lex). Individual
    entries are materialized on demand; at count ~10^6 iterating entry
    objects is for inspection, not inner loops.
    """

    __slots__ = ("values", "dims", "verts", "n_points", "max_dim", "max_radius")

    def __init__(self, values, dims, verts, n_points, max_dim, max_radius):
        self.values = values
        self.dims = dims
        self.verts = verts
        self.n_points = n_points
        self.max_dim = max_dim
        self.max_radius = max_radius

    def __len__(self):
        return self.values.size

    def simplex(self, i: int) -> Simplex:
        row = self.verts[i]
        return Simplex(tuple(int(v) for v in row if v >= 0))

    def entry(self, i: int) -> FiltrationEntry:
        return FiltrationEntry(self.simplex(i), float(self.values[i]))

    def __iter__(self) -> Iterator[FiltrationEntry]:
        for i in range(len(self)):
            yield self.entry(i)

    @property
    def critical_radii(self) -> np.ndarray:
        """Distinct appearance values, ascending."""
        return np.unique(self.values)

    def __repr__(self):
        return (
            f"Filtration(n_points={self.n_points}, entries={len(self)}, "
            f"max_dim={self.max_dim}, max_radius={self.max_radius})"
        )


def _stable_order_nonneg(values: np.ndarray) -> np.ndarray:
    # stable argsort through the uint64 bit view: order-isomorphic for
    # non-negative IEEE doubles and dispatches to radix sort
    return np.argsort(np.ascontiguousarray(values).view(np.uint64), kind="stable")


def filtration_from_distances(
    distances: np.ndarray, max_dim: int, max_radius: float = np.inf
) -> Filtration:
    """Enumerate the Rips filtration of a distance matrix."""
    if not isinstance(max_dim, (int, np.integer)):
        raise DimensionTooLargeError(f"max_dim must be an integer, got {max_dim!r}")
    if max_dim < 0 or max_dim > MAX_TARGET_DIMENSION:
        raise DimensionTooLargeError(
            f"max_dim must be between 0 and {MAX_TARGET_DIMENSION}, got {max_dim}"
        )
    max_radius = float(max_radius)
    if not (max_radius > 0.0):
        raise ValueError(f"max_radius must be positive or infinite, got {max_radius}")

    m = distances.shape[0]
    top = min(max_dim + 1, m - 1)
    width = max_dim + 2

    block_verts = []
    block_values = []

    # dimension 0: every point, value 0
    v0 = np.full((m, width), -1, np.int32)
    v0[:, 0] = np.arange(m, dtype=np.int32)
    block_verts.append(v0)
    block_values.append(np.zeros(m))

    ei = ej = ev = None
    if top >= 1:
        iu, ju = np.triu_indices(m, 1)
        dvals = distances[iu, ju]
        keep = dvals <= max_radius
        ei = iu[keep].astype(np.int64)
        ej = ju[keep].astype(np.int64)
        ev = dvals[keep].astype(np.float64)
        v1 = np.full((ei.size, width), -1, np.int32)
        v1[:, 0] = ei
        v1[:, 1] = ej
        block_verts.append(v1)
        block_values.append(ev)

    adj = None
    if top >= 2 and ei is not None and ei.size > 0:
        adj = np.zeros((m, m), dtype=bool)
        adj[ei, ej] = True
        adj[ej, ei] = True
        rows, cols = np.nonzero(adj)
        indptr = np.zeros(m + 1, np.int64)
        np.cumsum(np.bincount(rows, minlength=m), out=indptr[1:])
        nbrs = cols.astype(np.int64)

        counts = _kernels.tri_count(indptr, nbrs, ei, ej)
        offs = np.zeros(ei.size + 1, np.int64)
        np.cumsum(counts, out=offs[1:])
        T = int(offs[-1])
        ti = np.empty(T, np.int64)
        tj = np.empty(T, np.int64)
        tk = np.empty(T, np.int64)
        _kernels.tri_fill(indptr, nbrs, ei, ej, offs[:-1], ti, tj, tk)
        tv = np.maximum(np.maximum(distances[ti, tj], distances[ti, tk]), distances[tj, tk])
        v2 = np.full((T, width), -1, np.int32)
        v2[:, 0] = ti
        v2[:, 1] = tj
        v2[:, 2] = tk
        block_verts.append(v2)
        block_values.append(tv.astype(np.float64))

        # higher dimensions: clique extension by common neighborhoods.
        # Cold path (only reachable for max_dim >= 2); plain loop over the
        # previous block with a vectorized candidate mask per clique.
        prev_verts = v2[:, :3]
        prev_vals = block_values[-1]
        idx = np.arange(m)
        for d in range(3, top + 1):
            if prev_verts.shape[0] == 0:
                break
            out_verts = []
            out_vals = []
            for row, val in zip(prev_verts, prev_vals):
                cand = adj[row[0]]
                for v in row[1:]:
                    cand = cand & adj[v]
                cand = cand & (idx > row[-1])
                ks = np.nonzero(cand)[0]
                for k in ks:
                    newval = max(val, float(np.max(distances[row, k])))
                    if newval <= max_radius:
                        out_verts.append(np.append(row, k))
                        out_vals.append(newval)
            if not out_verts:
                break
            prev_verts = np.asarray(out_verts, dtype=np.int64)
            prev_vals = np.asarray(out_vals)
            vd = np.full((prev_verts.shape[0], width), -1, np.int32)
            vd[:, : d + 1] = prev_verts
            block_verts.append(vd)
            block_values.append(prev_vals)

    values = np.concatenate(block_values)
    verts = np.concatenate(block_verts, axis=0)
    dims = np.concatenate(
        [np.full(b.shape[0], i, np.int8) for i, b in enumerate(block_verts)]
    )
    # blocks are dim-ascending and lex within dim, so one stable sort on the
    # value alone realizes the (value, dim, lex) total order
    perm = _stable_order_nonneg(values)
    return Filtration(
        values[perm].copy(),
        dims[perm].copy(),
        verts[perm].copy(),
        m,
        max_dim,
        max_radius,
    )


def build_filtration(
    cloud: PointCloud, max_dim: int, max_radius: float = np.inf, which: str = "current"
) -> Filtration:
    """Rips filtration of a cloud's coordinates (current by default)."""
    return filtration_from_distances(pairwise_distances(cloud, which), max_dim, max_radius)
