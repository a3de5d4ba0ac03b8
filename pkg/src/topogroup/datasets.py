"""Synthetic datasets with group labels, plus a grouping distortion metric.

Both generators validate the sampled geometry against what downstream
experiments assume (cluster gap above the loss floor, a loop that is
actually visible in dimension 1) and raise InvalidGeometryError with the
measured numbers when a draw is unusable.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .cloud import PointCloud, new_cloud, pairwise_distances
from .errors import InvalidGeometryError
from .filtration import enclosing_radius, filtration_from_distances
from .persistence import compute_persistence

__all__ = [
    "two_clusters",
    "horseshoe",
    "make_dataset",
    "distortion",
]


def two_clusters(
    n: int = 100,
    seed: int = 0,
    radius: float = 0.2,
    separation: float = 1.5,
    gap_floor: float = 0.10,
    kernel_scale: float = 1.0,
) -> tuple[PointCloud, list[str]]:
    """Two uniform disks on the x axis, labels "A" and "B".

    Validated on the draw: each cluster's diameter stays below kernel_scale
    (a uniform kernel at that scale weights every within-cluster pair) and
    the gap between the clusters exceeds gap_floor (the merge is visible to
    a loss with that floor).
    """
    if n < 2:
        raise InvalidGeometryError(f"need at least 2 points for two clusters, got {n}")
    if not (radius > 0.0 and separation > 0.0):
        raise InvalidGeometryError("radius and separation must be positive")
    rng = np.random.default_rng(seed)
    counts = (n // 2, n - n // 2)
    centers = (np.array([0.0, 0.0]), np.array([separation, 0.0]))
    parts = []
    for k, c in zip(counts, centers):
        r = radius * np.sqrt(rng.uniform(size=k))
        t = rng.uniform(0.0, 2.0 * np.pi, size=k)
        parts.append(c + np.column_stack([r * np.cos(t), r * np.sin(t)]))
    labels = ["A"] * counts[0] + ["B"] * counts[1]

    cross_min = float(cdist(parts[0], parts[1]).min()) if all(len(p) for p in parts) else np.inf
    problems = []
    for name, pts in zip("AB", parts):
        if len(pts) < 2:
            continue
        diam = float(cdist(pts, pts).max())
        if diam >= kernel_scale:
            problems.append(f"cluster {name} diameter {diam:.4f} >= kernel scale {kernel_scale:g}")
    if cross_min <= gap_floor:
        problems.append(f"cluster gap {cross_min:.4f} <= floor {gap_floor:g}, merge invisible to the loss")
    if problems:
        raise InvalidGeometryError(
            "; ".join(problems) + "; try another seed, a smaller radius, or a larger separation"
        )
    return new_cloud(np.vstack(parts)), labels


def horseshoe(
    n: int = 300,
    seed: int = 0,
    ring_radius: float = 1.4,
    thickness: float = 0.2,
    opening: float = np.deg2rad(50.0),
    min_loop_persistence: float = 0.25,
) -> tuple[PointCloud, list[str]]:
    """An annular arc with an opening, labels "arm1" / "body" / "arm2".

    opening is the missing angle in radians; zero gives a full ring, which
    is still a valid draw.  The arms are the first and last sixth of the
    swept arc.  The draw must produce a loop whose persistence exceeds
    min_loop_persistence, otherwise it is rejected with regenerate guidance.

    The default radius and opening keep the two arm tips farther than a
    unit kernel scale apart (chord 2*1.4*sin(25 deg) ~ 1.18), so a
    regularizer at that scale never welds the arms across the gap and the
    loop can still close or open by near-rigid arm motion.
    """
    if n < 3:
        raise InvalidGeometryError(f"need at least 3 points for a loop, got {n}")
    if not (0.0 <= opening < 2.0 * np.pi):
        raise InvalidGeometryError(
            f"opening must lie in [0, 2*pi) radians, got {opening:g}"
        )
    if not (ring_radius > 0.0 and 0.0 <= thickness < 2.0 * ring_radius):
        raise InvalidGeometryError("need ring_radius > 0 and 0 <= thickness < 2*ring_radius")
    rng = np.random.default_rng(seed)
    span = 2.0 * np.pi - opening
    theta = rng.uniform(opening / 2.0, 2.0 * np.pi - opening / 2.0, size=n)
    rad = rng.uniform(ring_radius - thickness / 2.0, ring_radius + thickness / 2.0, size=n)
    pts = np.column_stack([rad * np.cos(theta), rad * np.sin(theta)])
    frac = (theta - opening / 2.0) / span
    labels = np.where(frac < 1.0 / 6.0, "arm1", np.where(frac > 5.0 / 6.0, "arm2", "body"))

    cloud = new_cloud(pts)
    if min_loop_persistence > 0.0:
        distances = pairwise_distances(cloud)
        filtration = filtration_from_distances(distances, max_dim=1, max_radius=enclosing_radius(distances))
        d1 = compute_persistence(filtration)[1]
        pers = d1.deaths - d1.births
        finite = pers[np.isfinite(pers)]
        best = float(finite.max()) if finite.size else 0.0
        if best <= min_loop_persistence:
            raise InvalidGeometryError(
                f"strongest loop persists only {best:.4f} <= {min_loop_persistence:g}; "
                f"try more points, a thinner ring, or another seed"
            )
    return cloud, [str(s) for s in labels]


_SHAPES = {"two-clusters": two_clusters, "horseshoe": horseshoe}


def make_dataset(shape: str, n: int | None = None, seed: int = 0, **geometry):
    try:
        gen = _SHAPES[shape]
    except KeyError:
        raise ValueError(f"unknown shape {shape!r}, expected one of {sorted(_SHAPES)}") from None
    if n is not None:
        geometry["n"] = n
    return gen(seed=seed, **geometry)


def distortion(cloud: PointCloud, labels) -> float:
    """RMS change of within-group pair distances, pooled over groups.

    Zero when every group moved rigidly; grows as groups stretch or tear.
    Groups with fewer than two members contribute no pairs.
    """
    labels = np.asarray(labels)
    if labels.shape != (cloud.m,):
        raise ValueError(f"expected {cloud.m} labels, got shape {labels.shape}")
    total = 0.0
    count = 0
    for g in np.unique(labels):
        idx = np.nonzero(labels == g)[0]
        if idx.size < 2:
            continue
        ii, jj = np.triu_indices(idx.size, k=1)
        a, b = idx[ii], idx[jj]
        d0 = np.linalg.norm(cloud.initial[a] - cloud.initial[b], axis=1)
        d = np.linalg.norm(cloud.current[a] - cloud.current[b], axis=1)
        total += float(np.dot(d0 - d, d0 - d))
        count += idx.size * (idx.size - 1) // 2
    return float(np.sqrt(total / count)) if count else 0.0
