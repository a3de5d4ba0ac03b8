"""Grouping regularizer: kernel-weighted penalty on pair distance drift.

Weights are computed once from the initial coordinates and then frozen, so
the penalty pulls each weighted pair back toward its original separation:

    tau(X) = sum_{i<j} w_ij * (d0_ij - d_ij)^2

with w_ij = k(d0_ij).  Pairs whose weight falls below WEIGHT_FLOOR are
dropped at build time and never contribute to the value or the gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud
from .errors import DegeneratePairError, StaleWeightsError

__all__ = [
    "KernelSpec",
    "RegularizerWeights",
    "kernel_eval",
    "build_weights",
    "tau",
    "tau_gradient",
    "WEIGHT_FLOOR",
    "DEGENERATE_DISTANCE",
]

WEIGHT_FLOOR = 1e-12
DEGENERATE_DISTANCE = 1e-12


@dataclass(frozen=True)
class KernelSpec:
    """Distance kernel. uniform: 1 on [0, scale], 0 beyond (boundary in).
    gaussian: exp(-x^2 / (2 scale^2))."""

    kind: str = "uniform"
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "gaussian"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not (self.scale > 0.0):
            raise ValueError(f"kernel scale must be > 0, got {self.scale}")


def kernel_eval(spec: KernelSpec, x) -> np.ndarray | float:
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0):
        raise ValueError("kernel argument must be a nonnegative distance")
    if spec.kind == "uniform":
        out = (x <= spec.scale).astype(np.float64)
    else:
        out = np.exp(-(x * x) / (2.0 * spec.scale * spec.scale))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RegularizerWeights:
    """Frozen sparse pair weights: parallel arrays over pairs i < j."""

    i: np.ndarray
    j: np.ndarray
    w: np.ndarray
    d0: np.ndarray
    n_points: int
    kernel: KernelSpec

    @property
    def n_pairs(self) -> int:
        return self.w.size


def build_weights(cloud: PointCloud, kernel: KernelSpec) -> RegularizerWeights:
    """Evaluate the kernel on initial pairwise distances; drop ~zero weights."""
    m = cloud.m
    ii, jj = np.triu_indices(m, k=1)
    diff = cloud.initial[ii] - cloud.initial[jj]
    d0 = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    w = np.asarray(kernel_eval(kernel, d0), dtype=np.float64)
    keep = w >= WEIGHT_FLOOR
    return RegularizerWeights(
        i=ii[keep].astype(np.int64),
        j=jj[keep].astype(np.int64),
        w=w[keep],
        d0=d0[keep],
        n_points=m,
        kernel=kernel,
    )


def _check_fresh(cloud: PointCloud, weights: RegularizerWeights) -> None:
    if weights.n_points != cloud.m:
        raise StaleWeightsError(
            f"weights were built for {weights.n_points} points, cloud has {cloud.m}"
        )


def _pair_distances(cloud: PointCloud, weights: RegularizerWeights) -> np.ndarray:
    diff = cloud.current[weights.i] - cloud.current[weights.j]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def tau(cloud: PointCloud, weights: RegularizerWeights) -> float:
    _check_fresh(cloud, weights)
    gap = weights.d0 - _pair_distances(cloud, weights)
    return float(np.dot(weights.w * gap, gap))


def tau_gradient(cloud: PointCloud, weights: RegularizerWeights) -> np.ndarray:
    """d tau / d x, shape (m, n).

    d tau / d x_i = sum_j w_ij * 2 (d0 - d) * (-(x_i - x_j) / d), so a pair
    at (near) zero current distance has no usable direction and is an error.
    """
    _check_fresh(cloud, weights)
    grad = np.zeros_like(cloud.current)
    if weights.n_pairs == 0:
        return grad
    d = _pair_distances(cloud, weights)
    bad = d < DEGENERATE_DISTANCE
    if np.any(bad):
        k = int(np.argmax(bad))
        raise DegeneratePairError(
            f"weighted pair ({int(weights.i[k])}, {int(weights.j[k])}) has current "
            f"distance {d[k]:.3e} < {DEGENERATE_DISTANCE:g}; gradient undefined"
        )
    coef = -2.0 * weights.w * (weights.d0 - d) / d
    vec = coef[:, None] * (cloud.current[weights.i] - cloud.current[weights.j])
    np.add.at(grad, weights.i, vec)
    np.add.at(grad, weights.j, -vec)
    return grad
