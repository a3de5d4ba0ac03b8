"""Gradients of diagram losses with respect to point coordinates.

Every appearance value in a Rips filtration is the length of one maximal
edge, so d(value)/dx touches exactly the two endpoints of that edge:

    d|x_i - x_j| / dx_i = (x_i - x_j) / |x_i - x_j|

A loss pair contributes through its birth simplex (unless the birth is a
vertex, value 0 identically) and its death simplex.  Ties in the maximal
edge make the value locally non-smooth; we follow the same lexicographic
tie-break the filtration uses, which keeps value and gradient consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud, pairwise_distances
from .errors import DegenerateEdgeError
from .filtration import enclosing_radius, filtration_from_distances, max_edge
from .losses import LossSpec, eval_loss, loss_pair_derivatives
from .persistence import PersistencePair, compute_persistence
from .regularizer import DEGENERATE_DISTANCE, RegularizerWeights, tau, tau_gradient

__all__ = [
    "PairContribution",
    "CompositeLossReport",
    "GradientCheckReport",
    "resolve_radius_cap",
    "topo_gradient",
    "total_loss_and_grad",
    "finite_difference_check",
]


def resolve_radius_cap(radius_cap, distances: np.ndarray) -> float:
    """Map a cap policy to a number: "enclosing", "none", or a float."""
    if isinstance(radius_cap, str):
        if radius_cap == "enclosing":
            return enclosing_radius(distances)
        if radius_cap == "none":
            return np.inf
        raise ValueError(f"unknown radius cap policy {radius_cap!r}")
    cap = float(radius_cap)
    if not cap >= 0.0:
        raise ValueError(f"radius cap must be >= 0, got {cap}")
    return cap


@dataclass(frozen=True)
class PairContribution:
    pair: PersistencePair
    contribution: float  # (death - birth)^2
    birth_edge: tuple[int, int] | None  # None for vertex births
    death_edge: tuple[int, int] | None


@dataclass(frozen=True)
class CompositeLossReport:
    total: float
    rho: float
    tau: float
    lam: float
    radius_cap: float
    contributions: tuple[PairContribution, ...]
    n_skipped_degenerate: int = 0

    @property
    def n_pairs(self) -> int:
        return len(self.contributions)


def _edge_term(grad, cloud, distances, simplex, scale, on_degenerate):
    """Add scale * d(diameter)/dx for one simplex; returns the edge used."""
    i, j = max_edge(simplex, distances)
    length = distances[i, j]
    if length < DEGENERATE_DISTANCE:
        if on_degenerate == "skip":
            return None
        raise DegenerateEdgeError(
            f"maximal edge ({i}, {j}) of simplex {simplex.vertices} has length "
            f"{length:.3e} < {DEGENERATE_DISTANCE:g}; direction undefined"
        )
    unit = (cloud.current[i] - cloud.current[j]) / length
    grad[i] += scale * unit
    grad[j] -= scale * unit
    return (i, j)


def _accumulate_topo(grad, cloud, distances, derivs, on_degenerate):
    contributions = []
    skipped = 0
    for pair, d_birth, d_death, in derivs:
        birth_edge = None
        if pair.birth_simplex.dimension >= 1:
            birth_edge = _edge_term(grad, cloud, distances, pair.birth_simplex, d_birth, on_degenerate)
            if birth_edge is None:
                skipped += 1
        death_edge = None
        if pair.death_simplex is not None:
            death_edge = _edge_term(grad, cloud, distances, pair.death_simplex, d_death, on_degenerate)
            if death_edge is None:
                skipped += 1
        gap = pair.death - pair.birth
        contributions.append(PairContribution(pair, gap * gap, birth_edge, death_edge))
    return tuple(contributions), skipped


def topo_gradient(
    cloud: PointCloud,
    diagram,
    spec: LossSpec,
    distances: np.ndarray | None = None,
    on_degenerate: str = "raise",
) -> np.ndarray:
    """d(loss)/dx for a diagram already computed on this cloud, shape (m, n)."""
    if on_degenerate not in ("raise", "skip"):
        raise ValueError(f"on_degenerate must be 'raise' or 'skip', got {on_degenerate!r}")
    if distances is None:
        distances = pairwise_distances(cloud)
    grad = np.zeros_like(cloud.current)
    derivs = loss_pair_derivatives(spec, diagram)
    _accumulate_topo(grad, cloud, distances, derivs, on_degenerate)
    return grad


def total_loss_and_grad(
    cloud: PointCloud,
    spec: LossSpec,
    weights: RegularizerWeights | None = None,
    lam: float = 0.0,
    max_dim: int | None = None,
    radius_cap="enclosing",
    method: str = "auto",
    on_degenerate: str = "raise",
) -> tuple[CompositeLossReport, np.ndarray]:
    """Evaluate rho + lam * tau and its gradient in one pass.

    Builds the filtration from current coordinates, computes persistence in
    the target dimension, and accumulates both loss terms.  tau is reported
    whenever weights are given, even at lam = 0.
    """
    if on_degenerate not in ("raise", "skip"):
        raise ValueError(f"on_degenerate must be 'raise' or 'skip', got {on_degenerate!r}")
    if lam != 0.0 and weights is None:
        raise ValueError("lam != 0 requires regularizer weights")
    if max_dim is None:
        max_dim = spec.target_dimension
    if max_dim < spec.target_dimension:
        raise ValueError(
            f"max_dim {max_dim} cannot resolve pairs in dimension {spec.target_dimension}"
        )

    distances = pairwise_distances(cloud)
    cap = resolve_radius_cap(radius_cap, distances)
    filtration = filtration_from_distances(distances, max_dim=max_dim, max_radius=cap)
    diagram = compute_persistence(filtration, method=method)[spec.target_dimension]

    rho = eval_loss(spec, diagram)
    derivs = loss_pair_derivatives(spec, diagram)
    grad = np.zeros_like(cloud.current)
    contributions, skipped = _accumulate_topo(grad, cloud, distances, derivs, on_degenerate)

    tau_value = 0.0
    if weights is not None:
        tau_value = tau(cloud, weights)
        if lam != 0.0:
            grad += lam * tau_gradient(cloud, weights)

    total = rho + lam * tau_value
    report = CompositeLossReport(
        total=total,
        rho=rho,
        tau=tau_value,
        lam=lam,
        radius_cap=cap,
        contributions=contributions,
        n_skipped_degenerate=skipped,
    )
    return report, grad


@dataclass(frozen=True)
class GradientCheckReport:
    analytic: np.ndarray
    numeric: np.ndarray
    rel_errors: np.ndarray
    unstable_mask: np.ndarray
    max_rel_error: float  # over stable coordinates only
    n_unstable: int

    @property
    def worst_coordinate(self) -> tuple[int, int]:
        masked = np.where(self.unstable_mask, -1.0, self.rel_errors)
        flat = int(np.argmax(masked))
        return flat // self.rel_errors.shape[1], flat % self.rel_errors.shape[1]


def _pairing_signature(report: CompositeLossReport):
    sig = []
    for c in report.contributions:
        sig.append((
            c.pair.dimension,
            c.pair.birth_simplex.vertices,
            c.birth_edge,
            c.pair.death_simplex.vertices if c.pair.death_simplex is not None else None,
            c.death_edge,
        ))
    return tuple(sorted(sig, key=repr))


def finite_difference_check(
    cloud: PointCloud,
    spec: LossSpec,
    weights: RegularizerWeights | None = None,
    lam: float = 0.0,
    h: float = 1e-5,
    max_dim: int | None = None,
    radius_cap="enclosing",
    method: str = "auto",
    zero_tolerance: float = 1e-7,
) -> GradientCheckReport:
    """Central-difference check of the composite loss gradient.

    The loss is piecewise smooth: when a perturbation changes which simplex
    pairing carries a loss term (or which edge is maximal), the two one-sided
    evaluations straddle a kink and the central difference is meaningless.
    Such coordinates are flagged unstable and left out of max_rel_error.
    """
    kwargs = dict(
        weights=weights, lam=lam, max_dim=max_dim,
        radius_cap=radius_cap, method=method, on_degenerate="raise",
    )
    report0, analytic = total_loss_and_grad(cloud, spec, **kwargs)

    m, n = cloud.current.shape
    numeric = np.zeros((m, n))
    unstable = np.zeros((m, n), dtype=bool)
    x = cloud.current
    for i in range(m):
        for a in range(n):
            keep = x[i, a]
            try:
                x[i, a] = keep + h
                rp, _ = total_loss_and_grad(cloud, spec, **kwargs)
                x[i, a] = keep - h
                rm, _ = total_loss_and_grad(cloud, spec, **kwargs)
            finally:
                x[i, a] = keep
            numeric[i, a] = (rp.total - rm.total) / (2.0 * h)
            unstable[i, a] = _pairing_signature(rp) != _pairing_signature(rm)

    denom = np.maximum(np.abs(analytic), np.abs(numeric))
    rel = np.where(denom > zero_tolerance, np.abs(numeric - analytic) / np.maximum(denom, 1e-300), 0.0)
    stable_rel = rel[~unstable]
    max_rel = float(stable_rel.max()) if stable_rel.size else 0.0
    return GradientCheckReport(
        analytic=analytic,
        numeric=numeric,
        rel_errors=rel,
        unstable_mask=unstable,
        max_rel_error=max_rel,
        n_unstable=int(unstable.sum()),
    )
