"""Losses over persistence diagrams.

A loss selects pairs from a single-dimension diagram (persistence strictly
above a floor) and sums their squared persistence.  Essential pairs either
get excluded up front or make the loss infinite, which is an error here:
callers are expected to cap the filtration so that essential pairs cannot
appear in the target dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfiniteLossError
from .persistence import PersistenceDiagram, PersistencePair

__all__ = [
    "LossSpec",
    "PRESET_LOSSES",
    "preset_loss",
    "eval_loss",
    "loss_pair_derivatives",
]


@dataclass(frozen=True)
class LossSpec:
    """What to sum: pairs of one dimension with persistence > floor."""

    target_dimension: int
    persistence_floor: float
    exclude_essential: bool

    def __post_init__(self) -> None:
        if self.target_dimension < 0:
            raise ValueError(f"target_dimension must be >= 0, got {self.target_dimension}")
        if not (self.persistence_floor >= 0.0):
            raise ValueError(f"persistence_floor must be >= 0, got {self.persistence_floor}")


# Named presets, also the names the CLI accepts for --loss.
PRESET_LOSSES: dict[str, LossSpec] = {
    "rho0": LossSpec(target_dimension=0, persistence_floor=0.10, exclude_essential=True),
    "rho1": LossSpec(target_dimension=1, persistence_floor=0.25, exclude_essential=False),
}


def preset_loss(name: str) -> LossSpec:
    try:
        return PRESET_LOSSES[name]
    except KeyError:
        raise ValueError(f"unknown loss preset {name!r}, expected one of {sorted(PRESET_LOSSES)}") from None


def _included_indices(spec: LossSpec, diagram: PersistenceDiagram) -> np.ndarray:
    if diagram.dimension != spec.target_dimension:
        raise ValueError(
            f"diagram dimension {diagram.dimension} does not match "
            f"loss target dimension {spec.target_dimension}"
        )
    pers = diagram.deaths - diagram.births
    included = pers > spec.persistence_floor  # essential: inf > floor, so True
    if spec.exclude_essential:
        included &= ~diagram.essential_mask
    elif np.any(included & diagram.essential_mask):
        k = int(np.count_nonzero(included & diagram.essential_mask))
        raise InfiniteLossError(
            f"{k} essential pair(s) in dimension {diagram.dimension} give an infinite "
            f"loss; cap the filtration radius or exclude essential pairs"
        )
    return np.nonzero(included)[0]


def eval_loss(spec: LossSpec, diagram: PersistenceDiagram) -> float:
    """Sum of squared persistence over the included pairs."""
    idx = _included_indices(spec, diagram)
    pers = diagram.deaths[idx] - diagram.births[idx]
    return float(np.dot(pers, pers))


def loss_pair_derivatives(
    spec: LossSpec, diagram: PersistenceDiagram
) -> list[tuple[PersistencePair, float, float]]:
    """Included pairs with d(loss)/d(birth) and d(loss)/d(death).

    For one pair (p, q) the contribution is (q - p)^2, so the derivatives
    are -2(q - p) and +2(q - p).
    """
    out = []
    for i in _included_indices(spec, diagram):
        pair = diagram.pair_at(int(i))
        gap = pair.death - pair.birth
        out.append((pair, -2.0 * gap, 2.0 * gap))
    return out
