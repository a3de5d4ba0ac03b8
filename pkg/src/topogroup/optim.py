"""Adam loop over the composite loss.

The optimizer moves cloud.current in place and records one trajectory entry
per step (steps + 1 entries for a completed run, step 0 = initial state).
Failure modes are statuses, not exceptions: a weighted pair collapsing to
zero distance ends the run early ("degenerate-pair"), a non-finite gradient
aborts before the bad update is applied ("nonfinite-gradient").  In both
cases the records collected so far are preserved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cloud import PointCloud
from .errors import DegeneratePairError, NonFiniteGradientError
from .gradients import CompositeLossReport, total_loss_and_grad
from .losses import LossSpec
from .regularizer import KernelSpec, RegularizerWeights, build_weights

__all__ = [
    "OptimConfig",
    "AdamState",
    "TrajectoryRecord",
    "Trajectory",
    "adam_step",
    "run_optimization",
]

STATUS_COMPLETED = "completed"
STATUS_DEGENERATE = "degenerate-pair"
STATUS_NONFINITE = "nonfinite-gradient"


@dataclass(frozen=True)
class OptimConfig:
    loss: LossSpec
    lam: float = 1.0
    kernel: KernelSpec | None = None
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    steps: int = 500
    snapshot_interval: int | None = 50
    max_dim: int | None = None
    radius_cap: object = "enclosing"
    method: str = "auto"

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ValueError(f"steps must be >= 0, got {self.steps}")
        if not (self.learning_rate > 0.0):
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.beta1 < 1.0) or not (0.0 <= self.beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if not (self.epsilon > 0.0):
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.lam < 0.0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.snapshot_interval is not None and self.snapshot_interval <= 0:
            raise ValueError(f"snapshot_interval must be positive or None, got {self.snapshot_interval}")
        if self.lam != 0.0 and self.kernel is None:
            raise ValueError("lam != 0 requires a kernel for the regularizer")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, shape) -> "AdamState":
        return cls(m=np.zeros(shape), v=np.zeros(shape), t=0)


def adam_step(cloud: PointCloud, state: AdamState, grad: np.ndarray, config: OptimConfig) -> None:
    """One bias-corrected Adam update of cloud.current, in place."""
    if not np.all(np.isfinite(grad)):
        raise NonFiniteGradientError(
            f"{int(np.count_nonzero(~np.isfinite(grad)))} non-finite gradient entries"
        )
    state.t += 1
    b1, b2 = config.beta1, config.beta2
    state.m = b1 * state.m + (1.0 - b1) * grad
    state.v = b2 * state.v + (1.0 - b2) * (grad * grad)
    m_hat = state.m / (1.0 - b1 ** state.t)
    v_hat = state.v / (1.0 - b2 ** state.t)
    cloud.current -= config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    loss: float
    rho: float
    tau: float
    points: np.ndarray | None = None


@dataclass
class Trajectory:
    records: list[TrajectoryRecord] = field(default_factory=list)
    status: str = STATUS_COMPLETED
    lam: float = 0.0

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]

    @property
    def completed(self) -> bool:
        return self.status == STATUS_COMPLETED

    def snapshots(self) -> list[TrajectoryRecord]:
        return [r for r in self.records if r.points is not None]

    def __len__(self) -> int:
        return len(self.records)


def _snapshot_due(config: OptimConfig, step: int) -> bool:
    return config.snapshot_interval is not None and step % config.snapshot_interval == 0


def run_optimization(
    cloud: PointCloud,
    config: OptimConfig,
    weights: RegularizerWeights | None = None,
) -> tuple[PointCloud, Trajectory]:
    """Optimize cloud.current for config.steps Adam steps.

    Returns the same cloud (updated in place) plus the trajectory.
    Regularizer weights default to a fresh build from cloud.initial; pass
    them explicitly to reuse a build across runs.  Each record satisfies
    loss == rho + lam * tau exactly (same floats, no re-summation).
    """
    if weights is None and config.kernel is not None:
        weights = build_weights(cloud, config.kernel)
    trajectory = Trajectory(lam=config.lam)
    state = AdamState.zeros(cloud.current.shape)

    for step in range(config.steps + 1):
        try:
            report, grad = total_loss_and_grad(
                cloud,
                config.loss,
                weights=weights,
                lam=config.lam,
                max_dim=config.max_dim,
                radius_cap=config.radius_cap,
                method=config.method,
                on_degenerate="skip",
            )
        except DegeneratePairError:
            trajectory.status = STATUS_DEGENERATE
            return cloud, trajectory

        points = cloud.current.copy() if _snapshot_due(config, step) else None
        trajectory.records.append(
            TrajectoryRecord(step=step, loss=report.total, rho=report.rho, tau=report.tau, points=points)
        )
        if step == config.steps:
            break
        try:
            adam_step(cloud, state, grad, config)
        except NonFiniteGradientError:
            trajectory.status = STATUS_NONFINITE
            return cloud, trajectory

    trajectory.status = STATUS_COMPLETED
    return cloud, trajectory
