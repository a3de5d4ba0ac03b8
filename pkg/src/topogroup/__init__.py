"""topogroup: optimize point clouds against persistence-diagram losses,
with a kernel-weighted grouping regularizer."""

from .cloud import PointCloud, new_cloud, pairwise_distances
from .datasets import distortion, horseshoe, make_dataset, two_clusters
from .errors import (
    DegenerateEdgeError,
    DegeneratePairError,
    DimensionTooLargeError,
    EmptyInputError,
    InconsistentFiltrationError,
    InfiniteLossError,
    InvalidGeometryError,
    NonFiniteCoordinateError,
    NonFiniteGradientError,
    RaggedDimensionsError,
    StaleWeightsError,
    TopogroupError,
    VertexSimplexError,
)
from .filtration import (
    Filtration,
    FiltrationEntry,
    Simplex,
    build_filtration,
    enclosing_radius,
    filtration_from_distances,
    max_edge,
    simplex_diameter,
)
from .gradients import (
    CompositeLossReport,
    GradientCheckReport,
    PairContribution,
    finite_difference_check,
    resolve_radius_cap,
    topo_gradient,
    total_loss_and_grad,
)
from .losses import LossSpec, PRESET_LOSSES, eval_loss, loss_pair_derivatives, preset_loss
from .optim import AdamState, OptimConfig, Trajectory, TrajectoryRecord, adam_step, run_optimization
from .persistence import (
    INFINITE_DEATH,
    PersistenceDiagram,
    PersistencePair,
    compute_persistence,
    h0_mst_oracle,
)
from .regularizer import KernelSpec, RegularizerWeights, build_weights, kernel_eval, tau, tau_gradient

__version__ = "0.1.0"
