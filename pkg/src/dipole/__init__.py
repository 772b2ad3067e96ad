"""Topology-aware metric dimensionality reduction.

Corrects an initial low-dimensional embedding by stochastic subgradient
descent on a loss that combines a local metric regularizer with Wasserstein
distances between persistence diagrams of random small subsets, so the
result preserves both local distances and global topological structure.
"""

__version__ = "0.1.0"

from .datasets import (
    DatasetSpec,
    circle_sample,
    load_cloud,
    load_distance,
    swiss_roll,
    swiss_roll_hole,
    torus_sample,
)
from .evaluation import (
    EvaluationReport,
    evaluate,
    global_ph_score,
    ijk_test,
    residual_variance,
)
from .geometry import (
    DistanceMatrix,
    NeighborGraph,
    PointCloud,
    euclidean_distances,
    farthest_point_sample,
    geodesic_distances,
    knn_graph,
    restrict,
)
from .isomap import Embedding, isomap_embed
from .optimizer import (
    DipoleConfig,
    LossBreakdown,
    OptimizerState,
    dipole_loss,
    lmr_loss_grad,
    lmr_pairs,
    run,
    sgd_step,
    topo_loss_grad,
)
from .persistence import (
    PersistenceDiagram,
    PersistencePoint,
    reduction_oracle,
    rips_diagrams,
    rips_h0,
    rips_h1,
)
from .wasserstein import (
    DiagramMatching,
    diagonal_gap,
    matching_oracle,
    matching_subgradient,
    wasserstein_pp,
)

__all__ = [
    "__version__",
    "DatasetSpec",
    "DiagramMatching",
    "DipoleConfig",
    "DistanceMatrix",
    "Embedding",
    "EvaluationReport",
    "LossBreakdown",
    "NeighborGraph",
    "OptimizerState",
    "PersistenceDiagram",
    "PersistencePoint",
    "PointCloud",
    "circle_sample",
    "diagonal_gap",
    "dipole_loss",
    "euclidean_distances",
    "evaluate",
    "farthest_point_sample",
    "geodesic_distances",
    "global_ph_score",
    "ijk_test",
    "isomap_embed",
    "knn_graph",
    "lmr_loss_grad",
    "lmr_pairs",
    "load_cloud",
    "load_distance",
    "matching_oracle",
    "matching_subgradient",
    "reduction_oracle",
    "residual_variance",
    "restrict",
    "rips_diagrams",
    "rips_h0",
    "rips_h1",
    "run",
    "sgd_step",
    "swiss_roll",
    "swiss_roll_hole",
    "topo_loss_grad",
    "torus_sample",
    "wasserstein_pp",
]
