"""Community detection on graphs enriched with polarization fuzzy measures."""

from .capacity import (
    AssociatedGraphMatrix,
    ShapleyVector,
    associated_graph,
    shapley_brute_force,
    shapley_closed_form,
    shapley_restricted,
)
from .community import (
    BlendSpec,
    LouvainTrace,
    blend,
    delta_q,
    gamma_sweep,
    louvain,
    modularity,
    polarization_louvain,
)
from .errors import PolarLouvainError
from .graph import WeightedGraph, aggregate_by_partition, largest_component, load_edge_list
from .operators import OperatorConfig
from .partition import Partition
from .polarization import (
    CohesionReport,
    MembershipProfile,
    PairwiseCapacityMatrix,
    TwoAdditiveFuzzyMeasure,
    build_dialogue_matrix,
    build_risk_matrix,
    convex_combine,
    jdj_pol,
    load_membership,
    mu_value,
    pair_risk,
    partition_cohesion,
)

__version__ = "0.1.0"

__all__ = [
    "AssociatedGraphMatrix",
    "BlendSpec",
    "CohesionReport",
    "LouvainTrace",
    "MembershipProfile",
    "OperatorConfig",
    "PairwiseCapacityMatrix",
    "Partition",
    "PolarLouvainError",
    "ShapleyVector",
    "TwoAdditiveFuzzyMeasure",
    "WeightedGraph",
    "aggregate_by_partition",
    "associated_graph",
    "blend",
    "build_dialogue_matrix",
    "build_risk_matrix",
    "convex_combine",
    "delta_q",
    "gamma_sweep",
    "jdj_pol",
    "largest_component",
    "load_edge_list",
    "load_membership",
    "louvain",
    "modularity",
    "mu_value",
    "pair_risk",
    "partition_cohesion",
    "polarization_louvain",
    "shapley_brute_force",
    "shapley_closed_form",
    "shapley_restricted",
]
