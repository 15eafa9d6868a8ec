"""Dynamic curing policies and network design for networked SIS epidemics."""

from .errors import (
    CapacityError,
    ContractError,
    CrusadeStructureError,
    GraphError,
    InvariantViolation,
    ManifestError,
    SisControlError,
    SolverError,
    StalledStateError,
)
from .graph import (
    INFEASIBLE,
    Crusade,
    FairnessSpec,
    WeightedGraph,
    crusade_width,
    cut_size,
    fair_impedance_exact,
    impedance_exact,
    is_gamma_fair,
    max_degree,
    restricted_max_cut_exact,
    subgraph,
)
from .balanced_cut import BalancedCutResult, CutStrategy, balanced_cut

__all__ = [
    "BalancedCutResult",
    "CapacityError",
    "ContractError",
    "Crusade",
    "CrusadeStructureError",
    "CutStrategy",
    "FairnessSpec",
    "GraphError",
    "INFEASIBLE",
    "InvariantViolation",
    "ManifestError",
    "SisControlError",
    "SolverError",
    "StalledStateError",
    "WeightedGraph",
    "balanced_cut",
    "crusade_width",
    "cut_size",
    "fair_impedance_exact",
    "impedance_exact",
    "is_gamma_fair",
    "max_degree",
    "restricted_max_cut_exact",
    "subgraph",
]
