"""Light subset spanners from sparse spanner oracles, with exact verification."""

try:
    from spanner_forge._version import version as __version__
except ModuleNotFoundError:
    __version__ = "0.0.0.dev0"

from spanner_forge.config import settings
from spanner_forge.exceptions import (
    CapacityError,
    ContractViolation,
    CreditExhausted,
    DegenerateInputError,
    InfeasibleError,
    InputError,
    InvariantViolation,
    SeparatorImbalanceError,
    SpannerForgeError,
)
from spanner_forge.graph import GraphInstance, WeightedGraph, verify_stretch
from spanner_forge.oracles import ORACLE_CLASS_BY_NAME, OracleQuery, PointSet
from spanner_forge.ptas import run_ptas
from spanner_forge.separators import ell_close_spanner
from spanner_forge.subset import build_subset_spanner, oracle_from_subset_spanner
from spanner_forge.treewidth import held_karp, subset_tsp_dp

__all__ = [
    "ORACLE_CLASS_BY_NAME",
    "CapacityError",
    "ContractViolation",
    "CreditExhausted",
    "DegenerateInputError",
    "GraphInstance",
    "InfeasibleError",
    "InputError",
    "InvariantViolation",
    "OracleQuery",
    "PointSet",
    "SeparatorImbalanceError",
    "SpannerForgeError",
    "WeightedGraph",
    "__version__",
    "build_subset_spanner",
    "ell_close_spanner",
    "held_karp",
    "oracle_from_subset_spanner",
    "run_ptas",
    "settings",
    "subset_tsp_dp",
    "verify_stretch",
]
