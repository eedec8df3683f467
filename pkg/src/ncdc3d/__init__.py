"""Reasoning with nonmonotonic 3D cardinal-direction constraint networks."""

from .model import (
    MBB,
    Basic,
    BasicRelation,
    Constraint,
    Default,
    Disjunctive,
    GridSpec,
    Network,
    NetworkError,
    Solution,
    SpatialObject,
    Tile,
    TILES,
    validate_network,
)
from .parser import ParseError, load_network, parse_network, serialize_network
from .solver import (
    BudgetExceeded,
    Explanation,
    Inference,
    NoExplanation,
    SolveOptions,
    Status,
    Verdict,
    check,
    explain,
    grid_for,
    infer,
    verify_solution,
)
from .fixtures import FIXTURES, fixture

__version__ = "0.1.0"

__all__ = [
    "FIXTURES", "MBB", "TILES", "Basic", "BasicRelation", "BudgetExceeded", "Constraint", "Default",
    "Disjunctive", "Explanation", "GridSpec", "Inference", "Network", "NetworkError", "NoExplanation",
    "ParseError", "Solution", "SolveOptions", "SpatialObject", "Status", "Tile", "Verdict", "check",
    "explain", "fixture", "grid_for", "infer", "load_network", "parse_network", "serialize_network",
    "validate_network", "verify_solution",
]
