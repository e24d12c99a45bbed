from .model import (
    BINARY,
    CONTINUOUS,
    LinExpr,
    MilpModel,
    SolveResult,
    SolveStatus,
    SolverConfig,
)
from .branch_bound import solve
from .encoder import EncodingResult, assert_window, encode_formula, encode_predicates, encode_stl
from .lp_format import export_lp, parse_lp

__all__ = [
    "BINARY",
    "CONTINUOUS",
    "LinExpr",
    "MilpModel",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "solve",
    "EncodingResult",
    "assert_window",
    "encode_formula",
    "encode_predicates",
    "encode_stl",
    "export_lp",
    "parse_lp",
]
