"""Integer linear programs built from formula coloring instances."""
from .lp import parse_lp, write_lp
from .model import (
    EQ, GE, LE, TAGS, IlpAssignment, IlpModel, IlpVar, LinearConstraint, parse_var_name,
    row_activity, var_name, verify_assignment,
)
from .search import IlpSearchResult, brute_force_ilp, search_ilp
from .tau5 import assignment_from_coloring, g2, model_size, reconstruct_fc, tau5

__all__ = [
    "EQ", "GE", "LE", "TAGS", "IlpAssignment", "IlpModel", "IlpVar", "LinearConstraint",
    "parse_var_name", "row_activity", "var_name", "verify_assignment", "parse_lp", "write_lp",
    "IlpSearchResult", "brute_force_ilp", "search_ilp", "assignment_from_coloring", "g2",
    "model_size", "reconstruct_fc", "tau5",
]
