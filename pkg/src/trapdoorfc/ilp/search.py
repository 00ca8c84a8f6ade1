"""Exact optimum of small ILP models by branch and bound.

Every row is rewritten as ``<=`` (``>=`` rows negated, ``=`` rows split)
and handed to the active search kernel. Ties are broken toward the
lexicographically least value vector in declared variable order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import InfeasibleModelError, SearchBudgetExceeded
from .model import EQ, GE, IlpAssignment, IlpModel

DEFAULT_NODE_BUDGET = 5_000_000


def as_le_rows(model: IlpModel):
    """CSR arrays ``(row_ptr, cols, coefs, rhs)`` of an all-``<=`` system."""
    rp = model.row_ptr
    lengths = np.diff(rp)
    sense = model.sense
    # each row once, equality rows a second time negated
    reps = np.where(sense == EQ, 2, 1)
    row_ids = np.repeat(np.arange(model.num_constraints), reps)
    second = np.zeros(len(row_ids), dtype=bool)
    second[1:] = row_ids[1:] == row_ids[:-1]
    flip = np.where(second | (sense[row_ids] == GE), -1, 1)
    new_len = lengths[row_ids]
    new_rp = np.concatenate([[0], np.cumsum(new_len)]).astype(np.int64)
    starts = rp[row_ids]
    term_idx = np.repeat(starts - new_rp[:-1], new_len) + np.arange(new_rp[-1])
    term_flip = np.repeat(flip, new_len)
    cols = model.cols[term_idx].astype(np.int32)
    coefs = model.coefs[term_idx] * term_flip
    rhs = model.rhs[row_ids] * flip
    return new_rp, cols, coefs.astype(np.int64), rhs.astype(np.int64)


@dataclass(frozen=True)
class IlpSearchResult:
    assignment: IlpAssignment
    objective: int
    nodes: int


def search_ilp(model: IlpModel, budget: int = DEFAULT_NODE_BUDGET) -> IlpSearchResult:
    """Like :func:`brute_force_ilp` but also reports the explored node count."""
    rp, cols, coefs, rhs = as_le_rows(model)
    obj = np.zeros(model.num_vars, dtype=np.int64)
    obj[model.objective] = 1
    status, values, best, nodes = kernels.backend().ilp_search(
        np.asarray(model.lower), np.asarray(model.upper), rp, cols, coefs, rhs, obj, int(budget))
    if status == kernels.BUDGET:
        raise SearchBudgetExceeded(f"branch and bound exceeded {budget} nodes")
    if status == kernels.INFEASIBLE:
        raise InfeasibleModelError("model has no feasible assignment")
    return IlpSearchResult(IlpAssignment(values), int(best), int(nodes))


def brute_force_ilp(model: IlpModel, budget: int = DEFAULT_NODE_BUDGET) -> IlpAssignment:
    """Optimal assignment; ``budget`` caps the number of search nodes."""
    return search_ilp(model, budget).assignment
