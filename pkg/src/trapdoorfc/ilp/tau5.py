"""Formula coloring to ILP, and the maps back.

For M formula variables the model declares, in order, ``w_1..w_M``,
``x_{u,i}`` for ``1 <= u, i <= M``, ``zhat_1..zhat_M`` and five auxiliary
binaries ``a, b, s, q, qp`` per Impl clause (R of them). Rows:

* ``assign_one``: ``sum_i x_{u,i} = 1`` (M rows)
* ``assign_link_ub/lb``: ``x_{u,i} = 1 => zhat_u = i`` via big-M (2 M^2 rows).
  The converse follows from ``assign_one``, so no extra binaries are needed.
* ``color_used``: ``x_{u,i} <= w_i`` (M^2 rows)
* ``neq``: ``x_{u,i} + x_{v,i} <= 1`` (Q * M rows)
* per Impl clause ``(z_u = z_v) -> (z_k = z_l)``, twelve rows:
  ``a <=> zhat_k = zhat_l`` (4), ``b <=> zhat_u != zhat_v`` (4),
  ``s = a or b`` (3) and ``s >= 1``.

Totals: ``M^2 + 2M + 5R`` variables and ``M(3M + Q + 1) + 12R`` rows. Strict
inequalities are written as ``<= rhs - 1`` / ``>= rhs + 1`` over the
integers, and the big-M constant is ``2M``, enough since every ``zhat``
lies in ``[1, M]``.
"""
from __future__ import annotations

import numpy as np

from ..errors import VerificationError
from ..fc import Coloring, FcInstance, FcProvenance, VarUniverse
from .model import FAMILY_CODE, GE, LE, EQ, TAG_CODE, IlpAssignment, IlpModel, verify_assignment


def model_size(M: int, Q: int, R: int) -> tuple[int, int]:
    """``(variables, constraints)`` emitted by :func:`tau5`."""
    return M * M + 2 * M + 5 * R, M * (3 * M + Q + 1) + 12 * R


def _layout(M: int, R: int) -> dict[str, int]:
    base = {"w": 0, "x": M, "zhat": M + M * M}
    off = 2 * M + M * M
    for fam in ("a", "b", "s", "q", "qp"):
        base[fam] = off
        off += R
    return base


class _RowBuilder:
    """Collects fixed-width row blocks; zero coefficients are padding."""

    def __init__(self):
        self.blocks = []

    def add(self, cols, coefs, sense, rhs, tag):
        cols = np.asarray(cols, dtype=np.int64)
        nrows = cols.shape[0]
        coefs = np.broadcast_to(np.asarray(coefs, dtype=np.int64), cols.shape)
        sense = np.broadcast_to(np.asarray(sense, dtype=np.int8), (nrows,))
        rhs = np.broadcast_to(np.asarray(rhs, dtype=np.int64), (nrows,))
        if isinstance(tag, str):
            tag = TAG_CODE[tag]
        tag = np.broadcast_to(np.asarray(tag, dtype=np.int8), (nrows,))
        self.blocks.append((cols, coefs, sense, rhs, tag))

    def build(self):
        row_ptrs, cols, coefs, sense, rhs, tags = [], [], [], [], [], []
        total = 0
        for c, k, s, r, t in self.blocks:
            mask = k != 0
            counts = mask.sum(axis=1)
            row_ptrs.append(total + np.cumsum(counts))
            total += int(counts.sum())
            cols.append(c[mask].astype(np.int32))
            coefs.append(k[mask])
            sense.append(np.asarray(s, dtype=np.int8))
            rhs.append(np.asarray(r, dtype=np.int64))
            tags.append(t)
        cat = lambda xs, dt: np.concatenate(xs).astype(dt, copy=False) if xs else np.zeros(0, dt)
        row_ptr = np.concatenate([[0], cat(row_ptrs, np.int64)]).astype(np.int64)
        return row_ptr, cat(cols, np.int32), cat(coefs, np.int64), cat(sense, np.int8), \
            cat(rhs, np.int64), cat(tags, np.int8)


def _source(F: FcInstance) -> dict:
    doc = {"vars": F.universe.to_dict()}
    if F.provenance is not None:
        doc["provenance"] = F.provenance.to_dict()
    return doc


def tau5(F: FcInstance) -> IlpModel:
    M, Q, R = F.num_vars, F.Q, F.R
    if M == 0:
        raise ValueError("formula has no variables")
    L = 2 * M
    base = _layout(M, R)
    u = np.arange(M, dtype=np.int64)
    col_ = np.arange(M, dtype=np.int64)

    fam = np.concatenate([
        np.full(M, FAMILY_CODE["w"]), np.full(M * M, FAMILY_CODE["x"]), np.full(M, FAMILY_CODE["zhat"]),
        *[np.full(R, FAMILY_CODE[f]) for f in ("a", "b", "s", "q", "qp")],
    ])
    uu, ii = np.divmod(np.arange(M * M, dtype=np.int64), M)
    jr = np.arange(1, R + 1, dtype=np.int64)
    i1 = np.concatenate([u + 1, uu + 1, u + 1, jr, jr, jr, jr, jr])
    i2 = np.concatenate([np.zeros(M, np.int64), ii + 1, np.zeros(M + 5 * R, np.int64)])
    lower = np.zeros(len(fam), dtype=np.int64)
    upper = np.ones(len(fam), dtype=np.int64)
    zs = slice(base["zhat"], base["zhat"] + M)
    lower[zs], upper[zs] = 1, M

    def X(uidx, cidx):
        return base["x"] + uidx * M + cidx

    W = base["w"] + col_
    Z = base["zhat"] + u

    rb = _RowBuilder()
    # each variable gets one color
    rb.add(X(u[:, None], col_[None, :]), 1, EQ, 1, "assign_one")
    # x_{u,i} = 1 forces zhat_u = i; ub/lb rows interleaved per (u, i)
    xs = X(uu, ii)
    zu = Z[uu]
    color = ii + 1
    link_cols = np.stack([np.stack([zu, xs], 1), np.stack([zu, xs], 1)], 1).reshape(-1, 2)
    link_coef = np.tile(np.array([[1, L], [1, -L]], dtype=np.int64), (M * M, 1))
    link_sense = np.tile(np.array([LE, GE], dtype=np.int8), M * M)
    link_rhs = np.stack([color + L, color - L], 1).reshape(-1)
    link_tags = np.tile(np.array([TAG_CODE["assign_link_ub"], TAG_CODE["assign_link_lb"]], np.int8), M * M)
    rb.add(link_cols, link_coef, link_sense, link_rhs, link_tags)
    rb.add(np.stack([xs, W[ii]], 1), np.array([1, -1]), LE, 0, "color_used")
    if Q:
        qa, qb = F.neq[:, 0], F.neq[:, 1]
        cols = np.stack([X(qa[:, None], col_[None, :]), X(qb[:, None], col_[None, :])], 2).reshape(-1, 2)
        rb.add(cols, 1, LE, 1, "neq")
    if R:
        cu, cv, ck, cl = (F.impl[:, t] for t in range(4))
        j = np.arange(R, dtype=np.int64)
        A, B, S = base["a"] + j, base["b"] + j, base["s"] + j
        Qv, QP = base["q"] + j, base["qp"] + j
        zk, zl, zu_, zv = Z[ck], Z[cl], Z[cu], Z[cv]
        zero = np.zeros(R, np.int64)
        # (cols, coefs, sense, rhs, tag) for the twelve rows of clause j
        gadget = [
            ((zk, zl, A, zero), (1, -1, L, 0), LE, L, "eq_ind_ub"),
            ((zk, zl, A, zero), (1, -1, -L, 0), GE, -L, "eq_ind_lb"),
            ((zk, zl, Qv, A), (1, -1, L, -L), LE, L - 1, "eq_ind_lt"),
            ((zk, zl, Qv, A), (1, -1, L, L), GE, 1, "eq_ind_gt"),
            ((zu_, zv, QP, B), (1, -1, L, L), LE, 2 * L - 1, "ne_ind_lt"),
            ((zu_, zv, QP, B), (1, -1, L, -L), GE, 1 - L, "ne_ind_gt"),
            ((zu_, zv, B, zero), (1, -1, -L, 0), LE, 0, "ne_ind_ub"),
            ((zu_, zv, B, zero), (1, -1, L, 0), GE, 0, "ne_ind_lb"),
            ((S, A, zero, zero), (1, -1, 0, 0), GE, 0, "or_ge_a"),
            ((S, B, zero, zero), (1, -1, 0, 0), GE, 0, "or_ge_b"),
            ((S, A, B, zero), (1, -1, -1, 0), LE, 0, "or_le"),
            ((S, zero, zero, zero), (1, 0, 0, 0), GE, 1, "clause_sat"),
        ]
        cols = np.stack([np.stack(c, 1) for c, *_ in gadget], 1).reshape(-1, 4)
        coefs = np.tile(np.array([k for _, k, *_ in gadget], dtype=np.int64), (R, 1))
        sense = np.tile(np.array([s for _, _, s, _, _ in gadget], dtype=np.int8), R)
        rhs = np.tile(np.array([r for *_, r, _ in gadget], dtype=np.int64), R)
        tags = np.tile(np.array([TAG_CODE[t] for *_, t in gadget], dtype=np.int8), R)
        rb.add(cols, coefs, sense, rhs, tags)
    row_ptr, cols, coefs, sense, rhs, tags = rb.build()
    return IlpModel(fam, i1, i2, lower, upper, row_ptr, cols, coefs, sense, rhs, tags,
                    W, _source(F))


def _universe(model: IlpModel) -> tuple[VarUniverse, FcProvenance | None]:
    src = model.source or {}
    uni = VarUniverse.from_dict(src["vars"]) if "vars" in src else VarUniverse.flat(model.M)
    if uni.size != model.M:
        raise ValueError("model source does not match its zhat count")
    prov = src.get("provenance")
    return uni, FcProvenance.from_dict(prov) if prov else None


def g2(A: IlpAssignment, model: IlpModel) -> Coloring:
    """Color classes = groups of equal ``zhat``, numbered by ascending value.

    The class count equals the objective for optimal assignments; a feasible
    but wasteful assignment may switch on more ``w_i`` than it uses.
    """
    verdict = verify_assignment(model, A)
    if not verdict:
        raise VerificationError(f"refusing to decode an infeasible assignment: {verdict.detail}")
    uni, _ = _universe(model)
    return Coloring.from_raw(uni, A.values[model.family_indices("zhat")])


def reconstruct_fc(model: IlpModel) -> FcInstance:
    """Invert :func:`tau5` using the row tags.

    The candidate formula is pushed through :func:`tau5` again and must
    reproduce the model exactly; anything outside the image is rejected.
    """
    M = model.M
    if M == 0:
        raise ValueError("model has no zhat variables")
    zbase = int(model.family_indices("zhat")[0])
    xbase = int(model.family_indices("x")[0]) if M else 0
    tags, rp, cols = model.tags, model.row_ptr, model.cols

    def rows_with(tag):
        return np.flatnonzero(tags == TAG_CODE[tag])

    neq_rows = rows_with("neq")
    if len(neq_rows) % M:
        raise ValueError("neq rows are not a multiple of M")
    starts = rp[neq_rows]
    xa, xb = cols[starts] - xbase, cols[starts + 1] - xbase
    neq = np.unique(np.stack([xa // M, xb // M], 1), axis=0) if len(neq_rows) else np.zeros((0, 2), np.int64)

    eq_rows, ne_rows = rows_with("eq_ind_ub"), rows_with("ne_ind_ub")
    if len(eq_rows) != model.R or len(ne_rows) != model.R:
        raise ValueError("indicator rows do not match the number of clause helpers")
    s1, s2 = rp[eq_rows], rp[ne_rows]
    impl = np.stack([cols[s2] - zbase, cols[s2 + 1] - zbase, cols[s1] - zbase, cols[s1 + 1] - zbase], 1)
    uni, prov = _universe(model)
    F = FcInstance(uni, neq, impl, prov)
    if tau5(F) != model:
        raise ValueError("model is not the image of a formula under tau5")
    return F


def assignment_from_coloring(model: IlpModel, F: FcInstance, P: Coloring) -> IlpAssignment:
    """The witness assignment for a valid coloring (objective = P.k)."""
    M, R = F.num_vars, F.R
    c = P.colors
    k = P.k
    cols = np.arange(1, M + 1)
    x = (c[:, None] == cols[None, :]).astype(np.int64).reshape(-1)
    w = (cols <= k).astype(np.int64)
    if R:
        cu, cv, ck, cl = (c[F.impl[:, t]] for t in range(4))
        a = (ck == cl).astype(np.int64)
        b = (cu != cv).astype(np.int64)
        s = a | b
        q = ((a == 0) & (ck < cl)).astype(np.int64)
        qp = ((b == 1) & (cu < cv)).astype(np.int64)
        aux = [a, b, s, q, qp]
    else:
        aux = []
    vals = np.concatenate([w, x, c.astype(np.int64), *aux])
    if len(vals) != model.num_vars:
        raise ValueError("model does not belong to this formula")
    return IlpAssignment(vals)
