"""Pure-Python/numpy implementations of the hot search loops.

``_ckernels`` (Cython) provides the same functions with the same
semantics; :mod:`trapdoorfc.kernels` picks one at import time.
"""
from __future__ import annotations

import numpy as np

NAME = "python"

OPTIMAL, INFEASIBLE, BUDGET = 0, 1, 2


def min_coloring_rgs(n, neq, impl):
    """Lexicographically first restricted growth string of minimum block count.

    Returns a list of 0-based block ids, or None when no partition satisfies
    the clauses (only possible if a Neq clause repeats a variable).
    """
    if n == 0:
        return []
    # bucket each clause under its largest variable: it is checkable once
    # that variable is assigned
    neq_at = [[] for _ in range(n)]
    impl_at = [[] for _ in range(n)]
    for a, b in np.asarray(neq).reshape(-1, 2).tolist():
        neq_at[max(a, b)].append((a, b))
    for u, v, k, l in np.asarray(impl).reshape(-1, 4).tolist():
        impl_at[max(u, v, k, l)].append((u, v, k, l))
    rgs = [0] * n

    def ok(pos):
        for a, b in neq_at[pos]:
            if rgs[a] == rgs[b]:
                return False
        for u, v, k, l in impl_at[pos]:
            if rgs[u] == rgs[v] and rgs[k] != rgs[l]:
                return False
        return True

    def dfs(pos, used, limit):
        if pos == n:
            return True
        for c in range(min(used + 1, limit)):
            rgs[pos] = c
            if ok(pos) and dfs(pos + 1, max(used, c + 1), limit):
                return True
        return False

    for limit in range(1, n + 1):
        rgs[0] = 0
        if ok(0) and dfs(1, 1, limit):
            return list(rgs)
    return None


def ilp_search(lb, ub, row_ptr, cols, coefs, rhs, obj, node_budget):
    """Depth-first branch and bound over ``min obj.x`` s.t. ``A x <= rhs``.

    Branches on variables in index order and values in ascending order, with
    bound propagation at every node. An incumbent is replaced only on strict
    improvement, so the returned optimum is the lexicographically least one.
    Returns ``(status, values, objective, nodes)``.
    """
    n = len(lb)
    nrows = len(rhs)
    rows = []
    for r in range(nrows):
        s, e = int(row_ptr[r]), int(row_ptr[r + 1])
        rows.append([list(map(int, cols[s:e])), list(map(int, coefs[s:e])), int(rhs[r])])
    obj = [int(c) for c in obj]
    obj_idx = [i for i, c in enumerate(obj) if c]
    # the objective cut  obj.x <= best - 1  is the last row
    cut = [obj_idx, [obj[i] for i in obj_idx], None]
    rows.append(cut)
    var_rows = [[] for _ in range(n)]
    for r, (idx, _, _) in enumerate(rows):
        for i in idx:
            var_rows[i].append(r)
    cut_row = len(rows) - 1

    def propagate(lo, hi, queue):
        pending = set(queue)
        queue = list(queue)
        while queue:
            r = queue.pop()
            pending.discard(r)
            idx, cf, b = rows[r]
            if b is None:
                continue
            minact = 0
            for i, a in zip(idx, cf):
                minact += a * lo[i] if a > 0 else a * hi[i]
            slack = b - minact
            if slack < 0:
                return False
            for i, a in zip(idx, cf):
                if a > 0:
                    if a * (hi[i] - lo[i]) > slack:
                        hi[i] = lo[i] + slack // a
                    else:
                        continue
                else:
                    if -a * (hi[i] - lo[i]) > slack:
                        lo[i] = hi[i] - slack // (-a)
                    else:
                        continue
                for r2 in var_rows[i]:
                    if r2 != r and r2 not in pending:
                        pending.add(r2)
                        queue.append(r2)
        return True

    lo = [int(x) for x in lb]
    hi = [int(x) for x in ub]
    if any(l > h for l, h in zip(lo, hi)):
        return INFEASIBLE, None, None, 0
    state = {"best": None, "best_vals": None, "nodes": 0}

    class _Budget(Exception):
        pass

    def search(lo, hi, start):
        i = start
        while i < n and lo[i] == hi[i]:
            i += 1
        if i == n:
            val = sum(obj[j] * lo[j] for j in obj_idx)
            if state["best"] is None or val < state["best"]:
                state["best"] = val
                state["best_vals"] = list(lo)
                cut[2] = val - 1
            return
        for v in range(lo[i], hi[i] + 1):
            state["nodes"] += 1
            if state["nodes"] > node_budget:
                raise _Budget
            lo2, hi2 = lo[:], hi[:]
            lo2[i] = hi2[i] = v
            if propagate(lo2, hi2, var_rows[i] + [cut_row]):
                search(lo2, hi2, i + 1)

    if not propagate(lo, hi, range(len(rows))):
        return INFEASIBLE, None, None, 0
    try:
        search(lo, hi, 0)
    except _Budget:
        return BUDGET, None, None, state["nodes"]
    if state["best"] is None:
        return INFEASIBLE, None, None, state["nodes"]
    return OPTIMAL, state["best_vals"], state["best"], state["nodes"]


def ground_state_scan(n, masks, coefs):
    """Exhaustive minimum of ``sum_t coef_t * [x & mask_t == mask_t]``.

    Returns the minimum and the (unsorted) uint64 bitmasks attaining it.
    """
    masks = np.asarray(masks, dtype=np.uint64)
    coefs = np.asarray(coefs, dtype=np.int64)
    size = 1 << n
    xs = np.arange(size, dtype=np.uint64)
    energy = np.zeros(size, dtype=np.int64)
    for m, c in zip(masks.tolist(), coefs.tolist()):
        mm = np.uint64(m)
        energy += c * ((xs & mm) == mm)
    best = int(energy.min())
    return best, xs[energy == best]


def powers_word(y, N):
    """Repeated squarings of y mod N; callers keep N below 2**31."""
    out = [y]
    for _ in range((N - 1).bit_length()):
        y = y * y % N
        out.append(y)
    return tuple(out)


def decrypt_lsb_word(ps, N, d):
    acc = 1 % N
    t = 0
    while d:
        if d & 1:
            acc = acc * ps[t] % N
        d >>= 1
        t += 1
    return acc & 1
