# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the search loops in ``_pykernels``.

Same signatures, same results (including tie-breaks); only faster.
"""
from libc.stdlib cimport malloc, free, realloc
from libc.string cimport memcpy, memset
from libc.stdint cimport int64_t, uint64_t

import numpy as np

NAME = "cython"

OPTIMAL, INFEASIBLE, BUDGET = 0, 1, 2


# ---------------------------------------------------------------------------
# minimum coloring over restricted growth strings

cdef struct ColorCtx:
    int n
    int *rgs
    int *neq
    int *neq_start
    int *impl
    int *impl_start


cdef bint _clauses_ok(ColorCtx *c, int pos) nogil:
    cdef int t, a
    cdef int *r = c.rgs
    for t in range(c.neq_start[pos], c.neq_start[pos + 1]):
        a = 2 * t
        if r[c.neq[a]] == r[c.neq[a + 1]]:
            return False
    for t in range(c.impl_start[pos], c.impl_start[pos + 1]):
        a = 4 * t
        if r[c.impl[a]] == r[c.impl[a + 1]] and r[c.impl[a + 2]] != r[c.impl[a + 3]]:
            return False
    return True


cdef bint _rgs_dfs(ColorCtx *c, int pos, int used, int limit) nogil:
    cdef int col, top
    if pos == c.n:
        return True
    top = used + 1
    if top > limit:
        top = limit
    for col in range(top):
        c.rgs[pos] = col
        if _clauses_ok(c, pos):
            if _rgs_dfs(c, pos + 1, used if used > col + 1 else col + 1, limit):
                return True
    return False


def min_coloring_rgs(int n, neq, impl):
    if n == 0:
        return []
    neq_a = np.asarray(neq, dtype=np.int64).reshape(-1, 2)
    impl_a = np.asarray(impl, dtype=np.int64).reshape(-1, 4)
    # sort clauses into buckets keyed by their largest variable
    neq_key = neq_a.max(axis=1) if len(neq_a) else np.zeros(0, dtype=np.int64)
    impl_key = impl_a.max(axis=1) if len(impl_a) else np.zeros(0, dtype=np.int64)
    neq_order = np.argsort(neq_key, kind="stable")
    impl_order = np.argsort(impl_key, kind="stable")
    cdef int[::1] neq_flat = np.ascontiguousarray(neq_a[neq_order].reshape(-1), dtype=np.int32)
    cdef int[::1] impl_flat = np.ascontiguousarray(impl_a[impl_order].reshape(-1), dtype=np.int32)
    cdef int[::1] neq_start = np.searchsorted(neq_key[neq_order], np.arange(n + 1)).astype(np.int32)
    cdef int[::1] impl_start = np.searchsorted(impl_key[impl_order], np.arange(n + 1)).astype(np.int32)
    cdef int[::1] rgs = np.zeros(n, dtype=np.int32)
    cdef int dummy = 0
    cdef ColorCtx ctx
    ctx.n = n
    ctx.rgs = &rgs[0]
    ctx.neq = &neq_flat[0] if neq_flat.shape[0] else &dummy
    ctx.impl = &impl_flat[0] if impl_flat.shape[0] else &dummy
    ctx.neq_start = &neq_start[0]
    ctx.impl_start = &impl_start[0]
    cdef int limit
    for limit in range(1, n + 1):
        rgs[0] = 0
        if _clauses_ok(&ctx, 0) and _rgs_dfs(&ctx, 1, 1, limit):
            return [int(x) for x in rgs]
    return None


# ---------------------------------------------------------------------------
# branch and bound for small integer programs

cdef struct IlpCtx:
    int n
    int nrows            # includes the objective cut row (last)
    int64_t *row_ptr
    int *cols
    int64_t *coefs
    int64_t *rhs
    int64_t *obj
    int *vr_ptr          # rows touching each variable
    int *vr_rows
    int *queue
    char *pending
    int64_t *best_vals
    int64_t best
    bint have_best
    int64_t nodes
    int64_t budget
    bint out_of_budget


cdef bint _propagate(IlpCtx *c, int64_t *lo, int64_t *hi, int nq) nogil:
    cdef int r, k, t, r2, i
    cdef int64_t a, minact, slack, b
    cdef int cut = c.nrows - 1
    while nq > 0:
        nq -= 1
        r = c.queue[nq]
        c.pending[r] = 0
        if r == cut and not c.have_best:
            continue
        b = c.rhs[r]
        minact = 0
        for k in range(c.row_ptr[r], c.row_ptr[r + 1]):
            a = c.coefs[k]
            i = c.cols[k]
            if a > 0:
                minact += a * lo[i]
            else:
                minact += a * hi[i]
        slack = b - minact
        if slack < 0:
            # drain pending flags before bailing out
            while nq > 0:
                nq -= 1
                c.pending[c.queue[nq]] = 0
            return False
        for k in range(c.row_ptr[r], c.row_ptr[r + 1]):
            a = c.coefs[k]
            i = c.cols[k]
            if a > 0:
                if a * (hi[i] - lo[i]) <= slack:
                    continue
                hi[i] = lo[i] + slack // a
            else:
                if -a * (hi[i] - lo[i]) <= slack:
                    continue
                lo[i] = hi[i] - slack // (-a)
            for t in range(c.vr_ptr[i], c.vr_ptr[i + 1]):
                r2 = c.vr_rows[t]
                if r2 != r and not c.pending[r2]:
                    c.pending[r2] = 1
                    c.queue[nq] = r2
                    nq += 1
    return True


cdef int _enqueue_var(IlpCtx *c, int i) nogil:
    cdef int t, r, nq = 0
    for t in range(c.vr_ptr[i], c.vr_ptr[i + 1]):
        r = c.vr_rows[t]
        if not c.pending[r]:
            c.pending[r] = 1
            c.queue[nq] = r
            nq += 1
    r = c.nrows - 1
    if not c.pending[r]:
        c.pending[r] = 1
        c.queue[nq] = r
        nq += 1
    return nq


cdef void _search(IlpCtx *c, int64_t *lo, int64_t *hi, int start) nogil:
    cdef int n = c.n
    cdef int i = start
    cdef int j, nq
    cdef int64_t v, val, vmax
    cdef int64_t *lo2
    cdef int64_t *hi2
    while i < n and lo[i] == hi[i]:
        i += 1
    if i == n:
        val = 0
        for j in range(n):
            val += c.obj[j] * lo[j]
        if not c.have_best or val < c.best:
            c.have_best = True
            c.best = val
            memcpy(c.best_vals, lo, n * sizeof(int64_t))
            c.rhs[c.nrows - 1] = val - 1
        return
    lo2 = lo + n
    hi2 = hi + n
    vmax = hi[i]
    v = lo[i]
    while v <= vmax:
        c.nodes += 1
        if c.nodes > c.budget:
            c.out_of_budget = True
            return
        memcpy(lo2, lo, n * sizeof(int64_t))
        memcpy(hi2, hi, n * sizeof(int64_t))
        lo2[i] = v
        hi2[i] = v
        nq = _enqueue_var(c, i)
        if _propagate(c, lo2, hi2, nq):
            _search(c, lo2, hi2, i + 1)
            if c.out_of_budget:
                return
        v += 1


def ilp_search(lb, ub, row_ptr, cols, coefs, rhs, obj, node_budget):
    cdef int n = len(lb)
    cdef int nrows0 = len(rhs)
    obj_a = np.asarray(obj, dtype=np.int64)
    obj_idx = np.flatnonzero(obj_a)
    # append the objective cut row
    rp = np.concatenate([np.asarray(row_ptr, dtype=np.int64),
                         [int(row_ptr[nrows0]) + len(obj_idx)]]).astype(np.int64)
    cc = np.concatenate([np.asarray(cols, dtype=np.int64), obj_idx]).astype(np.int32)
    cf = np.concatenate([np.asarray(coefs, dtype=np.int64), obj_a[obj_idx]]).astype(np.int64)
    rh = np.concatenate([np.asarray(rhs, dtype=np.int64), [0]]).astype(np.int64)
    cdef int nrows = nrows0 + 1
    # variable -> rows adjacency
    row_of = np.repeat(np.arange(nrows, dtype=np.int32), np.diff(rp))
    order = np.argsort(cc, kind="stable")
    vr_rows_a = np.ascontiguousarray(row_of[order], dtype=np.int32)
    vr_ptr_a = np.searchsorted(cc[order], np.arange(n + 1)).astype(np.int32)

    cdef int64_t[::1] rp_v = rp
    cdef int[::1] cc_v = np.ascontiguousarray(cc)
    cdef int64_t[::1] cf_v = np.ascontiguousarray(cf)
    cdef int64_t[::1] rh_v = rh
    cdef int64_t[::1] obj_v = np.ascontiguousarray(obj_a)
    cdef int[::1] vr_ptr_v = vr_ptr_a
    cdef int[::1] vr_rows_v = np.concatenate([vr_rows_a, np.zeros(1, dtype=np.int32)])
    cdef int[::1] queue_v = np.zeros(nrows + 1, dtype=np.int32)
    cdef char[::1] pending_v = np.zeros(nrows + 1, dtype=np.int8)
    cdef int64_t[::1] best_v = np.zeros(n + 1, dtype=np.int64)
    # one (lo, hi) frame per search depth
    cdef int64_t[::1] lo_stack = np.zeros((n + 2) * (n + 1), dtype=np.int64)
    cdef int64_t[::1] hi_stack = np.zeros((n + 2) * (n + 1), dtype=np.int64)
    cdef int i, nq
    cdef int dummy_i = 0
    cdef int64_t dummy_l = 0

    for i in range(n):
        lo_stack[i] = int(lb[i])
        hi_stack[i] = int(ub[i])
        if lo_stack[i] > hi_stack[i]:
            return INFEASIBLE, None, None, 0

    cdef IlpCtx c
    c.n = n
    c.nrows = nrows
    c.row_ptr = &rp_v[0]
    c.cols = &cc_v[0] if cc_v.shape[0] else &dummy_i
    c.coefs = &cf_v[0] if cf_v.shape[0] else &dummy_l
    c.rhs = &rh_v[0]
    c.obj = &obj_v[0] if obj_v.shape[0] else &dummy_l
    c.vr_ptr = &vr_ptr_v[0]
    c.vr_rows = &vr_rows_v[0]
    c.queue = &queue_v[0]
    c.pending = &pending_v[0]
    c.best_vals = &best_v[0]
    c.best = 0
    c.have_best = False
    c.nodes = 0
    c.budget = node_budget
    c.out_of_budget = False

    nq = 0
    for i in range(nrows):
        c.queue[i] = i
        c.pending[i] = 1
    nq = nrows
    if n == 0:
        if not _propagate(&c, &lo_stack[0], &hi_stack[0], nq):
            return INFEASIBLE, None, None, 0
        return OPTIMAL, [], 0, 0
    with nogil:
        if _propagate(&c, &lo_stack[0], &hi_stack[0], nq):
            _search(&c, &lo_stack[0], &hi_stack[0], 0)
    if c.out_of_budget:
        return BUDGET, None, None, int(c.nodes)
    if not c.have_best:
        return INFEASIBLE, None, None, int(c.nodes)
    return OPTIMAL, [int(best_v[i]) for i in range(n)], int(c.best), int(c.nodes)


# ---------------------------------------------------------------------------
# exhaustive ground states of a pseudo-Boolean polynomial

def ground_state_scan(int n, masks, coefs):
    """Gray-code sweep updating only the terms that touch the flipped bit."""
    cdef uint64_t[::1] mk = np.ascontiguousarray(masks, dtype=np.uint64)
    cdef int64_t[::1] cf = np.ascontiguousarray(coefs, dtype=np.int64)
    cdef int T = mk.shape[0]
    cdef int t, i, b
    # terms containing each bit
    per_bit = [[] for _ in range(n)]
    for t in range(T):
        for i in range(n):
            if (mk[t] >> i) & 1:
                per_bit[i].append(t)
    cdef int[::1] tb_ptr = np.zeros(n + 1, dtype=np.int32)
    flat = []
    for i in range(n):
        tb_ptr[i + 1] = tb_ptr[i] + len(per_bit[i])
        flat.extend(per_bit[i])
    cdef int[::1] tb = np.asarray(flat + [0], dtype=np.int32)

    cdef int64_t energy = 0
    for t in range(T):
        if mk[t] == 0:
            energy += cf[t]
    cdef int64_t best = energy
    cdef uint64_t x = 0, g, m, size = (<uint64_t>1) << n
    cdef Py_ssize_t cap = 1024, count = 1
    cdef uint64_t *hits = <uint64_t *>malloc(cap * sizeof(uint64_t))
    cdef uint64_t *grown
    if hits == NULL:
        raise MemoryError()
    hits[0] = 0
    cdef int64_t before, after
    cdef uint64_t[::1] out_v
    try:
        with nogil:
            g = 1
            while g < size:
                # bit to flip = index of lowest set bit of g
                b = 0
                while not ((g >> b) & 1):
                    b += 1
                before = 0
                after = 0
                for t in range(tb_ptr[b], tb_ptr[b + 1]):
                    m = mk[tb[t]]
                    if (x & m) == m:
                        before += cf[tb[t]]
                x ^= (<uint64_t>1) << b
                for t in range(tb_ptr[b], tb_ptr[b + 1]):
                    m = mk[tb[t]]
                    if (x & m) == m:
                        after += cf[tb[t]]
                energy += after - before
                if energy < best:
                    best = energy
                    count = 0
                if energy == best:
                    if count == cap:
                        cap *= 2
                        grown = <uint64_t *>realloc(hits, cap * sizeof(uint64_t))
                        if grown == NULL:
                            break
                        hits = grown
                    hits[count] = x
                    count += 1
                g += 1
        if count == cap and g < size:
            raise MemoryError()
        out = np.empty(count, dtype=np.uint64)
        out_v = out
        for g in range(<uint64_t>count):
            out_v[g] = hits[g]
    finally:
        free(hits)
    return int(best), out


# ---------------------------------------------------------------------------
# word-sized RSA helpers (N < 2**31, so every product fits in 63 bits)

def powers_word(int64_t y, int64_t N):
    cdef int steps = 0
    cdef int64_t t = N - 1
    while t:
        steps += 1
        t >>= 1
    out = [y]
    for _ in range(steps):
        y = y * y % N
        out.append(y)
    return tuple(out)


def decrypt_lsb_word(ps, int64_t N, uint64_t d):
    cdef int64_t acc = 1 % N, v
    cdef Py_ssize_t t = 0
    while d:
        if d & 1:
            v = <int64_t>ps[t] % N
            if v < 0:
                v += N
            acc = acc * v % N
        d >>= 1
        t += 1
    return <int>(acc & 1)
