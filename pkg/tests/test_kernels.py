import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trapdoorfc import _pykernels, kernels

from oracles import set_partitions

BACKENDS = kernels.available()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")


@st.composite
def small_ilps(draw):
    n = draw(st.integers(1, 5))
    lb = [draw(st.integers(-2, 1)) for _ in range(n)]
    ub = [lo + draw(st.integers(0, 3)) for lo in lb]
    rows = []
    for _ in range(draw(st.integers(0, 5))):
        cols = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
        coefs = [draw(st.integers(-4, 4).filter(bool)) for _ in cols]
        rows.append((sorted(cols), coefs, draw(st.integers(-6, 6))))
    obj = [draw(st.integers(-2, 2)) for _ in range(n)]
    return lb, ub, rows, obj


def csr(n, rows):
    rp, cols, coefs, rhs = [0], [], [], []
    for c, k, r in rows:
        cols += c
        coefs += k
        rp.append(len(cols))
        rhs.append(r)
    return (np.array(rp, np.int64), np.array(cols, np.int32), np.array(coefs, np.int64),
            np.array(rhs, np.int64))


def enumerate_ilp(lb, ub, rows, obj):
    best = None
    for x in itertools.product(*[range(lo, hi + 1) for lo, hi in zip(lb, ub)]):
        if all(sum(k * x[c] for c, k in zip(cs, ks)) <= r for cs, ks, r in rows):
            val = sum(o * v for o, v in zip(obj, x))
            if best is None or (val, list(x)) < best:
                best = (val, list(x))
    return best


def run_ilp(mod, lb, ub, rows, obj, budget=1_000_000):
    rp, cols, coefs, rhs = csr(len(lb), rows)
    return mod.ilp_search(np.array(lb, np.int64), np.array(ub, np.int64), rp, cols, coefs, rhs,
                          np.array(obj, np.int64), budget)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@settings(max_examples=300, deadline=None)
@given(case=small_ilps())
def test_ilp_search_matches_enumeration(name, case):
    lb, ub, rows, obj = case
    status, values, best, _ = run_ilp(BACKENDS[name], *case)
    expected = enumerate_ilp(lb, ub, rows, obj)
    if expected is None:
        assert status == _pykernels.INFEASIBLE
    else:
        assert status == _pykernels.OPTIMAL
        assert (int(best), list(np.asarray(values).tolist())) == expected


@needs_both
@settings(max_examples=200, deadline=None)
@given(case=small_ilps(), budget=st.integers(1, 40))
def test_ilp_budget_agrees(case, budget):
    a = run_ilp(BACKENDS["python"], *case, budget=budget)
    b = run_ilp(BACKENDS["cython"], *case, budget=budget)
    assert a[0] == b[0] and a[3] == b[3]
    if a[0] == _pykernels.OPTIMAL:
        assert list(np.asarray(a[1])) == list(np.asarray(b[1])) and a[2] == b[2]


@st.composite
def clause_sets(draw):
    n = draw(st.integers(1, 7))
    pair = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda t: t[0] != t[1])
    neq = draw(st.lists(pair, max_size=6))
    impl = draw(st.lists(st.tuples(pair, pair).map(lambda t: t[0] + t[1]), max_size=6))
    return n, np.array(neq, np.int64).reshape(-1, 2), np.array(impl, np.int64).reshape(-1, 4)


def first_min_rgs(n, neq, impl):
    best = None
    for rgs in set_partitions(n):
        if any(rgs[a] == rgs[b] for a, b in neq.tolist()):
            continue
        if any(rgs[u] == rgs[v] and rgs[k] != rgs[l] for u, v, k, l in impl.tolist()):
            continue
        if best is None or max(rgs) < max(best):
            best = rgs
    return best


@pytest.mark.parametrize("name", sorted(BACKENDS))
@settings(max_examples=300, deadline=None)
@given(case=clause_sets())
def test_min_coloring_matches_enumeration(name, case):
    n, neq, impl = case
    got = BACKENDS[name].min_coloring_rgs(n, neq, impl)
    assert (list(got) if got is not None else None) == first_min_rgs(n, neq, impl)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@settings(max_examples=200, deadline=None)
@given(n=st.integers(0, 10), data=st.data())
def test_ground_state_scan_matches_enumeration(name, n, data):
    terms = data.draw(st.lists(st.tuples(st.integers(0, (1 << n) - 1), st.integers(-50, 50)), max_size=20))
    masks = np.array([m for m, _ in terms], np.uint64)
    coefs = np.array([c for _, c in terms], np.int64)
    best, hits = BACKENDS[name].ground_state_scan(n, masks, coefs)
    energies = [sum(c for m, c in terms if x & m == m) for x in range(1 << n)]
    lo = min(energies)
    assert int(best) == lo
    assert sorted(int(h) for h in np.asarray(hits).tolist()) == [x for x, e in enumerate(energies) if e == lo]


def test_use_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.use("fortran")


def test_pure_fallback_env():
    code = "from trapdoorfc import kernels; print(kernels.backend().NAME)"
    env = dict(os.environ, TRAPDOORFC_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_compiled_preferred_when_built():
    code = "from trapdoorfc import kernels; print(kernels.backend().NAME)"
    env = {k: v for k, v in os.environ.items() if k != "TRAPDOORFC_PURE"}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("cython" if "cython" in BACKENDS else "python")


def bigint_powers(y, N):
    out = [y]
    for _ in range((N - 1).bit_length()):
        out.append(out[-1] ** 2 % N)
    return tuple(out)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@settings(max_examples=500, deadline=None)
@given(N=st.integers(2, (1 << 31) - 1), data=st.data())
def test_word_rsa_helpers(name, N, data):
    mod = BACKENDS[name]
    y = data.draw(st.integers(0, N - 1))
    ps = mod.powers_word(y, N)
    assert ps == bigint_powers(y, N)
    d = data.draw(st.integers(0, (1 << len(ps)) - 1))
    acc = 1 % N
    for t in range(len(ps)):
        if d >> t & 1:
            acc = acc * ps[t] % N
    assert mod.decrypt_lsb_word(ps, N, d) == acc & 1
    # unreduced entries give the same product modulo N
    lifted = tuple(p + N * data.draw(st.integers(0, 3)) for p in ps)
    assert mod.decrypt_lsb_word(lifted, N, d) == acc & 1
