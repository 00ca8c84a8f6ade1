"""Time the pure-Python and compiled kernel backends on the same workloads.

Run with ``python benchmarks/bench_kernels.py``. Each workload goes through
the public API after switching the backend, so the numbers include the
Python-side setup each call performs.
"""
from __future__ import annotations

import argparse
import itertools
import random
import time

from trapdoorfc import kernels
from trapdoorfc.corpus import random_corpus
from trapdoorfc.fc import FcInstance, VarUniverse, brute_force_min_coloring
from trapdoorfc.ilp import brute_force_ilp, tau5
from trapdoorfc.numtheory import decrypt_lsb, key_from_primes, powers, rsa_encrypt
from trapdoorfc.qubo import fc_to_hamiltonian, ground_states


def dense_instance(n: int, seed: int, neq_density: float, impl_density: float) -> FcInstance:
    # sparse formulas are solved by the first partition tried, which measures nothing
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(n), 2))
    neq = [p for p in pairs if rng.random() < neq_density]
    impl = [a + b for a in pairs for b in pairs if a != b and rng.random() < impl_density]
    return FcInstance(VarUniverse.flat(n), neq, impl)


def coloring_workload():
    corpus = [dense_instance(12, s, 0.3, 0.05) for s in range(40)]
    return lambda: [brute_force_min_coloring(F) for F in corpus]


def ilp_workload():
    models = [tau5(F) for F in random_corpus(60, 4, 3, seed=2)]
    return lambda: [brute_force_ilp(m) for m in models]


def ground_state_workload():
    hams = [fc_to_hamiltonian(F, 3) for F in random_corpus(20, 4, 4, seed=3)]
    return lambda: [ground_states(H) for H in hams]


def rsa_workload():
    key = key_from_primes(89, 97)
    N, e, d = key.N, key.e, key.d
    return lambda: [decrypt_lsb(powers(rsa_encrypt(x, N, e), N), N, d) for x in range(N)]


WORKLOADS = {
    "min_coloring": coloring_workload,
    "ilp_search": ilp_workload,
    "ground_states": ground_state_workload,
    "rsa_round_trip": rsa_workload,
}


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--only", choices=sorted(WORKLOADS), action="append")
    args = ap.parse_args(argv)
    names = sorted(kernels.available())
    print(f"{'workload':<16}" + "".join(f"{n + ' (s)':>14}" for n in names) + f"{'speedup':>10}")
    for label in args.only or WORKLOADS:
        fn = WORKLOADS[label]()
        row = {}
        for name in names:
            old = kernels.use(name)
            try:
                row[name] = best_of(fn, args.repeat)
            finally:
                kernels.use(old.NAME)
        speed = f"{row['python'] / row['cython']:.1f}x" if "cython" in row else "n/a"
        print(f"{label:<16}" + "".join(f"{row[n]:>14.4f}" for n in names) + f"{speed:>10}")


if __name__ == "__main__":
    main()
