"""Small formula coloring instances for the exhaustive cross-checks."""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from .fc import FcInstance, Impl, Neq, VarUniverse


def canonical_clauses(num_vars: int) -> list:
    """Every distinct non-degenerate clause over ``num_vars`` flat variables."""
    pairs = list(itertools.combinations(range(num_vars), 2))
    return [Neq(a, b) for a, b in pairs] + [Impl(u, v, k, l) for (u, v) in pairs for (k, l) in pairs]


def _instance(num_vars: int, clauses) -> FcInstance:
    neq = [c for c in clauses if isinstance(c, Neq)]
    impl = [c for c in clauses if isinstance(c, Impl)]
    return FcInstance(VarUniverse.flat(num_vars), neq, impl)


def exhaustive_corpus(max_vars: int = 4, max_clauses: int = 3) -> Iterator[FcInstance]:
    """All clause sets of size ``<= max_clauses`` for 1..``max_vars`` variables."""
    for n in range(1, max_vars + 1):
        pool = canonical_clauses(n)
        for size in range(max_clauses + 1):
            for combo in itertools.combinations(pool, size):
                yield _instance(n, combo)


def random_corpus(count: int, max_vars: int = 5, max_clauses: int = 4, seed: int = 0) -> list[FcInstance]:
    """``count`` seeded instances with 2..``max_vars`` variables."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(2, max_vars)
        pool = canonical_clauses(n)
        size = rng.randint(0, min(max_clauses, len(pool)))
        out.append(_instance(n, rng.sample(pool, size)))
    return out
