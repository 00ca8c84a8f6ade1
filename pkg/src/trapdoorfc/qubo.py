"""Penalty Hamiltonians for formula coloring.

A coloring with budget ``k`` is encoded with one-hot color bits
``b_{v,c}`` and color-usage bits ``w_c``. Hard constraints are weighted by
``A``; the soft part counts used colors. Coefficients are exact fractions,
so the Ising image can be compared to the binary form by equality.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .errors import SearchBudgetExceeded
from .fc import Coloring, FcInstance, verify_coloring

Term = tuple[int, ...]
Poly = dict[Term, Fraction]

_INT64_MAX = (1 << 63) - 1


def _add_into(acc: Poly, term: Term, coeff) -> None:
    v = acc.get(term, 0) + coeff
    if v:
        acc[term] = v
    else:
        acc.pop(term, None)


def _mul(p: Poly, q: Poly) -> Poly:
    """Product with ``x*x = x`` (binary variables)."""
    out: Poly = {}
    for s, a in p.items():
        for t, b in q.items():
            _add_into(out, tuple(sorted(set(s) | set(t))), a * b)
    return out


def _lin(pairs, const=0) -> Poly:
    out: Poly = {}
    if const:
        out[()] = const
    for term, c in pairs:
        _add_into(out, term, c)
    return out


def _frac_text(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _frac_parse(s) -> Fraction:
    return Fraction(s)


class _PolyBase:
    def __init__(self, names: Sequence[str], terms: Mapping[Sequence[int], object]):
        self.names = tuple(names)
        n = len(self.names)
        clean: Poly = {}
        for t, c in terms.items():
            key = tuple(sorted(t))
            if len(set(key)) != len(key):
                raise ValueError(f"repeated variable in term {t}")
            if key and (key[0] < 0 or key[-1] >= n):
                raise ValueError(f"term {t} references an unknown variable")
            _add_into(clean, key, c)
        self.terms: Poly = {t: Fraction(c) for t, c in sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0]))}

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def offset(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    @property
    def degree(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def __eq__(self, other):
        return type(self) is type(other) and self.names == other.names and self.terms == other.terms

    def __repr__(self):
        return f"{type(self).__name__}(vars={self.num_vars}, terms={len(self.terms)}, degree={self.degree})"

    def to_dict(self) -> dict:
        return {
            "vars": list(self.names),
            "terms": [{"vars": list(t), "coeff": _frac_text(c)} for t, c in self.terms.items() if t],
            "offset": _frac_text(self.offset),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, doc: dict):
        terms: Poly = {}
        for item in doc["terms"]:
            key = tuple(int(i) for i in item["vars"])
            if not key:
                raise ValueError("constant term must be given as offset")
            if key in terms:
                raise ValueError(f"duplicate term {key}")
            terms[key] = _frac_parse(item["coeff"])
        terms[()] = _frac_parse(doc.get("offset", "0"))
        return cls(doc["vars"], terms)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


class BinaryPolynomial(_PolyBase):
    """Multilinear polynomial over 0/1 variables; the empty term is the offset."""

    def bits(self, assignment) -> list[int]:
        if isinstance(assignment, Mapping):
            missing = [n for n in self.names if n not in assignment]
            if missing:
                raise KeyError(f"assignment misses variable {missing[0]!r}")
            vals = [int(assignment[n]) for n in self.names]
        else:
            vals = [int(v) for v in assignment]
            if len(vals) != self.num_vars:
                raise ValueError(f"assignment has {len(vals)} values, polynomial has {self.num_vars} variables")
        if any(v not in (0, 1) for v in vals):
            raise ValueError("assignment values must be 0 or 1")
        return vals

    def energy(self, assignment) -> Fraction:
        x = self.bits(assignment)
        return sum((c for t, c in self.terms.items() if all(x[i] for i in t)), Fraction(0))


class IsingPolynomial(_PolyBase):
    """Polynomial in spins ``Z_i`` in ``{+1, -1}``; the empty term is the offset."""

    def evaluate(self, spins: Sequence[int]) -> Fraction:
        z = [int(s) for s in spins]
        if len(z) != self.num_vars or any(s not in (1, -1) for s in z):
            raise ValueError("expected one +1/-1 spin per variable")
        total = Fraction(0)
        for t, c in self.terms.items():
            sign = 1
            for i in t:
                sign *= z[i]
            total += c * sign
        return total

    def evaluate_bits(self, bits: Sequence[int]) -> Fraction:
        """Value at ``Z_i = 1 - 2 b_i``."""
        return self.evaluate([1 - 2 * int(b) for b in bits])


def energy(H: BinaryPolynomial, assignment) -> Fraction:
    return H.energy(assignment)


def to_ising(H: BinaryPolynomial) -> IsingPolynomial:
    """Substitute ``b = (1 - Z) / 2`` and expand."""
    out: Poly = {}
    for t, c in H.terms.items():
        scale = c / (1 << len(t))
        for r in range(len(t) + 1):
            for sub in itertools.combinations(t, r):
                _add_into(out, sub, scale if r % 2 == 0 else -scale)
    return IsingPolynomial(H.names, out)


# -- formula coloring Hamiltonian --------------------------------------------

def color_var(v: int, c: int, k: int) -> int:
    """Index of ``b_{v,c}`` (both 1-based)."""
    return (v - 1) * k + (c - 1)


def usage_var(c: int, m: int, k: int) -> int:
    """Index of ``w_c`` (1-based)."""
    return m * k + (c - 1)


def hamiltonian_names(m: int, k: int) -> list[str]:
    return [f"b_{v}_{c}" for v in range(1, m + 1) for c in range(1, k + 1)] + \
        [f"w_{c}" for c in range(1, k + 1)]


def default_weight(k: int) -> int:
    return k + 1


def hard_part(F: FcInstance, k: int) -> Poly:
    """Unweighted sum of the one-hot, Neq, Impl and color-usage penalties."""
    if k < 1:
        raise ValueError("color budget k must be at least 1")
    m = F.num_vars
    b = lambda v, c: color_var(v + 1, c, k)
    colors = range(1, k + 1)
    hard: Poly = {}

    def acc(p: Poly):
        for t, c in p.items():
            _add_into(hard, t, c)

    def same_color(u, v) -> Poly:
        return _lin(((tuple(sorted((b(u, c), b(v, c)))), 1) for c in colors))

    for v in range(m):
        one_minus = _lin((((b(v, c),), -1) for c in colors), const=1)
        acc(_mul(one_minus, one_minus))
    for u, v in F.neq.tolist():
        acc(same_color(u, v))
    for u, v, p, q in F.impl.tolist():
        differ = same_color(p, q)
        differ = {t: -c for t, c in differ.items()}
        differ[()] = 1
        acc(_mul(same_color(u, v), differ))
    for v in range(m):
        for c in colors:
            w = usage_var(c, m, k)
            acc(_lin((((b(v, c),), 1), (tuple(sorted((b(v, c), w))), -1))))
    return hard


def fc_to_hamiltonian(F: FcInstance, k: int, A=None) -> BinaryPolynomial:
    """``A * hard + sum_c w_c`` over ``m*k + k`` binary variables."""
    if k < 1:
        raise ValueError("color budget k must be at least 1")
    A = Fraction(default_weight(k) if A is None else A)
    if A < k + 1:
        raise ValueError(f"penalty weight {A} is below k + 1 = {k + 1}")
    if A.denominator == 1:
        A = int(A)
    m = F.num_vars
    total: Poly = {}
    for t, c in hard_part(F, k).items():
        _add_into(total, t, A * c)
    for c in range(1, k + 1):
        _add_into(total, (usage_var(c, m, k),), 1)
    return BinaryPolynomial(hamiltonian_names(m, k), total)


def ground_states(H: BinaryPolynomial, max_vars: int = 20) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Exhaustive minimum and all minimizers, sorted lexicographically."""
    n = H.num_vars
    if n > max_vars:
        raise SearchBudgetExceeded(f"{n} variables exceed the enumeration limit {max_vars}")
    if n > 62:
        raise SearchBudgetExceeded("enumeration is limited to 62 variables")
    scale = lcm(*(c.denominator for c in H.terms.values())) if H.terms else 1
    ints = [int(c * scale) for c in H.terms.values()]
    # worst-case magnitude of any partial sum
    if sum(abs(c) for c in ints) > _INT64_MAX:
        raise OverflowError("scaled coefficients do not fit in 64-bit integers")
    masks = [sum(1 << i for i in t) for t in H.terms]
    best, hits = kernels.backend().ground_state_scan(n, np.asarray(masks, dtype=np.uint64),
                                                     np.asarray(ints, dtype=np.int64))
    states = sorted(tuple((int(h) >> i) & 1 for i in range(n)) for h in np.asarray(hits).tolist())
    return Fraction(int(best), scale), states


def decode_state(F: FcInstance, k: int, bits: Sequence[int]) -> Coloring | None:
    """Coloring read from the one-hot rows, or None if some row is not one-hot."""
    m = F.num_vars
    rows = np.asarray(bits[: m * k], dtype=np.int64).reshape(m, k)
    if np.any(rows.sum(axis=1) != 1):
        return None
    return Coloring.from_raw(F.universe, rows.argmax(axis=1) + 1)


@dataclass(frozen=True)
class QuboSolveResult:
    k: int
    energy: Fraction
    coloring: Coloring
    budgets_tried: tuple[int, ...]


def solve_increasing_k(F: FcInstance, k_max: int | None = None, max_vars: int = 20) -> QuboSolveResult:
    """Raise the color budget until a ground state has no hard penalty.

    A state with zero hard penalty has energy equal to its number of used
    colors, which is below ``A = k + 1``; any violated hard term pushes the
    energy to at least ``A``.
    """
    m = F.num_vars
    k_max = m if k_max is None else k_max
    tried = []
    for k in range(1, k_max + 1):
        tried.append(k)
        H = fc_to_hamiltonian(F, k)
        e, states = ground_states(H, max_vars)
        if e < default_weight(k):
            for s in states:
                P = decode_state(F, k, s)
                if P is not None and verify_coloring(F, P):
                    return QuboSolveResult(k, e, P, tuple(tried))
    raise SearchBudgetExceeded(f"no penalty-free ground state with at most {k_max} colors")


# -- exhaustive tables (exact, scaled to integers) -----------------------------

def _scale(*polys: _PolyBase) -> int:
    return lcm(1, *(c.denominator for p in polys for c in p.terms.values()))


def _check_table_size(n: int, max_vars: int):
    if n > max_vars:
        raise SearchBudgetExceeded(f"{n} variables exceed the enumeration limit {max_vars}")


def _coefficient_vector(p: _PolyBase, scale: int) -> np.ndarray:
    dtype = object if _too_wide(p, scale) else np.int64
    vec = np.zeros(1 << p.num_vars, dtype=dtype)
    for t, c in p.terms.items():
        vec[sum(1 << i for i in t)] = int(c * scale)
    return vec


def energy_table(H: BinaryPolynomial, scale: int | None = None, max_vars: int = 20) -> tuple[int, np.ndarray]:
    """``(scale, E)`` with ``E[x] = scale * energy(H, bits of x)``; bit i of x is variable i.

    Computed as a subset-sum transform of the coefficient vector.
    """
    _check_table_size(H.num_vars, max_vars)
    scale = _scale(H) if scale is None else scale
    vec = _coefficient_vector(H, scale)
    for i in range(H.num_vars):
        v = vec.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return scale, vec


def ising_table(I: IsingPolynomial, scale: int | None = None, max_vars: int = 20) -> tuple[int, np.ndarray]:
    """Same layout as :func:`energy_table`, spins taken as ``Z_i = 1 - 2 b_i``.

    Computed as a Walsh-Hadamard transform of the coefficient vector.
    """
    _check_table_size(I.num_vars, max_vars)
    scale = _scale(I) if scale is None else scale
    vec = _coefficient_vector(I, scale)
    for i in range(I.num_vars):
        v = vec.reshape(-1, 2, 1 << i)
        lo, hi = v[:, 0, :].copy(), v[:, 1, :].copy()
        v[:, 0, :] = lo + hi
        v[:, 1, :] = lo - hi
    return scale, vec


def _too_wide(p: _PolyBase, scale: int) -> bool:
    return sum(abs(c) for c in p.terms.values()) * scale > _INT64_MAX


def ising_matches(H: BinaryPolynomial, I: IsingPolynomial | None = None, max_vars: int = 20) -> bool:
    """Exact equality of ``H`` and its Ising image on every assignment."""
    I = to_ising(H) if I is None else I
    if I.names != H.names:
        return False
    scale = _scale(H, I)
    return bool(np.array_equal(energy_table(H, scale, max_vars)[1], ising_table(I, scale, max_vars)[1]))
