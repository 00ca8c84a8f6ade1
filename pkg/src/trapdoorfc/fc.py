"""Formula coloring: instances, the sample-to-formula reduction, and solvers.

Variables are stored as flat 0-based indices. A structured universe maps
``z_i^j`` (1 <= i <= m, 0 <= j <= L) to ``(i - 1) * (L + 1) + j``, so the
successor position of a variable is always ``index + 1``.

Clauses live in two integer arrays: ``neq`` rows ``(a, b)`` and ``impl``
rows ``(u, v, k, l)`` meaning ``(z_u = z_v) -> (z_k = z_l)``. Both pairs are
stored sorted and the rows deduplicated, so two instances with the same
clause set compare equal.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence, Union

import numpy as np

from . import kernels
from .errors import InconsistentSampleError, MissingProvenanceError, SearchBudgetExceeded
from .instances import BitLayout, LabeledSample
from .representations.dfa import Dfa, run_dfa

VarLabel = Union[int, tuple[int, int]]


@dataclass(frozen=True)
class VarUniverse:
    kind: str
    m: int = 0
    L: int = 0
    count: int = 0

    def __post_init__(self):
        if self.kind == "structured":
            if self.m < 1 or self.L < 0:
                raise ValueError("structured universe needs m >= 1 and L >= 0")
        elif self.kind == "flat":
            if self.count < 0:
                raise ValueError("negative variable count")
        else:
            raise ValueError(f"unknown universe kind {self.kind!r}")

    @classmethod
    def structured(cls, m: int, L: int) -> "VarUniverse":
        return cls("structured", m=m, L=L)

    @classmethod
    def flat(cls, count: int) -> "VarUniverse":
        return cls("flat", count=count)

    @property
    def size(self) -> int:
        return self.m * (self.L + 1) if self.kind == "structured" else self.count

    def index(self, var: VarLabel) -> int:
        if self.kind == "structured":
            i, j = var
            if not (1 <= i <= self.m and 0 <= j <= self.L):
                raise ValueError(f"variable z_{i}^{j} out of range")
            return (i - 1) * (self.L + 1) + j
        if not 1 <= var <= self.count:
            raise ValueError(f"variable z_{var} out of range")
        return var - 1

    def label(self, idx: int) -> VarLabel:
        if self.kind == "structured":
            i, j = divmod(int(idx), self.L + 1)
            return (i + 1, j)
        return int(idx) + 1

    def to_dict(self) -> dict:
        if self.kind == "structured":
            return {"kind": "structured", "m": self.m, "L": self.L}
        return {"kind": "flat", "count": self.count}

    @classmethod
    def from_dict(cls, doc: dict) -> "VarUniverse":
        if doc["kind"] == "structured":
            return cls.structured(int(doc["m"]), int(doc["L"]))
        return cls.flat(int(doc["count"]))

    def label_to_json(self, idx: int):
        lab = self.label(idx)
        return list(lab) if isinstance(lab, tuple) else lab

    def label_from_json(self, obj) -> int:
        return self.index(tuple(obj) if isinstance(obj, list) else int(obj))


@dataclass(frozen=True)
class FcProvenance:
    """Where a formula came from: the example layout and the anchor bit."""

    n: int
    total_bits: int
    anchor: int

    @classmethod
    def from_layout(cls, layout: BitLayout) -> "FcProvenance":
        return cls(layout.n, layout.total_bits, layout.lsb_of_N_position)

    @property
    def layout(self) -> BitLayout:
        return BitLayout(self.n, self.total_bits // self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "total_bits": self.total_bits, "anchor": self.anchor, "repetitions": 1}

    @classmethod
    def from_dict(cls, doc: dict) -> "FcProvenance":
        return cls(int(doc["n"]), int(doc["total_bits"]), int(doc["anchor"]))


class Neq(NamedTuple):
    a: int
    b: int


class Impl(NamedTuple):
    u: int
    v: int
    k: int
    l: int


Clause = Union[Neq, Impl]


def _canonical_rows(arr, width: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64).reshape(-1, width)
    if width == 2:
        arr = np.sort(arr, axis=1)
    else:
        arr = np.concatenate([np.sort(arr[:, :2], axis=1), np.sort(arr[:, 2:], axis=1)], axis=1)
    if len(arr) > 1:
        arr = np.unique(arr, axis=0)
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class FcInstance:
    """A conjunction of ``Neq`` and ``Impl`` clauses over a variable universe."""

    def __init__(self, universe: VarUniverse, neq=(), impl=(), provenance: FcProvenance | None = None):
        self.universe = universe
        self.neq = _canonical_rows(neq, 2)
        self.impl = _canonical_rows(impl, 4)
        self.provenance = provenance
        size = universe.size
        for arr in (self.neq, self.impl):
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise ValueError("clause references a variable outside the universe")
        if np.any(self.neq[:, 0] == self.neq[:, 1]):
            raise ValueError("Neq clauses need two distinct variables")
        if np.any(self.impl[:, 0] == self.impl[:, 1]) or np.any(self.impl[:, 2] == self.impl[:, 3]):
            raise ValueError("Impl clauses need distinct variables within each pair")

    @property
    def num_vars(self) -> int:
        return self.universe.size

    @property
    def Q(self) -> int:
        return len(self.neq)

    @property
    def R(self) -> int:
        return len(self.impl)

    @property
    def num_clauses(self) -> int:
        return self.Q + self.R

    def clauses(self) -> Iterator[Clause]:
        """All clauses, the Neq family first; this is the verifier's order."""
        for a, b in self.neq.tolist():
            yield Neq(a, b)
        for u, v, k, l in self.impl.tolist():
            yield Impl(u, v, k, l)

    def __eq__(self, other):
        if not isinstance(other, FcInstance):
            return NotImplemented
        return (self.universe == other.universe and self.provenance == other.provenance
                and np.array_equal(self.neq, other.neq) and np.array_equal(self.impl, other.impl))

    def __repr__(self):
        return f"FcInstance({self.universe}, Q={self.Q}, R={self.R})"

    def describe(self, clause: Clause) -> str:
        lab = [self.universe.label(x) for x in clause]
        if isinstance(clause, Neq):
            return f"Neq({lab[0]}, {lab[1]})"
        return f"Impl({lab[0]}, {lab[1]}, {lab[2]}, {lab[3]})"

    def to_dict(self) -> dict:
        lj = self.universe.label_to_json
        clauses = [{"t": "neq", "a": lj(a), "b": lj(b)} for a, b in self.neq.tolist()]
        clauses += [{"t": "impl", "u": lj(u), "v": lj(v), "k": lj(k), "l": lj(l)}
                    for u, v, k, l in self.impl.tolist()]
        doc = {"vars": self.universe.to_dict(), "clauses": clauses}
        if self.provenance is not None:
            doc["provenance"] = self.provenance.to_dict()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    def digest(self) -> str:
        """SHA-256 over the universe, provenance and canonical clause arrays."""
        h = hashlib.sha256()
        head = {"vars": self.universe.to_dict(),
                "provenance": self.provenance.to_dict() if self.provenance else None}
        h.update(json.dumps(head, sort_keys=True).encode())
        for arr in (self.neq, self.impl):
            h.update(np.int64(len(arr)).tobytes())
            h.update(np.ascontiguousarray(arr, dtype="<i8").tobytes())
        return h.hexdigest()

    @classmethod
    def from_dict(cls, doc: dict) -> "FcInstance":
        uni = VarUniverse.from_dict(doc["vars"])
        lf = uni.label_from_json
        neq, impl = [], []
        for c in doc["clauses"]:
            if c["t"] == "neq":
                neq.append((lf(c["a"]), lf(c["b"])))
            elif c["t"] == "impl":
                impl.append((lf(c["u"]), lf(c["v"]), lf(c["k"]), lf(c["l"])))
            else:
                raise ValueError(f"unknown clause type {c['t']!r}")
        prov = doc.get("provenance")
        return cls(uni, neq, impl, FcProvenance.from_dict(prov) if prov else None)

    @classmethod
    def from_json(cls, text: str) -> "FcInstance":
        return cls.from_dict(json.loads(text))


class Coloring:
    """Colors ``1..k`` for every variable of a universe, without gaps."""

    def __init__(self, universe: VarUniverse, colors):
        colors = np.asarray(colors, dtype=np.int64)
        if colors.shape != (universe.size,):
            raise ValueError(f"need one color per variable ({universe.size}), got shape {colors.shape}")
        if colors.size:
            used = np.unique(colors)
            if used[0] != 1 or used[-1] != len(used):
                raise ValueError("color ids must form 1..k with no gaps")
        colors.setflags(write=False)
        self.universe = universe
        self.colors = colors

    @classmethod
    def from_raw(cls, universe: VarUniverse, raw) -> "Coloring":
        """Renumber arbitrary class labels to 1..k in ascending label order."""
        raw = np.asarray(raw)
        if raw.size == 0:
            return cls(universe, raw.astype(np.int64))
        _, inv = np.unique(raw, return_inverse=True)
        return cls(universe, inv.reshape(-1) + 1)

    @property
    def k(self) -> int:
        return int(self.colors.max()) if self.colors.size else 0

    def color(self, var: VarLabel) -> int:
        return int(self.colors[self.universe.index(var)])

    def classes(self) -> list[list[int]]:
        return [np.flatnonzero(self.colors == c).tolist() for c in range(1, self.k + 1)]

    def __eq__(self, other):
        if not isinstance(other, Coloring):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self.colors, other.colors)

    def __repr__(self):
        return f"Coloring(k={self.k}, colors={self.colors.tolist()})"

    def to_json(self) -> str:
        uni = self.universe
        doc = {}
        for idx, c in enumerate(self.colors.tolist()):
            lab = uni.label(idx)
            key = f"{lab[0]},{lab[1]}" if isinstance(lab, tuple) else str(lab)
            doc[key] = c
        return json.dumps({"vars": uni.to_dict(), "k": self.k, "colors": doc}) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Coloring":
        doc = json.loads(text)
        uni = VarUniverse.from_dict(doc["vars"])
        colors = np.zeros(uni.size, dtype=np.int64)
        seen = np.zeros(uni.size, dtype=bool)
        for key, c in doc["colors"].items():
            lab = tuple(int(p) for p in key.split(",")) if "," in key else int(key)
            idx = uni.index(lab)
            colors[idx] = c
            seen[idx] = True
        if not seen.all():
            raise ValueError("coloring file leaves variables uncolored")
        return cls(uni, colors)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    violation: object = None
    detail: str = ""

    def __bool__(self):
        return self.ok


def verify_coloring(F: FcInstance, P: Coloring) -> Verdict:
    """Check every clause; on failure report the first violated one."""
    if P.universe.size != F.num_vars:
        raise ValueError(f"coloring covers {P.universe.size} variables, formula has {F.num_vars}")
    c = P.colors
    if F.Q:
        bad = np.flatnonzero(c[F.neq[:, 0]] == c[F.neq[:, 1]])
        if bad.size:
            cl = Neq(*F.neq[bad[0]].tolist())
            return Verdict(False, cl, F.describe(cl))
    if F.R:
        im = F.impl
        bad = np.flatnonzero((c[im[:, 0]] == c[im[:, 1]]) & (c[im[:, 2]] != c[im[:, 3]]))
        if bad.size:
            cl = Impl(*im[bad[0]].tolist())
            return Verdict(False, cl, F.describe(cl))
    return Verdict(True)


def _as_pairs(sample) -> tuple[list[str], list[int], FcProvenance | None]:
    if isinstance(sample, LabeledSample):
        return sample.strings, sample.labels, FcProvenance.from_layout(sample.layout)
    pairs = list(sample)
    return [w for w, _ in pairs], [int(b) for _, b in pairs], None


def _string_matrix(strings: Sequence[str]) -> np.ndarray:
    L = len(strings[0])
    if any(len(w) != L for w in strings):
        raise ValueError("ragged sample: all strings must have the same length")
    if L == 0:
        return np.zeros((len(strings), 0), dtype=np.int8)
    buf = np.frombuffer("".join(strings).encode("ascii"), dtype=np.uint8)
    if np.any((buf != 48) & (buf != 49)):
        raise ValueError("example strings may only contain 0 and 1")
    return (buf - 48).astype(np.int8).reshape(len(strings), L)


def tau4(sample) -> FcInstance:
    """Reduce a labeled sample to a formula coloring instance.

    For every pair of distinct positions (i1, j1), (i2, j2) with j < L whose
    next bits agree, add ``(z_i1^j1 = z_i2^j2) -> (z_i1^{j1+1} = z_i2^{j2+1})``;
    for every pair of examples with different labels add
    ``z_i1^L != z_i2^L``. Accepts a :class:`LabeledSample` (which records
    provenance) or any sequence of ``(bit string, label)`` pairs.
    """
    strings, labels, prov = _as_pairs(sample)
    if not strings:
        raise ValueError("empty sample")
    W = _string_matrix(strings)
    m, L = W.shape
    uni = VarUniverse.structured(m, L)
    ids = np.arange(m, dtype=np.int64)[:, None] * (L + 1) + np.arange(L, dtype=np.int64)[None, :]
    blocks = []
    for bit in (0, 1):
        sel = ids[W == bit]
        if len(sel) < 2:
            continue
        r, c = np.triu_indices(len(sel), 1)
        a, b = sel[r], sel[c]
        blocks.append(np.stack([a, b, a + 1, b + 1], axis=1))
    impl = np.concatenate(blocks) if blocks else np.zeros((0, 4), dtype=np.int64)
    lab = np.asarray(labels)
    i1, i2 = np.triu_indices(m, 1)
    keep = lab[i1] != lab[i2]
    neq = np.stack([i1[keep] * (L + 1) + L, i2[keep] * (L + 1) + L], axis=1)
    return FcInstance(uni, neq, impl, prov)


def tau4_clause_counts(strings: Sequence[str], labels: Sequence[int]) -> tuple[int, int]:
    """Closed-form ``(Q, R)`` for :func:`tau4`.

    ``R = sum_b C(n_b, 2)`` where ``n_b`` counts positions j < L whose next
    bit is b, and ``Q = (#label-0 examples) * (#label-1 examples)``.
    """
    ones = sum(w.count("1") for w in strings)
    zeros = sum(len(w) for w in strings) - ones
    pos = sum(1 for b in labels if b)
    return pos * (len(labels) - pos), ones * (ones - 1) // 2 + zeros * (zeros - 1) // 2


def infer_strings(F: FcInstance) -> list[str]:
    """Read the example strings back out of a reduced formula.

    The last bit of the N field is 1 in every example (N is odd). Every
    other 1-bit at position j+1 of string i shows up as the clause pairing
    the anchor transition of string 1 with ``z_i^j -> z_i^{j+1}``.
    """
    prov = F.provenance
    if prov is None or F.universe.kind != "structured":
        raise MissingProvenanceError("formula carries no sample provenance")
    m, L = F.universe.m, F.universe.L
    if prov.total_bits != L or not 1 <= prov.anchor <= L:
        raise MissingProvenanceError("provenance does not match the variable universe")
    prev, cur = prov.anchor - 1, prov.anchor
    im = F.impl
    left = (im[:, 0] == prev) & (im[:, 2] == cur)
    right = (im[:, 1] == prev) & (im[:, 3] == cur)
    partner = np.concatenate([im[left][:, [1, 3]], im[right][:, [0, 2]]])
    if len(partner) == 0:
        raise MissingProvenanceError("no anchor clauses found")
    src, dst = partner[:, 0], partner[:, 1]
    i, j = np.divmod(src, L + 1)
    ok = (dst == src + 1) & (j < L)
    W = np.zeros((m, L), dtype=np.uint8)
    W[i[ok], j[ok]] = 1
    W[0, prov.anchor - 1] = 1
    return ["".join(map(str, row)) for row in W.tolist()]


def brute_force_min_coloring(F: FcInstance, max_vars: int = 12) -> Coloring:
    """Minimum-size valid coloring by restricted-growth-string search.

    Ties go to the lexicographically least restricted growth string.
    """
    if F.num_vars > max_vars:
        raise SearchBudgetExceeded(f"{F.num_vars} variables exceeds max_vars={max_vars}")
    rgs = kernels.backend().min_coloring_rgs(F.num_vars, F.neq, F.impl)
    if rgs is None:
        raise InconsistentSampleError("formula has no valid coloring")
    return Coloring(F.universe, np.asarray(rgs, dtype=np.int64) + 1)


def coloring_from_dfa(F: FcInstance, strings: Sequence[str], t: Dfa) -> Coloring:
    """Color z_i^j with the state t reaches after the first j bits of w_i."""
    uni = F.universe
    if uni.kind != "structured" or len(strings) != uni.m or any(len(w) != uni.L for w in strings):
        raise ValueError("strings do not match the formula's variable universe")
    raw = np.empty(uni.size, dtype=np.int64)
    for i, w in enumerate(strings):
        _, trace = run_dfa(t, w)
        raw[i * (uni.L + 1):(i + 1) * (uni.L + 1)] = trace
    if F.Q:
        clash = np.flatnonzero(raw[F.neq[:, 0]] == raw[F.neq[:, 1]])
        if clash.size:
            cl = Neq(*F.neq[clash[0]].tolist())
            raise InconsistentSampleError(f"automaton is inconsistent with the labels at {F.describe(cl)}")
    return Coloring.from_raw(uni, raw)
