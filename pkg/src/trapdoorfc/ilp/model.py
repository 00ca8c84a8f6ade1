"""Integer linear programs stored as compressed sparse rows.

Variables belong to a fixed set of families (``w_i``, ``x_u_i``,
``zhat_u``, ``a_j``, ``b_j``, ``s_j``, ``q_j``, ``qp_j``) and are always
kept in canonical order: family, then indices. Constraint rows keep their
emission order. All arithmetic is on int64 arrays; nothing is floating
point.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..fc import Verdict

FAMILIES = ("w", "x", "zhat", "a", "b", "s", "q", "qp")
FAMILY_CODE = {f: c for c, f in enumerate(FAMILIES)}
_NAME_RE = re.compile(r"^(w|x|zhat|a|b|s|q|qp)_(\d+)(?:_(\d+))?$")

LE, EQ, GE = -1, 0, 1
REL_TEXT = {LE: "<=", EQ: "=", GE: ">="}
REL_CODE = {"<=": LE, "=<": LE, "=": EQ, "==": EQ, ">=": GE, "=>": GE}

# Constraint provenance tags, in emission order.
TAGS = (
    "assign_one",      # every variable takes exactly one color
    "assign_link_ub",  # x_{u,i} = 1 forces zhat_u <= i
    "assign_link_lb",  # x_{u,i} = 1 forces zhat_u >= i
    "color_used",      # x_{u,i} <= w_i
    "neq",             # x_{u,i} + x_{v,i} <= 1 for each Neq clause and color
    "eq_ind_ub",       # a = 1 forces zhat_k <= zhat_l
    "eq_ind_lb",       # a = 1 forces zhat_k >= zhat_l
    "eq_ind_lt",       # a = 0, q = 1 forces zhat_k < zhat_l
    "eq_ind_gt",       # a = 0, q = 0 forces zhat_k > zhat_l
    "ne_ind_lt",       # b = 1, q' = 1 forces zhat_u < zhat_v
    "ne_ind_gt",       # b = 1, q' = 0 forces zhat_u > zhat_v
    "ne_ind_ub",       # b = 0 forces zhat_u <= zhat_v
    "ne_ind_lb",       # b = 0 forces zhat_u >= zhat_v
    "or_ge_a",         # s >= a
    "or_ge_b",         # s >= b
    "or_le",           # s <= a + b
    "clause_sat",      # s >= 1
)
TAG_CODE = {t: c for c, t in enumerate(TAGS)}


def var_name(family: int, i1: int, i2: int) -> str:
    fam = FAMILIES[family]
    return f"x_{i1}_{i2}" if fam == "x" else f"{fam}_{i1}"


def parse_var_name(name: str) -> tuple[int, int, int]:
    mt = _NAME_RE.match(name)
    if not mt:
        raise ValueError(f"not a model variable name: {name!r}")
    fam, i1, i2 = mt.group(1), int(mt.group(2)), mt.group(3)
    if (fam == "x") != (i2 is not None):
        raise ValueError(f"malformed variable name {name!r}")
    return FAMILY_CODE[fam], i1, int(i2) if i2 is not None else 0


@dataclass(frozen=True)
class IlpVar:
    name: str
    lower: int
    upper: int


@dataclass(frozen=True)
class LinearConstraint:
    terms: tuple[tuple[int, str], ...]
    relation: str
    rhs: int
    tag: str


def _var_keys(family, i1, i2) -> np.ndarray:
    if len(i1) and (i1.max() >= 1 << 28 or i2.max() >= 1 << 28):
        raise ValueError("variable index too large")
    return (family.astype(np.int64) << 56) | (i1 << 28) | i2


def _ro(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


class IlpModel:
    """``minimize sum(objective vars)`` subject to tagged linear rows."""

    def __init__(self, family, i1, i2, lower, upper, row_ptr, cols, coefs, sense, rhs, tags,
                 objective, source: dict | None = None):
        self.family = _ro(family, np.int8)
        self.i1 = _ro(i1, np.int64)
        self.i2 = _ro(i2, np.int64)
        self.lower = _ro(lower, np.int64)
        self.upper = _ro(upper, np.int64)
        self.row_ptr = _ro(row_ptr, np.int64)
        self.cols = _ro(cols, np.int32)
        self.coefs = _ro(coefs, np.int64)
        self.sense = _ro(sense, np.int8)
        self.rhs = _ro(rhs, np.int64)
        self.tags = _ro(tags, np.int8)
        self.objective = _ro(objective, np.int64)
        self.source = source
        self._validate()

    def _validate(self):
        n = self.num_vars
        if not (len(self.i1) == len(self.i2) == len(self.lower) == len(self.upper) == n):
            raise ValueError("variable arrays disagree in length")
        if np.any(self.lower > self.upper):
            raise ValueError("variable with lower > upper")
        key = _var_keys(self.family, self.i1, self.i2)
        if n > 1 and np.any(np.diff(key) <= 0):
            raise ValueError("variables must be unique and in canonical order")
        if len(self.row_ptr) != self.num_constraints + 1 or self.row_ptr[0] != 0:
            raise ValueError("bad row pointer")
        if self.row_ptr[-1] != len(self.cols) or len(self.cols) != len(self.coefs):
            raise ValueError("row pointer does not match term arrays")
        if len(self.cols) and (self.cols.min() < 0 or self.cols.max() >= n):
            raise ValueError("constraint references an undeclared variable")
        if np.any(self.coefs == 0):
            raise ValueError("zero coefficient in a constraint")
        if len(self.objective) and (self.objective.min() < 0 or self.objective.max() >= n):
            raise ValueError("objective references an undeclared variable")
        if not np.all(self.family[self.objective] == FAMILY_CODE["w"]):
            raise ValueError("objective variables must be the w family")

    # -- sizes and statistics -------------------------------------------------
    @property
    def num_vars(self) -> int:
        return len(self.family)

    @property
    def num_constraints(self) -> int:
        return len(self.rhs)

    def family_count(self, fam: str) -> int:
        return int(np.count_nonzero(self.family == FAMILY_CODE[fam]))

    @property
    def M(self) -> int:
        return self.family_count("zhat")

    @property
    def R(self) -> int:
        return self.family_count("a")

    @property
    def Q(self) -> int:
        M = self.M
        return int(np.count_nonzero(self.tags == TAG_CODE["neq"])) // M if M else 0

    @property
    def big_m(self) -> int:
        return 2 * self.M

    # -- element views ---------------------------------------------------------
    def var_name(self, idx: int) -> str:
        return var_name(int(self.family[idx]), int(self.i1[idx]), int(self.i2[idx]))

    def var_names(self) -> list[str]:
        return [var_name(f, a, b) for f, a, b in zip(self.family.tolist(), self.i1.tolist(), self.i2.tolist())]

    def var(self, idx: int) -> IlpVar:
        return IlpVar(self.var_name(idx), int(self.lower[idx]), int(self.upper[idx]))

    def index_of(self, name: str) -> int:
        f, a, b = parse_var_name(name)
        key = _var_keys(self.family, self.i1, self.i2)
        want = (f << 56) | (a << 28) | b
        pos = int(np.searchsorted(key, want))
        if pos >= len(key) or key[pos] != want:
            raise KeyError(name)
        return pos

    def family_indices(self, fam: str) -> np.ndarray:
        return np.flatnonzero(self.family == FAMILY_CODE[fam])

    def constraint(self, r: int) -> LinearConstraint:
        s, e = int(self.row_ptr[r]), int(self.row_ptr[r + 1])
        terms = tuple((int(c), self.var_name(int(v))) for c, v in zip(self.coefs[s:e], self.cols[s:e]))
        return LinearConstraint(terms, REL_TEXT[int(self.sense[r])], int(self.rhs[r]), TAGS[int(self.tags[r])])

    def constraints(self) -> Iterable[LinearConstraint]:
        for r in range(self.num_constraints):
            yield self.constraint(r)

    def row_names(self) -> list[str]:
        return [f"{TAGS[t]}_{r + 1}" for r, t in enumerate(self.tags.tolist())]

    def __eq__(self, other):
        if not isinstance(other, IlpModel):
            return NotImplemented
        fields = ("family", "i1", "i2", "lower", "upper", "row_ptr", "cols", "coefs", "sense", "rhs",
                  "tags", "objective")
        return all(np.array_equal(getattr(self, f), getattr(other, f)) for f in fields) and \
            self.source == other.source

    def digest(self) -> str:
        """SHA-256 over the source and every array, little-endian with lengths."""
        h = hashlib.sha256(json.dumps(self.source, sort_keys=True).encode())
        for f in ("family", "i1", "i2", "lower", "upper", "row_ptr", "cols", "coefs", "sense", "rhs", "tags",
                  "objective"):
            arr = getattr(self, f)
            h.update(np.int64(len(arr)).tobytes())
            h.update(arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes())
        return h.hexdigest()

    def __repr__(self):
        return f"IlpModel(vars={self.num_vars}, constraints={self.num_constraints}, M={self.M}, R={self.R})"

    # -- construction from explicit rows -------------------------------------
    @classmethod
    def from_rows(cls, variables: Sequence[IlpVar], constraints: Sequence[LinearConstraint],
                  objective: Sequence[str], source: dict | None = None) -> "IlpModel":
        """Build a model from element objects (small, hand-written models)."""
        parsed = [(parse_var_name(v.name), v) for v in variables]
        if len({p for p, _ in parsed}) != len(parsed):
            raise ValueError("duplicate variable")
        parsed.sort(key=lambda t: t[0])
        names = {v.name: k for k, (_, v) in enumerate(parsed)}
        row_ptr, cols, coefs, sense, rhs, tags = [0], [], [], [], [], []
        for con in constraints:
            seen = set()
            for c, name in con.terms:
                if name not in names:
                    raise ValueError(f"constraint references undeclared variable {name!r}")
                if name in seen:
                    raise ValueError(f"variable {name!r} repeated inside one constraint")
                seen.add(name)
                cols.append(names[name])
                coefs.append(int(c))
            row_ptr.append(len(cols))
            sense.append(REL_CODE[con.relation])
            rhs.append(int(con.rhs))
            tags.append(TAG_CODE[con.tag])
        return cls(
            [p[0] for p, _ in parsed], [p[1] for p, _ in parsed], [p[2] for p, _ in parsed],
            [v.lower for _, v in parsed], [v.upper for _, v in parsed],
            row_ptr, cols, coefs, sense, rhs, tags,
            sorted(names[o] for o in objective), source,
        )

    # -- JSON ------------------------------------------------------------------
    def to_dict(self) -> dict:
        names = self.var_names()
        cons = []
        for r in range(self.num_constraints):
            s, e = int(self.row_ptr[r]), int(self.row_ptr[r + 1])
            cons.append({
                "terms": [[c, names[v]] for c, v in zip(self.coefs[s:e].tolist(), self.cols[s:e].tolist())],
                "rel": REL_TEXT[int(self.sense[r])],
                "rhs": int(self.rhs[r]),
                "tag": TAGS[int(self.tags[r])],
            })
        return {
            "vars": [{"name": nm, "lower": lo, "upper": hi}
                     for nm, lo, hi in zip(names, self.lower.tolist(), self.upper.tolist())],
            "constraints": cons,
            "objective": [names[i] for i in self.objective.tolist()],
            "stats": {"M": self.M, "Q": self.Q, "R": self.R},
            "source": self.source,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "IlpModel":
        variables = [IlpVar(v["name"], int(v["lower"]), int(v["upper"])) for v in doc["vars"]]
        cons = [LinearConstraint(tuple((int(c), n) for c, n in con["terms"]), con["rel"], int(con["rhs"]), con["tag"])
                for con in doc["constraints"]]
        return cls.from_rows(variables, cons, doc["objective"], doc.get("source"))

    @classmethod
    def from_json(cls, text: str) -> "IlpModel":
        return cls.from_dict(json.loads(text))


class IlpAssignment:
    """One integer value per model variable, in the model's variable order."""

    def __init__(self, values):
        values = np.ascontiguousarray(values, dtype=np.int64)
        values.setflags(write=False)
        self.values = values

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, IlpAssignment):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"IlpAssignment({self.values.tolist()})"

    def objective(self, model: IlpModel) -> int:
        return int(self.values[model.objective].sum())

    def value(self, model: IlpModel, name: str) -> int:
        return int(self.values[model.index_of(name)])

    def replace(self, model: IlpModel, **updates: int) -> "IlpAssignment":
        vals = self.values.copy()
        for name, v in updates.items():
            vals[model.index_of(name)] = v
        return IlpAssignment(vals)

    def to_dict(self, model: IlpModel) -> dict:
        return {"objective": self.objective(model),
                "values": dict(zip(model.var_names(), self.values.tolist()))}

    def to_json(self, model: IlpModel) -> str:
        return json.dumps(self.to_dict(model), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, model: IlpModel, doc: dict) -> "IlpAssignment":
        vals = doc["values"]
        names = model.var_names()
        missing = [n for n in names if n not in vals]
        if missing:
            raise ValueError(f"assignment misses variable {missing[0]!r}")
        return cls([int(vals[n]) for n in names])


def row_activity(model: IlpModel, values: np.ndarray) -> np.ndarray:
    if model.num_constraints == 0:
        return np.zeros(0, dtype=np.int64)
    prod = model.coefs * values[model.cols]
    act = np.add.reduceat(prod, model.row_ptr[:-1]) if len(prod) else np.zeros(model.num_constraints, np.int64)
    # reduceat repeats the next element for empty rows
    empty = model.row_ptr[1:] == model.row_ptr[:-1]
    act[empty] = 0
    return act


def verify_assignment(model: IlpModel, A: IlpAssignment) -> Verdict:
    """Exact check of every bound, then every row in order."""
    if len(A) != model.num_vars:
        raise ValueError(f"assignment has {len(A)} values, model has {model.num_vars} variables")
    v = A.values
    bad = np.flatnonzero((v < model.lower) | (v > model.upper))
    if bad.size:
        idx = int(bad[0])
        return Verdict(False, ("bound", idx),
                       f"bound violated: {model.var_name(idx)} = {int(v[idx])} not in "
                       f"[{int(model.lower[idx])}, {int(model.upper[idx])}]")
    act = row_activity(model, v)
    s, rhs = model.sense, model.rhs
    viol = ((s == LE) & (act > rhs)) | ((s == GE) & (act < rhs)) | ((s == EQ) & (act != rhs))
    bad = np.flatnonzero(viol)
    if bad.size:
        r = int(bad[0])
        tag = TAGS[int(model.tags[r])]
        return Verdict(False, (tag, r), f"constraint {tag}_{r + 1} violated: activity {int(act[r])} "
                                         f"{REL_TEXT[int(s[r])]} {int(rhs[r])} fails")
    return Verdict(True)
