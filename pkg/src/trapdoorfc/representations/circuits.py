"""Boolean circuits, Boolean formulas, and the circuit-to-formula unfolding."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence, Union

OPS = {"AND": 2, "OR": 2, "NOT": 1}


@dataclass(frozen=True)
class Gate:
    op: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class BooleanCircuit:
    """Wires ``0..inputs-1`` are inputs; gate g drives wire ``inputs + g``."""

    inputs: int
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        if self.inputs < 0:
            raise ValueError("negative input count")
        for g, gate in enumerate(self.gates):
            if gate.op not in OPS:
                raise ValueError(f"unknown gate {gate.op!r}")
            if len(gate.args) != OPS[gate.op]:
                raise ValueError(f"{gate.op} takes {OPS[gate.op]} inputs")
            if any(not 0 <= a < self.inputs + g for a in gate.args):
                raise ValueError(f"gate {g} references a wire that is not earlier")
        if not 0 <= self.output < self.inputs + len(self.gates):
            raise ValueError("output wire out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    def wire_depths(self) -> list[int]:
        depth = [0] * self.inputs
        for gate in self.gates:
            depth.append(1 + max(depth[a] for a in gate.args))
        return depth

    @property
    def depth(self) -> int:
        return self.wire_depths()[self.output]

    def to_json(self) -> str:
        doc = {"inputs": self.inputs, "output": self.output,
               "gates": [{"op": g.op, "in": list(g.args)} for g in self.gates]}
        return json.dumps(doc) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "BooleanCircuit":
        doc = json.loads(text)
        gates = tuple(Gate(g["op"], tuple(g["in"])) for g in doc["gates"])
        return cls(int(doc["inputs"]), gates, int(doc["output"]))


def _bits(x: Union[str, Sequence[int]]) -> list[int]:
    if isinstance(x, str):
        return [int(ch) for ch in x]
    return [int(b) for b in x]


def eval_circuit(c: BooleanCircuit, x: Union[str, Sequence[int]]) -> int:
    vals = _bits(x)
    if len(vals) != c.inputs:
        raise ValueError(f"circuit has {c.inputs} inputs, got {len(vals)} bits")
    for gate in c.gates:
        a = vals[gate.args[0]]
        if gate.op == "NOT":
            vals.append(1 - a)
        elif gate.op == "AND":
            vals.append(a & vals[gate.args[1]])
        else:
            vals.append(a | vals[gate.args[1]])
    return vals[c.output]


# formula nodes

@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    bit: int


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Const, Not, And, Or]


@dataclass(frozen=True)
class BooleanFormula:
    inputs: int
    root: Formula

    def __post_init__(self):
        if any(v >= self.inputs for v in _var_indices(self.root)):
            raise ValueError("formula references an undeclared input")

    @property
    def size(self) -> int:
        return formula_size(self.root)


def _var_indices(node: Formula):
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            yield cur.index
        elif isinstance(cur, Not):
            stack.append(cur.arg)
        elif isinstance(cur, (And, Or)):
            stack.extend((cur.left, cur.right))


def formula_size(node: Formula) -> int:
    if isinstance(node, (Var, Const)):
        return 1
    if isinstance(node, Not):
        return 1 + formula_size(node.arg)
    return 1 + formula_size(node.left) + formula_size(node.right)


def _eval_node(node: Formula, x: list[int]) -> int:
    if isinstance(node, Var):
        return x[node.index]
    if isinstance(node, Const):
        return node.bit
    if isinstance(node, Not):
        return 1 - _eval_node(node.arg, x)
    if isinstance(node, And):
        return _eval_node(node.left, x) & _eval_node(node.right, x)
    return _eval_node(node.left, x) | _eval_node(node.right, x)


def eval_formula(f: BooleanFormula, x: Union[str, Sequence[int]]) -> int:
    vals = _bits(x)
    if len(vals) != f.inputs:
        raise ValueError(f"formula has {f.inputs} inputs, got {len(vals)} bits")
    return _eval_node(f.root, vals)


# -- truth tables ---------------------------------------------------------------
# A table is an int whose bit x is the output on the input whose bit i
# (LSB first) is input wire i.

def _input_columns(n: int) -> list[int]:
    full = (1 << (1 << n)) - 1
    cols = []
    for i in range(n):
        block = ((1 << (1 << i)) - 1) << (1 << i)  # pattern 0..01..1 of period 2^(i+1)
        col, period = 0, 1 << (i + 1)
        for start in range(0, 1 << n, period):
            col |= block << start
        cols.append(col & full)
    return cols


def circuit_truth_table(c: BooleanCircuit) -> int:
    full = (1 << (1 << c.inputs)) - 1
    wires = _input_columns(c.inputs)
    for gate in c.gates:
        if gate.op == "NOT":
            wires.append(full ^ wires[gate.args[0]])
        elif gate.op == "AND":
            wires.append(wires[gate.args[0]] & wires[gate.args[1]])
        else:
            wires.append(wires[gate.args[0]] | wires[gate.args[1]])
    return wires[c.output]


def formula_truth_table(f: BooleanFormula) -> int:
    full = (1 << (1 << f.inputs)) - 1
    cols = _input_columns(f.inputs)

    def table(node: Formula) -> int:
        if isinstance(node, Var):
            return cols[node.index]
        if isinstance(node, Const):
            return full if node.bit else 0
        if isinstance(node, Not):
            return full ^ table(node.arg)
        if isinstance(node, And):
            return table(node.left) & table(node.right)
        return table(node.left) | table(node.right)

    return table(f.root)


def circuit_to_formula(c: BooleanCircuit, depth_cap: int = 16) -> BooleanFormula:
    """Unfold c into a tree from its output wire, duplicating shared wires.

    The tree has at most ``2**(depth+1) - 1`` nodes, which is why the depth
    is capped.
    """
    if c.depth > depth_cap:
        raise ValueError(f"circuit depth {c.depth} exceeds depth_cap {depth_cap}")
    def build(wire: int) -> Formula:
        if wire < c.inputs:
            return Var(wire)
        gate = c.gates[wire - c.inputs]
        if gate.op == "NOT":
            return Not(build(gate.args[0]))
        cls = And if gate.op == "AND" else Or
        return cls(build(gate.args[0]), build(gate.args[1]))

    return BooleanFormula(c.inputs, build(c.output))


def random_circuit(inputs: int, num_gates: int, max_depth: int, rng: random.Random) -> BooleanCircuit:
    """Random circuit whose output wire has depth at most ``max_depth``."""
    depth = [0] * inputs
    gates: list[Gate] = []
    for _ in range(num_gates):
        ok = [w for w, dw in enumerate(depth) if dw < max_depth]
        op = rng.choice(("AND", "OR", "NOT"))
        args = tuple(rng.choice(ok) for _ in range(OPS[op]))
        gates.append(Gate(op, args))
        depth.append(1 + max(depth[a] for a in args))
    return BooleanCircuit(inputs, tuple(gates), inputs + num_gates - 1 if num_gates else 0)
