"""Deterministic finite automata over {0, 1}."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..errors import InconsistentSampleError


@dataclass(frozen=True)
class Dfa:
    """States are ``0..num_states-1`` and state 0 is the start state."""

    num_states: int
    accepting: frozenset[int]
    delta: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.num_states < 1 or len(self.delta) != self.num_states:
            raise ValueError("delta must have one row per state")
        for row in self.delta:
            if len(row) != 2 or not all(0 <= s < self.num_states for s in row):
                raise ValueError("delta must be total over states x {0, 1}")
        if not all(0 <= s < self.num_states for s in self.accepting):
            raise ValueError("accepting state out of range")

    start = 0

    def accepts(self, w: str | Sequence[int]) -> bool:
        return run_dfa(self, w)[0] in self.accepting

    def to_json(self) -> str:
        doc = {"states": self.num_states, "accepting": sorted(self.accepting),
               "delta": [list(r) for r in self.delta]}
        return json.dumps(doc) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Dfa":
        doc = json.loads(text)
        return cls(int(doc["states"]), frozenset(doc["accepting"]),
                   tuple((int(a), int(b)) for a, b in doc["delta"]))


def run_dfa(t: Dfa, w: str | Sequence[int]) -> tuple[int, list[int]]:
    """Return the final state and the full trace (length ``len(w) + 1``)."""
    s = 0
    trace = [s]
    delta = t.delta
    for ch in w:
        s = delta[s][int(ch)]
        trace.append(s)
    return s, trace


def build_prefix_tree_dfa(sample: Iterable[tuple[str, int]]) -> Dfa:
    """Trie acceptor for the positive strings, completed by a rejecting sink."""
    children: list[list[int | None]] = [[None, None]]
    label: list[int | None] = [None]
    for w, b in sample:
        s = 0
        for ch in w:
            bit = int(ch)
            nxt = children[s][bit]
            if nxt is None:
                nxt = len(children)
                children.append([None, None])
                label.append(None)
                children[s][bit] = nxt
            s = nxt
        if label[s] is not None and label[s] != b:
            raise InconsistentSampleError(f"string {w!r} carries contradictory labels")
        label[s] = int(b)
    sink = len(children)
    delta = tuple(tuple(sink if c is None else c for c in row) for row in children)
    delta += ((sink, sink),)
    accepting = frozenset(s for s, b in enumerate(label) if b == 1)
    return Dfa(sink + 1, accepting, delta)


def reachable_states(t: Dfa) -> list[int]:
    seen = [False] * t.num_states
    seen[0] = True
    order = [0]
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for nxt in t.delta[s]:
            if not seen[nxt]:
                seen[nxt] = True
                order.append(nxt)
                queue.append(nxt)
    return order


def minimize_dfa(t: Dfa) -> Dfa:
    """Hopcroft partition refinement on the reachable part of t.

    Output states are numbered in breadth-first order from the start state,
    taking the 0-successor before the 1-successor, so equal languages give
    identical automata.
    """
    states = reachable_states(t)
    inverse: list[dict[int, list[int]]] = [{}, {}]
    for s in states:
        for bit in (0, 1):
            inverse[bit].setdefault(t.delta[s][bit], []).append(s)

    acc = {s for s in states if s in t.accepting}
    rej = set(states) - acc
    blocks = [blk for blk in (acc, rej) if blk]
    block_of = {s: idx for idx, blk in enumerate(blocks) for s in blk}
    work = [min(range(len(blocks)), key=lambda i: len(blocks[i]))] if len(blocks) == 2 else []
    in_work = set(work)
    while work:
        b = work.pop()
        in_work.discard(b)
        splitter = list(blocks[b])
        for bit in (0, 1):
            touched: dict[int, set[int]] = {}
            for s in splitter:
                for p in inverse[bit].get(s, ()):
                    touched.setdefault(block_of[p], set()).add(p)
            for bid, inter in touched.items():
                blk = blocks[bid]
                if len(inter) == len(blk):
                    continue
                blk -= inter
                nid = len(blocks)
                blocks.append(inter)
                for p in inter:
                    block_of[p] = nid
                if bid in in_work or len(inter) <= len(blk):
                    work.append(nid)
                    in_work.add(nid)
                else:
                    work.append(bid)
                    in_work.add(bid)

    partition = blocks
    rep = [min(blk) for blk in partition]
    new_id = {block_of[0]: 0}
    order = [block_of[0]]
    queue = deque(order)
    while queue:
        b = queue.popleft()
        for bit in (0, 1):
            nb = block_of[t.delta[rep[b]][bit]]
            if nb not in new_id:
                new_id[nb] = len(order)
                order.append(nb)
                queue.append(nb)
    delta = tuple(tuple(new_id[block_of[t.delta[rep[b]][bit]]] for bit in (0, 1)) for b in order)
    accepting = frozenset(new_id[b] for b in order if rep[b] in t.accepting)
    return Dfa(len(order), accepting, delta)
