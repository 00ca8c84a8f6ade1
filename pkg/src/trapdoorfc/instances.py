"""Labeled samples of the RSA-trapdoored concept class and their bit layout.

An example string packs ``powers(x**e mod N) || N || e``; every field is
``n = bit_length(N)`` bits wide, big-endian and zero padded.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Sequence

from .errors import DecodeError
from .numtheory import RsaKey, ceil_log2, check_powers, powers, rsa_encrypt

REPETITIONS = 1


@dataclass(frozen=True)
class BitLayout:
    n: int
    fields_per_example: int

    @property
    def field_width(self) -> int:
        return self.n

    @property
    def num_powers(self) -> int:
        return self.fields_per_example - 2

    @property
    def total_bits(self) -> int:
        return self.n * self.fields_per_example

    @property
    def lsb_of_N_position(self) -> int:
        """1-based index of the last bit of the N field."""
        return self.n * (self.fields_per_example - 1)

    def to_dict(self) -> dict:
        return {"n": self.n, "total_bits": self.total_bits, "repetitions": REPETITIONS}

    @classmethod
    def from_dict(cls, doc: dict) -> "BitLayout":
        n, total = int(doc["n"]), int(doc["total_bits"])
        if n < 1 or total % n:
            raise ValueError(f"total_bits={total} is not a multiple of n={n}")
        if int(doc.get("repetitions", REPETITIONS)) != REPETITIONS:
            raise ValueError("only one repetition per example is supported")
        return cls(n=n, fields_per_example=total // n)


def make_layout(N: int, e: int) -> BitLayout:
    if N < 4:
        raise ValueError("N must be >= 4")
    n = N.bit_length()
    if not 0 <= e < (1 << n):
        raise ValueError(f"e={e} does not fit in {n} bits")
    return BitLayout(n=n, fields_per_example=ceil_log2(N) + 3)


def _field(v: int, width: int) -> str:
    return format(v, f"0{width}b")


def encode_example(ps: Sequence[int], N: int, e: int, layout: BitLayout) -> str:
    if len(ps) != layout.num_powers:
        raise ValueError(f"layout expects {layout.num_powers} powers, got {len(ps)}")
    return "".join(_field(v, layout.n) for v in (*ps, N, e))


def decode_example(w: str, layout: BitLayout) -> tuple[tuple[int, ...], int, int]:
    """Inverse of :func:`encode_example`; rejects corrupted payloads."""
    if len(w) != layout.total_bits:
        raise DecodeError(f"length mismatch: expected {layout.total_bits} bits, got {len(w)}")
    if set(w) - {"0", "1"}:
        raise DecodeError("example strings may only contain 0 and 1")
    n = layout.n
    vals = [int(w[i:i + n], 2) for i in range(0, len(w), n)]
    *ps, N, e = vals
    if N < 4 or N.bit_length() != n:
        raise DecodeError(f"decoded modulus {N} does not have {n} bits")
    try:
        check_powers(ps, N)
    except ValueError as exc:
        raise DecodeError(f"squaring invariant violated: {exc}") from None
    return tuple(ps), N, e


@dataclass(frozen=True)
class LabeledExample:
    w: str
    b: int
    x: int | None = None


@dataclass(frozen=True)
class LabeledSample:
    N: int
    e: int
    layout: BitLayout
    examples: tuple[LabeledExample, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.examples:
            raise ValueError("a sample needs at least one example")
        ws = [ex.w for ex in self.examples]
        if len(set(ws)) != len(ws):
            raise ValueError("example strings must be pairwise distinct")
        if any(len(w) != self.layout.total_bits for w in ws):
            raise ValueError("example strings must match the layout length")

    @property
    def m(self) -> int:
        return len(self.examples)

    @property
    def strings(self) -> list[str]:
        return [ex.w for ex in self.examples]

    @property
    def labels(self) -> list[int]:
        return [ex.b for ex in self.examples]

    def public(self) -> "LabeledSample":
        """Copy with the plaintexts stripped (the hardness-side instance)."""
        exs = tuple(LabeledExample(ex.w, ex.b) for ex in self.examples)
        return LabeledSample(self.N, self.e, self.layout, exs)

    def to_json(self, public: bool = False) -> str:
        exs = []
        for ex in self.examples:
            doc = {"w": ex.w, "b": ex.b}
            if ex.x is not None and not public:
                doc["x"] = format(ex.x, "x")
            exs.append(doc)
        doc = {"N": format(self.N, "x"), "e": format(self.e, "x"),
               "layout": self.layout.to_dict(), "examples": exs}
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LabeledSample":
        doc = json.loads(text)
        N, e = int(doc["N"], 16), int(doc["e"], 16)
        layout = BitLayout.from_dict(doc["layout"])
        if layout != make_layout(N, e):
            raise ValueError("layout block does not match N and e")
        exs = tuple(
            LabeledExample(ex["w"], int(ex["b"]), int(ex["x"], 16) if "x" in ex else None)
            for ex in doc["examples"]
        )
        return cls(N, e, layout, exs)


def generate_sample(key: RsaKey, m: int, seed: int) -> LabeledSample:
    """Draw m distinct plaintexts from Z_N and label each with its LSB."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > key.N:
        raise ValueError(f"cannot draw {m} distinct plaintexts from Z_{key.N}")
    layout = make_layout(key.N, key.e)
    rng = random.Random(seed)
    xs = rng.sample(range(key.N), m)
    exs = tuple(
        LabeledExample(encode_example(powers(rsa_encrypt(x, key.N, key.e), key.N), key.N, key.e, layout),
                       x & 1, x)
        for x in xs
    )
    return LabeledSample(key.N, key.e, layout, exs)
