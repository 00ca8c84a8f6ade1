"""Executable hypotheses for the RSA-trapdoored concept class."""
from __future__ import annotations

from dataclasses import dataclass

from ..instances import BitLayout, decode_example, make_layout
from ..numtheory import decrypt_lsb


@dataclass(frozen=True)
class CrsaHypothesis:
    """Decode a packed example and multiply out the powers selected by d.

    ``size`` counts one stage per modular multiplication (set bits of d)
    plus one per decoded field.
    """

    N: int
    e: int
    d: int
    layout: BitLayout

    @property
    def size(self) -> int:
        return bin(self.d).count("1") + self.layout.fields_per_example

    def __call__(self, w: str) -> int:
        ps, N, e = decode_example(w, self.layout)
        if (N, e) != (self.N, self.e):
            raise ValueError(f"example is keyed to (N={N}, e={e}), hypothesis to ({self.N}, {self.e})")
        return decrypt_lsb(ps, N, self.d)


def build_crsa_hypothesis(N: int, e: int, d: int) -> CrsaHypothesis:
    return CrsaHypothesis(N, e, d, make_layout(N, e))
