"""Toy RSA arithmetic and the classical factoring stand-in.

Everything here works on Python ints, so key material is never capped at a
machine word even though desk-scale moduli fit comfortably in 64 bits.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from . import kernels
from .errors import FactoringError, KeyGenError

# Deterministic Miller-Rabin witnesses; exact for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
TRIAL_DIVISION_LIMIT = 1 << 16
# below this modulus every product of two residues fits in a signed 64-bit word
WORD_MODULUS_LIMIT = 1 << 31
KEYGEN_ATTEMPTS = 2000


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """``base ** exponent mod modulus`` with ``0 ** 0`` taken to be 1."""
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base, exponent, modulus)


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) = s*a + t*b`` and ``g >= 0``."""
    if a == 0 and b == 0:
        raise ValueError("gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_s, s = s, old_s - quot * s
        old_t, t = t, old_t - quot * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def mod_inverse(a: int, modulus: int) -> int:
    g, s, _ = extended_gcd(a % modulus, modulus)
    if g != 1:
        raise ValueError(f"{a} is not invertible modulo {modulus}")
    return s % modulus


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def ceil_log2(n: int) -> int:
    """Smallest t with ``2**t >= n`` (n >= 1)."""
    if n < 1:
        raise ValueError("ceil_log2 needs n >= 1")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class RsaKey:
    p: int
    q: int
    N: int
    e: int
    d: int
    n: int

    def __post_init__(self):
        phi = (self.p - 1) * (self.q - 1)
        if self.p == self.q or not (is_prime(self.p) and is_prime(self.q)):
            raise ValueError("p and q must be distinct primes")
        if self.N != self.p * self.q:
            raise ValueError("N != p*q")
        if not (1 < self.e < phi and 1 < self.d < phi):
            raise ValueError("exponents out of range")
        if self.e * self.d % phi != 1:
            raise ValueError("e*d != 1 mod phi(N)")
        if self.n != self.N.bit_length():
            raise ValueError("n must be the bit length of N")

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    def to_json(self) -> str:
        doc = {k: format(getattr(self, k), "x") for k in ("p", "q", "N", "e", "d")}
        doc["n"] = self.n
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RsaKey":
        doc = json.loads(text)
        vals = {k: int(doc[k], 16) for k in ("p", "q", "N", "e", "d")}
        return cls(n=int(doc["n"]), **vals)


def smallest_public_exponent(phi: int) -> int | None:
    """Smallest e >= 3 with gcd(e, phi) = 1 and e < phi, or None."""
    for e in range(3, phi):
        if math.gcd(e, phi) == 1:
            return e
    return None


def key_from_primes(p: int, q: int, e: int | None = None) -> RsaKey:
    p, q = sorted((p, q))
    phi = (p - 1) * (q - 1)
    if e is None:
        e = smallest_public_exponent(phi)
        if e is None:
            raise KeyGenError(f"no valid public exponent for p={p}, q={q}")
    d = recover_secret_exponent(e, p, q)
    N = p * q
    return RsaKey(p=p, q=q, N=N, e=e, d=d, n=N.bit_length())


def _random_prime(bits: int, rng: random.Random) -> int | None:
    lo, hi = 1 << (bits - 1), 1 << bits
    for _ in range(64 * bits):
        cand = rng.randrange(lo, hi)
        if is_prime(cand):
            return cand
    return None


def keygen(bits_per_prime: int, seed: int) -> RsaKey:
    """Draw two distinct primes of exactly ``bits_per_prime`` bits.

    The public exponent is the smallest ``e >= 3`` coprime to phi(N).
    """
    if bits_per_prime < 2:
        raise ValueError("bits_per_prime must be >= 2")
    rng = random.Random(seed)
    for _ in range(KEYGEN_ATTEMPTS):
        p = _random_prime(bits_per_prime, rng)
        q = _random_prime(bits_per_prime, rng)
        if p is None or q is None or p == q:
            continue
        try:
            return key_from_primes(p, q)
        except KeyGenError:
            continue
    raise KeyGenError(f"no valid key at this size (bits_per_prime={bits_per_prime})")


def rsa_encrypt(x: int, N: int, e: int) -> int:
    return mod_pow(x, e, N)


def powers(y: int, N: int) -> tuple[int, ...]:
    """The first ceil(log2 N) + 1 repeated squarings of y modulo N."""
    if not 0 <= y < N:
        raise ValueError(f"y={y} not in Z_{N}")
    if N < WORD_MODULUS_LIMIT:
        return kernels.backend().powers_word(y, N)
    out = [y]
    for _ in range((N - 1).bit_length()):
        y = y * y % N
        out.append(y)
    return tuple(out)


def check_powers(entries: Sequence[int], N: int) -> None:
    """Raise ValueError unless ``entries`` is a valid powers sequence mod N."""
    if len(entries) != ceil_log2(N) + 1:
        raise ValueError(f"expected {ceil_log2(N) + 1} powers, got {len(entries)}")
    for t, v in enumerate(entries):
        if not 0 <= v < N:
            raise ValueError(f"power {t} = {v} outside Z_{N}")
        if t and v != entries[t - 1] * entries[t - 1] % N:
            raise ValueError(f"power {t} is not the square of power {t - 1}")


def decrypt_lsb(ps: Sequence[int], N: int, d: int) -> int:
    """LSB of the product of the powers selected by the set bits of d.

    For ``ps = powers(x**e mod N)`` and the matching secret exponent this is
    ``x mod 2``; the empty product (d = 0) is 1.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    if d.bit_length() > len(ps):
        raise ValueError(f"d needs {d.bit_length()} powers, only {len(ps)} available")
    if N < WORD_MODULUS_LIMIT and d < 1 << 64:
        return kernels.backend().decrypt_lsb_word(ps, N, d)
    acc = 1 % N
    t = 0
    while d:
        if d & 1:
            acc = acc * ps[t] % N
        d >>= 1
        t += 1
    return acc & 1


def recover_secret_exponent(e: int, p: int, q: int) -> int:
    phi = (p - 1) * (q - 1)
    g, s, _ = extended_gcd(e, phi)
    if g != 1:
        raise ValueError(f"e={e} is not invertible modulo (p-1)(q-1)={phi}")
    d = s % phi
    # phi == 1 or 2 makes every residue its own inverse; keep d in (0, phi)
    return d if d else phi


def _pollard_brent(n: int, seed: int, max_iter: int) -> int | None:
    rng = random.Random(seed)
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), rng.randrange(1, n)
    g = r = q = 1
    x = ys = 0
    spent = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        spent += r
        if spent > max_iter:
            return None
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def _seed_sequence() -> Iterator[int]:
    s = 0
    while True:
        yield s
        s += 1


def factor_semiprime(N: int, *, max_restarts: int = 64, max_iter: int = 1 << 22) -> tuple[int, int]:
    """Split N into ``(p, q)`` with ``p <= q`` and ``p * q == N``.

    Trial division below 2**16, then Brent's Pollard rho over a fixed seed
    sequence. For non-semiprimes the first split found is returned and the
    caller is expected to validate it.
    """
    if N < 4:
        raise ValueError("N must be >= 4")
    if is_prime(N):
        raise FactoringError(f"prime input: {N}")
    limit = min(TRIAL_DIVISION_LIMIT, math.isqrt(N))
    if N % 2 == 0:
        return 2, N // 2
    for f in range(3, limit + 1, 2):
        if N % f == 0:
            return f, N // f
    seeds = _seed_sequence()
    for _ in range(max_restarts):
        f = _pollard_brent(N, next(seeds), max_iter)
        if f and 1 < f < N:
            p, q = sorted((f, N // f))
            return p, q
    raise FactoringError(f"factoring budget exhausted for N={N}")
