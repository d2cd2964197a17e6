"""Seeded modular secrecy layer.

The transmitter maps a message m and fresh local randomness r through the
stochastic inverse of a seeded Toeplitz hash; the receiver recovers m by
hashing the decoded word.  The seed s = (a, t) selects one member of the
two-universal family and is public: security rests on the channel advantage,
not on hiding s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitVec, ToeplitzMatrix, toeplitz_from_seed


@dataclass(frozen=True)
class SecrecyParams:
    """Message length k and hash input length l.

    k == l is the degenerate deterministic encoder (no local randomness),
    kept for the exact-distinguisher limit checks.
    """

    k: int
    l: int

    def __post_init__(self):
        if not (1 <= self.k <= self.l):
            raise ValueError(f"need 1 <= k <= l, got k={self.k}, l={self.l}")

    @property
    def randomness_len(self) -> int:
        return self.l - self.k

    def secrecy_rate(self, n: int) -> float:
        """Message bits per complex symbol for an n-bit QPSK codeword."""
        return self.k / (n / 2)


@dataclass(frozen=True)
class SecrecySeed:
    """Public hash seed: Toeplitz diagonal a (l-1 bits) and offset t (k bits)."""

    a: BitVec
    t: BitVec

    def validate(self, p: SecrecyParams) -> None:
        if p.randomness_len > 0 and len(self.a) != p.l - 1:
            raise ValueError(f"seed a has length {len(self.a)}, expected {p.l - 1}")
        if len(self.t) != p.k:
            raise ValueError(f"seed t has length {len(self.t)}, expected {p.k}")

    def matrix(self, p: SecrecyParams) -> ToeplitzMatrix:
        if p.randomness_len == 0:
            raise ValueError("l == k has no hash matrix")
        self.validate(p)
        return toeplitz_from_seed(self.a, p.k, p.l - p.k)

    def to_hex(self) -> str:
        """Serialized as hex of a followed by hex of t (lengths carried separately)."""
        return f"{self.a.to_hex()}:{self.t.to_hex()}"

    @classmethod
    def from_hex(cls, text: str, p: SecrecyParams) -> "SecrecySeed":
        a_hex, t_hex = text.split(":")
        return cls(BitVec.from_hex(a_hex, p.l - 1), BitVec.from_hex(t_hex, p.k))


def draw_seed(p: SecrecyParams, rng: np.random.Generator) -> SecrecySeed:
    """Uniform seed over F2^(l-1) x F2^k; reproducible for a fixed rng state."""
    return SecrecySeed(a=BitVec.random(p.l - 1, rng), t=BitVec.random(p.k, rng))


def draw_randomness(p: SecrecyParams, rng: np.random.Generator):
    """Uniform encoder randomness of length l-k, or None when l == k."""
    if p.randomness_len == 0:
        return None
    return BitVec.random(p.l - p.k, rng)


def secrecy_encode(m: BitVec, r, seed: SecrecySeed, p: SecrecyParams) -> BitVec:
    """Stochastic encoder: v = [r, (A_a r) + m + t] over GF(2).

    Deterministic given (m, r, seed); the caller supplies fresh uniform r per
    transmission.  With l == k, r must be None and v = m + t.
    """
    if len(m) != p.k:
        raise ValueError(f"message length {len(m)} != k = {p.k}")
    if p.randomness_len == 0:
        if r is not None:
            raise ValueError("l == k admits no randomness; pass r=None")
        return m ^ seed.t
    if r is None or len(r) != p.randomness_len:
        raise ValueError(f"randomness length must be l - k = {p.randomness_len}")
    mat = seed.matrix(p)
    tail = mat.matvec(r) ^ m ^ seed.t
    return r.concat(tail)


def secrecy_decode(v_hat: BitVec, seed: SecrecySeed, p: SecrecyParams) -> BitVec:
    """Hash decoder: m = [A_a, I] v_hat + t."""
    if len(v_hat) != p.l:
        raise ValueError(f"input length {len(v_hat)} != l = {p.l}")
    tail = v_hat[p.randomness_len:]
    if p.randomness_len == 0:
        return tail ^ seed.t
    head = v_hat[: p.randomness_len]
    return seed.matrix(p).matvec(head) ^ tail ^ seed.t
