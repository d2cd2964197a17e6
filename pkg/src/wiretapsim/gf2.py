"""GF(2) bit vectors, the seeded Toeplitz matrix family, and CRC arithmetic.

Everything here is pure and immutable after construction; these primitives
carry the messages, local randomness, hash seeds and codewords used by the
secrecy and coding layers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class BitVec:
    """Fixed-length vector over GF(2).

    Bits are stored as a read-only ``uint8`` array of 0/1 values; index 0 is
    the first bit.  Equality is positionwise, ``^`` is elementwise XOR.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("BitVec requires a non-empty 1-D bit sequence")
        if np.any(arr > 1):
            raise ValueError("BitVec entries must be 0 or 1")
        arr = arr.copy()
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitVec":
        """Uniform random vector drawn from ``rng``."""
        return cls(rng.integers(0, 2, size=n, dtype=np.uint8))

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitVec":
        """Big-endian expansion of ``value`` into ``n`` bits."""
        if value < 0 or value >= (1 << n):
            raise ValueError(f"value {value} does not fit in {n} bits")
        return cls([(value >> (n - 1 - i)) & 1 for i in range(n)])

    @classmethod
    def from_hex(cls, hexstr: str, n: int) -> "BitVec":
        return cls.from_int(int(hexstr, 16), n)

    @property
    def bits(self) -> np.ndarray:
        """The underlying read-only uint8 array."""
        return self._bits

    def to_hex(self) -> str:
        """Big-endian hex string; inverse of :meth:`from_hex` given the length."""
        width = (len(self) + 3) // 4
        return format(self.to_int(), f"0{width}x")

    def to_int(self) -> int:
        value = 0
        for b in self._bits:
            value = (value << 1) | int(b)
        return value

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(np.concatenate([self._bits, other._bits]))

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return BitVec(self._bits[idx])
        return int(self._bits[idx])

    def __xor__(self, other: "BitVec") -> "BitVec":
        if len(self) != len(other):
            raise ValueError("XOR of BitVecs with different lengths")
        return BitVec(self._bits ^ other._bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return len(self) == len(other) and bool(np.all(self._bits == other._bits))

    def __hash__(self) -> int:
        return hash((len(self), self._bits.tobytes()))

    def __repr__(self) -> str:
        body = "".join(str(int(b)) for b in self._bits[:64])
        tail = "..." if len(self) > 64 else ""
        return f"BitVec({body}{tail}, len={len(self)})"


class ToeplitzMatrix:
    """k x (l-k) binary Toeplitz matrix defined by a diagonal seed.

    Entry convention: ``entry(i, j) = seed[(cols - 1) + i - j]``, so the seed
    reads first row right-to-left followed by the first column top-to-bottom.
    Any fixed convention yields the same two-universal hash family.
    """

    __slots__ = ("rows", "cols", "diag_seed", "_dense")

    def __init__(self, rows: int, cols: int, diag_seed: BitVec):
        if rows < 1 or cols < 1:
            raise ValueError("ToeplitzMatrix needs rows >= 1 and cols >= 1")
        if len(diag_seed) != rows + cols - 1:
            raise ValueError(
                f"seed length {len(diag_seed)} != rows + cols - 1 = {rows + cols - 1}"
            )
        self.rows = rows
        self.cols = cols
        self.diag_seed = diag_seed
        # index [i, j] -> seed[(cols-1) + i - j], built once, vectorized
        i = np.arange(rows)[:, None]
        j = np.arange(cols)[None, :]
        dense = diag_seed.bits[(cols - 1) + i - j]
        dense.setflags(write=False)
        self._dense = dense

    def entry(self, i: int, j: int) -> int:
        return int(self._dense[i, j])

    def dense(self) -> np.ndarray:
        """Read-only dense uint8 view of the matrix."""
        return self._dense

    def matvec(self, x: BitVec) -> BitVec:
        """Matrix-vector product over GF(2): y[i] = XOR_j A[i,j] & x[j]."""
        if len(x) != self.cols:
            raise ValueError(f"vector length {len(x)} != matrix cols {self.cols}")
        y = (self._dense @ x.bits.astype(np.int64)) & 1
        return BitVec(y.astype(np.uint8))


def toeplitz_from_seed(a: BitVec, k: int, lk: int) -> ToeplitzMatrix:
    """Build the k x lk Toeplitz matrix selected by the seed ``a``.

    ``a`` must have length ``k + lk - 1``; the matrix is a pure function of
    its inputs.
    """
    if len(a) != k + lk - 1:
        raise ValueError(f"seed length {len(a)} != k + lk - 1 = {k + lk - 1}")
    return ToeplitzMatrix(k, lk, a)


def toeplitz_matvec(mat: ToeplitzMatrix, x: BitVec) -> BitVec:
    return mat.matvec(x)


@dataclass(frozen=True)
class CrcSpec:
    """Cyclic redundancy check parameters.

    ``generator`` holds the polynomial coefficients from the highest power
    down to x^0, so its length is ``width + 1``.  ``init`` is XORed into the
    first ``width`` bits of the augmented message before division (all-zero
    by default).  ``width == 0`` means no CRC.
    """

    width: int
    generator: tuple
    init: tuple = ()

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("CRC width must be >= 0")
        if len(self.generator) != self.width + 1:
            raise ValueError("generator must have width + 1 coefficients")
        if self.generator[0] != 1:
            raise ValueError("generator must be monic (leading coefficient 1)")
        if self.init and len(self.init) != self.width:
            raise ValueError("init must have exactly width bits")

    @classmethod
    def none(cls) -> "CrcSpec":
        return cls(width=0, generator=(1,))

    @classmethod
    def crc11(cls) -> "CrcSpec":
        """3GPP 38.212 CRC11: x^11 + x^10 + x^9 + x^5 + 1, zero init."""
        return cls(width=11, generator=(1, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1))


@lru_cache(maxsize=64)
def _parity_matrix(data_len: int, spec: CrcSpec) -> np.ndarray:
    """Rows: remainder of x^(width) * x^(data_len-1-i) mod generator.

    Lets crc parity be computed as a GF(2) matrix product, which keeps the
    per-check cost flat for the list-decoding hot path.
    """
    gen = np.array(spec.generator, dtype=np.uint8)
    w = spec.width
    mat = np.zeros((data_len, w), dtype=np.uint8)
    # remainder register for x^(w + t), built by successive shifts
    reg = np.zeros(w, dtype=np.uint8)
    reg[-1] = 1  # x^0; shifting w + t times yields x^(w+t) mod g
    for _ in range(w):
        reg = _shift_mod(reg, gen)
    mat[data_len - 1] = reg
    for i in range(data_len - 2, -1, -1):
        reg = _shift_mod(reg, gen)
        mat[i] = reg
    return mat


def _shift_mod(reg: np.ndarray, gen: np.ndarray) -> np.ndarray:
    out = np.empty_like(reg)
    out[:-1] = reg[1:]
    out[-1] = 0
    if reg[0]:
        out ^= gen[1:]
    return out


def crc_remainder(bits: np.ndarray, spec: CrcSpec) -> np.ndarray:
    """Remainder of bits(x) * x^width modulo the generator, as a bit array."""
    if spec.width == 0:
        return np.zeros(0, dtype=np.uint8)
    data = np.asarray(bits, dtype=np.uint8).copy()
    if spec.init:
        data[: spec.width] ^= np.array(spec.init, dtype=np.uint8)
    mat = _parity_matrix(data.size, spec)
    return ((data.astype(np.int64) @ mat) & 1).astype(np.uint8)


def crc_append(data: BitVec, spec: CrcSpec) -> BitVec:
    """Append parity bits so that the result passes :func:`crc_check`."""
    if len(data) < 1:
        raise ValueError("crc_append needs at least one data bit")
    if spec.width == 0:
        return data
    parity = crc_remainder(data.bits, spec)
    return BitVec(np.concatenate([data.bits, parity]))


def crc_check(data_with_crc: BitVec, spec: CrcSpec) -> bool:
    """True iff the trailing parity matches the leading data bits."""
    if spec.width == 0:
        return True
    if len(data_with_crc) <= spec.width:
        raise ValueError("input shorter than CRC width")
    data = data_with_crc.bits[: -spec.width]
    parity = data_with_crc.bits[-spec.width:]
    return bool(np.array_equal(crc_remainder(data, spec), parity))


def crc_check_array(bits: np.ndarray, spec: CrcSpec) -> bool:
    """Array-level variant of :func:`crc_check` for decoder internals."""
    if spec.width == 0:
        return True
    data = bits[: -spec.width]
    return bool(np.array_equal(crc_remainder(data, spec), bits[-spec.width:]))


def crc_check_rows(rows: np.ndarray, spec: CrcSpec) -> np.ndarray:
    """Row-wise CRC verdicts for a (batch, data_len + width) bit matrix."""
    rows = np.asarray(rows, dtype=np.uint8)
    if spec.width == 0:
        return np.ones(rows.shape[:-1], dtype=bool)
    data = rows[..., : -spec.width]
    parity = rows[..., -spec.width:]
    if spec.init:
        data = data.copy()
        data[..., : spec.width] ^= np.array(spec.init, dtype=np.uint8)
    mat = _parity_matrix(data.shape[-1], spec)
    expect = (data.astype(np.int64) @ mat) & 1
    return np.all(expect == parity, axis=-1)
