"""Polar transmission code: encoder and CRC-aided successive-cancellation
list decoding with full-list export.

The decoder keeps the exact log-domain path metric (no min-sum shortcut), so
a finished path's metric equals ``codeword_metric`` of its re-encoded word,
i.e. the negative channel log-likelihood up to one shared additive constant.
The distinguishing-rate machinery leans on that identity to compare list
entries against arbitrary codewords on a common scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitVec, CrcSpec, crc_append, crc_check_rows
from .nr_reliability import UNIVERSAL_SEQUENCE_1024


class DecodeFailure(RuntimeError):
    """Raised when a decode operation has no candidates to return."""


def reliability_sequence(n: int, method: str = "nr", design_snr_db: float = 0.0) -> np.ndarray:
    """Synthetic-channel indices in increasing reliability order.

    ``nr`` restricts the universal TS 38.212 table to indices < n (n <= 1024).
    ``bhattacharyya`` is the parameter-recursion fallback for other sizes.
    """
    if n < 2 or n & (n - 1):
        raise ValueError("code length must be a power of two >= 2")
    if method == "nr":
        if n > 1024:
            raise ValueError("NR table covers n <= 1024; use method='bhattacharyya'")
        seq = UNIVERSAL_SEQUENCE_1024[UNIVERSAL_SEQUENCE_1024 < n]
        return seq.copy()
    if method == "bhattacharyya":
        z = np.array([np.exp(-(10.0 ** (design_snr_db / 10.0)))], dtype=np.float64)
        while z.size < n:
            nxt = np.empty(2 * z.size)
            nxt[0::2] = 2.0 * z - z * z  # upper (f) child, less reliable
            nxt[1::2] = z * z            # lower (g) child, more reliable
            z = nxt
        # larger z = less reliable; ties broken by index for determinism
        return np.lexsort((np.arange(n), -z))
    raise ValueError(f"unknown construction method: {method}")


@dataclass(frozen=True)
class PolarCodeSpec:
    """Code length n, non-frozen input count, info positions and CRC."""

    n: int
    k_info: int
    info_set: tuple
    crc: CrcSpec

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 2")
        if len(self.info_set) != self.k_info or self.k_info > self.n:
            raise ValueError("info_set size must equal k_info <= n")
        if any(i < 0 or i >= self.n for i in self.info_set):
            raise ValueError("info_set indices out of range")
        if list(self.info_set) != sorted(set(self.info_set)):
            raise ValueError("info_set must be sorted and duplicate-free")

    @property
    def payload_len(self) -> int:
        return self.k_info - self.crc.width

    @property
    def stages(self) -> int:
        return self.n.bit_length() - 1


def build_spec(n: int, payload_len: int, crc: CrcSpec, reliability=None) -> PolarCodeSpec:
    """Select the most reliable positions for payload + CRC bits.

    ``reliability`` is a permutation of [0, n) in increasing reliability
    order; defaults to the NR universal sequence restricted to n.
    """
    k_info = payload_len + crc.width
    if k_info > n:
        raise ValueError(f"payload {payload_len} + CRC {crc.width} exceeds n = {n}")
    if payload_len < 1:
        raise ValueError("payload_len must be >= 1")
    if reliability is None:
        reliability = reliability_sequence(n)
    reliability = np.asarray(reliability)
    if sorted(reliability.tolist()) != list(range(n)):
        raise ValueError("reliability must be a permutation of range(n)")
    info = np.sort(reliability[n - k_info:])
    return PolarCodeSpec(n=n, k_info=k_info, info_set=tuple(int(i) for i in info), crc=crc)


def polar_transform(u: np.ndarray) -> np.ndarray:
    """Arikan transform x = u F^{(x)m} in natural order, along the last axis."""
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    lead = x.shape[:-1]
    width = 1
    while width < n:
        blocks = x.reshape(*lead, n // (2 * width), 2 * width)
        blocks[..., :width] ^= blocks[..., width:]
        width *= 2
    return x


def polar_encode(payload: BitVec, spec: PolarCodeSpec) -> BitVec:
    """CRC-append, map onto the info set (frozen bits zero) and transform."""
    if len(payload) != spec.payload_len:
        raise ValueError(f"payload length {len(payload)} != {spec.payload_len}")
    with_crc = crc_append(payload, spec.crc)
    u = np.zeros(spec.n, dtype=np.uint8)
    u[np.array(spec.info_set)] = with_crc.bits
    return BitVec(polar_transform(u))


def codeword_metric(codeword, llr: np.ndarray) -> float:
    """Exact path-metric value of a codeword against channel LLRs.

    Equals -log p(y|x) + C(y) with C(y) shared by every codeword, so
    differences are exact log-likelihood ratios.
    """
    bits = codeword.bits if isinstance(codeword, BitVec) else np.asarray(codeword)
    signs = 1.0 - 2.0 * bits.astype(np.float64)
    return float(np.logaddexp(0.0, -signs * llr).sum())


@dataclass
class ListEntry:
    payload: BitVec
    crc_ok: bool
    path_metric: float
    codeword: BitVec
    info_bits: BitVec  # payload plus the CRC bits as decoded on this path


@dataclass
class DecodeList:
    """SCL output: candidates ordered by ascending path metric."""

    entries: list
    list_size: int

    def __len__(self):
        return len(self.entries)

    def codeword_set(self):
        return {e.codeword for e in self.entries}


def _boxplus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # exact log-domain check-node update
    return np.logaddexp(0.0, a + b) - np.logaddexp(a, b)


@dataclass
class BatchDecodeResult:
    """Array view of a batch of decode lists, paths sorted per trial.

    Shapes: metrics (B, L'), info_bits (B, L', k_info), codewords (B, L', n),
    crc_ok (B, L'), with L' = min(L, 2^k_info).
    """

    metrics: np.ndarray
    info_bits: np.ndarray
    codewords: np.ndarray
    crc_ok: np.ndarray


def scl_decode_batch(llrs: np.ndarray, spec: PolarCodeSpec, list_size: int) -> BatchDecodeResult:
    """Successive-cancellation list decoding of a batch of LLR vectors.

    The path-count trajectory depends only on the code, so the whole batch
    advances in lockstep with the path axis vectorized per trial.
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    nb, width = llrs.shape
    if width != spec.n:
        raise ValueError(f"LLR vectors must have length {spec.n}")
    if not np.all(np.isfinite(llrs)):
        raise ValueError("LLRs must be finite")
    if list_size < 1:
        raise ValueError("list size must be >= 1")

    n, m = spec.n, spec.stages
    is_info = np.zeros(n, dtype=bool)
    is_info[np.array(spec.info_set)] = True

    # ragged per-depth state; P[0] is the shared channel vector (no path axis)
    P = [None] * (m + 1)
    P[0] = llrs
    for d in range(1, m + 1):
        P[d] = np.zeros((nb, 1, n >> d))
    S = [None] + [np.zeros((nb, 1, n >> d), dtype=np.uint8) for d in range(1, m + 1)]
    pm = np.zeros((nb, 1))
    u_hist = np.zeros((nb, 1, n), dtype=np.uint8)
    codewords = None

    for phi in range(n):
        if phi == 0:
            depths = range(1, m + 1)
        else:
            trailing = (phi & -phi).bit_length() - 1
            depths = range(m - trailing, m + 1)
        for d in depths:
            half = n >> d
            if d == 1:
                a = llrs[:, None, :half]
                b = llrs[:, None, half: 2 * half]
            else:
                a = P[d - 1][:, :, :half]
                b = P[d - 1][:, :, half: 2 * half]
            if (phi >> (m - d)) & 1:
                signs = 1.0 - 2.0 * S[d][:, :, :half].astype(np.float64)
                P[d] = b + signs * a
            else:
                res = _boxplus(a, b)
                if res.shape[1] != pm.shape[1]:  # d == 1: shared channel parent
                    res = np.broadcast_to(res, (nb, pm.shape[1], half)).copy()
                P[d] = res

        lam = P[m][:, :, 0]
        n_paths = pm.shape[1]
        if is_info[phi]:
            pm0 = pm + np.logaddexp(0.0, -lam)
            pm1 = pm + np.logaddexp(0.0, lam)
            flat = np.stack([pm0, pm1], axis=2).reshape(nb, 2 * n_paths)
            if 2 * n_paths > list_size:
                order = np.argsort(flat, axis=1, kind="stable")
                keep = np.sort(order[:, :list_size], axis=1)
                parent = keep >> 1
                bits = (keep & 1).astype(np.uint8)
                pm = np.take_along_axis(flat, keep, axis=1)
                for d in range(1, m + 1):
                    P[d] = np.take_along_axis(P[d], parent[:, :, None], axis=1)
                    S[d] = np.take_along_axis(S[d], parent[:, :, None], axis=1)
                u_hist = np.take_along_axis(u_hist, parent[:, :, None], axis=1)
            else:
                # duplicate every path; repeat order matches the flat layout
                bits = np.tile(np.array([0, 1], dtype=np.uint8), n_paths)[None, :]
                pm = flat
                for d in range(1, m + 1):
                    P[d] = np.repeat(P[d], 2, axis=1)
                    S[d] = np.repeat(S[d], 2, axis=1)
                u_hist = np.repeat(u_hist, 2, axis=1)
            u_hist[:, :, phi] = bits
            u = np.broadcast_to(bits, (nb, u_hist.shape[1])).astype(np.uint8)
        else:
            pm = pm + np.logaddexp(0.0, -lam)
            u = np.zeros((nb, n_paths), dtype=np.uint8)

        # propagate finished partial sums toward the root
        s = u[:, :, None]
        d, j = m, phi
        while d > 0 and (j & 1):
            w = s.shape[2]
            s = np.concatenate([S[d][:, :, :w] ^ s, s], axis=2)
            d -= 1
            j >>= 1
        if d > 0:
            width_s = s.shape[2]
            if S[d].shape[1] != s.shape[1]:
                S[d] = np.broadcast_to(S[d], (nb, s.shape[1], S[d].shape[2])).copy()
            S[d][:, :, :width_s] = s
        else:
            codewords = s  # phi == n-1: full re-encoded codewords

    order = np.argsort(pm, axis=1, kind="stable")
    pm_sorted = np.take_along_axis(pm, order, axis=1)
    u_sorted = np.take_along_axis(u_hist, order[:, :, None], axis=1)
    cw_sorted = np.take_along_axis(codewords, order[:, :, None], axis=1)
    info_bits = u_sorted[:, :, np.array(spec.info_set)]
    crc_ok = crc_check_rows(info_bits, spec.crc)
    return BatchDecodeResult(
        metrics=pm_sorted, info_bits=info_bits, codewords=cw_sorted, crc_ok=crc_ok
    )


def scl_decode(llr: np.ndarray, spec: PolarCodeSpec, list_size: int) -> DecodeList:
    """Successive-cancellation list decoding with path-metric bookkeeping.

    Returns up to ``list_size`` surviving paths sorted by ascending metric,
    each with extracted payload, CRC flag and re-encoded codeword.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if llr.ndim != 1:
        raise ValueError("scl_decode takes a single LLR vector")
    res = scl_decode_batch(llr[None, :], spec, list_size)
    entries = []
    for i in range(res.metrics.shape[1]):
        with_crc = res.info_bits[0, i]
        entries.append(
            ListEntry(
                payload=BitVec(with_crc[: spec.payload_len]),
                crc_ok=bool(res.crc_ok[0, i]),
                path_metric=float(res.metrics[0, i]),
                codeword=BitVec(res.codewords[0, i]),
                info_bits=BitVec(with_crc),
            )
        )
    return DecodeList(entries=entries, list_size=list_size)


def decode_payload(dlist: DecodeList):
    """Conventional receiver output: best CRC-passing entry, else best overall."""
    if not dlist.entries:
        raise DecodeFailure("empty decode list")
    for entry in dlist.entries:
        if entry.crc_ok:
            return entry.payload, True
    return dlist.entries[0].payload, False
