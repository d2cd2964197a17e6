"""QPSK modem, the Gaussian wiretap channel pair, per-subcarrier SNR
estimation and EVM.

Conventions used throughout: IQ vectors are complex ndarrays with unit
average symbol energy; ``noise_variance`` is the total variance per complex
sample (half per real dimension).  The same ``ChannelSpec`` models both the
legitimate and the eavesdropper channel, differing only in its numbers.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .gf2 import BitVec

#: LLR clamp keeping list-decoder metrics finite on noiseless channels.
LLR_MAX = 40.0

_IQ_MAGIC = b"WTSIQ1\x00\x00"


@dataclass(frozen=True)
class ChannelSpec:
    """Complex AWGN channel y = gain * x + n with CN(0, noise_variance) noise.

    ``gain`` may be a scalar or a per-subcarrier profile array (frequency
    selective); a profile must match the carrier count of the signal it is
    applied to.
    """

    noise_variance: float
    gain: complex | np.ndarray = 1.0 + 0.0j

    def __post_init__(self):
        if self.noise_variance < 0:
            raise ValueError("noise variance must be >= 0")
        g = np.asarray(self.gain)
        if g.ndim > 1:
            raise ValueError("gain must be a scalar or 1-D profile")

    @classmethod
    def from_snr_db(cls, snr_db: float, gain: complex = 1.0 + 0.0j) -> "ChannelSpec":
        """Noise variance for the given per-symbol SNR at unit signal power."""
        return cls(noise_variance=10.0 ** (-snr_db / 10.0), gain=gain)


@dataclass
class SnrRecord:
    """Per-subcarrier time-averaged SNR estimate."""

    snr_linear: np.ndarray
    n_symbols: int

    def __post_init__(self):
        if self.n_symbols < 1:
            raise ValueError("need at least one symbol")

    @property
    def snr_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.snr_linear)

    @property
    def infinite(self) -> np.ndarray:
        """Sentinel mask for subcarriers whose residual power was zero."""
        return ~np.isfinite(self.snr_linear)


def qpsk_mod(bits: BitVec | np.ndarray) -> np.ndarray:
    """Gray-mapped QPSK, (0,0) -> (1+1j)/sqrt(2), unit symbol energy."""
    arr = bits.bits if isinstance(bits, BitVec) else np.asarray(bits, dtype=np.uint8)
    if arr.size % 2:
        raise ValueError("QPSK needs an even number of bits")
    i = 1.0 - 2.0 * arr[0::2].astype(np.float64)
    q = 1.0 - 2.0 * arr[1::2].astype(np.float64)
    return (i + 1j * q) / np.sqrt(2.0)


def qpsk_hard_bits(symbols: np.ndarray) -> np.ndarray:
    """Minimum-distance demap back to bits (test helper and dummy-RE tool)."""
    bits = np.empty(2 * symbols.size, dtype=np.uint8)
    bits[0::2] = (symbols.real < 0).astype(np.uint8)
    bits[1::2] = (symbols.imag < 0).astype(np.uint8)
    return bits


def transmit(x: np.ndarray, ch: ChannelSpec, rng: np.random.Generator) -> np.ndarray:
    """Apply gain and circularly-symmetric complex Gaussian noise."""
    x = np.asarray(x)
    y = np.asarray(ch.gain) * x
    if ch.noise_variance > 0:
        scale = np.sqrt(ch.noise_variance / 2.0)
        flat = rng.standard_normal(2 * x.size) * scale
        y = y + (flat[0::2] + 1j * flat[1::2]).reshape(x.shape)
    return y


def qpsk_llr(y: np.ndarray, ch: ChannelSpec) -> np.ndarray:
    """Per-bit LLRs (positive favors bit 0), interleaved to invert qpsk_mod.

    LLR(b0) = 2*sqrt(2)*Re{y conj(gain)} / sigma^2 and the imaginary part for
    b1; values are clamped to +-LLR_MAX, which also covers sigma^2 = 0.
    """
    y = np.asarray(y)
    w = y * np.conj(np.asarray(ch.gain))
    if ch.noise_variance > 0:
        scale = 2.0 * np.sqrt(2.0) / ch.noise_variance
        raw_i = scale * w.real
        raw_q = scale * w.imag
    else:
        raw_i = np.sign(w.real) * np.inf
        raw_q = np.sign(w.imag) * np.inf
        raw_i = np.nan_to_num(raw_i, posinf=np.inf, neginf=-np.inf, nan=0.0)
        raw_q = np.nan_to_num(raw_q, posinf=np.inf, neginf=-np.inf, nan=0.0)
    llr = np.empty(2 * y.size, dtype=np.float64)
    llr[0::2] = raw_i
    llr[1::2] = raw_q
    return np.clip(llr, -LLR_MAX, LLR_MAX)


def estimate_snr(tx_known: np.ndarray, rx: np.ndarray) -> SnrRecord:
    """Time-averaged per-subcarrier SNR from known transmit symbols.

    Inputs are (n_symbols, n_subcarriers) arrays.  The channel gain is fit by
    least squares per subcarrier over the whole record; the noise variance is
    the time-averaged residual power, which is unbiased for a block-constant
    channel.  The returned value is the mean over symbols of the
    instantaneous signal-power / noise-variance ratio.
    """
    tx = np.atleast_2d(np.asarray(tx_known))
    rxa = np.atleast_2d(np.asarray(rx))
    if tx.shape != rxa.shape:
        raise ValueError("tx and rx records must have equal shapes")
    n_sym = tx.shape[0]
    denom = np.sum(np.abs(tx) ** 2, axis=0)
    if np.any(denom == 0):
        raise ValueError("subcarrier with zero transmit power")
    g_hat = np.sum(rxa * np.conj(tx), axis=0) / denom
    resid = rxa - g_hat[None, :] * tx
    noise = np.mean(np.abs(resid) ** 2, axis=0)
    power = (np.abs(tx) ** 2) * (np.abs(g_hat) ** 2)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.mean(np.where(noise[None, :] > 0, power / noise[None, :], np.inf), axis=0)
    return SnrRecord(snr_linear=snr, n_symbols=n_sym)


def evm(rx: np.ndarray, ref: np.ndarray) -> float:
    """Error vector magnitude in percent: RMS error over RMS reference."""
    rx = np.asarray(rx)
    ref = np.asarray(ref)
    if rx.shape != ref.shape:
        raise ValueError("rx and ref must have equal shapes")
    ref_power = np.mean(np.abs(ref) ** 2)
    if ref_power == 0:
        raise ValueError("reference has zero power")
    return float(100.0 * np.sqrt(np.mean(np.abs(rx - ref) ** 2) / ref_power))


def iq_write(path, iq: np.ndarray, sample_rate: float, carrier_count: int) -> None:
    """Interleaved little-endian float32 (re, im) pairs with a small header."""
    iq = np.asarray(iq).ravel()
    header = _IQ_MAGIC + struct.pack("<dIQ", float(sample_rate), carrier_count, iq.size)
    flat = np.empty(2 * iq.size, dtype="<f4")
    flat[0::2] = iq.real.astype(np.float32)
    flat[1::2] = iq.imag.astype(np.float32)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(flat.tobytes())


def iq_read(path):
    """Inverse of :func:`iq_write`: returns (iq, sample_rate, carrier_count)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_IQ_MAGIC))
        if magic != _IQ_MAGIC:
            raise ValueError("not a wiretapsim IQ file")
        sample_rate, carrier_count, n = struct.unpack("<dIQ", fh.read(20))
        flat = np.frombuffer(fh.read(8 * n), dtype="<f4")
    if flat.size != 2 * n:
        raise ValueError("truncated IQ file")
    iq = flat[0::2].astype(np.float64) + 1j * flat[1::2].astype(np.float64)
    return iq, sample_rate, carrier_count
