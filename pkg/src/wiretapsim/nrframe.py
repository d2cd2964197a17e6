"""5G NR synchronization-signal-block framing and loopback receive chain.

One SSB spans 240 subcarriers by 4 OFDM symbols.  The PSS m-sequence and SSS
Gold sequence occupy the central 127 subcarriers of symbols 0 and 2; PBCH
data and its DM-RS fill symbols 1-3 around them.  Payload bits arrive as
three concatenated codewords plus padding, are scrambled, QPSK mapped and
power-scaled per resource-element class.  The receive chain offers PSS
correlation sync, DM-RS least-squares channel estimation and LLR extraction
feeding the list decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitVec
from .modem import LLR_MAX, ChannelSpec, SnrRecord, estimate_snr, qpsk_mod

N_SC = 240
N_SYM = 4
SYNC_SC_FIRST = 56  # PSS/SSS occupy subcarriers 56..182
SYNC_SC_COUNT = 127
PBCH_BITS = 864
PBCH_DATA_RE = 432
DMRS_RE = 144
SYNC_RE = 2 * SYNC_SC_COUNT
FILLER_RE = N_SC * N_SYM - PBCH_DATA_RE - DMRS_RE - SYNC_RE  # in-grid dummy

CLASS_PSS = 1
CLASS_SSS = 2
CLASS_PBCH = 3
CLASS_DMRS = 4
CLASS_DUMMY = 5
CLASS_NAMES = {1: "pss", 2: "sss", 3: "pbch", 4: "dmrs", 5: "dummy"}

#: Table-driven sweep grid for the relative PBCH power, in dB.
PBCH_POWER_GRID_DB = tuple(range(-25, 11, 2))


class SyncError(RuntimeError):
    """PSS correlation peak below threshold."""


@dataclass(frozen=True)
class PowerProfile:
    """Per-class power offsets in dB relative to the dummy (0 dB) level."""

    p_pbch_db: float = 0.0
    p_pss_db: float = 10.0
    p_sss_db: float = 10.0
    p_dummy_db: float = 0.0

    def amplitude(self, re_class: int) -> float:
        db = {
            CLASS_PSS: self.p_pss_db,
            CLASS_SSS: self.p_sss_db,
            CLASS_PBCH: self.p_pbch_db,
            CLASS_DMRS: self.p_pbch_db,
            CLASS_DUMMY: self.p_dummy_db,
        }[re_class]
        return 10.0 ** (db / 20.0)


@dataclass(frozen=True)
class OfdmParams:
    """Numerology: 120 kHz subcarriers in a 50 MHz occupied band."""

    scs_hz: float = 120e3
    fft_size: int = 512
    cp_len: int = 36
    occupied_bw_hz: float = 50e6
    ssb_period_s: float = 10e-3

    def __post_init__(self):
        if self.fft_size * self.scs_hz < self.occupied_bw_hz:
            raise ValueError("FFT grid narrower than the occupied bandwidth")
        if self.fft_size < N_SC:
            raise ValueError("FFT size must cover the SSB subcarriers")

    @property
    def sample_rate(self) -> float:
        return self.fft_size * self.scs_hz

    @property
    def occupied_subcarriers(self) -> int:
        return int(self.occupied_bw_hz // self.scs_hz)

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.cp_len


# ---------------------------------------------------------------------------
# sequence generators (standard NR constructions)

def pss_sequence(cell_id: int) -> np.ndarray:
    """127-chip m-sequence, BPSK (+-1), selected by cell_id mod 3."""
    n_id2 = cell_id % 3
    x = np.empty(127, dtype=np.int64)
    x[:7] = [0, 1, 1, 0, 1, 1, 1]
    for i in range(120):
        x[i + 7] = (x[i + 4] + x[i]) % 2
    n = np.arange(127)
    return (1 - 2 * x[(n + 43 * n_id2) % 127]).astype(np.float64)


def sss_sequence(cell_id: int) -> np.ndarray:
    """127-chip Gold sequence keyed by the full cell id."""
    n_id1, n_id2 = cell_id // 3, cell_id % 3
    x0 = np.empty(127, dtype=np.int64)
    x1 = np.empty(127, dtype=np.int64)
    x0[:7] = [1, 0, 0, 0, 0, 0, 0]
    x1[:7] = [1, 0, 0, 0, 0, 0, 0]
    for i in range(120):
        x0[i + 7] = (x0[i + 4] + x0[i]) % 2
        x1[i + 7] = (x1[i + 1] + x1[i]) % 2
    m0 = 15 * (n_id1 // 112) + 5 * n_id2
    m1 = n_id1 % 112
    n = np.arange(127)
    return ((1 - 2 * x0[(n + m0) % 127]) * (1 - 2 * x1[(n + m1) % 127])).astype(np.float64)


def gold_sequence(c_init: int, length: int) -> np.ndarray:
    """Generic length-31 Gold pseudo-random bit sequence."""
    nc = 1600
    total = length + nc + 31
    x1 = np.zeros(total, dtype=np.int64)
    x2 = np.zeros(total, dtype=np.int64)
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for i in range(total - 31):
        x1[i + 31] = (x1[i + 3] + x1[i]) % 2
        x2[i + 31] = (x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) % 2
    return ((x1[nc: nc + length] + x2[nc: nc + length]) % 2).astype(np.uint8)


def dmrs_sequence(cell_id: int, ssb_index: int = 0) -> np.ndarray:
    """144 QPSK pilots keyed by cell id and SSB index."""
    ibar = ssb_index
    c_init = (
        (1 << 11) * (ibar + 1) * (cell_id // 4 + 1)
        + (1 << 6) * (ibar + 1)
        + (cell_id % 4)
    )
    c = gold_sequence(c_init, 2 * DMRS_RE)
    return qpsk_mod(c)


def pbch_scramble_bits(cell_id: int) -> np.ndarray:
    """864-bit scrambling word keyed by the cell id."""
    return gold_sequence(cell_id, PBCH_BITS)


# ---------------------------------------------------------------------------
# RE layout

def _dmrs_subcarriers(cell_id: int, symbol: int) -> np.ndarray:
    shift = cell_id % 4
    if symbol in (1, 3):
        return np.arange(60) * 4 + shift
    if symbol == 2:
        sc = np.arange(60) * 4 + shift
        return sc[(sc < 48) | (sc >= 192)]
    raise ValueError("DM-RS lives on symbols 1..3")


def _pbch_subcarriers(cell_id: int, symbol: int) -> np.ndarray:
    dmrs = set(_dmrs_subcarriers(cell_id, symbol).tolist())
    if symbol in (1, 3):
        candidates = np.arange(N_SC)
    elif symbol == 2:
        candidates = np.concatenate([np.arange(0, 48), np.arange(192, 240)])
    else:
        raise ValueError("PBCH lives on symbols 1..3")
    return np.array([s for s in candidates if s not in dmrs])


def pbch_positions(cell_id: int):
    """(subcarrier, symbol) arrays of the 432 data REs, in mapping order."""
    scs, syms = [], []
    for sym in (1, 2, 3):
        sc = _pbch_subcarriers(cell_id, sym)
        scs.append(sc)
        syms.append(np.full(sc.size, sym))
    return np.concatenate(scs), np.concatenate(syms)


def dmrs_positions(cell_id: int):
    """(subcarrier, symbol) arrays of the 144 pilot REs, in mapping order."""
    scs, syms = [], []
    for sym in (1, 2, 3):
        sc = _dmrs_subcarriers(cell_id, sym)
        scs.append(sc)
        syms.append(np.full(sc.size, sym))
    return np.concatenate(scs), np.concatenate(syms)


@dataclass
class SsbGrid:
    """One SSB: complex REs, per-RE class map and power offsets in dB."""

    res: np.ndarray       # (N_SC, N_SYM) complex
    classes: np.ndarray   # (N_SC, N_SYM) uint8
    offsets_db: np.ndarray  # (N_SC, N_SYM) float
    cell_id: int
    profile: PowerProfile = field(default_factory=PowerProfile)

    def census(self) -> dict:
        return {
            name: int(np.sum(self.classes == cls)) for cls, name in CLASS_NAMES.items()
        }

    def class_power(self, re_class: int) -> float:
        mask = self.classes == re_class
        return float(np.mean(np.abs(self.res[mask]) ** 2)) if mask.any() else 0.0

    def total_power(self) -> float:
        return float(np.sum(np.abs(self.res) ** 2))

    def dump_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["symbol", "subcarrier", "re", "im", "class"])
            for sym in range(N_SYM):
                for sc in range(N_SC):
                    w.writerow(
                        [
                            sym,
                            sc,
                            f"{self.res[sc, sym].real:.9g}",
                            f"{self.res[sc, sym].imag:.9g}",
                            CLASS_NAMES[int(self.classes[sc, sym])],
                        ]
                    )


def pack_pbch(
    codewords,
    cell_id: int,
    rng: np.random.Generator,
    scramble: bool = True,
    padding: BitVec | None = None,
) -> BitVec:
    """Concatenate three 256-bit codewords, pad to 864 bits and scramble.

    Padding bits occupy the tail positions and are uniform random unless
    given explicitly; the receiver knows to discard them.
    """
    if len(codewords) != 3 or any(len(c) != 256 for c in codewords):
        raise ValueError("pack_pbch needs exactly three 256-bit codewords")
    payload = np.concatenate([c.bits for c in codewords])
    if padding is None:
        pad = rng.integers(0, 2, size=PBCH_BITS - payload.size, dtype=np.uint8)
    else:
        if len(padding) != PBCH_BITS - payload.size:
            raise ValueError(f"padding must have {PBCH_BITS - payload.size} bits")
        pad = padding.bits
    bits = np.concatenate([payload, pad])
    if scramble:
        bits = bits ^ pbch_scramble_bits(cell_id)
    return BitVec(bits)


def unpack_pbch(bits: BitVec, cell_id: int, scramble: bool = True):
    """Invert :func:`pack_pbch`; returns the three codewords (padding dropped)."""
    if len(bits) != PBCH_BITS:
        raise ValueError(f"PBCH field must be {PBCH_BITS} bits")
    raw = bits.bits ^ pbch_scramble_bits(cell_id) if scramble else bits.bits
    return [BitVec(raw[i * 256:(i + 1) * 256]) for i in range(3)]


def descramble_pbch_llrs(llrs: np.ndarray, cell_id: int, scramble: bool = True):
    """Flip LLR signs per the scrambling word and split off the codewords."""
    llrs = np.asarray(llrs, dtype=np.float64)
    if llrs.size != PBCH_BITS:
        raise ValueError(f"expected {PBCH_BITS} LLRs")
    if scramble:
        llrs = llrs * (1.0 - 2.0 * pbch_scramble_bits(cell_id))
    return [llrs[i * 256:(i + 1) * 256] for i in range(3)]


def build_ssb(
    pbch_bits: BitVec,
    profile: PowerProfile,
    cell_id: int,
    rng: np.random.Generator,
) -> SsbGrid:
    """Assemble the 240 x 4 grid with per-class amplitude scaling."""
    if len(pbch_bits) != PBCH_BITS:
        raise ValueError(f"PBCH field must be {PBCH_BITS} bits")
    res = np.zeros((N_SC, N_SYM), dtype=complex)
    classes = np.zeros((N_SC, N_SYM), dtype=np.uint8)

    sync_sc = np.arange(SYNC_SC_FIRST, SYNC_SC_FIRST + SYNC_SC_COUNT)
    res[sync_sc, 0] = profile.amplitude(CLASS_PSS) * pss_sequence(cell_id)
    classes[sync_sc, 0] = CLASS_PSS
    res[sync_sc, 2] = profile.amplitude(CLASS_SSS) * sss_sequence(cell_id)
    classes[sync_sc, 2] = CLASS_SSS

    amp_pbch = profile.amplitude(CLASS_PBCH)
    data_sc, data_sym = pbch_positions(cell_id)
    res[data_sc, data_sym] = amp_pbch * qpsk_mod(pbch_bits)
    classes[data_sc, data_sym] = CLASS_PBCH

    pilot_sc, pilot_sym = dmrs_positions(cell_id)
    res[pilot_sc, pilot_sym] = profile.amplitude(CLASS_DMRS) * dmrs_sequence(cell_id)
    classes[pilot_sc, pilot_sym] = CLASS_DMRS

    dummy_mask = classes == 0
    n_dummy = int(dummy_mask.sum())
    dummy_bits = rng.integers(0, 2, size=2 * n_dummy, dtype=np.uint8)
    res[dummy_mask] = profile.amplitude(CLASS_DUMMY) * qpsk_mod(dummy_bits)
    classes[dummy_mask] = CLASS_DUMMY

    offsets = np.zeros((N_SC, N_SYM))
    for cls, db in (
        (CLASS_PSS, profile.p_pss_db),
        (CLASS_SSS, profile.p_sss_db),
        (CLASS_PBCH, profile.p_pbch_db),
        (CLASS_DMRS, profile.p_pbch_db),
        (CLASS_DUMMY, profile.p_dummy_db),
    ):
        offsets[classes == cls] = db
    return SsbGrid(res=res, classes=classes, offsets_db=offsets, cell_id=cell_id, profile=profile)


# ---------------------------------------------------------------------------
# OFDM

def _sc_to_bins(params: OfdmParams, n_sc: int) -> np.ndarray:
    offsets = np.arange(n_sc) - n_sc // 2
    return np.mod(offsets, params.fft_size)


def ofdm_mod(
    grid: SsbGrid,
    params: OfdmParams,
    rng: np.random.Generator | None = None,
    band_fill: bool = False,
) -> np.ndarray:
    """Unitary-IFFT OFDM with cyclic prefix; SSB centered in the FFT grid.

    With ``band_fill`` the occupied band outside the SSB is loaded with
    unit-power dummy QPSK (requires ``rng``), mirroring a fully loaded
    carrier; the SSB region itself always comes from the grid.
    """
    spectrum = np.zeros((params.fft_size, N_SYM), dtype=complex)
    bins = _sc_to_bins(params, N_SC)
    spectrum[bins, :] = grid.res
    if band_fill:
        if rng is None:
            raise ValueError("band_fill requires an rng")
        occ = params.occupied_subcarriers
        occ_bins = np.mod(np.arange(occ) - occ // 2, params.fft_size)
        outside = np.setdiff1d(occ_bins, bins)
        fill = qpsk_mod(rng.integers(0, 2, size=2 * outside.size * N_SYM, dtype=np.uint8))
        spectrum[outside, :] = fill.reshape(outside.size, N_SYM)
    time = np.fft.ifft(spectrum, axis=0) * np.sqrt(params.fft_size)
    out = np.empty(N_SYM * params.symbol_len, dtype=complex)
    for sym in range(N_SYM):
        body = time[:, sym]
        start = sym * params.symbol_len
        out[start: start + params.cp_len] = body[-params.cp_len:]
        out[start + params.cp_len: start + params.symbol_len] = body
    return out


def ofdm_demod(iq: np.ndarray, params: OfdmParams, offset: int = 0) -> np.ndarray:
    """Strip cyclic prefixes and FFT back to the (N_SC, N_SYM) grid view."""
    iq = np.asarray(iq)
    need = offset + N_SYM * params.symbol_len
    if iq.size < need:
        raise ValueError(f"need {need} samples, got {iq.size}")
    obs = np.empty((N_SC, N_SYM), dtype=complex)
    bins = _sc_to_bins(params, N_SC)
    for sym in range(N_SYM):
        start = offset + sym * params.symbol_len + params.cp_len
        spec = np.fft.fft(iq[start: start + params.fft_size]) / np.sqrt(params.fft_size)
        obs[:, sym] = spec[bins]
    return obs


@dataclass
class SyncResult:
    offset: int
    cfo_hz: float
    peak: float


def pss_time_template(cell_id: int, params: OfdmParams, profile: PowerProfile | None = None) -> np.ndarray:
    """CP-less time waveform of the PSS symbol alone."""
    profile = profile or PowerProfile()
    spectrum = np.zeros(params.fft_size, dtype=complex)
    sync_sc = np.arange(SYNC_SC_FIRST, SYNC_SC_FIRST + SYNC_SC_COUNT)
    bins = _sc_to_bins(params, N_SC)[sync_sc]
    spectrum[bins] = profile.amplitude(CLASS_PSS) * pss_sequence(cell_id)
    return np.fft.ifft(spectrum) * np.sqrt(params.fft_size)


def pss_sync(
    iq: np.ndarray,
    params: OfdmParams,
    cell_id: int = 0,
    threshold: float = 0.5,
) -> SyncResult:
    """Locate the SSB by normalized PSS cross-correlation.

    Returns the sample offset of the SSB start (the first CP sample of
    symbol 0) and a cyclic-prefix-based carrier-frequency-offset estimate.
    """
    iq = np.asarray(iq)
    tpl = pss_time_template(cell_id, params)
    n = tpl.size
    if iq.size < n + params.cp_len:
        raise SyncError("capture shorter than one OFDM symbol")
    corr = np.correlate(iq, tpl)
    energy = np.convolve(np.abs(iq) ** 2, np.ones(n), mode="valid")
    norm = np.sqrt(energy * np.sum(np.abs(tpl) ** 2)) + 1e-300
    metric = np.abs(corr) / norm
    peak_pos = int(np.argmax(metric))
    peak = float(metric[peak_pos])
    if peak < threshold:
        raise SyncError(f"correlation peak {peak:.3f} below threshold {threshold}")
    offset = peak_pos - params.cp_len
    if offset < 0:
        raise SyncError("PSS found before a full cyclic prefix")

    # CP-based CFO estimate over the symbols that fit the capture
    acc = 0.0 + 0.0j
    for sym in range(N_SYM):
        start = offset + sym * params.symbol_len
        stop = start + params.cp_len
        if stop + params.fft_size > iq.size:
            break
        acc += np.sum(iq[start:stop] * np.conj(iq[start + params.fft_size: stop + params.fft_size]))
    cfo_hz = float(-np.angle(acc) / (2 * np.pi) * params.scs_hz) if acc != 0 else 0.0
    return SyncResult(offset=offset, cfo_hz=cfo_hz, peak=peak)


# ---------------------------------------------------------------------------
# receive chain

@dataclass
class PbchRx:
    llrs: list            # three length-256 LLR vectors
    snr: SnrRecord | None
    gain_est: np.ndarray  # per-subcarrier channel estimate
    noise_est: float


def rx_pbch_llrs(
    grid_obs: np.ndarray,
    cell_id: int,
    profile: PowerProfile,
    ch_est: str = "ls",
    genie_gain: complex | np.ndarray | None = None,
    genie_noise_var: float | None = None,
    tx_grid: SsbGrid | None = None,
    scramble: bool = True,
) -> PbchRx:
    """DM-RS channel estimation, equalization and PBCH LLR extraction.

    ``ch_est`` is "ls" (least squares on the pilots, linear interpolation
    across subcarriers, no time interpolation) or "genie" (exact gain and
    noise variance supplied).  When ``tx_grid`` is given, the time-averaged
    per-subcarrier SNR record over symbols 1 and 3 is estimated as well.
    """
    grid_obs = np.asarray(grid_obs)
    if grid_obs.shape != (N_SC, N_SYM):
        raise ValueError(f"grid observations must be ({N_SC}, {N_SYM})")
    amp = profile.amplitude(CLASS_PBCH)

    if ch_est == "genie":
        if genie_gain is None or genie_noise_var is None:
            raise ValueError("genie estimation needs gain and noise variance")
        gain_sc = np.broadcast_to(np.asarray(genie_gain), (N_SC,)).astype(complex)
        noise_var = float(genie_noise_var)
    elif ch_est == "ls":
        pilot_sc, pilot_sym = dmrs_positions(cell_id)
        pilots = dmrs_sequence(cell_id)
        raw = grid_obs[pilot_sc, pilot_sym] / (amp * pilots)
        if not np.any(np.abs(grid_obs[pilot_sc, pilot_sym])):
            raise ValueError("all-zero DM-RS observations; cannot estimate channel")
        order = np.argsort(pilot_sc, kind="stable")
        sc_sorted = pilot_sc[order]
        est_sorted = raw[order]
        # average duplicate subcarriers (symbols 1/3 share pilot positions)
        uniq, inverse = np.unique(sc_sorted, return_inverse=True)
        sums = np.zeros(uniq.size, dtype=complex)
        counts = np.zeros(uniq.size)
        np.add.at(sums, inverse, est_sorted)
        np.add.at(counts, inverse, 1.0)
        est_uniq = sums / counts
        gain_sc = np.interp(np.arange(N_SC), uniq, est_uniq.real) + 1j * np.interp(
            np.arange(N_SC), uniq, est_uniq.imag
        )
        resid = grid_obs[pilot_sc, pilot_sym] - amp * gain_sc[pilot_sc] * pilots
        noise_var = float(np.mean(np.abs(resid) ** 2))
    else:
        raise ValueError(f"unknown channel estimation mode: {ch_est}")

    data_sc, data_sym = pbch_positions(cell_id)
    y = grid_obs[data_sc, data_sym] / amp
    # per-RE matched filter against the per-subcarrier gain estimate
    eff_noise = max(noise_var, 1e-300) / (amp * amp)
    w = y * np.conj(gain_sc[data_sc])
    scale = 2.0 * np.sqrt(2.0) / eff_noise
    llr_flat = np.empty(PBCH_BITS)
    llr_flat[0::2] = np.clip(scale * w.real, -LLR_MAX, LLR_MAX)
    llr_flat[1::2] = np.clip(scale * w.imag, -LLR_MAX, LLR_MAX)

    llrs = descramble_pbch_llrs(llr_flat, cell_id, scramble)

    snr = None
    if tx_grid is not None:
        tx_rows = tx_grid.res[:, (1, 3)].T
        rx_rows = grid_obs[:, (1, 3)].T
        snr = estimate_snr(tx_rows, rx_rows)
    return PbchRx(llrs=llrs, snr=snr, gain_est=np.asarray(gain_sc), noise_est=noise_var)


def apply_grid_channel(
    grid: SsbGrid,
    ch: ChannelSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Frequency-domain channel: per-subcarrier gain plus AWGN per RE."""
    gain = np.asarray(ch.gain)
    if gain.ndim == 1 and gain.size != N_SC:
        raise ValueError("frequency-selective profile must have one gain per subcarrier")
    g = gain[:, None] if gain.ndim == 1 else gain
    obs = g * grid.res
    if ch.noise_variance > 0:
        flat = rng.standard_normal(2 * obs.size) * np.sqrt(ch.noise_variance / 2.0)
        obs = obs + (flat[0::2] + 1j * flat[1::2]).reshape(obs.shape)
    return obs
