"""Experiment orchestration: configuration, reproducible RNG partitioning,
sweep execution and result persistence.

Randomness is partitioned with counter-based Philox streams derived from
``SeedSequence((master_seed, point_index))``, one independent stream per
grid point, so the worker count never changes any result.  The secrecy seed
for a sweep comes from a reserved stream tag.  Outputs are a stable-schema
``results.csv`` (RFC-4180, CRLF) plus ``metadata.json`` carrying the full
config echo, a config hash and the wall-clock numbers that must stay out of
the deterministic CSV.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .der import MessagePair, DerBounds, bracketing_run, estimate_der_bounds
from .gf2 import BitVec, CrcSpec
from .modem import ChannelSpec, estimate_snr, evm, iq_write
from .nrframe import (
    PBCH_POWER_GRID_DB,
    OfdmParams,
    PowerProfile,
    SyncError,
    build_ssb,
    ofdm_demod,
    ofdm_mod,
    pack_pbch,
    pbch_positions,
    pss_sync,
    rx_pbch_llrs,
)
from .polar import (
    PolarCodeSpec,
    build_spec,
    codeword_metric,
    decode_payload,
    polar_encode,
    scl_decode,
)
from .scenario import (
    ArraySpec,
    LinkBudget,
    ScenarioPreset,
    budget_table,
    default_array,
    eve_snr,
    get_preset,
    load_presets,
    sweep_plan,
)
from .secrecy import SecrecyParams, draw_randomness, draw_seed, secrecy_decode, secrecy_encode

#: reserved stream tag for the sweep-level secrecy seed draw
_SEED_STREAM_TAG = 0xFFFF_FFFF

CSV_COLUMNS = (
    "theta_deg",
    "p_pbch_db",
    "snr_db",
    "snr_est_db",
    "der_lower",
    "der_upper",
    "ci",
    "trials",
)


class ConfigError(ValueError):
    """Raised for invalid experiment configurations, with a field path."""


@dataclass
class ExperimentConfig:
    """Everything a sweep needs; every field is echoed into the metadata."""

    # secrecy layer
    k: int = 1
    l: int = 222
    seed_policy: str = "fixed"
    crc_filter: bool = True
    # transmission code
    n: int = 256
    crc: str = "crc11"
    # execution
    list_size: int = 8
    trials: int = 1000
    master_seed: int = 0
    threads: int = 1
    frame_path: bool = False
    # channel grid
    preset: int = 2
    angles_deg: list = field(default_factory=lambda: [-45.0, -30.0, 0.0, 30.0, 45.0])
    pbch_db: list = field(default_factory=lambda: list(PBCH_POWER_GRID_DB))
    noise_floor_dbm: float | None = None
    # output
    out_dir: str = "results"

    def validate(self) -> None:
        checks = [
            (self.k >= 1, "pls.k", "must be >= 1"),
            (self.l > self.k, "pls.l", "must exceed k"),
            (self.seed_policy in ("fixed", "per-trial"), "pls.seed_policy", "fixed|per-trial"),
            (self.n >= 2 and self.n & (self.n - 1) == 0, "code.n", "must be a power of two"),
            (self.crc in ("crc11", "none"), "code.crc", "crc11|none"),
            (self.list_size >= 1, "run.list_size", "must be >= 1"),
            (self.trials >= 100, "run.trials", "must be >= 100"),
            (self.threads >= 1, "run.threads", "must be >= 1"),
            (self.master_seed >= 0, "run.master_seed", "must be >= 0"),
            (len(self.angles_deg) > 0, "grid.angles_deg", "must be non-empty"),
            (len(self.pbch_db) > 0, "grid.pbch_db", "must be non-empty"),
        ]
        for ok, path, msg in checks:
            if not ok:
                raise ConfigError(f"{path}: {msg}")
        crc_spec = self.crc_spec()
        if self.l + crc_spec.width > self.n:
            raise ConfigError("code.n: payload plus CRC exceeds the code length")

    def crc_spec(self) -> CrcSpec:
        return CrcSpec.crc11() if self.crc == "crc11" else CrcSpec.none()

    def code_spec(self) -> PolarCodeSpec:
        return build_spec(self.n, self.l, self.crc_spec())

    def secrecy_params(self) -> SecrecyParams:
        return SecrecyParams(k=self.k, l=self.l)

    def link_budget(self) -> LinkBudget:
        if self.noise_floor_dbm is None:
            return LinkBudget()
        return LinkBudget(noise_floor_dbm=self.noise_floor_dbm)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            raw = yaml.safe_load(Path(path).read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a mapping")
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        sections = {
            "pls": ("k", "l", "seed_policy", "crc_filter"),
            "code": ("n", "crc"),
            "run": ("list_size", "trials", "master_seed", "threads", "frame_path"),
            "grid": ("preset", "angles_deg", "pbch_db", "noise_floor_dbm"),
            "out": ("out_dir",),
        }
        kwargs = {}
        for section, keys in sections.items():
            body = raw.get(section, {})
            if not isinstance(body, dict):
                raise ConfigError(f"{section}: must be a mapping")
            for key in body:
                if key not in keys:
                    raise ConfigError(f"{section}.{key}: unknown field")
            kwargs.update({k: body[k] for k in keys if k in body})
        for key in raw:
            if key not in sections:
                raise ConfigError(f"{key}: unknown section")
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def point_stream(master_seed: int, point_index: int) -> np.random.Generator:
    """Counter-based substream for one grid point; independent of workers."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence((master_seed, point_index)))
    )


def seed_stream(master_seed: int) -> np.random.Generator:
    return point_stream(master_seed, _SEED_STREAM_TAG)


@dataclass
class ResultRow:
    theta_deg: float
    p_pbch_db: float
    snr_db: float
    snr_est_db: float | None
    der_lower: float
    der_upper: float
    ci: float
    trials: int
    timing_s: float  # metadata only, never written to the CSV

    def csv_values(self):
        def fmt(x):
            if x is None or (isinstance(x, float) and np.isnan(x)):
                return ""
            if isinstance(x, float):
                return format(x, ".10g")
            return str(x)

        return [
            fmt(self.theta_deg),
            fmt(self.p_pbch_db),
            fmt(self.snr_db),
            fmt(self.snr_est_db),
            fmt(self.der_lower),
            fmt(self.der_upper),
            fmt(self.ci),
            str(self.trials),
        ]


def _frame_path_bounds(
    config: ExperimentConfig,
    code: PolarCodeSpec,
    pair: MessagePair,
    seed,
    point,
    rng: np.random.Generator,
) -> DerBounds:
    """Full-frame trial loop: SSB build, OFDM, genie sync, DM-RS-genie LLRs.

    The per-RE PBCH SNR is pinned to the sweep point's value so the frame
    route measures the same channel as the codeword route.
    """
    p = config.secrecy_params()
    params = OfdmParams()
    profile = PowerProfile(p_pbch_db=point.p_pbch_db)
    amp = profile.amplitude(3)  # PBCH class amplitude
    # time-domain noise at this variance lands as the same per-RE variance
    # under the unitary transform, pinning the PBCH-RE SNR to the sweep point
    sigma2_re = amp * amp * point.noise_variance
    upper_err = lower_err = coins = 0

    for _ in range(config.trials):
        theta = int(rng.integers(1, 3))
        sent = pair.m1 if theta == 1 else pair.m2
        r = draw_randomness(p, rng)
        v = secrecy_encode(sent, r, seed, p)
        cw = polar_encode(v, code)
        fillers = [BitVec.random(code.n, rng) for _ in range(2)]
        bits = pack_pbch([cw, fillers[0], fillers[1]], 0, rng)
        grid = build_ssb(bits, profile, 0, rng)
        iq = ofdm_mod(grid, params)
        noise = np.sqrt(sigma2_re / 2.0) * (
            rng.standard_normal(iq.size) + 1j * rng.standard_normal(iq.size)
        )
        obs = ofdm_demod(iq + noise, params)  # genie timing
        rx = rx_pbch_llrs(
            obs, 0, profile, ch_est="genie", genie_gain=1.0 + 0.0j,
            genie_noise_var=sigma2_re,
        )
        llr = rx.llrs[0]
        dlist = scl_decode(llr, code, config.list_size)
        surviving = []
        for entry in dlist.entries:
            if config.crc_filter and not entry.crc_ok:
                continue
            decoded = secrecy_decode(entry.payload, seed, p)
            if decoded == pair.m1 or decoded == pair.m2:
                surviving.append((entry, decoded))
        if not surviving:
            guess = int(rng.integers(1, 3))
            ok = guess == theta
            upper_err += not ok
            lower_err += not ok
            coins += 1
            continue
        best_entry, best_msg = surviving[0]
        up_ok = best_msg == sent
        tol = 1e-9 * (1.0 + abs(best_entry.path_metric))
        if codeword_metric(cw, llr) < best_entry.path_metric - tol:
            low_ok = True
        else:
            low_ok = up_ok
        upper_err += not up_ok
        lower_err += not low_ok
    raw_u = upper_err / config.trials
    raw_l = lower_err / config.trials
    return DerBounds(
        lower=min(raw_l, 0.5),
        upper=min(raw_u, 0.5),
        trials=config.trials,
        ci_lower=1.96 * float(np.sqrt(raw_l * (1 - raw_l) / config.trials)),
        ci_upper=1.96 * float(np.sqrt(raw_u * (1 - raw_u) / config.trials)),
        list_size=config.list_size,
        raw_lower=raw_l,
        raw_upper=raw_u,
        coin_trials=coins,
    )


def run_der_sweep(config: ExperimentConfig):
    """Execute the (angle x power) sweep; returns (rows, metadata dict)."""
    config.validate()
    code = config.code_spec()
    p = config.secrecy_params()
    pair = (
        MessagePair.single_bit()
        if config.k == 1
        else MessagePair(BitVec.from_int(0, config.k), BitVec.from_int(1, config.k))
    )
    sweep_seed = draw_seed(p, seed_stream(config.master_seed))
    preset = get_preset(config.preset)
    budget = config.link_budget()
    array = default_array()
    points = sweep_plan(preset, budget, array, config.pbch_db, config.angles_deg)

    def run_point(idx_point):
        idx, point = idx_point
        rng = point_stream(config.master_seed, idx)
        t0 = time.perf_counter()
        if config.frame_path:
            bounds = _frame_path_bounds(config, code, pair, sweep_seed, point, rng)
            snr_est = point.snr_db  # genie channel: estimate equals the model
        else:
            bounds = estimate_der_bounds(
                pair,
                sweep_seed,
                code,
                ChannelSpec(noise_variance=point.noise_variance),
                config.list_size,
                config.trials,
                rng,
                crc_filter=config.crc_filter,
                seed_policy=config.seed_policy,
            )
            snr_est = None
        return ResultRow(
            theta_deg=point.theta_deg,
            p_pbch_db=point.p_pbch_db,
            snr_db=point.snr_db,
            snr_est_db=snr_est,
            der_lower=bounds.lower,
            der_upper=bounds.upper,
            ci=bounds.ci_halfwidth,
            trials=bounds.trials,
            timing_s=time.perf_counter() - t0,
        )

    tasks = list(enumerate(points))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            rows = list(pool.map(run_point, tasks))
    else:
        rows = [run_point(t) for t in tasks]

    metadata = {
        "config": asdict(config),
        "config_hash": config.config_hash(),
        "version": __version__,
        "master_seed": config.master_seed,
        "secrecy_seed_hex": sweep_seed.to_hex(),
        "seed_policy_note": "seed fixed per sweep unless pls.seed_policy=per-trial",
        "crc_filter_note": "CRC filter applies to both list attackers",
        "grid_points": len(rows),
        "timing_s": {
            "total": sum(r.timing_s for r in rows),
            "per_point": [round(r.timing_s, 6) for r in rows],
        },
    }
    return rows, metadata


def write_results(rows, metadata, out_dir) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_values())
    meta_path = out / "metadata.json"
    meta_path.write_text(json.dumps(metadata, indent=2, sort_keys=True) + "\n")
    return csv_path, meta_path


def cmd_der_sweep(config: ExperimentConfig):
    rows, metadata = run_der_sweep(config)
    return write_results(rows, metadata, config.out_dir)


@dataclass
class OracleValidationRow:
    sigma2: float
    lower: float
    upper: float
    oracle: float
    three_sigma_low: float
    three_sigma_up: float
    collapsed: bool
    ok: bool


def cmd_oracle_validate(
    trials: int = 10_000,
    n_settings: int = 20,
    master_seed: int = 0,
    list_size: int | None = None,
):
    """Tiny-code bracketing versus the exact distinguisher.

    Runs the bounds and the enumeration oracle on identical channel draws
    across a noise grid spanning weak to saturated secrecy, with the list
    covering the whole codebook so the two attackers provably coincide.
    """
    code = build_spec(16, 8, CrcSpec.none())
    pair = MessagePair.single_bit()
    p = SecrecyParams(k=1, l=8)
    seed = draw_seed(p, seed_stream(master_seed))
    if list_size is None:
        list_size = 256  # covers all 2^8 codewords
    # noise grid calibrated so the exact DER spans roughly 0.05 to 0.5
    sigmas = np.geomspace(0.6, 100.0, n_settings)
    rows = []
    for idx, sigma2 in enumerate(sigmas):
        rng = point_stream(master_seed, idx)
        bounds, oracle, (up_ok, low_ok) = bracketing_run(
            pair, seed, code, ChannelSpec(float(sigma2)), list_size, trials, rng,
            return_flags=True,
        )
        three_low = 3.0 / 1.96 * bounds.ci_lower
        three_up = 3.0 / 1.96 * bounds.ci_upper
        ok = (bounds.raw_lower - three_low <= oracle.rate <= bounds.raw_upper + three_up)
        rows.append(
            OracleValidationRow(
                sigma2=float(sigma2),
                lower=bounds.raw_lower,
                upper=bounds.raw_upper,
                oracle=oracle.rate,
                three_sigma_low=three_low,
                three_sigma_up=three_up,
                collapsed=bool(np.array_equal(up_ok, low_ok)),
                ok=ok,
            )
        )
    return rows


@dataclass
class RoundtripReport:
    blocks: int
    block_errors: int
    sync_failures: int
    evm_percent: float
    mean_snr_est_db: float
    target_snr_db: float

    @property
    def bler(self) -> float:
        return self.block_errors / self.blocks


def cmd_ssb_roundtrip(
    snr_db: float = 10.0,
    blocks: int = 100,
    master_seed: int = 0,
    genie_sync: bool = False,
    iq_dump_path=None,
    p_pbch_db: float = 0.0,
):
    """Full loopback at a configured per-RE PBCH SNR.

    Builds one SSB per block (three codewords each), crosses an AWGN
    channel, synchronizes via PSS correlation (or genie timing), estimates
    the channel from DM-RS and list-decodes all three codewords.
    """
    code = build_spec(256, 222, CrcSpec.crc11())
    params = OfdmParams()
    profile = PowerProfile(p_pbch_db=p_pbch_db)
    rng = point_stream(master_seed, 0)
    amp = profile.amplitude(3)
    sigma2_re = amp * amp * 10 ** (-snr_db / 10.0)
    # time-domain noise power equals the per-RE variance under a unitary FFT
    block_errors = 0
    sync_failures = 0
    evm_acc = []
    snr_est_acc = []
    tx_rows, rx_rows = [], []
    lead = 300
    for blk in range(blocks):
        payloads = [BitVec.random(222, rng) for _ in range(3)]
        cws = [polar_encode(pl, code) for pl in payloads]
        bits = pack_pbch(cws, 0, rng)
        grid = build_ssb(bits, profile, 0, rng)
        iq = ofdm_mod(grid, params)
        capture = np.concatenate([np.zeros(lead, dtype=complex), iq, np.zeros(64, dtype=complex)])
        noise = np.sqrt(sigma2_re / 2.0) * (
            rng.standard_normal(capture.size) + 1j * rng.standard_normal(capture.size)
        )
        capture = capture + noise
        if genie_sync:
            offset = lead
        else:
            try:
                offset = pss_sync(capture, params, threshold=0.2).offset
            except SyncError:
                sync_failures += 1
                block_errors += 1
                continue
        if offset != lead:
            sync_failures += 1
        obs = ofdm_demod(capture, params, offset=offset)
        rx = rx_pbch_llrs(obs, 0, profile, ch_est="ls", tx_grid=grid)
        ok = True
        for llr, pl in zip(rx.llrs, payloads):
            decoded, crc_ok = decode_payload(scl_decode(llr, code, 8))
            ok &= crc_ok and decoded == pl
        block_errors += not ok
        if rx.snr is not None:
            finite = rx.snr.snr_db[np.isfinite(rx.snr.snr_db)]
            snr_est_acc.append(float(np.mean(finite)))
        sc, sym = pbch_positions(0)
        evm_acc.append(evm(obs[sc, sym], grid.res[sc, sym]))
        tx_rows.extend([grid.res[:, 1], grid.res[:, 3]])
        rx_rows.extend([obs[:, 1], obs[:, 3]])
        if iq_dump_path is not None and blk == 0:
            iq_write(iq_dump_path, capture, params.sample_rate, params.occupied_subcarriers)
    pooled = estimate_snr(np.array(tx_rows), np.array(rx_rows))
    finite = pooled.snr_db[np.isfinite(pooled.snr_db)]
    return RoundtripReport(
        blocks=blocks,
        block_errors=block_errors,
        sync_failures=sync_failures,
        evm_percent=float(np.mean(evm_acc)) if evm_acc else float("nan"),
        mean_snr_est_db=float(np.mean(finite)),
        target_snr_db=snr_db,
    )


def cmd_link_budget(preset_id: int, p_pbch_db: float = 0.0):
    """Budget chain rows at boresight plus the per-angle SNR profile."""
    preset = get_preset(preset_id)
    budget = LinkBudget()
    array = default_array()
    chain = budget_table(preset, budget, array, steer_deg=preset.theta_eve_deg, p_pbch_db=p_pbch_db)
    angles = preset.steering_angles()
    snrs = [eve_snr(preset, budget, array, float(a), p_pbch_db) for a in angles]
    return {
        "preset": preset,
        "chain": chain,
        "noise_floor_dbm": budget.noise_floor_dbm,
        "angles_deg": angles.tolist(),
        "snr_db": snrs,
    }


def cmd_presets():
    return load_presets()
