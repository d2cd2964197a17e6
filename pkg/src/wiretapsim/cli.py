"""Command-line front end.

Exit codes: 0 success, 1 validation failure (bracketing violation, sync
failures over threshold), 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    cmd_der_sweep,
    cmd_link_budget,
    cmd_oracle_validate,
    cmd_presets,
    cmd_ssb_roundtrip,
)


def _load_config(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.list_size is not None:
        overrides["list_size"] = args.list_size
    if args.trials is not None:
        overrides["trials"] = args.trials
    if getattr(args, "frame_path", False):
        overrides["frame_path"] = True
    if args.out is not None:
        overrides["out_dir"] = args.out
    if overrides:
        config = replace(config, **overrides)
    config.validate()
    return config


def _add_common(parser):
    parser.add_argument("--config", metavar="PATH", help="YAML/JSON experiment config")
    parser.add_argument("--seed", type=int, metavar="U64", help="master RNG seed")
    parser.add_argument("--threads", type=int, metavar="N", help="worker threads")
    parser.add_argument("--list-size", dest="list_size", type=int, metavar="L")
    parser.add_argument("--trials", type=int, metavar="T")
    parser.add_argument("--out", metavar="DIR", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wiretapsim",
        description="Wiretap-channel secrecy workbench: sweeps, bounds and frame loopback",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("der-sweep", help="distinguishing-error bounds over (angle, power)")
    _add_common(p)
    p.add_argument("--frame-path", action="store_true", help="full-frame loopback per trial")

    p = sub.add_parser("oracle-validate", help="tiny-code bracketing vs the exact distinguisher")
    _add_common(p)
    p.add_argument("--settings", type=int, default=20, help="number of noise settings")

    p = sub.add_parser("ssb-roundtrip", help="full frame loopback at a configured SNR")
    _add_common(p)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--blocks", type=int, default=100)
    p.add_argument("--genie-sync", action="store_true")
    p.add_argument("--iq-dump", metavar="PATH", help="write the first capture as an IQ file")
    p.add_argument(
        "--max-sync-failures", type=int, default=0, help="exit 1 above this count"
    )

    p = sub.add_parser("link-budget", help="print the additive budget chain for a preset")
    p.add_argument("preset", type=int)
    p.add_argument("--p-pbch-db", type=float, default=0.0)

    sub.add_parser("presets", help="list scenario presets")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "der-sweep":
        config = _load_config(args)
        csv_path, meta_path = cmd_der_sweep(config)
        print(f"wrote {csv_path} and {meta_path}")
        return 0

    if args.command == "oracle-validate":
        seed = args.seed if args.seed is not None else 0
        trials = args.trials if args.trials is not None else 10_000
        kwargs = {}
        if args.list_size is not None:
            kwargs["list_size"] = args.list_size
        rows = cmd_oracle_validate(
            trials=trials, n_settings=args.settings, master_seed=seed, **kwargs
        )
        bad = [r for r in rows if not r.ok]
        print(f"{'sigma2':>9} {'lower':>8} {'upper':>8} {'oracle':>8} {'ok':>4}")
        for r in rows:
            print(
                f"{r.sigma2:9.4f} {r.lower:8.4f} {r.upper:8.4f} {r.oracle:8.4f} "
                f"{'ok' if r.ok else 'FAIL':>4}"
            )
        if bad:
            print(f"{len(bad)} of {len(rows)} settings violate the bracket", file=sys.stderr)
            return 1
        print(f"all {len(rows)} settings bracket the exact distinguisher")
        return 0

    if args.command == "ssb-roundtrip":
        seed = args.seed if args.seed is not None else 0
        report = cmd_ssb_roundtrip(
            snr_db=args.snr_db,
            blocks=args.blocks,
            master_seed=seed,
            genie_sync=args.genie_sync,
            iq_dump_path=args.iq_dump,
        )
        print(
            f"blocks={report.blocks} bler={report.bler:.4g} "
            f"sync_failures={report.sync_failures} evm={report.evm_percent:.2f}% "
            f"snr_est={report.mean_snr_est_db:.2f} dB (target {report.target_snr_db:.2f})"
        )
        if report.sync_failures > args.max_sync_failures:
            return 1
        return 0

    if args.command == "link-budget":
        table = cmd_link_budget(args.preset, p_pbch_db=args.p_pbch_db)
        preset = table["preset"]
        print(f"preset {preset.id}: {preset.description}")
        total = 0.0
        for line in table["chain"]:
            total += line.value_db
            print(f"  {line.label:>14}: {line.value_db:+9.2f} dB")
        print(f"  {'rx power':>14}: {total:+9.2f} dBm")
        print(f"  {'noise floor':>14}: {table['noise_floor_dbm']:+9.2f} dBm")
        print(f"  {'snr':>14}: {total - table['noise_floor_dbm']:+9.2f} dB")
        return 0

    if args.command == "presets":
        for pid, preset in sorted(cmd_presets().items()):
            print(
                f"{pid}: {preset.description} (p_tx {preset.p_tx_dbm} dBm, "
                f"d {preset.d_tx_rx_m} m, n_tx {preset.n_tx})"
            )
        return 0

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
