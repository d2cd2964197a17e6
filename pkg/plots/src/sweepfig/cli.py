"""CLI: one figure per invocation; exit 0 on success, 1 on any error."""

from __future__ import annotations

import argparse
import sys

from .core import KINDS, EmptyDataError, PlotJob, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render sweep-result CSVs into figures"
    )
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="input_csv", required=True, metavar="results.csv")
    parser.add_argument("--out", dest="output", required=True, metavar="fig.png")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=120)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(
        input_csv=args.input_csv, kind=args.kind, output_path=args.output,
        title=args.title, dpi=args.dpi,
    )
    try:
        out = render(job)
    except (SchemaError, EmptyDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
