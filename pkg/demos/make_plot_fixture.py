#!/usr/bin/env python3
"""Generate the golden 1638-row sweep CSV used by the plotting package's
tests: real scenario-model SNR numbers over the full (91 angle x 18 power)
grid, with distinguishing-error columns filled by a smooth logistic
surrogate of the measured SNR-to-DER behavior.

The surrogate keeps the fixture cheap and deterministic; it is plotting
input, not simulation output.
"""

import csv
from pathlib import Path

import numpy as np

from wiretapsim import LinkBudget, get_preset, sweep_plan
from wiretapsim.harness import CSV_COLUMNS
from wiretapsim.nrframe import PBCH_POWER_GRID_DB
from wiretapsim.scenario import default_array


def surrogate_bounds(snr_db: float):
    # saturates at the 0.5 coin-flip floor below ~4 dB, leaks above ~8 dB
    p = 0.5 / (1.0 + np.exp((snr_db - 6.0) / 1.2))
    lower = min(0.5, p * 0.93)
    upper = min(0.5, p * 1.02 + 0.004)
    return lower, upper


def main(out_path: Path) -> None:
    points = sweep_plan(get_preset(2), LinkBudget(), default_array(), PBCH_POWER_GRID_DB)
    assert len(points) == 1638
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for pt in points:
            lower, upper = surrogate_bounds(pt.snr_db)
            writer.writerow(
                [
                    format(pt.theta_deg, ".10g"),
                    format(pt.p_pbch_db, ".10g"),
                    format(pt.snr_db, ".10g"),
                    "",
                    format(lower, ".10g"),
                    format(upper, ".10g"),
                    format(0.02, ".10g"),
                    "1000",
                ]
            )
    print(f"wrote {out_path} ({len(points)} rows)")


if __name__ == "__main__":
    main(Path(__file__).resolve().parent.parent / "plots" / "tests" / "data" / "golden_sweep.csv")
