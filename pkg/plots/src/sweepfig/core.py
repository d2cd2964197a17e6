"""Render sweep results into figures.

This package knows nothing about how the numbers were produced; it consumes
the sweep CSV contract (theta_deg, p_pbch_db, snr_db, der_lower, der_upper,
...) and draws three figure kinds:

* der-panels: one panel per power offset (descending), the band between the
  lower and upper distinguishing-error bounds versus beam angle;
* snr-heatmap: angle x power map colored by SNR;
* pattern-cut: SNR versus angle, one line per power offset.

Unknown CSV columns are ignored; missing required columns and out-of-range
bound values are hard errors that name the offender.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("der-panels", "snr-heatmap", "pattern-cut")

_REQUIRED = {
    "der-panels": ("theta_deg", "p_pbch_db", "der_lower", "der_upper"),
    "snr-heatmap": ("theta_deg", "p_pbch_db", "snr_db"),
    "pattern-cut": ("theta_deg", "p_pbch_db", "snr_db"),
}

#: fixed savefig metadata so regenerated files are byte-identical
_PNG_METADATA = {"Software": "sweepfig"}


class SchemaError(ValueError):
    """The CSV is missing required columns or holds invalid values."""


class EmptyDataError(ValueError):
    """The CSV has a header but no rows."""


@dataclass
class PlotJob:
    input_csv: str | Path
    kind: str
    output_path: str | Path
    title: str | None = None
    dpi: int = 120
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind: {self.kind!r} (expected one of {KINDS})")


@dataclass
class SweepTable:
    theta: np.ndarray
    p_pbch: np.ndarray
    snr: np.ndarray         # may hold NaN where the CSV field was empty
    der_lower: np.ndarray
    der_upper: np.ndarray


def load_sweep_csv(path, kind: str) -> SweepTable:
    """Parse and validate the sweep CSV for the given figure kind."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyDataError(f"{path}: no header row")
        missing = [c for c in _REQUIRED[kind] if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing required columns: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")

    def column(name, default=np.nan):
        out = np.empty(len(rows))
        for i, row in enumerate(rows):
            text = (row.get(name) or "").strip()
            if not text:
                out[i] = default
                continue
            try:
                out[i] = float(text)
            except ValueError as exc:
                raise SchemaError(f"{path}: row {i + 2}: bad {name}: {text!r}") from exc
        return out

    table = SweepTable(
        theta=column("theta_deg"),
        p_pbch=column("p_pbch_db"),
        snr=column("snr_db"),
        der_lower=column("der_lower"),
        der_upper=column("der_upper"),
    )
    if kind == "der-panels":
        bad = [
            i + 2  # header is line 1
            for i in range(len(rows))
            if not (
                0.0 <= table.der_lower[i] <= 0.5
                and 0.0 <= table.der_upper[i] <= 0.5
                and table.der_lower[i] <= table.der_upper[i]
            )
        ]
        if bad:
            raise SchemaError(
                f"{path}: bounds outside [0, 0.5] or inverted on rows: "
                + ", ".join(map(str, bad[:20]))
                + ("..." if len(bad) > 20 else "")
            )
    return table


def _panel_powers(table: SweepTable) -> np.ndarray:
    # descending power, matching the strongest-leakage-on-top layout
    return np.sort(np.unique(table.p_pbch))[::-1]


def render(job: PlotJob) -> Path:
    """Draw the requested figure; returns the output path."""
    table = load_sweep_csv(job.input_csv, job.kind)
    if job.kind == "der-panels":
        fig = _render_der_panels(table, job)
    elif job.kind == "snr-heatmap":
        fig = _render_snr_heatmap(table, job)
    else:
        fig = _render_pattern_cut(table, job)
    out = Path(job.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.dpi, metadata=_PNG_METADATA if out.suffix == ".png" else None)
    plt.close(fig)
    return out


def _render_der_panels(table: SweepTable, job: PlotJob):
    powers = _panel_powers(table)
    fig, axes = plt.subplots(
        len(powers), 1, sharex=True,
        figsize=(7.0, 1.0 + 1.25 * len(powers)), squeeze=False,
    )
    for ax, power in zip(axes[:, 0], powers):
        mask = table.p_pbch == power
        order = np.argsort(table.theta[mask], kind="stable")
        theta = table.theta[mask][order]
        low = table.der_lower[mask][order]
        up = table.der_upper[mask][order]
        ax.fill_between(theta, low, up, alpha=0.35, color="#579", lw=0)
        ax.plot(theta, low, color="#579", lw=1.0, label="lower")
        ax.plot(theta, up, color="#d33", lw=1.0, label="upper")
        ax.set_ylim(-0.02, 0.55)
        ax.axhline(0.5, color="gray", lw=0.6, ls=":")
        ax.set_ylabel("DER")
        ax.text(
            0.99, 0.08, f"power offset {power:+g} dB",
            transform=ax.transAxes, ha="right", fontsize=8,
        )
    axes[0, 0].legend(loc="lower left", fontsize=8, ncol=2)
    axes[-1, 0].set_xlabel("beam angle [deg]")
    fig.suptitle(job.title or "distinguishing-error bounds per beam angle")
    fig.tight_layout(rect=(0, 0, 1, 0.985))
    return fig


def _render_snr_heatmap(table: SweepTable, job: PlotJob):
    thetas = np.unique(table.theta)
    powers = np.unique(table.p_pbch)
    grid = np.full((powers.size, thetas.size), np.nan)
    ti = np.searchsorted(thetas, table.theta)
    pi = np.searchsorted(powers, table.p_pbch)
    grid[pi, ti] = table.snr
    fig, ax = plt.subplots(figsize=(7.5, 4.5))
    mesh = ax.pcolormesh(thetas, powers, grid, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="SNR [dB]")
    ax.set_xlabel("beam angle [deg]")
    ax.set_ylabel("power offset [dB]")
    ax.set_title(job.title or "eavesdropper SNR per beam angle and power offset")
    fig.tight_layout()
    return fig


def _render_pattern_cut(table: SweepTable, job: PlotJob):
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for power in _panel_powers(table):
        mask = table.p_pbch == power
        order = np.argsort(table.theta[mask], kind="stable")
        ax.plot(
            table.theta[mask][order],
            table.snr[mask][order],
            lw=1.2,
            label=f"{power:+g} dB",
        )
    ax.set_xlabel("beam angle [deg]")
    ax.set_ylabel("SNR [dB]")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7, ncol=3, title="power offset")
    ax.set_title(job.title or "SNR cut per power offset")
    fig.tight_layout()
    return fig
