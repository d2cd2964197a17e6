"""Figures from sweep-result CSVs; see :mod:`sweepfig.core`."""

__version__ = "0.1.0"

from .core import EmptyDataError, PlotJob, SchemaError, load_sweep_csv, render

__all__ = ["EmptyDataError", "PlotJob", "SchemaError", "load_sweep_csv", "render"]
