"""Figure companion for flow run time series.

Reads only the series.csv a run writes; renders oscillation-decay,
functional-trace and envelope figures as PNG or SVG.
"""

from .figures import fit_decay, plot_decay, plot_envelope, plot_functionals
from .series import (SERIES_COLUMNS, MalformedSeriesError, SeriesTable,
                     load_series)

__version__ = "0.1.0"

__all__ = [
    "SERIES_COLUMNS", "MalformedSeriesError", "SeriesTable", "fit_decay",
    "load_series", "plot_decay", "plot_envelope", "plot_functionals",
]
