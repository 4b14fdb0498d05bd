"""Loading and validation of flow run time series (series.csv).

The companion reads only the CSV emitted by the flow runner; it never
links against the solver packages, so figures can be produced anywhere
the CSV travels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

#: Columns the flow runner always writes, in order.
SERIES_COLUMNS = (
    "t", "sup_phidot", "inf_phidot", "osc_phidot", "J", "I",
    "sup_lambda_chi_omega", "inf_lambda_chi_omega", "sup_lambda_omega_chi",
    "min_eig_chi", "sup_abs_phi", "sup_Q",
)


class MalformedSeriesError(Exception):
    """The CSV is missing columns, empty, or not a time series."""


@dataclass(frozen=True)
class SeriesTable:
    """Column-named arrays of equal length with strictly increasing t."""

    columns: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])


def load_series(path) -> SeriesTable:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise MalformedSeriesError(f"{path}: empty file") from None
            rows = list(reader)
    except OSError as err:
        raise MalformedSeriesError(f"{path}: {err}") from None

    missing = [name for name in SERIES_COLUMNS if name not in header]
    if missing:
        raise MalformedSeriesError(
            f"{path}: missing columns {', '.join(missing)}")
    if not rows:
        raise MalformedSeriesError(f"{path}: no samples")

    width = len(header)
    data = {name: np.empty(len(rows)) for name in header}
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MalformedSeriesError(
                f"{path}: row {i + 2} has {len(row)} fields, expected {width}")
        for name, value in zip(header, row):
            try:
                data[name][i] = float(value)
            except ValueError:
                raise MalformedSeriesError(
                    f"{path}: row {i + 2}: cannot parse '{value}'") from None

    t = data["t"]
    if len(t) > 1 and not np.all(np.diff(t) > 0.0):
        raise MalformedSeriesError(f"{path}: t is not strictly increasing")
    return SeriesTable(columns=data)
