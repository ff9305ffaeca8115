from __future__ import annotations

import io
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .errors import ConfigError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


class Series:
    """Column table written out as CSV, one row per tau grid point."""

    def __init__(self, columns: Sequence[str], rows: int) -> None:
        self.columns = list(columns)
        self.rows = rows
        self.values = np.zeros((rows, len(self.columns)))

    def value_at(self, row: int, column: str) -> float:
        return float(self.values[row, self.columns.index(column)])

    def write_row(self, row: int, values: Sequence[float]) -> None:
        if len(values) != len(self.columns):
            raise ConfigError(
                f"Mismatch between {len(values)} values and {len(self.columns)} columns"
            )
        self.values[row] = values

    def write_column(self, column: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.rows,):
            raise ConfigError(
                f"Column {column!r} needs {self.rows} values, got {values.shape}"
            )
        self.values[:, self.columns.index(column)] = values

    @classmethod
    def from_columns(cls, **columns) -> Series:
        names = list(columns)
        series = cls(names, len(next(iter(columns.values()))))
        for name in names:
            series.write_column(name, columns[name])
        return series

    def convert_to_csv(self) -> str:
        buffer = io.StringIO()
        # "-0" would break byte-identical output across platforms
        np.savetxt(
            buffer,
            self.values + 0.0,
            fmt=FLOAT_FORMAT,
            delimiter=",",
            header=",".join(self.columns),
            comments="",
        )
        return buffer.getvalue()

    def save(self, output_path: str | Path | None) -> None:
        csv = self.convert_to_csv()
        if output_path is None or str(output_path) == "-":
            sys.stdout.write(csv)
            return
        path = Path(output_path)
        path.write_text(csv, encoding="utf-8", newline="\n")
        logger.info("Wrote %d rows to %s", self.rows, path)
