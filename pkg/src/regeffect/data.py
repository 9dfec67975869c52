"""CSV ingestion into a small column-typed table."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, EmptyFile, RaggedRow, UnknownColumn

MISSING_TOKENS = frozenset({"", "NA", "N/A", "NaN", "nan"})


class UnreadableFile(DataError):
    code = "unreadable_file"


@dataclass(frozen=True)
class Dataset:
    """Rectangular table; numeric columns are float arrays with NaN for
    missing cells, text columns are object arrays with ``None``."""

    names: tuple[str, ...]
    columns: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        lengths = {len(self.columns[name]) for name in self.names}
        if len(lengths) > 1:
            raise DataError("columns have unequal lengths")
        for arr in self.columns.values():
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.columns[self.names[0]]) if self.names else 0

    def __contains__(self, name: str) -> bool:
        return name in self.columns

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise UnknownColumn(f"unknown column {name!r}; available: {', '.join(self.names)}") from None

    def is_numeric(self, name: str) -> bool:
        return self.column(name).dtype.kind == "f"

    def missing_mask(self, name: str) -> np.ndarray:
        col = self.column(name)
        if col.dtype.kind == "f":
            return np.isnan(col)
        return np.array([v is None for v in col], dtype=bool)

    def take(self, rows: np.ndarray) -> Dataset:
        return Dataset(self.names, {name: self.columns[name][rows].copy() for name in self.names})

    @classmethod
    def from_dict(cls, data: dict[str, list]) -> Dataset:
        """Build from raw cell lists, typing each column like :func:`load_csv`."""
        return cls(tuple(data), {name: _type_column(cells) for name, cells in data.items()})


def _parse_number(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def _type_column(cells: list) -> np.ndarray:
    texts = [None if c is None or str(c).strip() in MISSING_TOKENS else str(c).strip() for c in cells]
    numbers = [None if t is None else _parse_number(t) for t in texts]
    if all(t is None or v is not None for t, v in zip(texts, numbers)):
        return np.array([math.nan if v is None else v for v in numbers], dtype=float)
    return np.array(texts, dtype=object)


def load_csv(path: str | os.PathLike, delimiter: str = ",", drop_missing: bool = False) -> Dataset:
    """Read a headed CSV file.

    A column is numeric when every non-missing cell parses as a number,
    text otherwise.  ``drop_missing`` removes rows with a missing cell in any
    column; use ``build_design_matrix(..., drop_missing=True)`` to restrict
    that to the columns a model actually uses.
    """
    if len(delimiter) != 1:
        raise DataError(f"delimiter must be a single character, got {delimiter!r}")
    try:
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh, delimiter=delimiter)
            header = next(reader, None)
            if header is None:
                raise EmptyFile(f"{path}: file is empty")
            header = [h.strip() for h in header]
            rows = []
            for row in reader:
                if not row:
                    continue
                if len(row) != len(header):
                    raise RaggedRow(reader.line_num, len(header), len(row))
                rows.append(row)
    except OSError as exc:
        raise UnreadableFile(f"{path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise UnreadableFile(f"{path}: not valid UTF-8 ({exc.reason})") from exc

    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    cols = {name: [row[i] for row in rows] for i, name in enumerate(header)}
    ds = Dataset.from_dict(cols)
    if drop_missing and ds.n:
        keep = ~np.any([ds.missing_mask(name) for name in ds.names], axis=0)
        ds = ds.take(np.flatnonzero(keep))
    return ds
