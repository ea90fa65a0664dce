"""Named feature matrices and their CSV serialization.

The on-disk format is CSV with ``doc_id`` as the first column and one
column per feature; UTF-8, LF line endings.  Floats are written as
decimal with 17 significant digits, which round-trips IEEE doubles
bit-exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass
class FeatureMatrix:
    feature_names: list
    doc_ids: list
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.feature_names = list(self.feature_names)
        self.doc_ids = list(self.doc_ids)
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            self.rows = self.rows.reshape(len(self.doc_ids), -1)
        if self.rows.shape != (len(self.doc_ids), len(self.feature_names)):
            raise DataError(
                f"matrix shape {self.rows.shape} does not match "
                f"{len(self.doc_ids)} docs x {len(self.feature_names)} features"
            )
        if len(set(self.feature_names)) != len(self.feature_names):
            raise DataError("duplicate feature name")
        if self.rows.size and not np.isfinite(self.rows).all():
            raise DataError("non-finite value in feature matrix")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def __len__(self) -> int:
        return len(self.doc_ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureMatrix):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and self.doc_ids == other.doc_ids
            and self.rows.shape == other.rows.shape
            and bool((self.rows == other.rows).all())
        )


def _format_value(v: float) -> str:
    return format(v, ".17g")


def write_feature_matrix_stream(matrix: FeatureMatrix, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["doc_id", *matrix.feature_names])
    for doc_id, row in zip(matrix.doc_ids, matrix.rows):
        writer.writerow([doc_id, *(_format_value(v) for v in row)])


def write_feature_matrix(matrix: FeatureMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        write_feature_matrix_stream(matrix, handle)


def read_feature_matrix(path) -> FeatureMatrix:
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read feature matrix: {exc}") from exc
    with handle:
        return _read_rows(csv.reader(handle), str(path))


def read_feature_matrix_text(text: str, name: str = "<string>") -> FeatureMatrix:
    return _read_rows(csv.reader(io.StringIO(text)), name)


def _read_rows(reader, name: str) -> FeatureMatrix:
    header = next(reader, None)
    if header is None:
        raise DataError(f"{name}: empty feature matrix file")
    if not header or header[0] != "doc_id":
        raise DataError(f"{name}: first column must be doc_id")
    feature_names = header[1:]
    doc_ids = []
    rows = []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise DataError(
                f"{name}: line {lineno} has {len(record)} fields, expected {len(header)}"
            )
        doc_ids.append(record[0])
        try:
            values = [float(v) for v in record[1:]]
        except ValueError as exc:
            raise DataError(f"{name}: line {lineno}: {exc}") from exc
        if any(not math.isfinite(v) for v in values):
            raise DataError(f"{name}: line {lineno}: non-finite value")
        rows.append(values)
    array = np.array(rows, dtype=np.float64) if rows else np.zeros((0, len(feature_names)))
    return FeatureMatrix(feature_names, doc_ids, array)
