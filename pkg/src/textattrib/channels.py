"""Token-level predictability channels and their document-level pooling.

Channels are produced externally (language-model log-probabilities,
entropies, word frequencies, grammar flags, ...) and ingested from JSONL:
one object per document with keys ``doc_id``, ``channels`` (names),
``values`` (position-major matrix, one row of K channel values per token
position) and ``mask`` (per-position validity).  Sequences are capped at
128 positions.

Each channel is pooled over the masked positions into four statistics
(mean, max, min, population std), so K channels yield 4*K features.
External per-document columns (e.g. class probabilities of another
predictor) come from CSV with doc_id first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .matrix import FeatureMatrix, read_feature_matrix

MAX_POSITIONS = 128
AGG_STATS = ("mean", "max", "min", "std")


@dataclass
class ChannelSequence:
    doc_id: str
    channel_names: list
    values: np.ndarray = field(repr=False)  # [positions, K]
    mask: np.ndarray = field(repr=False)  # [positions] bool

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.mask = np.asarray(self.mask, dtype=bool)
        n_pos, n_ch = self.values.shape
        if n_ch != len(self.channel_names):
            raise DataError(
                f"doc {self.doc_id}: {n_ch} value columns for "
                f"{len(self.channel_names)} channels"
            )
        if n_pos > MAX_POSITIONS:
            raise DataError(f"doc {self.doc_id}: sequence exceeds cap {MAX_POSITIONS}")
        if self.mask.shape != (n_pos,):
            raise DataError(f"doc {self.doc_id}: mask length != positions")
        if not self.mask.any():
            raise DataError(f"doc {self.doc_id}: mask has no valid position")
        if not np.isfinite(self.values[self.mask]).all():
            raise DataError(f"doc {self.doc_id}: non-finite value at masked position")


def load_channels(path) -> dict:
    """Read a channels JSONL file into {doc_id: ChannelSequence}.

    All documents must share the same channel name list, in order.
    """
    sequences: dict = {}
    names = None
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read channels file: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"malformed JSON at line {lineno}: {exc.msg}") from exc
            try:
                doc_id = record["doc_id"]
                channels = list(record["channels"])
                raw_values = record["values"]
                mask = record["mask"]
            except (KeyError, TypeError) as exc:
                raise DataError(f"missing channel field at line {lineno}: {exc}") from exc
            if doc_id in sequences:
                raise DataError(f"duplicate doc_id {doc_id} at line {lineno}")
            if names is None:
                names = channels
            elif channels != names:
                raise DataError(
                    f"inconsistent channel set for doc {doc_id} at line {lineno}"
                )
            try:
                values = np.array(
                    [[math.nan if v is None else float(v) for v in row] for row in raw_values],
                    dtype=np.float64,
                ).reshape(len(raw_values), len(channels))
            except (TypeError, ValueError) as exc:
                raise DataError(f"bad values array at line {lineno}: {exc}") from exc
            sequences[doc_id] = ChannelSequence(
                doc_id=doc_id,
                channel_names=channels,
                values=values,
                mask=np.asarray(mask, dtype=bool),
            )
    if not sequences:
        raise DataError("empty channels file")
    return sequences


def aggregate(seq: ChannelSequence) -> tuple:
    """Pool one sequence into (feature_names, values) of length 4*K.

    Per channel, over the masked positions: mean, max, min, population
    std; grouped per channel in that order.
    """
    masked = seq.values[seq.mask]
    n = masked.shape[0]
    means = masked.sum(axis=0) / n
    maxes = masked.max(axis=0)
    mins = masked.min(axis=0)
    stds = np.sqrt(((masked - means) ** 2).sum(axis=0) / n)
    names = []
    values = []
    for k, channel in enumerate(seq.channel_names):
        names.extend(f"{channel}_{stat}" for stat in AGG_STATS)
        values.extend((means[k], maxes[k], mins[k], stds[k]))
    return names, values


def aggregate_matrix(sequences: dict, doc_ids) -> FeatureMatrix:
    """Aggregate channels for ``doc_ids`` (order preserved) into a matrix."""
    rows = []
    names = None
    for doc_id in doc_ids:
        if doc_id not in sequences:
            raise DataError(f"doc_id mismatch: no channels for {doc_id}")
        seq_names, values = aggregate(sequences[doc_id])
        if names is None:
            names = seq_names
        rows.append(values)
    return FeatureMatrix(names or [], list(doc_ids), np.array(rows, dtype=np.float64))


def load_external_columns(path) -> FeatureMatrix:
    """Per-document named real columns from CSV (doc_id first column)."""
    return read_feature_matrix(path)


def align_external(ext: FeatureMatrix, doc_ids) -> FeatureMatrix:
    """Reorder external columns to ``doc_ids``; every id must be present."""
    index = {doc_id: i for i, doc_id in enumerate(ext.doc_ids)}
    rows = []
    for doc_id in doc_ids:
        if doc_id not in index:
            raise DataError(f"doc_id mismatch: no external columns for {doc_id}")
        rows.append(ext.rows[index[doc_id]])
    return FeatureMatrix(list(ext.feature_names), list(doc_ids), np.array(rows))


def concat_features(*matrices) -> FeatureMatrix:
    """Column-wise concatenation of feature matrices over identical doc ids.

    ``None`` entries are skipped; names must stay unique after the merge.
    """
    present = [m for m in matrices if m is not None]
    if not present:
        raise DataError("concat_features needs at least one matrix")
    base = present[0]
    for other in present[1:]:
        if other.doc_ids != base.doc_ids:
            offender = next(
                (a for a, b in zip(base.doc_ids, other.doc_ids) if a != b),
                "<length mismatch>",
            )
            raise DataError(f"doc_id mismatch at {offender}")
    names = [name for m in present for name in m.feature_names]
    if len(set(names)) != len(names):
        dup = next(n for i, n in enumerate(names) if n in names[:i])
        raise DataError(f"duplicate feature name {dup}")
    rows = np.hstack([m.rows for m in present])
    return FeatureMatrix(names, list(base.doc_ids), rows)
