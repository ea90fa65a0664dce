"""Loading, validating, and splitting document collections.

JSONL corpora have one object per line with fields ``id``, ``text`` and
optional ``label`` / ``lang`` (lang defaults to en).  TSV corpora need a
header row, are tab-separated without quoting, and cannot hold newlines
inside ``text``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import DataError
from .rng import Xoshiro256StarStar

LANGS = ("en", "es")


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    lang: str = "en"
    label: Optional[str] = None


@dataclass(frozen=True)
class Corpus:
    documents: tuple
    classes: tuple = field(default=())

    def __len__(self) -> int:
        return len(self.documents)

    @property
    def labeled(self) -> bool:
        return bool(self.documents) and all(d.label is not None for d in self.documents)

    def labels(self) -> list:
        return [d.label for d in self.documents]

    def doc_ids(self) -> list:
        return [d.id for d in self.documents]


def _make_corpus(documents) -> Corpus:
    classes = sorted({d.label for d in documents if d.label is not None})
    return Corpus(documents=tuple(documents), classes=tuple(classes))


def _validate_record(record: dict, lineno: int, default_lang: str, seen_ids: set) -> Document:
    doc_id = record.get("id")
    text = record.get("text")
    if not isinstance(doc_id, str) or not doc_id:
        raise DataError(f"missing or empty id at line {lineno}")
    if doc_id in seen_ids:
        raise DataError(f"duplicate id {doc_id} at line {lineno}")
    if not isinstance(text, str) or not text.strip():
        raise DataError(f"missing or empty text at line {lineno}")
    lang = record.get("lang") or default_lang
    if lang not in LANGS:
        raise DataError(f"unsupported lang {lang!r} at line {lineno}")
    label = record.get("label")
    if label is not None and not isinstance(label, str):
        raise DataError(f"non-string label at line {lineno}")
    seen_ids.add(doc_id)
    return Document(id=doc_id, text=text, lang=lang, label=label)


def load_corpus(path, format: str = "jsonl", default_lang: str = "en") -> Corpus:
    """Read a corpus file, preserving document order.

    Raises DataError naming the offending line for malformed records and
    duplicate ids; an empty file is an error.
    """
    if format not in ("jsonl", "tsv"):
        raise DataError(f"unknown corpus format {format!r}")
    documents = []
    seen_ids: set = set()
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus: {exc}") from exc
    with handle:
        if format == "jsonl":
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise DataError(f"malformed JSON at line {lineno}: {exc.msg}") from exc
                if not isinstance(record, dict):
                    raise DataError(f"malformed record at line {lineno}: not an object")
                documents.append(_validate_record(record, lineno, default_lang, seen_ids))
        else:
            header_line = handle.readline()
            if not header_line:
                raise DataError("empty corpus")
            header = header_line.rstrip("\n").split("\t")
            if "id" not in header or "text" not in header:
                raise DataError("TSV header must contain id and text columns")
            for lineno, line in enumerate(handle, start=2):
                if not line.strip():
                    continue
                fields = line.rstrip("\n").split("\t")
                if len(fields) != len(header):
                    raise DataError(
                        f"line {lineno} has {len(fields)} fields, expected {len(header)}"
                    )
                record = {k: (v if v != "" else None) for k, v in zip(header, fields)}
                documents.append(_validate_record(record, lineno, default_lang, seen_ids))
    if not documents:
        raise DataError("empty corpus")
    return _make_corpus(documents)


def corpus_from_documents(documents) -> Corpus:
    """Build a corpus in-memory, enforcing the same invariants as loading."""
    seen: set = set()
    validated = []
    for i, doc in enumerate(documents, start=1):
        record = {"id": doc.id, "text": doc.text, "lang": doc.lang, "label": doc.label}
        validated.append(_validate_record(record, i, doc.lang or "en", seen))
    if not validated:
        raise DataError("empty corpus")
    return _make_corpus(validated)


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for doc in corpus.documents:
            record = {"id": doc.id, "text": doc.text, "lang": doc.lang}
            if doc.label is not None:
                record["label"] = doc.label
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def split_train_validation(corpus: Corpus, validation_fraction: float, seed: int):
    """Deterministic unstratified split into (train, validation).

    The document indices are shuffled with the package PRNG seeded by
    ``seed``; the first round(fraction * N) shuffled documents form the
    validation set.  Original corpus order is preserved inside each side.
    ``round`` is floor(x + 0.5) to stay platform-independent.
    """
    if not 0.0 < validation_fraction < 1.0:
        raise DataError("validation_fraction must be in (0, 1)")
    if not corpus.labeled:
        raise DataError("cannot split an unlabeled corpus")
    n = len(corpus)
    n_val = int(validation_fraction * n + 0.5)
    order = list(range(n))
    Xoshiro256StarStar(seed).shuffle(order)
    val_indices = set(order[:n_val])
    train_docs = [d for i, d in enumerate(corpus.documents) if i not in val_indices]
    val_docs = [d for i, d in enumerate(corpus.documents) if i in val_indices]
    return _make_corpus(train_docs), _make_corpus(val_docs)
