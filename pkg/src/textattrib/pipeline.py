"""Feature assembly and the train/validation/test experiment protocol.

A run loads a labeled train corpus and a labeled test corpus, carves a
validation set out of the train side, fits the forest on the remaining
rows, and writes every artifact (feature matrices, model, reports,
attribution rankings) under one output directory.  All writers are
deterministic, so rerunning a config yields byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import channels as channels_mod
from .corpus import Corpus, load_corpus, split_train_validation
from .errors import DataError
from .evaluation import EvalReport, evaluate
from .forest import Forest, ForestConfig, forest_to_json, predict, train
from .matrix import FeatureMatrix, write_feature_matrix
from .shapley import importance_report
from .stylometry import FEATURE_NAMES, default_lexicon, extract_stylo
from .tokenizer import tokenize

FEATURE_SETS = ("stylo", "stylo+agg", "stylo+ext", "stylo+agg+ext")


def corpus_features(corpus: Corpus) -> FeatureMatrix:
    """26 stylometric features per document, in corpus order."""
    lexicons = {}
    rows = []
    for doc in corpus.documents:
        if doc.lang not in lexicons:
            lexicons[doc.lang] = default_lexicon(doc.lang)
        rows.append(extract_stylo(tokenize(doc.text), lexicons[doc.lang], doc.lang))
    return FeatureMatrix(
        feature_names=FEATURE_NAMES,
        doc_ids=tuple(corpus.doc_ids()),
        rows=rows,
    )


def assemble_features(
    corpus: Corpus,
    feature_set: str = "stylo",
    channels_path=None,
    ext_path=None,
) -> FeatureMatrix:
    """Stylometric features, optionally concatenated with channel
    aggregates and external per-document columns."""
    if feature_set not in FEATURE_SETS:
        raise DataError(
            f"unknown feature set {feature_set!r}; expected one of {FEATURE_SETS}"
        )
    matrix = corpus_features(corpus)
    doc_ids = list(matrix.doc_ids)
    if "agg" in feature_set.split("+"):
        if channels_path is None:
            raise DataError(f"feature set {feature_set!r} needs a channels file")
        sequences = channels_mod.load_channels(channels_path)
        matrix = channels_mod.concat_features(
            matrix, channels_mod.aggregate_matrix(sequences, doc_ids)
        )
    if "ext" in feature_set.split("+"):
        if ext_path is None:
            raise DataError(f"feature set {feature_set!r} needs an ext-columns file")
        ext = channels_mod.load_external_columns(ext_path)
        matrix = channels_mod.concat_features(
            matrix, channels_mod.align_external(ext, doc_ids)
        )
    return matrix


def infer_feature_set(channels_path, ext_path) -> str:
    parts = ["stylo"]
    if channels_path is not None:
        parts.append("agg")
    if ext_path is not None:
        parts.append("ext")
    return "+".join(parts)


@dataclass(frozen=True)
class ExperimentConfig:
    train_path: str
    test_path: str
    corpus_format: str = "jsonl"
    lang: str = "en"
    feature_set: str = "stylo"
    channels_train: str | None = None
    channels_test: str | None = None
    ext_train: str | None = None
    ext_test: str | None = None
    n_trees: int = 200
    max_depth: int = 60
    min_samples_leaf: int = 1
    features_per_split: int | None = None
    bootstrap: bool = True
    seed: int = 10
    validation_fraction: float = 0.2
    shap_rows: str = "test"  # test | validation | train | none
    shap_top_k: int = 10
    threads: int = 1

    def forest_config(self) -> ForestConfig:
        return ForestConfig(
            n_trees=self.n_trees,
            max_depth=self.max_depth,
            min_samples_leaf=self.min_samples_leaf,
            features_per_split=self.features_per_split,
            seed=self.seed,
            bootstrap=self.bootstrap,
        )


def load_experiment_config(path, overrides=None) -> ExperimentConfig:
    """Read a TOML config with [data], [features], [model], [eval]
    tables; overrides win over file values."""
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"bad config: {exc}") from exc

    sections = {}
    for name in ("data", "features", "model", "eval"):
        section = doc.get(name, {})
        if not isinstance(section, dict):
            raise DataError(f"bad config: [{name}] must be a table")
        sections[name] = section
    data, features, model, evalsec = (
        sections["data"],
        sections["features"],
        sections["model"],
        sections["eval"],
    )

    def typed(section, key, kind, default):
        value = section.get(key, default)
        if value is None:
            return None
        if kind in (int, float) and isinstance(value, bool):
            raise DataError(f"bad config value: {key} must be {kind.__name__}")
        if kind is float and isinstance(value, int):
            value = float(value)
        if not isinstance(value, kind):
            raise DataError(f"bad config value: {key} must be {kind.__name__}")
        return value

    train_path = typed(data, "train", str, None)
    test_path = typed(data, "test", str, None)
    if not train_path or not test_path:
        raise DataError("config must set [data] train and [data] test paths")
    base = Path(path).parent

    def resolve(p):
        return None if p is None else str(Path(p) if Path(p).is_absolute() else base / p)

    overrides = overrides or {}

    def pick(key, file_value):
        return overrides[key] if key in overrides else file_value

    cfg = ExperimentConfig(
        train_path=resolve(train_path),
        test_path=resolve(test_path),
        corpus_format=typed(data, "format", str, "jsonl"),
        lang=typed(data, "lang", str, "en"),
        channels_train=resolve(typed(data, "channels_train", str, None)),
        channels_test=resolve(typed(data, "channels_test", str, None)),
        ext_train=resolve(typed(data, "ext_train", str, None)),
        ext_test=resolve(typed(data, "ext_test", str, None)),
        feature_set=typed(features, "set", str, "stylo"),
        n_trees=int(pick("n_trees", typed(model, "trees", int, 200))),
        max_depth=int(pick("max_depth", typed(model, "max_depth", int, 60))),
        min_samples_leaf=typed(model, "min_samples_leaf", int, 1),
        features_per_split=typed(model, "features_per_split", int, None),
        bootstrap=typed(model, "bootstrap", bool, True),
        seed=int(pick("seed", typed(evalsec, "seed", int, 10))),
        validation_fraction=typed(evalsec, "validation_fraction", float, 0.2),
        shap_rows=typed(evalsec, "shap_rows", str, "test"),
        shap_top_k=typed(evalsec, "shap_top_k", int, 10),
        threads=int(pick("threads", typed(evalsec, "threads", int, 1))),
    )
    if cfg.feature_set not in FEATURE_SETS:
        raise DataError(f"unknown feature set {cfg.feature_set!r} in config")
    if cfg.shap_rows not in ("test", "validation", "train", "none"):
        raise DataError(f"bad shap_rows {cfg.shap_rows!r} in config")
    return cfg


@contextmanager
def _stage(name: str):
    try:
        yield
    except DataError as exc:
        raise DataError(f"{name}: {exc}") from exc


@dataclass(frozen=True)
class ExperimentResult:
    validation: EvalReport
    test: EvalReport
    model: Forest
    outdir: Path


def run_experiment(cfg: ExperimentConfig, outdir) -> ExperimentResult:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    with _stage("load train corpus"):
        full_train = load_corpus(
            cfg.train_path, format=cfg.corpus_format, default_lang=cfg.lang
        )
    with _stage("load test corpus"):
        test = load_corpus(
            cfg.test_path, format=cfg.corpus_format, default_lang=cfg.lang
        )
        if not test.labeled:
            raise DataError("test corpus must be labeled")

    with _stage("split"):
        train_part, val_part = split_train_validation(
            full_train, cfg.validation_fraction, cfg.seed
        )

    def features_for(corpus, channels_path, ext_path):
        return assemble_features(
            corpus, cfg.feature_set, channels_path=channels_path, ext_path=ext_path
        )

    with _stage("features"):
        feats_train = features_for(train_part, cfg.channels_train, cfg.ext_train)
        feats_val = features_for(val_part, cfg.channels_train, cfg.ext_train)
        feats_test = features_for(test, cfg.channels_test, cfg.ext_test)
    write_feature_matrix(feats_train, outdir / "features_train.csv")
    write_feature_matrix(feats_val, outdir / "features_validation.csv")
    write_feature_matrix(feats_test, outdir / "features_test.csv")

    classes = tuple(
        sorted(set(full_train.labels()) | set(test.labels()))
    )
    with _stage("train"):
        model = train(
            feats_train,
            list(train_part.labels()),
            cfg.forest_config(),
            classes=classes,
            threads=cfg.threads,
        )
    model_json = forest_to_json(model)
    (outdir / "model.json").write_text(model_json, encoding="utf-8")
    model_hash = hashlib.sha256(model_json.encode("utf-8")).hexdigest()

    metadata = {
        "seed": cfg.seed,
        "split_fraction": cfg.validation_fraction,
        "feature_set": cfg.feature_set,
        "model_hash": model_hash,
        "feature_count": len(feats_train.feature_names),
        "shap_rows": cfg.shap_rows,
    }

    def report_for(split_name, feats, gold):
        with _stage(f"evaluate {split_name}"):
            pred = predict(model, feats.rows)
            meta = dict(metadata)
            meta["split"] = split_name
            return evaluate(gold, pred, classes, meta), pred

    val_report, _ = report_for("validation", feats_val, list(val_part.labels()))
    test_report, test_pred = report_for("test", feats_test, list(test.labels()))

    with open(outdir / "predictions_test.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("doc_id,gold,predicted\n")
        for doc_id, gold, pred in zip(
            feats_test.doc_ids, test.labels(), test_pred
        ):
            fh.write(f"{doc_id},{gold},{pred}\n")

    report_doc = json.dumps(
        {"test": test_report.to_dict(), "validation": val_report.to_dict()},
        sort_keys=True,
        indent=2,
    )
    (outdir / "report.json").write_text(report_doc + "\n", encoding="utf-8")
    text = (
        "== validation ==\n"
        + val_report.format_text()
        + "\n== test ==\n"
        + test_report.format_text()
    )
    (outdir / "report.txt").write_text(text, encoding="utf-8")

    if cfg.shap_rows != "none":
        chosen = {
            "train": feats_train,
            "validation": feats_val,
            "test": feats_test,
        }[cfg.shap_rows]
        with _stage("shap"):
            report = importance_report(model, chosen)
        report.to_csv(outdir / "shap.csv")
        (outdir / "shap.txt").write_text(
            report.format_table(cfg.shap_top_k), encoding="utf-8"
        )

    return ExperimentResult(
        validation=val_report, test=test_report, model=model, outdir=outdir
    )
