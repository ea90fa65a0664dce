"""Command-line entry point.

One executable with subcommands covering the pipeline: feature
extraction, channel aggregation, training, prediction, attribution
reports, evaluation, and full config-driven experiment runs.  Exit
codes: 0 success, 1 usage error, 2 bad input data, 3 internal error.
Diagnostics go to stderr; data goes to stdout or --output.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from . import channels as channels_mod
from .corpus import load_corpus
from .errors import DataError
from .evaluation import evaluate
from .forest import (
    MODEL_FORMAT_VERSION,
    forest_to_json,
    load_model,
    predict_proba,
    save_model,
    train,
)
from .matrix import write_feature_matrix_stream
from .pipeline import (
    ExperimentConfig,
    assemble_features,
    infer_feature_set,
    load_experiment_config,
    run_experiment,
)
from .shapley import importance_report


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for
    # data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextmanager
def _out_stream(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _add_corpus_flags(p, with_channels=True):
    p.add_argument("--input", required=True, help="corpus file")
    p.add_argument("--format", choices=("jsonl", "tsv"), default="jsonl")
    p.add_argument(
        "--lang",
        choices=("en", "es"),
        default="en",
        help="language for documents that do not state one",
    )
    if with_channels:
        p.add_argument("--channels", help="token channel JSONL file")
        p.add_argument("--ext-columns", help="external per-document CSV columns")


def build_parser() -> _Parser:
    parser = _Parser(prog="textattrib", description=__doc__)
    parser.add_argument(
        "--version",
        action="version",
        version=f"textattrib {__version__} (model format {MODEL_FORMAT_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser(
        "extract", help="write the 26 stylometric features as CSV"
    )
    _add_corpus_flags(p, with_channels=False)
    p.add_argument("--output", help="output CSV (default stdout)")

    p = sub.add_parser(
        "aggregate", help="pool token channels into per-document features"
    )
    p.add_argument("--input", required=True, help="channels JSONL file")
    p.add_argument("--output", help="output CSV (default stdout)")

    p = sub.add_parser("train", help="train a random forest")
    _add_corpus_flags(p)
    p.add_argument("--output", help="model JSON path (default stdout)")
    p.add_argument("--trees", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=60)
    p.add_argument("--seed", type=int, default=10)
    p.add_argument("--threads", type=int, default=os.cpu_count())

    p = sub.add_parser("predict", help="predict classes for a corpus")
    _add_corpus_flags(p)
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--output", help="predictions CSV (default stdout)")

    p = sub.add_parser("explain", help="mean |SHAP| feature rankings")
    _add_corpus_flags(p)
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--output", help="ranking CSV (default stdout)")
    p.add_argument("--top-k", type=int, default=10, help="table rows per class")

    p = sub.add_parser("evaluate", help="score a model on a labeled corpus")
    _add_corpus_flags(p)
    p.add_argument("--model", required=True, help="model JSON path")
    p.add_argument("--output", help="report JSON (default stdout)")

    p = sub.add_parser("run", help="config-driven experiment")
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--trees", type=int, default=None)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    return parser


def _load_features(args):
    corpus = load_corpus(args.input, format=args.format, default_lang=args.lang)
    channels_path = getattr(args, "channels", None)
    ext_path = getattr(args, "ext_columns", None)
    feature_set = infer_feature_set(channels_path, ext_path)
    matrix = assemble_features(
        corpus, feature_set, channels_path=channels_path, ext_path=ext_path
    )
    return corpus, matrix


def _check_model_features(forest, matrix):
    if tuple(matrix.feature_names) != tuple(forest.feature_names):
        raise DataError(
            "feature names do not match the model; check --channels and"
            " --ext-columns"
        )


def _cmd_extract(args) -> int:
    corpus = load_corpus(args.input, format=args.format, default_lang=args.lang)
    from .pipeline import corpus_features

    matrix = corpus_features(corpus)
    with _out_stream(args.output) as fh:
        write_feature_matrix_stream(matrix, fh)
    return 0


def _cmd_aggregate(args) -> int:
    sequences = channels_mod.load_channels(args.input)
    matrix = channels_mod.aggregate_matrix(sequences, list(sequences))
    with _out_stream(args.output) as fh:
        write_feature_matrix_stream(matrix, fh)
    return 0


def _cmd_train(args) -> int:
    from .forest import ForestConfig

    corpus, matrix = _load_features(args)
    if not corpus.labeled:
        raise DataError("training corpus has no labels")
    config = ForestConfig(n_trees=args.trees, max_depth=args.max_depth, seed=args.seed)
    forest = train(
        matrix, list(corpus.labels()), config, threads=max(1, args.threads or 1)
    )
    if args.output is None:
        sys.stdout.write(forest_to_json(forest))
    else:
        save_model(forest, args.output)
    print(
        f"trained {config.n_trees} trees on {matrix.rows.shape[0]} documents,"
        f" {len(matrix.feature_names)} features",
        file=sys.stderr,
    )
    return 0


def _cmd_predict(args) -> int:
    forest = load_model(args.model)
    _, matrix = _load_features(args)
    _check_model_features(forest, matrix)
    proba = predict_proba(forest, matrix.rows)
    with _out_stream(args.output) as fh:
        header = ",".join(f"proba_{c}" for c in forest.classes)
        fh.write(f"doc_id,predicted,{header}\n")
        for doc_id, row in zip(matrix.doc_ids, proba):
            label = forest.classes[int(np.argmax(row))]
            cells = ",".join(format(v, ".17g") for v in row)
            fh.write(f"{doc_id},{label},{cells}\n")
    return 0


def _cmd_explain(args) -> int:
    forest = load_model(args.model)
    _, matrix = _load_features(args)
    _check_model_features(forest, matrix)
    report = importance_report(forest, matrix)
    with _out_stream(args.output) as fh:
        fh.write("class,feature,mean_abs_shap\n")
        for cls in report.classes:
            for name, value in report.ranking(cls):
                fh.write(f"{cls},{name},{format(value, '.17g')}\n")
    sys.stderr.write(report.format_table(args.top_k))
    return 0


def _cmd_evaluate(args) -> int:
    forest = load_model(args.model)
    corpus, matrix = _load_features(args)
    if not corpus.labeled:
        raise DataError("evaluation corpus has no labels")
    _check_model_features(forest, matrix)
    proba = predict_proba(forest, matrix.rows)
    pred = [forest.classes[int(i)] for i in np.argmax(proba, axis=1)]
    gold = list(corpus.labels())
    classes = sorted(set(forest.classes) | set(gold))
    report = evaluate(gold, pred, classes, {"model": args.model})
    with _out_stream(args.output) as fh:
        fh.write(report.to_json())
    sys.stderr.write(report.format_text())
    return 0


def _cmd_run(args) -> int:
    overrides = {}
    for key in ("trees", "max_depth", "seed", "threads"):
        value = getattr(args, key)
        if value is not None:
            overrides["n_trees" if key == "trees" else key] = value
    cfg = load_experiment_config(args.config, overrides)
    result = run_experiment(cfg, args.output)
    print(
        f"validation macro F1: {result.validation.macro_f1:.6f}\n"
        f"test macro F1: {result.test.macro_f1:.6f}\n"
        f"artifacts: {result.outdir}",
        file=sys.stderr,
    )
    return 0


_COMMANDS = {
    "extract": _cmd_extract,
    "aggregate": _cmd_aggregate,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "explain": _cmd_explain,
    "evaluate": _cmd_evaluate,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"textattrib: error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        return 0
    except Exception as exc:  # pragma: no cover - defensive
        print(f"textattrib: internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
