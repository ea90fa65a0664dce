"""Random forest on document feature matrices.

CART trees with Gini impurity, grown on per-tree seeded bootstrap
samples.  Training is deterministic given (data, config): candidate
features are drawn from a counter-based generator seeded seed +
tree_index, thresholds sit at midpoints between consecutive distinct
sorted values, and equal-impurity splits resolve to the lowest feature
index, then the lowest threshold.  Zero-gain splits are taken when no
positive-gain split exists so patterns like XOR still shatter; growth
stops at max_depth, on pure nodes, or when every candidate column is
constant.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ._backend import apply_tree, best_split
from .errors import DataError
from .matrix import FeatureMatrix
from .rng import Xoshiro256StarStar

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int = 60
    min_samples_leaf: int = 1
    features_per_split: int | None = None  # None resolves to floor(sqrt(d))
    seed: int = 10
    bootstrap: bool = True

    def validate(self) -> None:
        if self.n_trees < 1:
            raise DataError("n_trees must be >= 1")
        if self.max_depth < 0:
            raise DataError("max_depth must be >= 0")
        if self.min_samples_leaf < 1:
            raise DataError("min_samples_leaf must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise DataError("features_per_split must be >= 1")


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; children always follow their parent.

    feature holds -1 at leaves; counts holds per-class training counts
    at leaves and zeros elsewhere.  cover and leaf_values are derived
    once here so the Shapley walk and prediction reuse them.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray
    cover: np.ndarray = None  # type: ignore[assignment]
    leaf_values: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        cover = self.counts.sum(axis=1).astype(np.float64)
        for i in range(len(self.feature) - 1, -1, -1):
            if self.feature[i] >= 0:
                cover[i] = cover[self.left[i]] + cover[self.right[i]]
        leaf_values = np.zeros(self.counts.shape, dtype=np.float64)
        leaves = self.feature < 0
        leaf_values[leaves] = self.counts[leaves] / cover[leaves, None]
        object.__setattr__(self, "cover", cover)
        object.__setattr__(self, "leaf_values", leaf_values)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int32)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depths[self.left[i]] = depths[i] + 1
                depths[self.right[i]] = depths[i] + 1
        return int(depths.max())


@dataclass(frozen=True)
class Forest:
    trees: tuple[Tree, ...]
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    config: ForestConfig

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)


class _TreeBuilder:
    def __init__(self, X, y, n_classes, config, k):
        self.X = X
        self.y = y
        self.n_classes = n_classes
        self.config = config
        self.k = k
        self.d = X.shape[1]
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.counts: list[np.ndarray] = []

    def build(self, rng: Xoshiro256StarStar) -> Tree:
        n = self.X.shape[0]
        if self.config.bootstrap:
            rows = np.array([rng.randbelow(n) for _ in range(n)], dtype=np.int64)
        else:
            rows = np.arange(n, dtype=np.int64)
        self._grow(rows, 0, rng)
        return Tree(
            feature=np.array(self.feature, dtype=np.int32),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            counts=np.array(self.counts, dtype=np.int64),
        )

    def _new_node(self) -> int:
        idx = len(self.feature)
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.counts.append(np.zeros(self.n_classes, dtype=np.int64))
        return idx

    def _grow(self, rows: np.ndarray, depth: int, rng: Xoshiro256StarStar) -> int:
        idx = self._new_node()
        labels = self.y[rows]
        cnt = np.bincount(labels, minlength=self.n_classes).astype(np.int64)
        cfg = self.config
        if (
            depth >= cfg.max_depth
            or len(rows) < 2 * cfg.min_samples_leaf
            or int(cnt.max()) == len(rows)
        ):
            self.counts[idx] = cnt
            return idx
        if self.k >= self.d:
            cand = np.arange(self.d, dtype=np.int64)
        else:
            cand = np.array(sorted(rng.sample_indices(self.d, self.k)), dtype=np.int64)
        col, thr, found = best_split(
            np.ascontiguousarray(self.X[np.ix_(rows, cand)]),
            np.ascontiguousarray(labels.astype(np.int32)),
            self.n_classes,
            cfg.min_samples_leaf,
        )
        if not found:
            self.counts[idx] = cnt
            return idx
        f = int(cand[col])
        go_left = self.X[rows, f] <= thr
        self.feature[idx] = f
        self.threshold[idx] = thr
        self.left[idx] = self._grow(rows[go_left], depth + 1, rng)
        self.right[idx] = self._grow(rows[~go_left], depth + 1, rng)
        return idx


def _resolve_k(config: ForestConfig, d: int) -> int:
    if config.features_per_split is not None:
        return min(config.features_per_split, d)
    return max(1, int(math.isqrt(d)))


def train(
    matrix: FeatureMatrix,
    labels,
    config: ForestConfig = ForestConfig(),
    classes=None,
    threads: int = 1,
) -> Forest:
    """Grow a forest on matrix rows labeled by the parallel labels list."""
    config.validate()
    X = matrix.rows
    if X.shape[0] != len(labels):
        raise DataError(
            f"label count {len(labels)} does not match row count {X.shape[0]}"
        )
    if X.shape[0] < 2:
        raise DataError("need at least 2 training rows")
    if not np.isfinite(X).all():
        raise DataError("non-finite feature value in training matrix")
    if classes is None:
        classes = tuple(sorted(set(labels)))
    else:
        classes = tuple(classes)
        missing = set(labels) - set(classes)
        if missing:
            raise DataError(f"label {sorted(missing)[0]!r} not in class list")
    if len(classes) < 2:
        raise DataError("training data has a single class")
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[v] for v in labels], dtype=np.int32)
    k = _resolve_k(config, X.shape[1])
    resolved = replace(config, features_per_split=k)

    def build_one(t: int) -> Tree:
        rng = Xoshiro256StarStar(config.seed + t)
        return _TreeBuilder(X, y, len(classes), resolved, k).build(rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = tuple(pool.map(build_one, range(config.n_trees)))
    else:
        trees = tuple(build_one(t) for t in range(config.n_trees))
    for tree in trees:
        assert tree.depth() <= config.max_depth
    return Forest(
        trees=trees,
        classes=classes,
        feature_names=tuple(matrix.feature_names),
        config=resolved,
    )


def _check_rows(forest: Forest, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise DataError(
            f"row arity mismatch: expected {forest.n_features} features"
        )
    if not np.isfinite(X).all():
        raise DataError("non-finite value in prediction input")
    return X


def predict_proba(forest: Forest, X) -> np.ndarray:
    """Average of per-tree leaf class frequencies; rows sum to 1."""
    single = np.asarray(X).ndim == 1
    X = _check_rows(forest, X)
    total = np.zeros((X.shape[0], forest.n_classes), dtype=np.float64)
    for tree in forest.trees:
        leaves = apply_tree(tree.feature, tree.threshold, tree.left, tree.right, X)
        total += tree.leaf_values[leaves]
    proba = total / len(forest.trees)
    return proba[0] if single else proba


def predict(forest: Forest, X) -> list[str]:
    proba = predict_proba(forest, np.atleast_2d(np.asarray(X, dtype=np.float64)))
    return [forest.classes[i] for i in np.argmax(proba, axis=1)]


def _node_to_json(tree: Tree, idx: int):
    if tree.feature[idx] < 0:
        return {"class_counts": [int(c) for c in tree.counts[idx]]}
    return {
        "feature_index": int(tree.feature[idx]),
        "threshold": float(tree.threshold[idx]),
        "left": _node_to_json(tree, int(tree.left[idx])),
        "right": _node_to_json(tree, int(tree.right[idx])),
    }


def _node_from_json(obj, out, d: int, n_classes: int) -> int:
    feature, threshold, left, right, counts = out
    idx = len(feature)
    if not isinstance(obj, dict):
        raise DataError("corrupt model file: node is not an object")
    if "class_counts" in obj:
        cc = obj["class_counts"]
        ok = (
            isinstance(cc, list)
            and len(cc) == n_classes
            and all(
                isinstance(c, int) and not isinstance(c, bool) and c >= 0
                for c in cc
            )
            and sum(cc) >= 1
        )
        if not ok:
            raise DataError("corrupt model file: bad leaf counts")
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(cc)
        return idx
    try:
        f = obj["feature_index"]
        thr = obj["threshold"]
        l_obj = obj["left"]
        r_obj = obj["right"]
    except KeyError as exc:
        raise DataError(f"corrupt model file: node missing {exc}") from exc
    if not isinstance(f, int) or isinstance(f, bool) or not 0 <= f < d:
        raise DataError("corrupt model file: feature index out of range")
    if not isinstance(thr, (int, float)) or not math.isfinite(thr):
        raise DataError("corrupt model file: non-finite threshold")
    feature.append(int(f))
    threshold.append(float(thr))
    left.append(-1)
    right.append(-1)
    counts.append([0] * n_classes)
    left[idx] = _node_from_json(l_obj, out, d, n_classes)
    right[idx] = _node_from_json(r_obj, out, d, n_classes)
    return idx


def forest_to_json(forest: Forest) -> str:
    cfg = forest.config
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "model_type": "random_forest",
        "classes": list(forest.classes),
        "feature_names": list(forest.feature_names),
        "hyperparams": {
            "n_trees": cfg.n_trees,
            "max_depth": cfg.max_depth,
            "min_samples_leaf": cfg.min_samples_leaf,
            "features_per_split": cfg.features_per_split,
            "seed": cfg.seed,
            "bootstrap": cfg.bootstrap,
        },
        "trees": [_node_to_json(t, 0) for t in forest.trees],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def save_model(forest: Forest, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(forest_to_json(forest))


def forest_from_json(text: str) -> Forest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"corrupt model file: {exc}") from exc
    if not isinstance(doc, dict):
        raise DataError("corrupt model file: not a JSON object")
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format version {version!r}")
    try:
        classes = tuple(str(c) for c in doc["classes"])
        names = tuple(str(f) for f in doc["feature_names"])
        hp = doc["hyperparams"]
        tree_objs = doc["trees"]
        config = ForestConfig(
            n_trees=int(hp["n_trees"]),
            max_depth=int(hp["max_depth"]),
            min_samples_leaf=int(hp["min_samples_leaf"]),
            features_per_split=(
                None
                if hp["features_per_split"] is None
                else int(hp["features_per_split"])
            ),
            seed=int(hp["seed"]),
            bootstrap=bool(hp["bootstrap"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"corrupt model file: {exc}") from exc
    if len(classes) < 2 or not names or not isinstance(tree_objs, list) or not tree_objs:
        raise DataError("corrupt model file: missing classes, features, or trees")
    trees = []
    for obj in tree_objs:
        out = ([], [], [], [], [])
        _node_from_json(obj, out, len(names), len(classes))
        trees.append(
            Tree(
                feature=np.array(out[0], dtype=np.int32),
                threshold=np.array(out[1], dtype=np.float64),
                left=np.array(out[2], dtype=np.int32),
                right=np.array(out[3], dtype=np.int32),
                counts=np.array(out[4], dtype=np.int64),
            )
        )
    return Forest(
        trees=tuple(trees), classes=classes, feature_names=names, config=config
    )


def load_model(path) -> Forest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read model file: {exc}") from exc
    return forest_from_json(text)
