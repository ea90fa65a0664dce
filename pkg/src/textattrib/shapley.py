"""Exact path-dependent Shapley attributions for forest predictions.

The value function conditions on a feature subset S by descending a
tree: at splits on features in S the row's side is taken, elsewhere
both children contribute weighted by their training cover.  phi is the
exact Shapley value of that game per feature and class; baseline is
v(empty set), the cover-weighted mean of leaf distributions.  Forest
attributions average tree attributions, so baseline + sum(phi) equals
predict_proba per class (local accuracy).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import tree_shap
from .errors import DataError
from .forest import Forest, Tree, predict_proba
from .matrix import FeatureMatrix


@dataclass(frozen=True)
class Explanation:
    doc_id: str
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    baseline: np.ndarray  # [C]
    phi: np.ndarray  # [d, C]

    def prediction(self) -> np.ndarray:
        return self.baseline + self.phi.sum(axis=0)


def tree_baseline(tree: Tree) -> np.ndarray:
    """v(empty set): cover-weighted average of leaf distributions."""
    weights = tree.cover / tree.cover[0]
    return (tree.leaf_values * weights[:, None]).sum(axis=0)


def _check_arity(n_features: int, X: np.ndarray) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise DataError(f"row arity mismatch: expected {n_features} features")
    if not np.isfinite(X).all():
        raise DataError("non-finite value in explanation input")
    return X


def shap_tree(tree: Tree, row) -> tuple[np.ndarray, np.ndarray]:
    """(phi [d, C], baseline [C]) for one tree and one row."""
    X = _check_arity(len(row), row)
    if tree.feature.max(initial=-1) >= X.shape[1]:
        raise DataError("row arity mismatch: tree splits on absent feature")
    n_classes = tree.counts.shape[1]
    phi = np.zeros((1, X.shape[1], n_classes), dtype=np.float64)
    tree_shap(
        tree.feature, tree.threshold, tree.left, tree.right,
        tree.cover, tree.leaf_values, X, phi,
    )
    return phi[0], tree_baseline(tree)


def shap_matrix(forest: Forest, X) -> tuple[np.ndarray, np.ndarray]:
    """(phi [n, d, C], baseline [C]) for every row of X."""
    X = _check_arity(forest.n_features, X)
    phi = np.zeros((X.shape[0], forest.n_features, forest.n_classes), dtype=np.float64)
    baseline = np.zeros(forest.n_classes, dtype=np.float64)
    for tree in forest.trees:
        tree_shap(
            tree.feature, tree.threshold, tree.left, tree.right,
            tree.cover, tree.leaf_values, X, phi,
        )
        baseline += tree_baseline(tree)
    phi /= len(forest.trees)
    baseline /= len(forest.trees)
    return phi, baseline


def shap_forest(forest: Forest, row, doc_id: str = "") -> Explanation:
    phi, baseline = shap_matrix(forest, np.asarray(row, dtype=np.float64)[None, :])
    return Explanation(
        doc_id=doc_id,
        classes=forest.classes,
        feature_names=forest.feature_names,
        baseline=baseline,
        phi=phi[0],
    )


@dataclass(frozen=True)
class ImportanceReport:
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    mean_abs: np.ndarray  # [d, C]

    def ranking(self, cls: str) -> list[tuple[str, float]]:
        """Features for one class, descending mean |phi|, name tiebreak."""
        c = self.classes.index(cls)
        pairs = [
            (name, float(self.mean_abs[i, c]))
            for i, name in enumerate(self.feature_names)
        ]
        return sorted(pairs, key=lambda p: (-p[1], p[0]))

    def overall_ranking(self) -> list[tuple[str, float]]:
        """Features by mean |phi| averaged over classes."""
        overall = self.mean_abs.mean(axis=1)
        pairs = [
            (name, float(overall[i])) for i, name in enumerate(self.feature_names)
        ]
        return sorted(pairs, key=lambda p: (-p[1], p[0]))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("class,feature,mean_abs_shap\n")
            for cls in self.classes:
                for name, value in self.ranking(cls):
                    fh.write(f"{cls},{name},{format(value, '.17g')}\n")

    def format_table(self, top_k: int = 10) -> str:
        lines = []
        width = max(len(n) for n in self.feature_names)
        for cls in self.classes:
            lines.append(f"class {cls}")
            for rank, (name, value) in enumerate(self.ranking(cls)[:top_k], 1):
                lines.append(f"  {rank:2d}. {name:<{width}}  {value:.6f}")
        return "\n".join(lines) + "\n"


def importance_report(forest: Forest, matrix: FeatureMatrix) -> ImportanceReport:
    if matrix.rows.shape[0] == 0:
        raise DataError("no rows to explain")
    if tuple(matrix.feature_names) != tuple(forest.feature_names):
        raise DataError("feature names do not match the model")
    phi, _ = shap_matrix(forest, matrix.rows)
    return ImportanceReport(
        classes=forest.classes,
        feature_names=forest.feature_names,
        mean_abs=np.abs(phi).mean(axis=0),
    )


def local_accuracy_error(forest: Forest, X) -> float:
    """Largest |baseline + sum(phi) - predict_proba| over rows and classes."""
    X = _check_arity(forest.n_features, X)
    phi, baseline = shap_matrix(forest, X)
    recon = baseline[None, :] + phi.sum(axis=1)
    return float(np.abs(recon - predict_proba(forest, X)).max())
