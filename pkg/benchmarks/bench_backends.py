"""Timing comparison of the compiled and pure-Python kernel backends.

Runs the three hot kernels (best_split, apply_tree, tree_shap) on
identical inputs under both implementations, checks they agree, and
prints a table.  Usage:

    python3 benchmarks/bench_backends.py [--repeat N] [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from textattrib import _kernels_py
from textattrib.forest import ForestConfig, train
from textattrib.matrix import FeatureMatrix

try:
    from textattrib import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _split_case(rng, n: int, d: int, n_classes: int):
    X = rng.standard_normal((n, d))
    y = ((X[:, 0] + 0.7 * X[:, d // 2] > 0).astype(np.int32)
         + (X[:, d - 1] > 0.5).astype(np.int32))
    y = np.minimum(y, n_classes - 1).astype(np.int32)
    return np.ascontiguousarray(X), np.ascontiguousarray(y)


def _grown_tree(rng, n: int, d: int):
    X = rng.standard_normal((n, d))
    labels = [
        str(int(X[i, 0] > 0) + 2 * int(X[i, 1] + 0.4 * X[i, 2] > 0.2))
        for i in range(n)
    ]
    matrix = FeatureMatrix(
        [f"f{j}" for j in range(d)], [f"r{i}" for i in range(n)], X
    )
    forest = train(
        matrix,
        labels,
        ForestConfig(
            n_trees=1, max_depth=60, bootstrap=False, features_per_split=d, seed=7
        ),
    )
    return forest.trees[0]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5, help="best-of repeats")
    parser.add_argument("--quick", action="store_true", help="smaller inputs")
    args = parser.parse_args()

    if _kernels is None:
        print("compiled backend not importable; nothing to compare")
        return

    rng = np.random.default_rng(99)
    scale = 4 if args.quick else 1
    rows = []

    for n, d in ((2000 // scale, 5), (500 // scale, 26), (200 // scale, 56)):
        X, y = _split_case(rng, n, d, 4)
        n_classes = int(y.max()) + 1
        ref = _kernels.best_split(X, y, n_classes, 1)
        assert ref == _kernels_py.best_split(X, y, n_classes, 1)
        rows.append((
            "best_split", f"{n}x{d}, {n_classes} classes",
            _time(lambda: _kernels.best_split(X, y, n_classes, 1), args.repeat),
            _time(lambda: _kernels_py.best_split(X, y, n_classes, 1), args.repeat),
        ))

    tree = _grown_tree(rng, 1500 // scale, 26)
    n_nodes = len(tree.feature)
    X_apply = np.ascontiguousarray(rng.standard_normal((4000 // scale, 26)))
    ref = _kernels.apply_tree(
        tree.feature, tree.threshold, tree.left, tree.right, X_apply
    )
    assert np.array_equal(
        ref,
        _kernels_py.apply_tree(
            tree.feature, tree.threshold, tree.left, tree.right, X_apply
        ),
    )
    rows.append((
        "apply_tree", f"{n_nodes} nodes, {X_apply.shape[0]} rows",
        _time(
            lambda: _kernels.apply_tree(
                tree.feature, tree.threshold, tree.left, tree.right, X_apply
            ),
            args.repeat,
        ),
        _time(
            lambda: _kernels_py.apply_tree(
                tree.feature, tree.threshold, tree.left, tree.right, X_apply
            ),
            args.repeat,
        ),
    ))

    X_shap = np.ascontiguousarray(rng.standard_normal((100 // scale, 26)))
    n_classes = tree.counts.shape[1]

    def run_shap(mod):
        phi = np.zeros((X_shap.shape[0], 26, n_classes))
        mod.tree_shap(
            tree.feature, tree.threshold, tree.left, tree.right,
            tree.cover, tree.leaf_values, X_shap, phi,
        )
        return phi

    assert np.array_equal(run_shap(_kernels), run_shap(_kernels_py))
    rows.append((
        "tree_shap", f"{n_nodes} nodes, {X_shap.shape[0]} rows",
        _time(lambda: run_shap(_kernels), args.repeat),
        _time(lambda: run_shap(_kernels_py), args.repeat),
    ))

    header = f"{'kernel':<12} {'input':<24} {'cython':>10} {'python':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, shape, t_cy, t_py in rows:
        print(
            f"{name:<12} {shape:<24} {t_cy * 1e3:>8.2f}ms {t_py * 1e3:>8.2f}ms "
            f"{t_py / t_cy:>7.1f}x"
        )


if __name__ == "__main__":
    main()
