"""Pure-Python/numpy kernels: split search, tree application, Shapley walk.

This module is the fallback used when the compiled extension is absent.
Both backends perform the same IEEE-754 double operations in the same
order, so trained models and attributions are bit-identical across them.

Split quality is tracked as the total weighted child impurity scaled by
the node size, H = (n_l - sq_l/n_l) + (n_r - sq_r/n_r) where sq is the
sum of squared class counts; minimizing H minimizes the weighted Gini
impurity of the children.  All counts stay integers, so H is an exact
function of the partition on every platform.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def best_split(values, labels, n_classes, min_samples_leaf):
    """Best Gini split over candidate columns.

    values: float64 [n, m] feature columns of the node's rows (candidate
    features in ascending feature-index order); labels: int32/int64 class
    codes.  Thresholds are midpoints between consecutive distinct sorted
    values.  Ties resolve to the lowest column, then lowest threshold.
    Returns (column, threshold, found).
    """
    n, m = values.shape
    total = np.bincount(labels, minlength=n_classes).astype(np.int64)
    best_h = np.inf
    best_col = -1
    best_thr = 0.0
    eye = np.eye(n_classes, dtype=np.int64)
    for j in range(m):
        col = values[:, j]
        order = np.argsort(col)
        v = col[order]
        cum = np.cumsum(eye[labels[order]], axis=0)
        sizes = np.nonzero(v[1:] != v[:-1])[0] + 1  # left-side sizes
        sizes = sizes[(sizes >= min_samples_leaf) & (sizes <= n - min_samples_leaf)]
        if sizes.size == 0:
            continue
        left = cum[sizes - 1]
        right = total[None, :] - left
        nl = sizes.astype(np.float64)
        nr = (n - sizes).astype(np.float64)
        sql = (left * left).sum(axis=1)
        sqr = (right * right).sum(axis=1)
        h = (nl - sql / nl) + (nr - sqr / nr)
        b = int(np.argmin(h))
        if h[b] < best_h:
            best_h = float(h[b])
            best_col = j
            i = int(sizes[b])
            thr = (v[i - 1] + v[i]) / 2.0
            if thr == v[i]:
                thr = v[i - 1]
            best_thr = float(thr)
    return best_col, best_thr, best_col >= 0


def apply_tree(feature, threshold, left, right, X):
    """Leaf index reached by each row of X."""
    nodes = np.zeros(X.shape[0], dtype=np.int32)
    while True:
        live = np.nonzero(feature[nodes] >= 0)[0]
        if live.size == 0:
            return nodes
        cur = nodes[live]
        go_left = X[live, feature[cur]] <= threshold[cur]
        nodes[live] = np.where(go_left, left[cur], right[cur])


def _extend(f_idx, z, o, w, length, pz, po, pi):
    f_idx.append(pi)
    z.append(pz)
    o.append(po)
    w.append(1.0 if length == 0 else 0.0)
    for i in range(length - 1, -1, -1):
        w[i + 1] += po * w[i] * (i + 1) / (length + 1)
        w[i] = pz * w[i] * (length - i) / (length + 1)


def _unwind(f_idx, z, o, w, last, i):
    one = o[i]
    zero = z[i]
    nxt = w[last]
    for j in range(last - 1, -1, -1):
        if one != 0.0:
            t = w[j]
            w[j] = nxt * (last + 1) / ((j + 1) * one)
            nxt = t - w[j] * zero * (last - j) / (last + 1)
        else:
            w[j] = w[j] * (last + 1) / (zero * (last - j))
    for j in range(i, last):
        f_idx[j] = f_idx[j + 1]
        z[j] = z[j + 1]
        o[j] = o[j + 1]
    del f_idx[last], z[last], o[last], w[last]


def _unwound_sum(z, o, w, last, i):
    one = o[i]
    zero = z[i]
    total = 0.0
    if one != 0.0:
        nxt = w[last]
        for j in range(last - 1, -1, -1):
            t = nxt * (last + 1) / ((j + 1) * one)
            total += t
            nxt = w[j] - t * zero * ((last - j) / (last + 1))
    else:
        for j in range(last - 1, -1, -1):
            total += w[j] / (zero * ((last - j) / (last + 1)))
    return total


def _shap_recurse(feature, threshold, left, right, cover, leaf_values, x, phi,
                  node, depth, f_idx, z, o, w, pz, po, pf):
    f_idx = f_idx[: depth]
    z = z[: depth]
    o = o[: depth]
    w = w[: depth]
    _extend(f_idx, z, o, w, depth, pz, po, pf)
    f = feature[node]
    if f < 0:
        vals = leaf_values[node]
        for i in range(1, depth + 1):
            scale = _unwound_sum(z, o, w, depth, i) * (o[i] - z[i])
            phi[f_idx[i]] += scale * vals
        return
    if x[f] <= threshold[node]:
        hot, cold = left[node], right[node]
    else:
        hot, cold = right[node], left[node]
    hot_zero = cover[hot] / cover[node]
    cold_zero = cover[cold] / cover[node]
    iz = 1.0
    io = 1.0
    for k in range(depth + 1):
        if f_idx[k] == f:
            iz = z[k]
            io = o[k]
            _unwind(f_idx, z, o, w, depth, k)
            depth -= 1
            break
    _shap_recurse(feature, threshold, left, right, cover, leaf_values, x, phi,
                  hot, depth + 1, f_idx, z, o, w, hot_zero * iz, io, f)
    _shap_recurse(feature, threshold, left, right, cover, leaf_values, x, phi,
                  cold, depth + 1, f_idx, z, o, w, cold_zero * iz, 0.0, f)


def tree_shap(feature, threshold, left, right, cover, leaf_values, X, phi_out):
    """Accumulate per-feature, per-class attributions for each row of X.

    phi_out has shape [n_rows, n_features, n_classes] and is added to, so
    forest-level averaging can reuse one buffer across trees.
    """
    for r in range(X.shape[0]):
        _shap_recurse(feature, threshold, left, right, cover, leaf_values,
                      X[r], phi_out[r], 0, 0, [], [], [], [], 1.0, 1.0, -1)
