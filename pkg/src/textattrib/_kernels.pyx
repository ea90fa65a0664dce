# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: split search, tree application, Shapley walk.

Mirrors _kernels_py operation-for-operation.  Every floating-point
expression keeps the same shape and evaluation order as the fallback so
models and attributions are bit-identical across backends; integer
operands are cast to double explicitly wherever C integer division
could otherwise kick in, and multiply-accumulate statements are split
so the compiler cannot contract them into fused operations.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND_NAME = "cython"


cdef inline void _swap_pair(double* v, cnp.int32_t* y, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef double tv = v[a]
    cdef cnp.int32_t ty = y[a]
    v[a] = v[b]
    y[a] = y[b]
    v[b] = tv
    y[b] = ty


cdef void _sort_pairs(double* v, cnp.int32_t* y, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    # quicksort on v with y carried along; insertion sort below 16
    cdef Py_ssize_t i, j, mid
    cdef double pivot, tv
    cdef cnp.int32_t ty
    while hi - lo > 16:
        mid = lo + (hi - lo) // 2
        if v[mid] < v[lo]:
            _swap_pair(v, y, lo, mid)
        if v[hi] < v[lo]:
            _swap_pair(v, y, lo, hi)
        if v[hi] < v[mid]:
            _swap_pair(v, y, mid, hi)
        pivot = v[mid]
        i = lo
        j = hi
        while i <= j:
            while v[i] < pivot:
                i += 1
            while v[j] > pivot:
                j -= 1
            if i <= j:
                _swap_pair(v, y, i, j)
                i += 1
                j -= 1
        if j - lo < hi - i:
            _sort_pairs(v, y, lo, j)
            lo = i
        else:
            _sort_pairs(v, y, i, hi)
            hi = j
    for i in range(lo + 1, hi + 1):
        tv = v[i]
        ty = y[i]
        j = i - 1
        while j >= lo and v[j] > tv:
            v[j + 1] = v[j]
            y[j + 1] = y[j]
            j -= 1
        v[j + 1] = tv
        y[j + 1] = ty


def best_split(values_obj, labels_obj, int n_classes, Py_ssize_t min_samples_leaf):
    """Best Gini split; see the fallback for the full contract."""
    cdef double[:, ::1] values = np.ascontiguousarray(values_obj, dtype=np.float64)
    cdef cnp.int32_t[::1] labels = np.ascontiguousarray(labels_obj, dtype=np.int32)
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t m = values.shape[1]
    if n == 0 or m == 0:
        return -1, 0.0, False
    v_arr = np.empty(n, dtype=np.float64)
    y_arr = np.empty(n, dtype=np.int32)
    cl_arr = np.zeros(n_classes, dtype=np.int64)
    cr_arr = np.zeros(n_classes, dtype=np.int64)
    cdef double[::1] v_mv = v_arr
    cdef cnp.int32_t[::1] y_mv = y_arr
    cdef cnp.int64_t[::1] cl = cl_arr
    cdef cnp.int64_t[::1] cr = cr_arr
    cdef double* v = &v_mv[0]
    cdef cnp.int32_t* y = &y_mv[0]
    cdef double best_h = INFINITY
    cdef double best_thr = 0.0
    cdef double h, nl, nr, thr
    cdef Py_ssize_t best_col = -1
    cdef Py_ssize_t j, r, i
    cdef cnp.int64_t sq_l, sq_r
    cdef cnp.int32_t k
    cdef int c
    with nogil:
        for j in range(m):
            for r in range(n):
                v[r] = values[r, j]
                y[r] = labels[r]
            _sort_pairs(v, y, 0, n - 1)
            sq_l = 0
            sq_r = 0
            for c in range(n_classes):
                cl[c] = 0
                cr[c] = 0
            for r in range(n):
                cr[y[r]] += 1
            for c in range(n_classes):
                sq_r += cr[c] * cr[c]
            for i in range(1, n):
                k = y[i - 1]
                sq_l += 2 * cl[k] + 1
                cl[k] += 1
                sq_r -= 2 * cr[k] - 1
                cr[k] -= 1
                if v[i - 1] == v[i]:
                    continue
                if i < min_samples_leaf or i > n - min_samples_leaf:
                    continue
                nl = <double> i
                nr = <double> (n - i)
                h = (nl - (<double> sq_l) / nl) + (nr - (<double> sq_r) / nr)
                if h < best_h:
                    best_h = h
                    best_col = j
                    thr = (v[i - 1] + v[i]) / 2.0
                    if thr == v[i]:
                        thr = v[i - 1]
                    best_thr = thr
    return best_col, best_thr, best_col >= 0


def apply_tree(feature_obj, threshold_obj, left_obj, right_obj, X_obj):
    """Leaf index reached by each row of X."""
    cdef cnp.int32_t[::1] feature = np.ascontiguousarray(feature_obj, dtype=np.int32)
    cdef double[::1] threshold = np.ascontiguousarray(threshold_obj, dtype=np.float64)
    cdef cnp.int32_t[::1] left = np.ascontiguousarray(left_obj, dtype=np.int32)
    cdef cnp.int32_t[::1] right = np.ascontiguousarray(right_obj, dtype=np.int32)
    cdef double[:, ::1] X = np.ascontiguousarray(X_obj, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0]
    out_arr = np.zeros(n, dtype=np.int32)
    if n == 0:
        return out_arr
    cdef cnp.int32_t[::1] out = out_arr
    cdef Py_ssize_t r
    cdef cnp.int32_t node
    with nogil:
        for r in range(n):
            node = 0
            while feature[node] >= 0:
                if X[r, feature[node]] <= threshold[node]:
                    node = left[node]
                else:
                    node = right[node]
            out[r] = node
    return out_arr


cdef inline void _extend(cnp.int32_t* f_idx, double* z, double* o, double* w,
                         int length, double pz, double po, cnp.int32_t pi) noexcept nogil:
    cdef int i
    f_idx[length] = pi
    z[length] = pz
    o[length] = po
    w[length] = 1.0 if length == 0 else 0.0
    for i in range(length - 1, -1, -1):
        w[i + 1] += po * w[i] * (i + 1) / (length + 1)
        w[i] = pz * w[i] * (length - i) / (length + 1)


cdef inline void _unwind(cnp.int32_t* f_idx, double* z, double* o, double* w,
                         int last, int i) noexcept nogil:
    cdef double one = o[i]
    cdef double zero = z[i]
    cdef double nxt = w[last]
    cdef double t
    cdef int j
    for j in range(last - 1, -1, -1):
        if one != 0.0:
            t = w[j]
            w[j] = nxt * (last + 1) / ((j + 1) * one)
            nxt = t - w[j] * zero * (last - j) / (last + 1)
        else:
            w[j] = w[j] * (last + 1) / (zero * (last - j))
    # pweights are positional and were rebuilt above; only the element
    # fields shift down
    for j in range(i, last):
        f_idx[j] = f_idx[j + 1]
        z[j] = z[j + 1]
        o[j] = o[j + 1]


cdef inline double _unwound_sum(double* z, double* o, double* w,
                                int last, int i) noexcept nogil:
    cdef double one = o[i]
    cdef double zero = z[i]
    cdef double total = 0.0
    cdef double nxt, t
    cdef int j
    if one != 0.0:
        nxt = w[last]
        for j in range(last - 1, -1, -1):
            t = nxt * (last + 1) / ((j + 1) * one)
            total += t
            nxt = w[j] - t * zero * ((<double> (last - j)) / (<double> (last + 1)))
    else:
        for j in range(last - 1, -1, -1):
            total += w[j] / (zero * ((<double> (last - j)) / (<double> (last + 1))))
    return total


cdef void _shap_rec(cnp.int32_t* feature, double* threshold,
                    cnp.int32_t* left, cnp.int32_t* right, double* cover,
                    double* leaf_values, int n_cls, double* x, double* phi,
                    cnp.int32_t node, int depth,
                    cnp.int32_t* p_f, double* p_z, double* p_o, double* p_w,
                    double pz, double po, cnp.int32_t pf) noexcept nogil:
    cdef cnp.int32_t* f_idx = p_f + depth + 1
    cdef double* z = p_z + depth + 1
    cdef double* o = p_o + depth + 1
    cdef double* w = p_w + depth + 1
    cdef int i, k
    cdef cnp.int32_t f, hot, cold
    cdef double wsum, scale, contrib, hot_zero, cold_zero, iz, io
    for i in range(depth):
        f_idx[i] = p_f[i]
        z[i] = p_z[i]
        o[i] = p_o[i]
        w[i] = p_w[i]
    _extend(f_idx, z, o, w, depth, pz, po, pf)
    f = feature[node]
    if f < 0:
        for i in range(1, depth + 1):
            wsum = _unwound_sum(z, o, w, depth, i)
            scale = wsum * (o[i] - z[i])
            for k in range(n_cls):
                contrib = scale * leaf_values[node * n_cls + k]
                phi[f_idx[i] * n_cls + k] += contrib
        return
    if x[f] <= threshold[node]:
        hot = left[node]
        cold = right[node]
    else:
        hot = right[node]
        cold = left[node]
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
    _shap_rec(feature, threshold, left, right, cover, leaf_values, n_cls,
              x, phi, hot, depth + 1, f_idx, z, o, w, hot_zero * iz, io, f)
    _shap_rec(feature, threshold, left, right, cover, leaf_values, n_cls,
              x, phi, cold, depth + 1, f_idx, z, o, w, cold_zero * iz, 0.0, f)


def tree_shap(feature_obj, threshold_obj, left_obj, right_obj, cover_obj,
              leaf_values_obj, X_obj, phi_obj):
    """Accumulate per-feature, per-class attributions for each row of X."""
    cdef cnp.int32_t[::1] feature = np.ascontiguousarray(feature_obj, dtype=np.int32)
    cdef double[::1] threshold = np.ascontiguousarray(threshold_obj, dtype=np.float64)
    cdef cnp.int32_t[::1] left = np.ascontiguousarray(left_obj, dtype=np.int32)
    cdef cnp.int32_t[::1] right = np.ascontiguousarray(right_obj, dtype=np.int32)
    cdef double[::1] cover = np.ascontiguousarray(cover_obj, dtype=np.float64)
    cdef double[:, ::1] leaf_values = np.ascontiguousarray(leaf_values_obj, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(X_obj, dtype=np.float64)
    cdef double[:, :, ::1] phi = phi_obj
    cdef Py_ssize_t n_rows = X.shape[0]
    cdef Py_ssize_t n_nodes = feature.shape[0]
    if n_rows == 0:
        return
    # children are allocated after their parent, so one forward pass
    # yields every node depth
    depths = np.zeros(n_nodes, dtype=np.int32)
    cdef cnp.int32_t[::1] dmv = depths
    cdef Py_ssize_t q
    for q in range(n_nodes):
        if feature[q] >= 0:
            dmv[left[q]] = dmv[q] + 1
            dmv[right[q]] = dmv[q] + 1
    cdef int max_depth = int(depths.max()) if n_nodes else 0
    cdef Py_ssize_t cap = (max_depth + 3) * (max_depth + 4) // 2 + max_depth + 4
    buf_f = np.zeros(cap, dtype=np.int32)
    buf_z = np.zeros(cap, dtype=np.float64)
    buf_o = np.zeros(cap, dtype=np.float64)
    buf_w = np.zeros(cap, dtype=np.float64)
    cdef cnp.int32_t[::1] bf = buf_f
    cdef double[::1] bz = buf_z
    cdef double[::1] bo = buf_o
    cdef double[::1] bw = buf_w
    cdef int n_cls = <int> leaf_values.shape[1]
    cdef Py_ssize_t r
    with nogil:
        for r in range(n_rows):
            _shap_rec(&feature[0], &threshold[0], &left[0], &right[0],
                      &cover[0], &leaf_values[0, 0], n_cls,
                      &X[r, 0], &phi[r, 0, 0], 0, 0,
                      &bf[0], &bz[0], &bo[0], &bw[0], 1.0, 1.0, -1)
