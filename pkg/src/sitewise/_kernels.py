"""Hot numeric kernels: a numba-jitted fast path and a numpy fallback.

The backend is chosen once at import time. Set SITEWISE_NUMBA=0 to force
the numpy fallback; anything else (or unset) uses numba when importable.
Both backends implement the same arithmetic in the same order, so results
agree across paths; benchmarks/kernel_bench.py compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

_INF = 1e20


def _want_numba() -> bool:
    if os.environ.get("SITEWISE_NUMBA", "1") == "0":
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USING_NUMBA = _want_numba()


def worker_threads() -> int:
    """Thread count for embarrassingly parallel kernel fan-out.

    Set by the CLI --threads flag (0 means all cores). The numpy fallback
    holds the GIL inside kernels, so it always runs single-threaded.
    """
    if not USING_NUMBA:
        return 1
    raw = os.environ.get("SITEWISE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n <= 0:
        return os.cpu_count() or 1
    return n


# ---------------------------------------------------------------------------
# Exact Euclidean distance transform (squared, in cell units).
# Fast path: two-pass separable lower-envelope-of-parabolas algorithm.
# Fallback: scipy's exact EDT. Both yield sqrt(integer) distances, so the
# two backends agree bit-for-bit.
# ---------------------------------------------------------------------------

def _edt_1d_impl(f, d, v, z):
    n = f.shape[0]
    k = 0
    v[0] = 0
    z[0] = -_INF
    z[1] = _INF
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _INF
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        dq = q - v[k]
        d[q] = dq * dq + f[v[k]]


def _edt_sq_impl(mask):
    nrows, ncols = mask.shape
    g = np.empty((nrows, ncols), np.float64)
    nmax = max(nrows, ncols)
    d = np.empty(nmax, np.float64)
    v = np.empty(nmax, np.int64)
    z = np.empty(nmax + 1, np.float64)
    f = np.empty(nmax, np.float64)
    for c in range(ncols):
        for r in range(nrows):
            f[r] = 0.0 if mask[r, c] else _INF
        _edt_1d_impl(f[:nrows], d[:nrows], v, z)
        for r in range(nrows):
            g[r, c] = d[r]
    out = np.empty((nrows, ncols), np.float64)
    for r in range(nrows):
        for c in range(ncols):
            f[c] = g[r, c]
        _edt_1d_impl(f[:ncols], d[:ncols], v, z)
        for c in range(ncols):
            out[r, c] = d[c]
    return out


def _edt_sq_numpy(mask):
    from scipy import ndimage

    dist = ndimage.distance_transform_edt(~mask.astype(bool))
    return dist * dist


# ---------------------------------------------------------------------------
# Fisher-Jenks optimal 1-D classification (exact dynamic program).
# ---------------------------------------------------------------------------

def _jenks_dp_impl(values, n_classes):
    # values must be sorted ascending
    n = values.shape[0]
    s1 = np.empty(n + 1, np.float64)
    s2 = np.empty(n + 1, np.float64)
    s1[0] = 0.0
    s2[0] = 0.0
    for i in range(n):
        s1[i + 1] = s1[i] + values[i]
        s2[i + 1] = s2[i] + values[i] * values[i]

    # best[c-1, m] = min total SSD of values[0..m] split into c classes
    best = np.full((n_classes, n), _INF)
    argt = np.full((n_classes, n), -1, np.int64)
    for m in range(n):
        w = m + 1
        sm = s1[m + 1] - s1[0]
        best[0, m] = (s2[m + 1] - s2[0]) - sm * sm / w
        argt[0, m] = -1
    for c in range(1, n_classes):
        for m in range(c, n):
            b = _INF
            a = -1
            for t in range(c - 1, m):
                w = m - t
                sm = s1[m + 1] - s1[t + 1]
                cost = (s2[m + 1] - s2[t + 1]) - sm * sm / w
                cand = best[c - 1, t] + cost
                if cand < b:
                    b = cand
                    a = t
            best[c, m] = b
            argt[c, m] = a

    bounds = np.empty(n_classes - 1, np.int64)
    m = n - 1
    for c in range(n_classes - 1, 0, -1):
        t = argt[c, m]
        bounds[c - 1] = t
        m = t
    return bounds, best[n_classes - 1, n - 1]


def _jenks_dp_numpy(values, n_classes):
    n = values.shape[0]
    s1 = np.concatenate(([0.0], np.cumsum(values)))
    s2 = np.concatenate(([0.0], np.cumsum(values * values)))

    best = np.full((n_classes, n), _INF)
    argt = np.full((n_classes, n), -1, np.int64)
    m_all = np.arange(n)
    sm = s1[1:] - s1[0]
    best[0] = (s2[1:] - s2[0]) - sm * sm / (m_all + 1.0)
    for c in range(1, n_classes):
        for m in range(c, n):
            t = np.arange(c - 1, m)
            w = (m - t).astype(np.float64)
            smv = s1[m + 1] - s1[t + 1]
            cand = best[c - 1, t] + ((s2[m + 1] - s2[t + 1]) - smv * smv / w)
            j = int(np.argmin(cand))
            best[c, m] = cand[j]
            argt[c, m] = t[j]

    bounds = np.empty(n_classes - 1, np.int64)
    m = n - 1
    for c in range(n_classes - 1, 0, -1):
        t = argt[c, m]
        bounds[c - 1] = t
        m = t
    return bounds, best[n_classes - 1, n - 1]


# ---------------------------------------------------------------------------
# Per-county counts of raster cells whose center falls within a radius.
# ---------------------------------------------------------------------------

def _radius_counts_impl(ids, fx, fy, radius, xll, yll, cellsize, n_counties):
    nrows, ncols = ids.shape
    counts = np.zeros(n_counties, np.int64)
    total = 0
    c_lo = int(np.floor((fx - radius - xll) / cellsize - 0.5))
    c_hi = int(np.ceil((fx + radius - xll) / cellsize - 0.5))
    r2 = radius * radius
    if c_lo < 0:
        c_lo = 0
    if c_hi > ncols - 1:
        c_hi = ncols - 1
    for r in range(nrows):
        cy = yll + (nrows - r - 0.5) * cellsize
        dy = cy - fy
        if dy * dy > r2:
            continue
        for c in range(c_lo, c_hi + 1):
            cx = xll + (c + 0.5) * cellsize
            dx = cx - fx
            if dx * dx + dy * dy <= r2:
                cid = ids[r, c]
                if cid >= 0:
                    counts[cid] += 1
                    total += 1
    return counts, total


def _radius_counts_numpy(ids, fx, fy, radius, xll, yll, cellsize, n_counties):
    nrows, ncols = ids.shape
    cx = xll + (np.arange(ncols) + 0.5) * cellsize
    cy = yll + (nrows - np.arange(nrows) - 0.5) * cellsize
    dx = cx - fx
    dy = cy - fy
    inside = (dx * dx)[None, :] + (dy * dy)[:, None] <= radius * radius
    hit = ids[inside]
    hit = hit[hit >= 0]
    counts = np.bincount(hit, minlength=n_counties).astype(np.int64)
    return counts, int(hit.shape[0])


# ---------------------------------------------------------------------------
# CART growth for classification (gini) and Newton-step regression trees.
# Node ids are assigned in split order; feat_order[node] supplies the
# per-node feature candidates, so both backends grow identical trees.
# ---------------------------------------------------------------------------

def _grow_gini_impl(X, y, rows0, n_classes, max_depth, min_leaf, mtry,
                    feat_order, feature, threshold, left, right, counts, imp):
    m0 = rows0.shape[0]
    idx = rows0.copy()
    scratch = np.empty(m0, np.int64)
    max_nodes = feature.shape[0]
    stack_node = np.empty(max_nodes, np.int64)
    stack_lo = np.empty(max_nodes, np.int64)
    stack_hi = np.empty(max_nodes, np.int64)
    stack_dep = np.empty(max_nodes, np.int64)
    top = 0
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = m0
    stack_dep[0] = 0
    top = 1
    n_nodes = 1
    n_total = float(m0)

    while top > 0:
        top -= 1
        node = stack_node[top]
        lo = stack_lo[top]
        hi = stack_hi[top]
        depth = stack_dep[top]
        m = hi - lo

        cnt = np.zeros(n_classes, np.float64)
        for t in range(lo, hi):
            cnt[y[idx[t]]] += 1.0
        for c in range(n_classes):
            counts[node, c] = cnt[c]
        g_par = 1.0
        for c in range(n_classes):
            a = cnt[c] / m
            g_par -= a * a

        feature[node] = -1
        threshold[node] = 0.0
        left[node] = -1
        right[node] = -1
        if m < 2 * min_leaf or g_par <= 0.0:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        best_w = _INF
        best_f = -1
        best_thr = 0.0
        best_nl = 0
        for fi in range(mtry):
            f = feat_order[node, fi]
            vals = np.empty(m, np.float64)
            for t in range(m):
                vals[t] = X[idx[lo + t], f]
            order = np.argsort(vals)
            cl = np.zeros(n_classes, np.float64)
            for p in range(m - 1):
                cl[y[idx[lo + order[p]]]] += 1.0
                if vals[order[p]] == vals[order[p + 1]]:
                    continue
                nl = p + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                gl = 1.0
                gr = 1.0
                for c in range(n_classes):
                    al = cl[c] / nl
                    gl -= al * al
                    ar = (cnt[c] - cl[c]) / nr
                    gr -= ar * ar
                w = (nl * gl + nr * gr) / m
                if w < best_w:
                    best_w = w
                    best_f = f
                    best_thr = 0.5 * (vals[order[p]] + vals[order[p + 1]])
                    best_nl = nl

        if best_f < 0:
            continue
        decrease = g_par - best_w
        if decrease <= 0.0:
            continue
        imp[best_f] += (m / n_total) * decrease

        # stable partition of idx[lo:hi]
        nl = 0
        for t in range(lo, hi):
            if X[idx[t], best_f] <= best_thr:
                scratch[nl] = idx[t]
                nl += 1
        nr = nl
        for t in range(lo, hi):
            if not (X[idx[t], best_f] <= best_thr):
                scratch[nr] = idx[t]
                nr += 1
        for t in range(m):
            idx[lo + t] = scratch[t]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack_node[top] = rid
        stack_lo[top] = lo + best_nl
        stack_hi[top] = hi
        stack_dep[top] = depth + 1
        top += 1
        stack_node[top] = lid
        stack_lo[top] = lo
        stack_hi[top] = lo + best_nl
        stack_dep[top] = depth + 1
        top += 1
    return n_nodes


def _grow_gini_numpy(X, y, rows0, n_classes, max_depth, min_leaf, mtry,
                     feat_order, feature, threshold, left, right, counts, imp):
    n_total = float(rows0.shape[0])
    stack = [(0, rows0.copy(), 0)]
    n_nodes = 1
    while stack:
        node, rows, depth = stack.pop()
        m = rows.shape[0]
        yr = y[rows]
        cnt = np.zeros(n_classes)
        for c in range(n_classes):
            cnt[c] = float(np.count_nonzero(yr == c))
        counts[node] = cnt
        g_par = 1.0
        for c in range(n_classes):
            a = cnt[c] / m
            g_par -= a * a

        feature[node] = -1
        threshold[node] = 0.0
        left[node] = -1
        right[node] = -1
        if m < 2 * min_leaf or g_par <= 0.0:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        best_w = _INF
        best_f = -1
        best_thr = 0.0
        for fi in range(mtry):
            f = feat_order[node, fi]
            v = X[rows, f]
            order = np.argsort(v)
            sv = v[order]
            sy = yr[order]
            nl = np.arange(1, m, dtype=np.float64)
            nr = m - nl
            gl = np.ones(m - 1)
            gr = np.ones(m - 1)
            for c in range(n_classes):
                cum = np.cumsum(sy == c)[:-1].astype(np.float64)
                al = cum / nl
                gl -= al * al
                ar = (cnt[c] - cum) / nr
                gr -= ar * ar
            w = (nl * gl + nr * gr) / m
            invalid = sv[:-1] == sv[1:]
            invalid |= (nl < min_leaf) | (nr < min_leaf)
            w[invalid] = _INF
            j = int(np.argmin(w))
            if w[j] < best_w:
                best_w = w[j]
                best_f = f
                best_thr = 0.5 * (sv[j] + sv[j + 1])

        if best_f < 0:
            continue
        decrease = g_par - best_w
        if decrease <= 0.0:
            continue
        imp[best_f] += (m / n_total) * decrease

        mask = X[rows, best_f] <= best_thr
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack.append((rid, rows[~mask], depth + 1))
        stack.append((lid, rows[mask], depth + 1))
    return n_nodes


def _grow_newton_impl(X, g, h, lam, max_depth, min_leaf, min_gain,
                      feature, threshold, left, right, value, imp):
    n = X.shape[0]
    nfeat = X.shape[1]
    idx = np.arange(n)
    scratch = np.empty(n, np.int64)
    max_nodes = feature.shape[0]
    stack_node = np.empty(max_nodes, np.int64)
    stack_lo = np.empty(max_nodes, np.int64)
    stack_hi = np.empty(max_nodes, np.int64)
    stack_dep = np.empty(max_nodes, np.int64)
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    stack_dep[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        lo = stack_lo[top]
        hi = stack_hi[top]
        depth = stack_dep[top]
        m = hi - lo

        gs = 0.0
        hs = 0.0
        for t in range(lo, hi):
            gs += g[idx[t]]
            hs += h[idx[t]]
        value[node] = -gs / (hs + lam)
        score_par = gs * gs / (hs + lam)

        feature[node] = -1
        left[node] = -1
        right[node] = -1
        threshold[node] = 0.0
        if m < 2 * min_leaf:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        best_gain = min_gain
        best_f = -1
        best_thr = 0.0
        best_nl = 0
        for f in range(nfeat):
            vals = np.empty(m, np.float64)
            for t in range(m):
                vals[t] = X[idx[lo + t], f]
            order = np.argsort(vals)
            glc = 0.0
            hlc = 0.0
            for p in range(m - 1):
                r = idx[lo + order[p]]
                glc += g[r]
                hlc += h[r]
                if vals[order[p]] == vals[order[p + 1]]:
                    continue
                nl = p + 1
                nr = m - nl
                if nl < min_leaf or nr < min_leaf:
                    continue
                grc = gs - glc
                hrc = hs - hlc
                gain = 0.5 * (glc * glc / (hlc + lam)
                              + grc * grc / (hrc + lam) - score_par)
                if gain > best_gain:
                    best_gain = gain
                    best_f = f
                    best_thr = 0.5 * (vals[order[p]] + vals[order[p + 1]])
                    best_nl = nl

        if best_f < 0:
            continue
        imp[best_f] += best_gain

        nl = 0
        for t in range(lo, hi):
            if X[idx[t], best_f] <= best_thr:
                scratch[nl] = idx[t]
                nl += 1
        nr = nl
        for t in range(lo, hi):
            if not (X[idx[t], best_f] <= best_thr):
                scratch[nr] = idx[t]
                nr += 1
        for t in range(m):
            idx[lo + t] = scratch[t]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack_node[top] = rid
        stack_lo[top] = lo + best_nl
        stack_hi[top] = hi
        stack_dep[top] = depth + 1
        top += 1
        stack_node[top] = lid
        stack_lo[top] = lo
        stack_hi[top] = lo + best_nl
        stack_dep[top] = depth + 1
        top += 1
    return n_nodes


def _grow_newton_numpy(X, g, h, lam, max_depth, min_leaf, min_gain,
                       feature, threshold, left, right, value, imp):
    n = X.shape[0]
    nfeat = X.shape[1]
    stack = [(0, np.arange(n), 0)]
    n_nodes = 1
    while stack:
        node, rows, depth = stack.pop()
        m = rows.shape[0]
        gr_ = g[rows]
        hr_ = h[rows]
        gs = 0.0
        hs = 0.0
        for t in range(m):
            gs += gr_[t]
            hs += hr_[t]
        value[node] = -gs / (hs + lam)
        score_par = gs * gs / (hs + lam)

        feature[node] = -1
        left[node] = -1
        right[node] = -1
        threshold[node] = 0.0
        if m < 2 * min_leaf:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        best_gain = min_gain
        best_f = -1
        best_thr = 0.0
        for f in range(nfeat):
            v = X[rows, f]
            order = np.argsort(v)
            sv = v[order]
            glc = np.cumsum(gr_[order])[:-1]
            hlc = np.cumsum(hr_[order])[:-1]
            nl = np.arange(1, m)
            nr = m - nl
            grc = gs - glc
            hrc = hs - hlc
            gain = 0.5 * (glc * glc / (hlc + lam)
                          + grc * grc / (hrc + lam) - score_par)
            invalid = sv[:-1] == sv[1:]
            invalid |= (nl < min_leaf) | (nr < min_leaf)
            gain[invalid] = -_INF
            j = int(np.argmax(gain))
            if gain[j] > best_gain:
                best_gain = gain[j]
                best_f = f
                best_thr = 0.5 * (sv[j] + sv[j + 1])

        if best_f < 0:
            continue
        imp[best_f] += best_gain

        mask = X[rows, best_f] <= best_thr
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        stack.append((rid, rows[~mask], depth + 1))
        stack.append((lid, rows[mask], depth + 1))
    return n_nodes


def _tree_apply_impl(feature, threshold, left, right, X):
    n = X.shape[0]
    out = np.empty(n, np.int64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = node
    return out


def _tree_apply_numpy(feature, threshold, left, right, X):
    n = X.shape[0]
    node = np.zeros(n, np.int64)
    active = feature[node] >= 0
    while np.any(active):
        a = np.nonzero(active)[0]
        f = feature[node[a]]
        go_left = X[a, f] <= threshold[node[a]]
        node[a] = np.where(go_left, left[node[a]], right[node[a]])
        active[a] = feature[node[a]] >= 0
    return node


# ---------------------------------------------------------------------------
# Box-constrained dual coordinate ascent for kernel SVMs (bias folded into
# the kernel, so the equality constraint drops out).
# ---------------------------------------------------------------------------

def _svc_dual_impl(K, y, C, epochs, tol):
    n = K.shape[0]
    alpha = np.zeros(n)
    f = np.zeros(n)
    for _ in range(epochs):
        delta_max = 0.0
        for i in range(n):
            grad = 1.0 - y[i] * f[i]
            a_new = alpha[i] + grad / K[i, i]
            if a_new < 0.0:
                a_new = 0.0
            elif a_new > C:
                a_new = C
            d = a_new - alpha[i]
            if d != 0.0:
                alpha[i] = a_new
                dy = d * y[i]
                for j in range(n):
                    f[j] += dy * K[i, j]
            if d < 0.0:
                d = -d
            if d > delta_max:
                delta_max = d
        if delta_max < tol:
            break
    return alpha


def _svc_dual_numpy(K, y, C, epochs, tol):
    n = K.shape[0]
    alpha = np.zeros(n)
    f = np.zeros(n)
    for _ in range(epochs):
        delta_max = 0.0
        for i in range(n):
            grad = 1.0 - y[i] * f[i]
            a_new = min(max(alpha[i] + grad / K[i, i], 0.0), C)
            d = a_new - alpha[i]
            if d != 0.0:
                alpha[i] = a_new
                f += (d * y[i]) * K[i]
            delta_max = max(delta_max, abs(d))
        if delta_max < tol:
            break
    return alpha


# ---------------------------------------------------------------------------
# Backend assembly
# ---------------------------------------------------------------------------

_NUMBA_SOURCES = {
    "edt_sq": _edt_sq_impl,
    "jenks_dp": _jenks_dp_impl,
    "radius_counts": _radius_counts_impl,
    "grow_gini": _grow_gini_impl,
    "grow_newton": _grow_newton_impl,
    "tree_apply": _tree_apply_impl,
    "svc_dual": _svc_dual_impl,
}

_NUMPY_IMPLS = {
    "edt_sq": _edt_sq_numpy,
    "jenks_dp": _jenks_dp_numpy,
    "radius_counts": _radius_counts_numpy,
    "grow_gini": _grow_gini_numpy,
    "grow_newton": _grow_newton_numpy,
    "tree_apply": _tree_apply_numpy,
    "svc_dual": _svc_dual_numpy,
}


def get_backend(name: str) -> dict:
    """Return the kernel table for 'numba' or 'numpy' (used by the bench)."""
    if name == "numpy":
        return dict(_NUMPY_IMPLS)
    if name != "numba":
        raise ValueError(f"unknown backend {name!r}")
    from numba import njit

    compiled = {}
    edt_1d = njit(cache=True, nogil=True)(_edt_1d_impl)

    def _with_helper(src):
        # rebind the module-level 1d helper to its jitted version
        g = dict(src.__globals__)
        g["_edt_1d_impl"] = edt_1d
        import types

        return types.FunctionType(src.__code__, g, src.__name__,
                                  src.__defaults__, src.__closure__)

    for key, fn in _NUMBA_SOURCES.items():
        # nogil lets callers fan kernel calls out over a thread pool
        if key == "edt_sq":
            compiled[key] = njit(cache=True, nogil=True)(_with_helper(fn))
        else:
            compiled[key] = njit(cache=True, nogil=True)(fn)
    return compiled


_table = get_backend("numba" if USING_NUMBA else "numpy")

edt_sq = _table["edt_sq"]
jenks_dp = _table["jenks_dp"]
radius_counts = _table["radius_counts"]
grow_gini = _table["grow_gini"]
grow_newton = _table["grow_newton"]
tree_apply = _table["tree_apply"]
svc_dual = _table["svc_dual"]


def warmup() -> None:
    """Trigger JIT compilation on tiny inputs (no-op on the numpy path)."""
    mask = np.zeros((4, 4), np.uint8)
    mask[1, 2] = 1
    edt_sq(mask)
    jenks_dp(np.array([0.0, 1.0, 5.0, 6.0, 9.0]), 3)
    ids = np.zeros((4, 4), np.int32)
    radius_counts(ids, 1.0, 1.0, 2.0, 0.0, 0.0, 1.0, 1)
    X = np.array([[0.0, 1.0], [1.0, 0.0], [2.0, 1.0], [3.0, 0.0]])
    y = np.array([0, 1, 0, 1], np.int64)
    mx = 9
    feat_order = np.tile(np.arange(2, dtype=np.int32), (mx, 1))
    grow_gini(X, y, np.arange(4), 2, -1, 1, 2, feat_order,
              np.empty(mx, np.int64), np.empty(mx), np.empty(mx, np.int64),
              np.empty(mx, np.int64), np.empty((mx, 2)), np.zeros(2))
    g = np.array([0.5, -0.5, 0.5, -0.5])
    h = np.full(4, 0.25)
    grow_newton(X, g, h, 1.0, 3, 1, 1e-12,
                np.empty(mx, np.int64), np.empty(mx), np.empty(mx, np.int64),
                np.empty(mx, np.int64), np.empty(mx), np.zeros(2))
    tree_apply(np.array([-1], np.int64), np.zeros(1), np.array([-1], np.int64),
               np.array([-1], np.int64), X)
    K = np.eye(3) + 1.0
    svc_dual(K, np.array([1.0, -1.0, 1.0]), 1.0, 5, 1e-8)
