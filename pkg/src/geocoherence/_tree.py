"""Numba kernels for growing and evaluating decision trees.

Trees are stored as flat node arrays: feature index (-1 for leaves),
threshold, left/right child ids (relative to the tree), and per-node
class-frequency vectors. Splits send rows with value <= threshold left.
"""

import numpy as np
from numba import njit

# Smallest Gini gain treated as a real improvement; true nonzero gains on
# integer counts are far larger than float noise at this scale.
MIN_GAIN = 1e-12


@njit(cache=True, nogil=True)
def _gini(counts, total):
    acc = 0.0
    for c in range(counts.shape[0]):
        p = counts[c] / total
        acc += p * p
    return 1.0 - acc


@njit(cache=True, nogil=True)
def search_optimal_split(X, y, q, rows, cand):
    """Best (feature, midpoint threshold, gain) by exhaustive Gini scan.

    Child impurities are tracked incrementally through integer
    sum-of-squares updates, so each candidate boundary costs O(1).
    Ties break toward the lower feature index, then the lower threshold;
    `cand` must be sorted ascending. Returns feature -1 when no split
    improves on the parent.
    """
    n = rows.shape[0]
    counts = np.zeros(q, dtype=np.int64)
    for p in range(n):
        counts[y[rows[p]]] += 1
    total_sq = np.int64(0)
    for c in range(q):
        total_sq += counts[c] * counts[c]
    # Maximizing left_sq/left_n + right_sq/right_n maximizes Gini gain;
    # the baseline (no split) value of that score is total_sq / n.
    base = total_sq / n

    best_feat = -1
    best_thr = 0.0
    best_score = base + n * MIN_GAIN
    vals = np.empty(n, dtype=np.float64)
    left_counts = np.empty(q, dtype=np.int64)
    for ci in range(cand.shape[0]):
        f = cand[ci]
        for p in range(n):
            vals[p] = X[rows[p], f]
        order = np.argsort(vals)
        left_counts[:] = 0
        left_sq = np.int64(0)
        right_sq = total_sq
        left_n = 0
        for p in range(n - 1):
            c = y[rows[order[p]]]
            lc = left_counts[c]
            left_sq += 2 * lc + 1
            left_counts[c] = lc + 1
            right_sq += 1 - 2 * (counts[c] - lc)
            left_n += 1
            v = vals[order[p]]
            v_next = vals[order[p + 1]]
            if v_next > v:
                score = left_sq / left_n + right_sq / (n - left_n)
                if score > best_score:
                    best_feat = f
                    best_thr = (v + v_next) / 2.0
                    best_score = score
    if best_feat < 0:
        return -1, 0.0, 0.0
    return best_feat, best_thr, (best_score - base) / n


@njit(cache=True, nogil=True)
def search_random_split(X, y, q, rows, cand):
    """Best of one uniform random cut per candidate feature.

    Uses the numba thread-local RNG; callers seed it per tree. Constant
    features and cuts with no Gini improvement yield no split.
    """
    n = rows.shape[0]
    counts = np.zeros(q, dtype=np.int64)
    for p in range(n):
        counts[y[rows[p]]] += 1
    parent = _gini(counts, n)

    best_feat = -1
    best_thr = 0.0
    best_gain = MIN_GAIN
    left_counts = np.empty(q, dtype=np.int64)
    for ci in range(cand.shape[0]):
        f = cand[ci]
        mn = np.inf
        mx = -np.inf
        for p in range(n):
            v = X[rows[p], f]
            if v < mn:
                mn = v
            if v > mx:
                mx = v
        if not mx > mn:
            continue
        thr = np.random.uniform(mn, mx)
        left_counts[:] = 0
        left_n = 0
        for p in range(n):
            if X[rows[p], f] <= thr:
                left_counts[y[rows[p]]] += 1
                left_n += 1
        if left_n == 0 or left_n == n:
            continue
        gl = _gini(left_counts, left_n)
        right_n = n - left_n
        for c in range(q):
            left_counts[c] = counts[c] - left_counts[c]
        gr = _gini(left_counts, right_n)
        gain = parent - (left_n / n) * gl - (right_n / n) * gr
        if gain > best_gain:
            best_feat = f
            best_thr = thr
            best_gain = gain
    return best_feat, best_thr, best_gain


@njit(cache=True, nogil=True)
def seed_rng(seed):
    """Seed the numba thread-local RNG used by the split kernels."""
    np.random.seed(seed)


@njit(cache=True, nogil=True)
def _draw_candidates(n_features, m, buf):
    """Sample m distinct feature indices, returned sorted ascending."""
    for f in range(n_features):
        buf[f] = f
    if m >= n_features:
        return buf[:n_features]
    for i in range(m):
        j = np.random.randint(i, n_features)
        tmp = buf[i]
        buf[i] = buf[j]
        buf[j] = tmp
    out = np.sort(buf[:m])
    buf[:m] = out
    return buf[:m]


@njit(cache=True, nogil=True)
def grow_tree(X, y, q, sample_idx, max_features, random_split,
              min_samples_split, max_depth, rng_seed):
    """Grow one tree depth-first over the given (possibly bootstrapped) rows.

    Each feature is argsorted once up front; node segments stay sorted
    through stable partitions, so per-node work is linear. Returns
    (feature, threshold, left, right, leaf) arrays trimmed to the number
    of nodes actually created. max_depth < 0 means unbounded.
    """
    np.random.seed(rng_seed)
    n_rows = sample_idx.shape[0]
    n_features = X.shape[1]
    max_nodes = 2 * n_rows + 1

    feat = np.full(max_nodes, -1, dtype=np.int64)
    thresh = np.zeros(max_nodes, dtype=np.float64)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    leaf = np.zeros((max_nodes, q), dtype=np.float64)

    # Materialize the sampled rows once; items are 0..n_rows-1.
    V = np.empty((n_rows, n_features), dtype=np.float64)
    yy = np.empty(n_rows, dtype=np.int64)
    for i in range(n_rows):
        r = sample_idx[i]
        yy[i] = y[r]
        for f in range(n_features):
            V[i, f] = X[r, f]
    sorted_items = np.empty((n_features, n_rows), dtype=np.int64)
    for f in range(n_features):
        sorted_items[f] = np.argsort(V[:, f])

    go_left = np.empty(n_rows, dtype=np.uint8)
    tmp_l = np.empty(n_rows, dtype=np.int64)
    tmp_r = np.empty(n_rows, dtype=np.int64)
    cand_buf = np.empty(n_features, dtype=np.int64)
    counts = np.empty(q, dtype=np.int64)
    left_counts = np.empty(q, dtype=np.int64)

    stack = np.empty((max_nodes, 4), dtype=np.int64)
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_rows
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        size = end - start

        counts[:] = 0
        for p in range(start, end):
            counts[yy[sorted_items[0, p]]] += 1
        n_present = 0
        total_sq = np.int64(0)
        for c in range(q):
            if counts[c] > 0:
                n_present += 1
            total_sq += counts[c] * counts[c]

        split_feat = -1
        split_thr = 0.0
        if (size >= min_samples_split and n_present > 1
                and (max_depth < 0 or depth < max_depth)):
            cand = _draw_candidates(n_features, max_features, cand_buf)
            base = total_sq / size
            best_score = base + size * MIN_GAIN
            for ci in range(cand.shape[0]):
                f = cand[ci]
                if random_split:
                    mn = V[sorted_items[f, start], f]
                    mx = V[sorted_items[f, end - 1], f]
                    if not mx > mn:
                        continue
                    thr = np.random.uniform(mn, mx)
                    left_counts[:] = 0
                    left_n = 0
                    for p in range(start, end):
                        it = sorted_items[f, p]
                        if V[it, f] <= thr:
                            left_counts[yy[it]] += 1
                            left_n += 1
                        else:
                            break
                    if left_n == 0 or left_n == size:
                        continue
                    left_sq = np.int64(0)
                    right_sq = np.int64(0)
                    for c in range(q):
                        left_sq += left_counts[c] * left_counts[c]
                        rc = counts[c] - left_counts[c]
                        right_sq += rc * rc
                    score = left_sq / left_n + right_sq / (size - left_n)
                    if score > best_score:
                        split_feat = f
                        split_thr = thr
                        best_score = score
                else:
                    left_counts[:] = 0
                    left_sq = np.int64(0)
                    right_sq = total_sq
                    left_n = 0
                    for p in range(start, end - 1):
                        it = sorted_items[f, p]
                        c = yy[it]
                        lc = left_counts[c]
                        left_sq += 2 * lc + 1
                        left_counts[c] = lc + 1
                        right_sq += 1 - 2 * (counts[c] - lc)
                        left_n += 1
                        v = V[it, f]
                        v_next = V[sorted_items[f, p + 1], f]
                        if v_next > v:
                            score = left_sq / left_n + right_sq / (size - left_n)
                            if score > best_score:
                                split_feat = f
                                split_thr = (v + v_next) / 2.0
                                best_score = score

        if split_feat < 0:
            for c in range(q):
                leaf[node, c] = counts[c] / size
            continue

        # Stable partition of every feature's segment around the split,
        # preserving per-feature sort order in both children.
        n_left = 0
        for p in range(start, end):
            it = sorted_items[0, p]
            if V[it, split_feat] <= split_thr:
                go_left[it] = 1
                n_left += 1
            else:
                go_left[it] = 0
        for f in range(n_features):
            nl = 0
            nr = 0
            for p in range(start, end):
                it = sorted_items[f, p]
                if go_left[it]:
                    tmp_l[nl] = it
                    nl += 1
                else:
                    tmp_r[nr] = it
                    nr += 1
            for p in range(nl):
                sorted_items[f, start + p] = tmp_l[p]
            for p in range(nr):
                sorted_items[f, start + nl + p] = tmp_r[p]
        mid = start + n_left

        feat[node] = split_feat
        thresh[node] = split_thr
        left[node] = n_nodes
        right[node] = n_nodes + 1
        stack[top, 0] = n_nodes
        stack[top, 1] = start
        stack[top, 2] = mid
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = n_nodes + 1
        stack[top, 1] = mid
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        n_nodes += 2

    return (feat[:n_nodes].copy(), thresh[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            leaf[:n_nodes].copy())


@njit(cache=True, nogil=True)
def predict_proba_kernel(X, feat, thresh, left, right, leaf, offsets, out):
    """Average the leaf class-frequency vectors of all trees per row."""
    n_rows = X.shape[0]
    n_trees = offsets.shape[0] - 1
    q = leaf.shape[1]
    for i in range(n_rows):
        for t in range(n_trees):
            base = offsets[t]
            node = base
            while feat[node] >= 0:
                if X[i, feat[node]] <= thresh[node]:
                    node = base + left[node]
                else:
                    node = base + right[node]
            for c in range(q):
                out[i, c] += leaf[node, c]
        for c in range(q):
            out[i, c] /= n_trees
