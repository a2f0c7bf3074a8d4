"""Hot inner loops, each in a numba flavour and a pure-numpy flavour.

The public names at the bottom of this module dispatch on the active
backend (see :mod:`ncrand._accel`).  Both flavours of a kernel return
identical results; ``tests/test_kernels.py`` holds them to that.
"""

import numpy as np

from ._accel import dispatch, njit

# ---------------------------------------------------------------------------
# incremental dictionary parsing


@njit
def _lz78_parse_numba(bits):
    n = bits.shape[0]
    # node 0 is the empty phrase; child[node, bit] is the extension or -1
    child = np.full((n + 1, 2), -1, dtype=np.int64)
    indices = np.empty(n + 1, dtype=np.int64)
    literals = np.empty(n + 1, dtype=np.int8)
    n_nodes = 1
    n_out = 0
    node = 0
    for i in range(n):
        b = bits[i]
        nxt = child[node, b]
        if nxt >= 0:
            node = nxt
        else:
            indices[n_out] = node
            literals[n_out] = b
            n_out += 1
            child[node, b] = n_nodes
            n_nodes += 1
            node = 0
    if node != 0:
        indices[n_out] = node
        literals[n_out] = -1
        n_out += 1
    return indices[:n_out].copy(), literals[:n_out].copy()


def _lz78_parse_numpy(bits):
    """Parse a 0/1 array into (phrase index, literal) pairs.

    Phrase 0 is the empty phrase and new phrases are numbered in order of
    creation.  A trailing phrase that is already in the dictionary is
    emitted with literal ``-1``.
    """
    children = {}
    indices, literals = [], []
    n_nodes, node = 1, 0
    for b in bits.tolist():
        nxt = children.get((node, b))
        if nxt is not None:
            node = nxt
            continue
        indices.append(node)
        literals.append(b)
        children[(node, b)] = n_nodes
        n_nodes += 1
        node = 0
    if node:
        indices.append(node)
        literals.append(-1)
    return np.array(indices, dtype=np.int64), np.array(literals, dtype=np.int8)


# ---------------------------------------------------------------------------
# eigenvalues of a tensor power


@njit
def _tensor_power_weights_numba(eigs, n):
    d = eigs.shape[0]
    out = np.ones(d**n, dtype=np.float64)
    size = 1
    for _ in range(n):
        # out[j*d + b] = prev[j] * eigs[b], walking backwards to stay in place
        for j in range(size - 1, -1, -1):
            base = out[j]
            for b in range(d - 1, -1, -1):
                out[j * d + b] = base * eigs[b]
        size *= d
    return out


def _tensor_power_weights_numpy(eigs, n):
    """All ``d**n`` products ``eigs[i1] * ... * eigs[in]`` in lexicographic order."""
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, eigs)
    return out


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov statistic


@njit
def _ks_statistic_numba(cdf_at_sorted):
    n = cdf_at_sorted.shape[0]
    d = 0.0
    for i in range(n):
        f = cdf_at_sorted[i]
        hi = (i + 1) / n - f
        lo = f - i / n
        if hi > d:
            d = hi
        if lo > d:
            d = lo
    return d


def _ks_statistic_numpy(cdf_at_sorted):
    """Two-sided KS distance given the reference CDF at the sorted sample."""
    n = cdf_at_sorted.shape[0]
    i = np.arange(n)
    return float(max(np.max((i + 1) / n - cdf_at_sorted), np.max(cdf_at_sorted - i / n), 0.0))


# ---------------------------------------------------------------------------
# uniform-bin histogram


@njit
def _histogram_counts_numba(values, lo, hi, bins):
    counts = np.zeros(bins, dtype=np.int64)
    norm = bins / (hi - lo)
    for k in range(values.shape[0]):
        x = values[k]
        if x < lo or x > hi:
            continue
        idx = int((x - lo) * norm)
        if idx == bins:
            idx -= 1
        # same edge corrections numpy applies after the fast path
        left = lo + (hi - lo) * idx / bins
        if x < left:
            idx -= 1
        elif idx != bins - 1 and x >= lo + (hi - lo) * (idx + 1) / bins:
            idx += 1
        counts[idx] += 1
    return counts


def _histogram_counts_numpy(values, lo, hi, bins):
    """Counts over ``bins`` equal bins of ``[lo, hi]``; the last bin is closed."""
    counts, _ = np.histogram(values, bins=bins, range=(lo, hi))
    return counts.astype(np.int64)


# ---------------------------------------------------------------------------
# normalized trace of a product


@njit
def _trace_of_product_numba(a, b):
    n = a.shape[0]
    acc = 0.0 + 0.0j
    for i in range(n):
        for j in range(n):
            acc += a[i, j] * b[j, i]
    return acc / n


def _trace_of_product_numpy(a, b):
    """``(1/n) tr(a @ b)`` without forming the product."""
    return complex(np.einsum("ij,ji->", a, b) / a.shape[0])


# ---------------------------------------------------------------------------
# low-weight binary words


@njit
def _low_weight_codes_numba(n, max_ones):
    total = 0
    c = 1
    for j in range(max_ones + 1):
        if j > n:
            break
        total += c
        c = c * (n - j) // (j + 1)
    out = np.empty(total, dtype=np.uint64)
    pos = 0
    out[pos] = 0
    pos += 1
    for w in range(1, min(max_ones, n) + 1):
        # Gosper's hack: successive integers with w set bits
        v = (np.uint64(1) << np.uint64(w)) - np.uint64(1)
        limit = np.uint64(1) << np.uint64(n) if n < 64 else np.uint64(0)
        while True:
            out[pos] = v
            pos += 1
            t = v | (v - np.uint64(1))
            low = (~t) & (t + np.uint64(1))
            nxt = (t + np.uint64(1)) | (((low - np.uint64(1)) // (v & (~v + np.uint64(1)))) >> np.uint64(1))
            if n < 64 and nxt >= limit:
                break
            if nxt <= v:
                break
            v = nxt
    return np.sort(out)


def _low_weight_codes_numpy(n, max_ones):
    """Sorted integer codes of all length-``n`` words with at most ``max_ones`` ones."""
    # by_weight[j] holds the codes of the current length with exactly j ones
    by_weight = [np.zeros(1, dtype=np.uint64)]
    for _ in range(n):
        nxt = []
        for j in range(min(len(by_weight), max_ones) + 1):
            parts = []
            if j < len(by_weight):
                parts.append(by_weight[j] << np.uint64(1))
            if j >= 1:
                parts.append((by_weight[j - 1] << np.uint64(1)) | np.uint64(1))
            nxt.append(np.concatenate(parts))
        by_weight = nxt
    return np.sort(np.concatenate(by_weight))


lz78_parse = dispatch(_lz78_parse_numba, _lz78_parse_numpy)
tensor_power_weights = dispatch(_tensor_power_weights_numba, _tensor_power_weights_numpy)
ks_statistic = dispatch(_ks_statistic_numba, _ks_statistic_numpy)
histogram_counts = dispatch(_histogram_counts_numba, _histogram_counts_numpy)
trace_of_product = dispatch(_trace_of_product_numba, _trace_of_product_numpy)
low_weight_codes = dispatch(_low_weight_codes_numba, _low_weight_codes_numpy)
