import numpy as np


def _powers(n):
    return (1 << np.arange(n - 1, -1, -1, dtype=np.int64)).astype(np.int64)


def cell_index(bits, coords):
    coords = np.asarray(coords, dtype=np.int64)
    if coords.size == 0:
        return np.zeros(bits.shape[0], dtype=np.int64)
    return bits[:, coords].astype(np.int64) @ _powers(coords.size)


def subset_sse(bits, w, a, subsets):
    """Squared loss of the conditional-mean predictor on each subset.

    ``a`` is ``w * eta``. Per cell the loss is ``A - A**2 / W``.
    """
    n_sub, n = subsets.shape
    ncell = 1 << n
    out = np.empty(n_sub)
    for s in range(n_sub):
        idx = cell_index(bits, subsets[s])
        W = np.bincount(idx, weights=w, minlength=ncell)
        A = np.bincount(idx, weights=a, minlength=ncell)
        pos = W > 0
        terms = A[pos] - A[pos] * A[pos] / W[pos]
        out[s] = np.sum(np.maximum(terms, 0.0))
    return out


def subset_abs_mass(bits, r, subsets):
    """``sum_z |sum_{x in cell z} r(x)|`` for each subset."""
    n_sub, n = subsets.shape
    ncell = 1 << n
    out = np.empty(n_sub)
    for s in range(n_sub):
        idx = cell_index(bits, subsets[s])
        R = np.bincount(idx, weights=r, minlength=ncell)
        out[s] = np.sum(np.abs(R))
    return out


def fwht(a):
    """Unnormalized Walsh-Hadamard transform; length must be a power of two."""
    out = np.array(a, dtype=np.float64, copy=True)
    n = out.size
    h = 1
    while h < n:
        v = out.reshape(-1, 2, h)
        x = v[:, 0, :].copy()
        y = v[:, 1, :]
        v[:, 0, :] = x + y
        v[:, 1, :] = x - y
        h *= 2
    return out
