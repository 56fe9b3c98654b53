import numpy as np
from numba import njit


@njit(cache=True)
def _cell_index(bits, coords):
    N = bits.shape[0]
    n = coords.shape[0]
    out = np.zeros(N, np.int64)
    for i in range(N):
        c = 0
        for p in range(n):
            c = (c << 1) | bits[i, coords[p]]
        out[i] = c
    return out


def cell_index(bits, coords):
    return _cell_index(bits, np.asarray(coords, dtype=np.int64))


@njit(cache=True)
def subset_sse(bits, w, a, subsets):
    N = bits.shape[0]
    n_sub, n = subsets.shape
    ncell = 1 << n
    W = np.empty(ncell)
    A = np.empty(ncell)
    out = np.empty(n_sub)
    for s in range(n_sub):
        W[:] = 0.0
        A[:] = 0.0
        for i in range(N):
            c = 0
            for p in range(n):
                c = (c << 1) | bits[i, subsets[s, p]]
            W[c] += w[i]
            A[c] += a[i]
        tot = 0.0
        for c in range(ncell):
            if W[c] > 0.0:
                t = A[c] - A[c] * A[c] / W[c]
                if t > 0.0:
                    tot += t
        out[s] = tot
    return out


@njit(cache=True)
def subset_abs_mass(bits, r, subsets):
    N = bits.shape[0]
    n_sub, n = subsets.shape
    ncell = 1 << n
    R = np.empty(ncell)
    out = np.empty(n_sub)
    for s in range(n_sub):
        R[:] = 0.0
        for i in range(N):
            c = 0
            for p in range(n):
                c = (c << 1) | bits[i, subsets[s, p]]
            R[c] += r[i]
        tot = 0.0
        for c in range(ncell):
            tot += abs(R[c])
        out[s] = tot
    return out


@njit(cache=True)
def _fwht(out):
    n = out.shape[0]
    h = 1
    while h < n:
        for i in range(0, n, 2 * h):
            for j in range(i, i + h):
                x = out[j]
                y = out[j + h]
                out[j] = x + y
                out[j + h] = x - y
        h *= 2
    return out


def fwht(a):
    return _fwht(np.array(a, dtype=np.float64, copy=True))
