"""Majority: Fourier coefficients and the correlation MAJ_k vs MAJ_m.

Internally a point of {-1,1}^k is an integer i whose bit j is 1 when
x_j = -1, so the character chi_S(x) = prod_{j in S} x_j equals
(-1)^popcount(i & s) and the Walsh-Hadamard transform yields Fourier
coefficients directly. Coordinates 0..k-1 of MAJ_m are those shared with MAJ_k.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import _config, _kernels
from .errors import InvalidArgumentError, ResourceLimitError, TheoremCheckError


def maj(x) -> int:
    x = [int(v) for v in x]
    if len(x) % 2 == 0:
        raise InvalidArgumentError("majority needs an odd number of inputs")
    if any(v not in (-1, 1) for v in x):
        raise InvalidArgumentError("majority inputs must be +-1")
    return 1 if sum(x) > 0 else -1


def _check_odd(name, k):
    if not isinstance(k, (int, np.integer)) or k < 1 or k % 2 == 0:
        raise InvalidArgumentError(f"{name} must be an odd positive integer, got {k!r}")


def _check_limit(m):
    if m > _config.ENUMERATION_LIMIT:
        raise ResourceLimitError(f"2^{m} points exceed the enumeration limit")


def _popcount(idx):
    c = np.zeros_like(idx)
    v = idx.copy()
    while np.any(v):
        c += v & 1
        v >>= 1
    return c


def maj_truth_table(k: int) -> np.ndarray:
    """MAJ on all 2^k points in the internal bit order (bit set <=> x_j = -1)."""
    _check_odd("k", k)
    _check_limit(k)
    minus = _popcount(np.arange(1 << k, dtype=np.int64))
    return np.where(2 * minus < k, 1.0, -1.0)


def maj_fourier(k: int) -> np.ndarray:
    """All 2^k Fourier coefficients; entry s is hat MAJ_k({j : bit j of s set})."""
    return _kernels.fwht(maj_truth_table(k)) / float(1 << k)


def maj_fourier_level1(k: int, exact: bool = False):
    """hat MAJ_k({i}) = C(k-1, (k-1)/2) / 2^(k-1) = (1*3*...*(k-2)) / (2*4*...*(k-1)).

    Built as a running product so no large binomial is formed. Asserts the
    value exceeds sqrt(2 / (pi k)).
    """
    _check_odd("k", k)
    val = Fraction(1) if exact else 1.0
    for i in range(1, (k - 1) // 2 + 1):
        val = val * (2 * i - 1) / (2 * i) if not exact else val * Fraction(2 * i - 1, 2 * i)
    if not float(val) > math.sqrt(2.0 / (math.pi * k)):
        raise TheoremCheckError(f"level-1 coefficient {float(val)!r} <= sqrt(2/(pi k))")
    return val


def maj_level1_brute(k: int) -> float:
    """E[MAJ_k(x) x_1] by enumeration."""
    tab = maj_truth_table(k)
    x0 = np.where(np.arange(1 << k) & 1, -1.0, 1.0)
    return float(np.sum(tab * x0)) / (1 << k)


def correlation_bound(k: int, m: int) -> float:
    return 2.0 / math.pi * math.sqrt(k / m)


def _brute(k, m):
    idx = np.arange(1 << m, dtype=np.int64)
    maj_m = np.where(2 * _popcount(idx) < m, 1, -1)
    maj_k = np.where(2 * _popcount(idx & ((1 << k) - 1)) < k, 1, -1)
    return int(np.sum(maj_k * maj_m)) / float(1 << m)


def _fourier(k, m):
    hk = maj_fourier(k)
    hm = maj_fourier(m)[: 1 << k]
    level = _popcount(np.arange(1 << k, dtype=np.int64))
    even = level % 2 == 0
    if np.any(np.abs(hk[even]) > 1e-12) or np.any(np.abs(hm[even]) > 1e-12):
        raise TheoremCheckError("majority has a nonzero even-level Fourier coefficient")
    prods = hk[~even] * hm[~even]
    if np.any(prods < -1e-15):
        raise TheoremCheckError("Fourier coefficient products of MAJ_k and MAJ_m differ in sign")
    return math.fsum(prods)


def maj_correlation(k: int, m: int, method: str = "brute") -> float:
    """E[MAJ(x_1..x_k) MAJ(x_1..x_m)] over uniform x in {-1,1}^m.

    ``brute`` enumerates the cube; ``fourier`` sums products of Fourier
    coefficients over odd-size S within the first k coordinates. Asserts the
    result exceeds (2/pi) sqrt(k/m).
    """
    _check_odd("k", k)
    _check_odd("m", m)
    if k > m:
        raise InvalidArgumentError(f"need k <= m, got k={k}, m={m}")
    _check_limit(m)
    if method == "brute":
        val = _brute(k, m)
    elif method == "fourier":
        val = _fourier(k, m)
    else:
        raise InvalidArgumentError("method must be 'brute' or 'fourier'")
    if not val > correlation_bound(k, m):
        raise TheoremCheckError(f"correlation {val!r} <= (2/pi) sqrt(k/m)")
    return val
