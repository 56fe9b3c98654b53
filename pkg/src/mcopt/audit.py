"""Multicalibration / multiaccuracy violations and exact junta auditing."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List

import numpy as np

from . import _config, _kernels
from .dist import FiniteDistribution, prediction_values
from .errors import InvalidArgumentError, ResourceLimitError
from .predict import JuntaAuditor, auditor_values, describe


@dataclass(frozen=True)
class AuditResult:
    auditor: str
    beta: float
    gamma: float

    @property
    def passed(self) -> bool:
        return abs(self.beta) <= self.gamma


def residual(D: FiniteDistribution, f) -> np.ndarray:
    """E[y - f(x) | x] = eta(x) - f(x) on the support."""
    return D.eta - prediction_values(D, f)


def mc_violation(D: FiniteDistribution, f, c) -> float:
    """beta = E[c(x, f(x)) (y - f(x))]."""
    fv = prediction_values(D, f)
    cv = auditor_values(c, D.X, fv)
    return math.fsum(D.w * cv * (D.eta - fv))


def ma_violation(D: FiniteDistribution, f, c) -> float:
    """beta = E[c(x) (y - f(x))] for an auditor that ignores the prediction."""
    if getattr(c, "uses_v", False):
        raise InvalidArgumentError("multiaccuracy auditors must not read the prediction")
    return mc_violation(D, f, c)


def subsets_array(m: int, k: int) -> np.ndarray:
    """All k-subsets of range(m) in lexicographic order, shape (C(m,k), k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(combinations(range(m), k)), dtype=np.int64)


def check_subset_budget(m: int, k: int):
    n_sub = math.comb(m, k)
    if n_sub > _config.MAX_SUBSETS or n_sub * (1 << k) > _config.MAX_SUBSET_CELLS:
        raise ResourceLimitError(
            f"C({m},{k}) * 2^{k} = {n_sub * (1 << k)} exceeds the subset-scan budget")


def max_ma_violation_juntas(D: FiniteDistribution, f, k: int):
    """max over c in J_k^* of |E[c(x)(y - f(x))]|, with a maximizing auditor.

    For a fixed coordinate set S the optimum puts c(z) = sign(r_S(z)) on each
    cell, where r_S(z) = E[(y - f(x)) 1{x_S = z}], giving sum_z |r_S(z)|.
    Ties between subsets go to the lexicographically smallest; sign(0) = +1.
    """
    D.require_cube()
    m = D.dim
    if not 0 <= k <= m:
        raise InvalidArgumentError(f"k must lie in [0, {m}], got {k}")
    check_subset_budget(m, k)
    r = np.ascontiguousarray(D.w * residual(D, f))
    subsets = subsets_array(m, k)
    mass = _kernels.subset_abs_mass(D.bits, r, subsets)
    best = int(np.argmax(mass))
    S = subsets[best]
    idx = _kernels.cell_index(D.bits, S)
    cells = np.bincount(idx, weights=r, minlength=1 << k)
    witness = JuntaAuditor(tuple(int(s) for s in S), np.where(cells >= 0, 1.0, -1.0))
    value = math.fsum(np.abs(cells))
    return value, witness


def audit_class(D: FiniteDistribution, f, auditors, gamma: float) -> List[AuditResult]:
    if not gamma > 0:
        raise InvalidArgumentError("gamma must be positive")
    return [AuditResult(describe(c), mc_violation(D, f, c), gamma) for c in auditors]


def all_passed(results) -> bool:
    return all(r.passed for r in results)
