"""Exact squared-loss minimization over junta families.

OPT_n is the smallest squared loss of any n-junta. For a fixed coordinate
set S the optimum is the conditional mean E[y | x_S], so OPT_n is a minimum
over the C(m, n) subsets of size n. Since J_n = J_m for n >= m, sizes beyond
the dimension reuse the n = m optimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _config, _kernels
from ._config import TOL
from .audit import check_subset_budget, ma_violation, max_ma_violation_juntas, subsets_array
from .dist import FiniteDistribution, majority, make_majority_distribution, squared_loss
from .errors import InvalidArgumentError, ResourceLimitError, TheoremCheckError
from .predict import JuntaPredictor, majority_auditor
from .rng import default_rng


def conditional_mean_junta(D: FiniteDistribution, coords) -> JuntaPredictor:
    """E[y | x_S] as a junta; empty cells get 1/2."""
    coords = np.asarray(coords, dtype=np.int64)
    ncell = 1 << coords.size
    idx = _kernels.cell_index(D.bits, coords)
    W = np.bincount(idx, weights=D.w, minlength=ncell)
    A = np.bincount(idx, weights=D.w * D.eta, minlength=ncell)
    with np.errstate(invalid="ignore", divide="ignore"):
        table = np.where(W > 0, A / np.where(W > 0, W, 1.0), 0.5)
    return JuntaPredictor(tuple(int(c) for c in coords), np.clip(table, 0.0, 1.0))


def junta_opt(D: FiniteDistribution, n: int):
    """Return ``(OPT_n, witness)``; ties between subsets go to the lexicographically first."""
    D.require_cube()
    if n < 0:
        raise InvalidArgumentError("junta size must be nonnegative")
    m = D.dim
    n = min(n, m)
    check_subset_budget(m, n)
    subsets = subsets_array(m, n)
    losses = _kernels.subset_sse(D.bits, D.w, np.ascontiguousarray(D.w * D.eta), subsets)
    best_loss = float(losses.min())
    best = int(np.flatnonzero(losses <= best_loss + 1e-14)[0])
    witness = conditional_mean_junta(D, subsets[best])
    opt = squared_loss(D, witness)
    if abs(opt - best_loss) > TOL:
        raise TheoremCheckError(f"witness loss {opt!r} disagrees with scan minimum {best_loss!r}")
    return opt, witness


def unlucky_sizes(opts, k: int, alpha: float) -> List[int]:
    """Sizes n with OPT_n > OPT_{n+k} + alpha (only n with n + k on the curve)."""
    return [n for n in range(len(opts) - k) if opts[n] > opts[n + k] + alpha]


@dataclass
class OptCurve:
    k: int
    alpha: float
    opts: List[float]
    witnesses: List[Optional[JuntaPredictor]] = field(default_factory=list)
    unlucky: List[int] = field(default_factory=list)

    @classmethod
    def from_opts(cls, opts, k, alpha, witnesses=None):
        """Build and check a curve from given values (witnesses optional)."""
        _check_curve_args(k, alpha)
        opts = [float(v) for v in opts]
        for n in range(len(opts) - 1):
            if opts[n + 1] > opts[n] + TOL:
                raise TheoremCheckError(f"OPT increases at n={n}: {opts[n]!r} -> {opts[n + 1]!r}")
        unlucky = unlucky_sizes(opts, k, alpha)
        if len(unlucky) > k / alpha:
            raise TheoremCheckError(f"{len(unlucky)} unlucky sizes exceed k/alpha = {k / alpha}")
        return cls(k, alpha, opts, list(witnesses or [None] * len(opts)), unlucky)

    def gap(self, n):
        return self.opts[n] - self.opts[n + self.k]


def _check_curve_args(k, alpha):
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    if not alpha > 0:
        raise InvalidArgumentError("alpha must be positive")


def opt_curve(D: FiniteDistribution, N: int, k: int, alpha: float) -> OptCurve:
    _check_curve_args(k, alpha)
    if N < 0:
        raise InvalidArgumentError("N must be nonnegative")
    opts, wits = [], []
    for n in range(min(N, D.dim) + 1):
        o, w = junta_opt(D, n)
        opts.append(o)
        wits.append(w)
    while len(opts) < N + 1:
        opts.append(opts[-1])
        wits.append(wits[-1])
    return OptCurve.from_opts(opts, k, alpha, wits)


def perturb_junta(D: FiniteDistribution, f: JuntaPredictor, epsilon: float, rng) -> JuntaPredictor:
    """Move each cell of a conditional-mean witness by at most sqrt(epsilon).

    The cross term vanishes at the conditional mean, so the loss rises by
    sum_z P[x_S = z] delta_z^2 <= epsilon; clipping only shrinks deltas.
    """
    if epsilon <= 0:
        return f
    delta = math.sqrt(epsilon) * rng.uniform(-1.0, 1.0, size=f.table.size)
    g = JuntaPredictor(f.coords, np.clip(f.table + delta, 0.0, 1.0))
    if squared_loss(D, g) > squared_loss(D, f) + epsilon + TOL:
        raise TheoremCheckError("perturbation raised the loss by more than epsilon")
    return g


def verify_upper_bound(D: FiniteDistribution, k: int, alpha: float, epsilon: float = 0.0,
                       N: Optional[int] = None, seed: int = 0) -> dict:
    """Check that loss-optimal n-juntas are sqrt(alpha + epsilon)-multiaccurate.

    For every n <= N - k the (possibly epsilon-perturbed) optimal witness is
    audited exactly against J_k^*. Sizes outside the unlucky set must pass.
    Every size must also satisfy violation^2 <= OPT_n - OPT_{n+k} + epsilon.
    """
    D.require_cube()
    if epsilon < 0:
        raise InvalidArgumentError("epsilon must be nonnegative")
    N = D.dim if N is None else N
    curve = opt_curve(D, N, k, alpha)
    k_aud = min(k, D.dim)
    rng = default_rng(seed)
    bound = math.sqrt(alpha + epsilon)
    rows = []
    for n in range(N - k + 1):
        f = perturb_junta(D, curve.witnesses[n], epsilon, rng)
        viol, _ = max_ma_violation_juntas(D, f, k_aud)
        gap = curve.gap(n)
        unlucky = n in curve.unlucky
        rows.append({
            "n": n,
            "OPT_n": curve.opts[n],
            "gap": gap,
            "unlucky": unlucky,
            "loss": squared_loss(D, f),
            "violation": viol,
            "bound": bound,
            "passed": viol <= bound + 1e-9,
            "chain_ok": viol ** 2 <= gap + epsilon + 1e-9,
        })
    ok = all(r["chain_ok"] and (r["passed"] or r["unlucky"]) for r in rows)
    return {"k": k, "alpha": alpha, "epsilon": epsilon, "N": N,
            "unlucky": list(curve.unlucky), "rows": rows, "ok": ok}


# --- lower bound on the majority distribution ---------------------------

def _is_majority_distribution(D: FiniteDistribution) -> bool:
    m = D.dim
    if D.feature_kind != "pm1" or m % 2 == 0 or D.size != 1 << m:
        return False
    return bool(np.all(D.eta == (majority(D.X) > 0)) and np.all(D.w == D.w[0]))


def lower_bound_terms(D: FiniteDistribution, f, k: int) -> dict:
    """Pieces of E[(y - f) MAJ(x_I)] for I the k smallest coordinates outside f's support."""
    if not _is_majority_distribution(D):
        raise InvalidArgumentError("lower bound witness needs the majority distribution")
    m = D.dim
    if k < 1 or k % 2 == 0 or k > m:
        raise InvalidArgumentError(f"k must be odd with 1 <= k <= m, got {k}")
    free = [i for i in range(m) if i not in set(f.coords)]
    if len(free) < k:
        raise InvalidArgumentError(
            f"only {len(free)} coordinates outside the junta, need k = {k}")
    c = majority_auditor(free[:k])
    maj_i = c.evaluate(D.X)
    fv = f.evaluate(D.X)
    return {
        "coords": free[:k],
        "value": ma_violation(D, f, c),
        "f_term": math.fsum(D.w * fv * maj_i),
        "y_term": math.fsum(D.w * D.eta * maj_i),
        "bound": math.sqrt(k / m) / math.pi,
    }


def lower_bound_witness(D: FiniteDistribution, f, k: int) -> float:
    """E[(y - f(x)) MAJ(x_I)], asserted to exceed sqrt(k/m)/pi.

    The f-term vanishes because x_I is independent of f's coordinates.
    """
    t = lower_bound_terms(D, f, k)
    if abs(t["f_term"]) > TOL:
        raise TheoremCheckError(f"E[f MAJ(x_I)] = {t['f_term']!r} should vanish")
    if not t["y_term"] > t["bound"]:
        raise TheoremCheckError(f"E[y MAJ(x_I)] = {t['y_term']!r} <= {t['bound']!r}")
    if not t["value"] > t["bound"]:
        raise TheoremCheckError(f"witness {t['value']!r} <= {t['bound']!r}")
    return t["value"]


def random_junta(m: int, n: int, rng) -> JuntaPredictor:
    """Coordinates drawn without replacement, table values uniform in [0, 1]."""
    coords = tuple(sorted(int(i) for i in rng.choice(m, size=n, replace=False)))
    return JuntaPredictor(coords, rng.uniform(0.0, 1.0, size=1 << n))


def lower_bound_dimension(k: int, alpha: float):
    """``(k1, m)``: k1 the largest odd <= k, m the largest odd below k1 / (pi^2 alpha)."""
    k1 = k if k % 2 == 1 else k - 1
    q = k1 / (math.pi ** 2 * alpha)
    m = math.ceil(q) - 1
    if m % 2 == 0:
        m -= 1
    return k1, m


def lower_bound_experiment(k: int, alpha: float, m: Optional[int] = None, per_n: int = 2,
                           sizes=None, seed: int = 0, limit: Optional[int] = None) -> dict:
    """Build the majority instance and sweep random juntas that must fail sqrt(alpha)-MA.

    ``m`` defaults to the dimension from :func:`lower_bound_dimension`, which
    needs alpha <= 1/(4 pi^2). An explicit odd ``m >= k1`` only needs
    alpha <= k1 / (pi^2 m), the condition under which every junta on at most
    m - k1 coordinates fails.
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    if not alpha > 0:
        raise InvalidArgumentError("alpha must be positive")
    if m is None and alpha > 1 / (4 * math.pi ** 2):
        raise InvalidArgumentError(f"alpha must lie in (0, 1/(4 pi^2)], got {alpha}")
    k1, m_default = lower_bound_dimension(k, alpha)
    if m is None:
        m = m_default
        if m < 3 * k1 or m < k1 / (2 * math.pi ** 2 * alpha):
            raise TheoremCheckError(f"chosen m = {m} violates m >= 3 k1 and m >= k1/(2 pi^2 alpha)")
    elif m < k1 or m % 2 == 0:
        raise InvalidArgumentError(f"m must be odd and >= k1 = {k1}")
    if alpha > k1 / (math.pi ** 2 * m) * (1 + 1e-12):
        raise InvalidArgumentError(f"alpha exceeds k1/(pi^2 m) for m = {m}")
    lim = _config.ENUMERATION_LIMIT if limit is None else limit
    if m > lim:
        raise ResourceLimitError(f"lower bound needs m = {m} > enumeration limit {lim}")
    D = make_majority_distribution(m, limit=lim)
    count = m - k1 + 1
    count_bound = k / (6 * math.pi ** 2 * alpha)
    explicit_m = m != m_default
    if not explicit_m and count < count_bound:
        raise TheoremCheckError(f"count {count} < k/(6 pi^2 alpha) = {count_bound}")
    rng = default_rng(seed)
    sqrt_alpha = math.sqrt(alpha)
    rows = []
    for n in (range(m - k1 + 1) if sizes is None else sizes):
        if not 0 <= n <= m - k1:
            raise InvalidArgumentError(f"junta size {n} outside [0, {m - k1}]")
        for _ in range(per_n):
            f = random_junta(m, n, rng)
            value = lower_bound_witness(D, f, k1)
            if not value > sqrt_alpha:
                raise TheoremCheckError(f"witness {value!r} <= sqrt(alpha) = {sqrt_alpha!r}")
            rows.append({"n": n, "coords": list(f.coords), "value": value,
                         "witness_bound": math.sqrt(k1 / m) / math.pi,
                         "sqrt_alpha": sqrt_alpha, "passed": True})
    return {"k": k, "k1": k1, "alpha": alpha, "m": m, "count": count,
            "count_bound": count_bound, "count_ok": count >= count_bound, "rows": rows}
