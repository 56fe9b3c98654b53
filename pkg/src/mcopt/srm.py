"""Size-regularized selection over the junta family.

Minimizing L(f) + alpha * n / k jointly over the size n and f in J_n yields a
predictor that is sqrt(alpha)-multiaccurate against J_k^*, with no unlucky
sizes to avoid. For ReLU networks the closure step costs k + 2 nodes, so the
analogous penalty there is alpha * n / (k + 2) (see :func:`size_penalty`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

from ._config import TOL
from .audit import max_ma_violation_juntas
from .dist import FiniteDistribution, squared_loss
from .errors import InvalidArgumentError, TheoremCheckError
from .junta import junta_opt, opt_curve
from .predict import JuntaPredictor


def size_penalty(n: int, k: int, alpha: float, family: str = "junta") -> float:
    if family == "junta":
        return alpha * n / k
    if family == "nn":
        return alpha * n / (k + 2)
    raise InvalidArgumentError("family must be 'junta' or 'nn'")


@dataclass
class SrmSelection:
    n_star: int
    f_star: JuntaPredictor
    objective: float
    audit_bound: float
    violation: float
    k: int
    alpha: float
    objectives: List[float] = field(default_factory=list)


def srm_select(D: FiniteDistribution, k: int, alpha: float, N_max: int) -> SrmSelection:
    """argmin over n <= N_max of OPT_n + alpha n / k; ties go to the smallest n."""
    D.require_cube()
    if not isinstance(k, int) or k < 1:
        raise InvalidArgumentError("k must be a positive integer")
    if not alpha > 0:
        raise InvalidArgumentError("alpha must be positive")
    if N_max < math.ceil(k / alpha):
        raise InvalidArgumentError(f"N_max = {N_max} must be at least ceil(k/alpha) = {math.ceil(k / alpha)}")
    curve = opt_curve(D, N_max, k, alpha)
    objectives = [o + size_penalty(n, k, alpha) for n, o in enumerate(curve.opts)]
    best = min(objectives)
    n_star = next(n for n, v in enumerate(objectives) if v <= best)
    if n_star > k / alpha:
        raise TheoremCheckError(f"selected size {n_star} exceeds k/alpha = {k / alpha}")
    f_star = curve.witnesses[n_star]
    violation, _ = max_ma_violation_juntas(D, f_star, min(k, D.dim))
    bound = math.sqrt(alpha)
    if violation > bound + 1e-9:
        raise TheoremCheckError(f"selected predictor has violation {violation!r} > sqrt(alpha)")
    return SrmSelection(n_star, f_star, objectives[n_star], bound, violation, k, alpha, objectives)


def srm_verify(selection: SrmSelection, D: FiniteDistribution, k: int, alpha: float,
               epsilon: float = 0.0) -> dict:
    """Re-check an (epsilon-approximate) selection.

    Requires L(f) <= OPT_{n+k} + alpha + epsilon and an exact J_k^* audit
    within sqrt(alpha + epsilon). ``premise_ok`` reports whether the selection
    really is epsilon-optimal for the regularized objective.
    """
    if epsilon < 0:
        raise InvalidArgumentError("epsilon must be nonnegative")
    f = selection.f_star
    n = selection.n_star
    loss = squared_loss(D, f)
    opt_next, _ = junta_opt(D, n + k)
    objective = loss + size_penalty(n, k, alpha)
    best = min(selection.objectives) if selection.objectives else objective
    violation, _ = max_ma_violation_juntas(D, f, min(k, D.dim))
    bound = math.sqrt(alpha + epsilon)
    report = {
        "n_star": n,
        "loss": loss,
        "objective": objective,
        "OPT_n_plus_k": opt_next,
        "premise_ok": objective <= best + epsilon + TOL and len(f.coords) <= n,
        "loss_chain_ok": loss <= opt_next + alpha + epsilon + TOL,
        "violation": violation,
        "bound": bound,
        "audit_ok": violation <= bound + 1e-9,
    }
    report["ok"] = report["loss_chain_ok"] and report["audit_ok"]
    return report
