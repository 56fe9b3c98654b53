"""The squared-loss reduction update and the boosting loop built on it."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from ._config import TOL
from .dist import FiniteDistribution, prediction_values, squared_loss
from .errors import InvalidArgumentError, TheoremCheckError
from .predict import TablePredictor, auditor_values, clip01, describe


class UpdateTerms(NamedTuple):
    """Every quantity in the loss-reduction identity for one update."""

    beta: float
    loss_f: float       # L(f)
    loss_g: float       # L(f + beta c), before clipping
    loss_h: float       # L(clip(f + beta c))
    mean_c2: float      # E[c(x, f(x))^2]
    h_values: np.ndarray


def update_terms(D: FiniteDistribution, f, c) -> UpdateTerms:
    fv = prediction_values(D, f)
    cv = auditor_values(c, D.X, fv)
    beta = math.fsum(D.w * cv * (D.eta - fv))
    g = fv + beta * cv
    h = clip01(g)

    def loss(v):
        return math.fsum(D.w * (D.eta * (1.0 - v) ** 2 + (1.0 - D.eta) * v * v))

    return UpdateTerms(beta, loss(fv), loss(g), loss(h), math.fsum(D.w * cv * cv), h)


def loss_reduction_update(D: FiniteDistribution, f, c):
    """h = clip(f + beta c(x, f(x))) with beta = E[c (y - f)]; L(h) <= L(f) - beta^2.

    Returns ``(h, beta)`` with ``h`` a table over the support.
    """
    t = update_terms(D, f, c)
    if t.loss_h > t.loss_f - t.beta ** 2 + TOL:
        raise TheoremCheckError(
            f"loss did not drop by beta^2: L(f)={t.loss_f!r}, L(h)={t.loss_h!r}, beta={t.beta!r}")
    return TablePredictor.from_values(D, t.h_values), t.beta


@dataclass
class BoostStep:
    auditor: int
    name: str
    beta: float
    loss_before: float
    loss_after: float


@dataclass
class BoostTrace:
    steps: List[BoostStep] = field(default_factory=list)
    final: object = None
    final_max_violation: float = 0.0
    gamma: float = 0.0

    @property
    def iterations(self):
        return len(self.steps)

    def to_json(self):
        return {
            "gamma": self.gamma,
            "iterations": [
                {"auditor": s.auditor, "name": s.name, "beta": s.beta,
                 "loss_before": s.loss_before, "loss_after": s.loss_after}
                for s in self.steps
            ],
            "final_max_violation": self.final_max_violation,
        }


def iteration_cap(gamma: float) -> int:
    return math.ceil(1.0 / gamma ** 2)


def hkrr_boost(D: FiniteDistribution, f0, auditors, gamma: float) -> BoostTrace:
    """Apply the update with the most violated auditor until all |beta| <= gamma.

    Ties in |beta| go to the earliest auditor in the list.
    """
    if not gamma > 0:
        raise InvalidArgumentError("gamma must be positive")
    auditors = list(auditors)
    trace = BoostTrace(gamma=gamma)
    f = f0
    cap = iteration_cap(gamma)
    while True:
        fv = prediction_values(D, f)
        betas = [math.fsum(D.w * auditor_values(c, D.X, fv) * (D.eta - fv)) for c in auditors]
        worst = int(np.argmax(np.abs(betas))) if betas else -1
        if worst < 0 or abs(betas[worst]) <= gamma:
            trace.final = f
            trace.final_max_violation = abs(betas[worst]) if betas else 0.0
            return trace
        if trace.iterations >= cap:
            raise TheoremCheckError(f"boosting exceeded ceil(1/gamma^2) = {cap} updates")
        before = squared_loss(D, fv)
        f, beta = loss_reduction_update(D, f, auditors[worst])
        trace.steps.append(BoostStep(worst, describe(auditors[worst]), beta, before,
                                     squared_loss(D, f)))
