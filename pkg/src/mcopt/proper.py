"""Proper losses through their dual (Fenchel-Young) form.

A proper loss l(y, v) is rewritten as psi(t) - y t on the dual prediction
t = dual(v) = l(0, v) - l(1, v), with v = psi'(t). Two losses are built in:
squared loss and cross-entropy. Other losses can be added by constructing a
:class:`DualLossSpec` directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
from scipy.special import entr, expit

from ._config import TOL
from .dist import FiniteDistribution
from .errors import InvalidArgumentError, TheoremCheckError
from .predict import _key, _key_str, _lookup, _parse_key, auditor_values, describe

DUAL_IO_CAP = 30.0


@dataclass(frozen=True)
class DualLossSpec:
    name: str
    v_lo: float
    v_hi: float
    v_open: bool          # True for the open interval (v_lo, v_hi)
    loss: Callable        # l(y, v)
    dual: Callable        # v -> t
    psi: Callable
    grad_psi: Callable
    lam: float            # smoothness of psi
    t0: float             # anchor dual prediction
    B: float              # l_psi(y, t0) <= l_psi(y, t) + B
    risk: Callable        # inf_t E_{y~Ber(p)} l_psi(y, t), vectorized in p

    def in_domain(self, v):
        v = np.asarray(v, dtype=np.float64)
        if self.v_open:
            return (v > self.v_lo) & (v < self.v_hi)
        return (v >= self.v_lo) & (v <= self.v_hi)

    def v_grid(self, size=1001):
        if self.v_open:
            return np.linspace(self.v_lo, self.v_hi, size + 2)[1:-1]
        return np.linspace(self.v_lo, self.v_hi, size)


def _sq_psi(t):
    t = np.asarray(t, dtype=np.float64)
    return np.where(t < -1.0, 0.0, np.where(t > 1.0, t, (t + 1.0) ** 2 / 4.0))


SQUARED = DualLossSpec(
    name="squared",
    v_lo=0.0, v_hi=1.0, v_open=False,
    loss=lambda y, v: (y - np.asarray(v, dtype=np.float64)) ** 2,
    dual=lambda v: 2.0 * np.asarray(v, dtype=np.float64) - 1.0,
    psi=_sq_psi,
    grad_psi=lambda t: np.clip((np.asarray(t, dtype=np.float64) + 1.0) / 2.0, 0.0, 1.0),
    lam=0.5, t0=0.0, B=0.25,
    risk=lambda p: np.asarray(p) * (1.0 - np.asarray(p)),
)

XENT = DualLossSpec(
    name="xent",
    v_lo=0.0, v_hi=1.0, v_open=True,
    loss=lambda y, v: -y * np.log(v) - (1 - y) * np.log1p(-np.asarray(v, dtype=np.float64)),
    dual=lambda v: np.log(v) - np.log1p(-np.asarray(v, dtype=np.float64)),
    psi=lambda t: np.logaddexp(0.0, t),
    grad_psi=lambda t: expit(np.asarray(t, dtype=np.float64)),
    lam=0.25, t0=0.0, B=math.log(2.0),
    risk=lambda p: entr(p) + entr(1.0 - np.asarray(p)),
)


def builtin_specs() -> dict:
    return {"squared": SQUARED, "xent": XENT}


def get_spec(name: str) -> DualLossSpec:
    try:
        return builtin_specs()[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown loss spec {name!r}") from None


def dual_of(spec: DualLossSpec, v):
    if not np.all(spec.in_domain(v)):
        raise InvalidArgumentError(f"prediction outside the domain of {spec.name}")
    t = spec.dual(v)
    return float(t) if np.ndim(t) == 0 else t


def primal_of(spec: DualLossSpec, t):
    v = spec.grad_psi(t)
    return float(v) if np.ndim(v) == 0 else v


def dual_loss(spec: DualLossSpec, y, t):
    """l_psi(y, t) = psi(t) - y t."""
    val = spec.psi(t) - np.asarray(y) * np.asarray(t, dtype=np.float64)
    return float(val) if np.ndim(val) == 0 else val


class DualPredictor:
    """Table of real-valued dual predictions over support points."""

    uses_v = False

    def __init__(self, values: dict):
        self.values = {_key(k): float(v) for k, v in values.items()}
        if not all(math.isfinite(v) for v in self.values.values()):
            raise InvalidArgumentError("dual predictions must be finite")

    @classmethod
    def from_values(cls, D, values):
        return cls(dict(zip(map(tuple, D.X.tolist()), np.asarray(values, dtype=float).tolist())))

    @classmethod
    def constant(cls, D, t):
        return cls.from_values(D, np.full(D.size, float(t)))

    def evaluate(self, X, v=None):
        return _lookup(self.values, np.atleast_2d(np.asarray(X, dtype=np.float64)), "dual predictor")

    def to_json(self):
        return {"kind": "dual_table",
                "values": {_key_str(k): float(np.clip(v, -DUAL_IO_CAP, DUAL_IO_CAP))
                           for k, v in self.values.items()}}

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") not in ("dual_table", "table"):
            raise InvalidArgumentError("expected a dual_table object")
        return cls({_parse_key(k): v for k, v in obj["values"].items()})


def expected_dual_loss(spec: DualLossSpec, D: FiniteDistribution, gv) -> float:
    gv = np.asarray(gv, dtype=np.float64)
    return math.fsum(D.w * (spec.psi(gv) - D.eta * gv))


def bayes_dual_loss(spec: DualLossSpec, D: FiniteDistribution) -> float:
    """inf over all dual predictors of E[l_psi(y, g(x))]."""
    return math.fsum(D.w * spec.risk(D.eta))


def proper_update(spec: DualLossSpec, D: FiniteDistribution, g, c):
    """g' = g + (beta / lam) c(x, g(x)) with beta = E[c (y - psi'(g))].

    Asserts the dual loss drops by at least beta^2 / (2 lam).
    Returns ``(g', beta)``.
    """
    if not spec.lam > 0:
        raise InvalidArgumentError("smoothness constant must be positive")
    gv = np.asarray(g.evaluate(D.X), dtype=np.float64)
    fv = spec.grad_psi(gv)
    cv = auditor_values(c, D.X, gv)
    beta = math.fsum(D.w * cv * (D.eta - fv))
    new = gv + (beta / spec.lam) * cv
    before = expected_dual_loss(spec, D, gv)
    after = expected_dual_loss(spec, D, new)
    if after > before - beta ** 2 / (2 * spec.lam) + TOL:
        raise TheoremCheckError(
            f"dual loss dropped {before - after!r} < beta^2/(2 lam) = {beta ** 2 / (2 * spec.lam)!r}")
    return DualPredictor.from_values(D, new), beta


@dataclass
class ProperStep:
    auditor: int
    name: str
    beta: float
    loss_before: float
    loss_after: float


@dataclass
class ProperTrace:
    spec: str
    gamma: float
    cap: int
    steps: List[ProperStep] = field(default_factory=list)
    final: object = None
    final_max_violation: float = 0.0

    @property
    def iterations(self):
        return len(self.steps)

    def to_json(self):
        return {
            "spec": self.spec,
            "gamma": self.gamma,
            "cap": self.cap,
            "iterations": [
                {"auditor": s.auditor, "name": s.name, "beta": s.beta,
                 "loss_before": s.loss_before, "loss_after": s.loss_after}
                for s in self.steps
            ],
            "final_max_violation": self.final_max_violation,
        }


def proper_headroom(spec: DualLossSpec, D: FiniteDistribution, g0) -> float:
    """2 lam (E[l_psi(y, g0(x))] - Bayes dual loss); divided by gamma^2 it caps the steps."""
    return 2 * spec.lam * (expected_dual_loss(spec, D, g0.evaluate(D.X)) - bayes_dual_loss(spec, D))


def proper_boost(spec: DualLossSpec, D: FiniteDistribution, g0, auditors, gamma: float) -> ProperTrace:
    """Repeat :func:`proper_update` on the most violated auditor until all |beta| <= gamma.

    Each step drops the dual loss by more than gamma^2 / (2 lam), and the loss
    cannot fall below the Bayes dual loss, which caps the step count.
    """
    if not gamma > 0:
        raise InvalidArgumentError("gamma must be positive")
    auditors = list(auditors)
    cap = max(0, math.ceil(proper_headroom(spec, D, g0) / gamma ** 2))
    trace = ProperTrace(spec.name, gamma, cap)
    g = g0
    while True:
        gv = np.asarray(g.evaluate(D.X), dtype=np.float64)
        fv = spec.grad_psi(gv)
        betas = [math.fsum(D.w * auditor_values(c, D.X, gv) * (D.eta - fv)) for c in auditors]
        worst = int(np.argmax(np.abs(betas))) if betas else -1
        if worst < 0 or abs(betas[worst]) <= gamma:
            trace.final = g
            trace.final_max_violation = abs(betas[worst]) if betas else 0.0
            return trace
        if trace.iterations >= cap:
            raise TheoremCheckError(f"proper boosting exceeded its step cap {cap}")
        before = expected_dual_loss(spec, D, gv)
        g, beta = proper_update(spec, D, g, auditors[worst])
        trace.steps.append(ProperStep(worst, describe(auditors[worst]), beta, before,
                                      expected_dual_loss(spec, D, g.evaluate(D.X))))


def check_spec(spec: DualLossSpec, size: int = 1001, t_range: float = 10.0) -> dict:
    """Grid checks of the dual-loss properties; returns the worst deviation of each.

    A deviation <= 0 (or <= 1e-9 where noted) means the property holds on the grid.
    """
    v = spec.v_grid(size)
    t = np.linspace(-t_range, t_range, size)
    out = {}
    # propriety: E_{y~Ber(v)} l(y, v') is minimized at v' = v
    risk = v[:, None] * spec.loss(1, v[None, :]) + (1 - v[:, None]) * spec.loss(0, v[None, :])
    out["propriety"] = float(np.max(np.diag(risk) - risk.min(axis=1)))
    out["grad_dual_roundtrip"] = float(np.max(np.abs(spec.grad_psi(spec.dual(v)) - v)))
    out["dual_loss_identity"] = float(max(
        np.max(np.abs(spec.loss(y, v) - (spec.psi(spec.dual(v)) - y * spec.dual(v)))) for y in (0, 1)))
    gp = spec.grad_psi(t)
    out["grad_range"] = float(max(np.max(-gp), np.max(gp - 1.0), 0.0))
    dg = np.abs(gp[:, None] - gp[None, :])
    dt = np.abs(t[:, None] - t[None, :])
    out["smoothness"] = float(np.max(dg - spec.lam * dt))
    ps = spec.psi(t)
    slopes = np.diff(ps) / np.diff(t)
    out["secant_range"] = float(max(np.max(-slopes), np.max(slopes - 1.0), 0.0))
    out["convexity"] = float(max(np.max(slopes[:-1] - slopes[1:]), 0.0))
    anchor = max(np.max((spec.psi(spec.t0) - y * spec.t0) - (ps - y * t) - spec.B) for y in (0, 1))
    out["anchor"] = float(anchor)
    return out
