"""Finite distributions over X x {0,1} with exact (closed-form) expectations.

Labels are never sampled. Each support point ``x`` carries a weight ``w(x)``
and a label probability ``eta(x) = P[y = 1 | x]``, so every expectation is a
finite weighted sum.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import _config
from .errors import (
    ContractViolationError,
    DomainMismatchError,
    InvalidArgumentError,
    ResourceLimitError,
)
from .rng import SplitMix64

FEATURE_KINDS = ("pm1", "real")


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Weighted finite support with per-point label probabilities.

    ``X`` has shape ``(N, dim)``. For ``feature_kind == "pm1"`` every entry is
    exactly -1 or +1. ``exact`` optionally holds the weights and label
    probabilities as ``Fraction`` tuples, enabling rational arithmetic in
    :func:`expectation` and :func:`squared_loss`.
    """

    X: np.ndarray
    w: np.ndarray
    eta: np.ndarray
    feature_kind: str = "pm1"
    exact: Optional[tuple] = None
    bits: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=np.float64))
        w = np.ascontiguousarray(np.asarray(self.w, dtype=np.float64))
        eta = np.ascontiguousarray(np.asarray(self.eta, dtype=np.float64))
        if X.ndim != 2 or X.shape[1] < 1:
            raise InvalidArgumentError("X must be a 2-d array with dim >= 1")
        if w.shape != (X.shape[0],) or eta.shape != (X.shape[0],):
            raise InvalidArgumentError("w and eta must have one entry per support point")
        if X.shape[0] == 0:
            raise InvalidArgumentError("support must be non-empty")
        if self.feature_kind not in FEATURE_KINDS:
            raise InvalidArgumentError(f"feature_kind must be one of {FEATURE_KINDS}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(w)) and np.all(np.isfinite(eta))):
            raise InvalidArgumentError("non-finite entries in distribution")
        if np.any(w < 0):
            raise InvalidArgumentError("weights must be nonnegative")
        if np.any((eta < 0) | (eta > 1)):
            raise InvalidArgumentError("eta must lie in [0, 1]")
        if self.feature_kind == "pm1" and not np.all(np.abs(X) == 1.0):
            raise InvalidArgumentError("pm1 features must be exactly -1 or +1")
        if np.unique(X, axis=0).shape[0] != X.shape[0]:
            raise InvalidArgumentError("support points must be distinct")
        if self.exact is not None:
            we, ee = self.exact
            if len(we) != X.shape[0] or len(ee) != X.shape[0]:
                raise InvalidArgumentError("exact weights/eta length mismatch")
            if sum(we) != 1:
                raise InvalidArgumentError("exact weights must sum to exactly 1")
        elif abs(math.fsum(w) - 1.0) > 1e-12:
            raise InvalidArgumentError(f"weights sum to {math.fsum(w)!r}, not 1")
        for arr in (X, w, eta):
            arr.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "eta", eta)
        bits = np.ascontiguousarray((X > 0).astype(np.uint8))
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def size(self) -> int:
        return self.X.shape[0]

    def points(self):
        for x, w, eta in zip(self.X, self.w, self.eta):
            yield tuple(float(v) for v in x), float(w), float(eta)

    def require_cube(self):
        if self.feature_kind != "pm1":
            raise InvalidArgumentError("operation requires a boolean-cube distribution")

    @classmethod
    def from_points(cls, points, feature_kind="pm1"):
        """Build from ``(x, w, eta)`` triples.

        If every weight and eta is an ``int`` or ``Fraction``, exact mode is on.
        """
        points = list(points)
        if not points:
            raise InvalidArgumentError("support must be non-empty")
        X = np.array([p[0] for p in points], dtype=np.float64)
        ws = [p[1] for p in points]
        etas = [p[2] for p in points]
        exact = None
        if all(isinstance(v, (int, Fraction)) for v in ws + etas):
            exact = (tuple(Fraction(v) for v in ws), tuple(Fraction(v) for v in etas))
        return cls(X, np.array([float(v) for v in ws]), np.array([float(v) for v in etas]),
                   feature_kind, exact)


def _check_dim(m, limit):
    if limit is None:
        limit = _config.ENUMERATION_LIMIT
    if m > limit:
        raise ResourceLimitError(f"dimension {m} exceeds enumeration limit {limit}")


def cube_points(m):
    """All of {-1,1}^m, row i encoding i in binary with coordinate 0 as the MSB."""
    idx = np.arange(1 << m, dtype=np.int64)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (2 * bits - 1).astype(np.float64)


def majority(X):
    """Row-wise majority of a +-1 matrix with an odd number of columns."""
    return np.where(np.sum(X, axis=1) > 0, 1.0, -1.0)


def make_majority_distribution(m: int, limit: Optional[int] = None) -> FiniteDistribution:
    """Uniform x on {-1,1}^m with y = (1 + MAJ(x)) / 2 deterministically."""
    if not isinstance(m, (int, np.integer)) or m < 1 or m % 2 == 0:
        raise InvalidArgumentError(f"m must be an odd positive integer, got {m!r}")
    _check_dim(m, limit)
    X = cube_points(m)
    n = X.shape[0]
    eta = (majority(X) > 0).astype(np.float64)
    exact = ((Fraction(1, n),) * n, tuple(Fraction(int(e)) for e in eta))
    return FiniteDistribution(X, np.full(n, 1.0 / n), eta, "pm1", exact)


def random_distribution(m: int, seed: int, weights: str = "uniform", binary_eta: bool = False,
                        limit: Optional[int] = None) -> FiniteDistribution:
    """Random full-cube distribution driven by SplitMix64.

    eta is drawn first (one double per point in row order), then weights when
    ``weights == "random"``. With ``binary_eta`` each label is deterministic:
    eta = 1 iff the draw is below 1/2.
    """
    if m < 1:
        raise InvalidArgumentError("m must be positive")
    _check_dim(m, limit)
    if weights not in ("uniform", "random"):
        raise InvalidArgumentError("weights must be 'uniform' or 'random'")
    gen = SplitMix64(seed)
    X = cube_points(m)
    n = X.shape[0]
    eta = np.array([gen.random() for _ in range(n)])
    if binary_eta:
        eta = (eta < 0.5).astype(np.float64)
    if weights == "uniform":
        w = np.full(n, 1.0 / n)
    else:
        raw = np.array([gen.random() for _ in range(n)]) + 1e-3
        w = raw / math.fsum(raw)
        w = w / math.fsum(w)
    return FiniteDistribution(X, w, eta, "pm1")


def _weighted(D, g1, g0):
    return math.fsum(D.w * (D.eta * g1 + (1.0 - D.eta) * g0))


def _finite(value):
    if not math.isfinite(value):
        raise ContractViolationError(f"expectation is not finite: {value!r}")
    return value


def expectation(D: FiniteDistribution, g: Callable, exact: bool = False):
    """E[g(x, y)] under D.

    In float mode ``g(X, y)`` is called once per label with the whole support
    matrix and must return one value per row. In exact mode ``g(x, y)`` is
    called per point with ``x`` a tuple, and the sum is a ``Fraction``.
    """
    if exact:
        if D.exact is None:
            raise InvalidArgumentError("distribution has no exact representation")
        we, ee = D.exact
        total = Fraction(0)
        for (x, _, _), wx, ex in zip(D.points(), we, ee):
            total += wx * (ex * Fraction(g(x, 1)) + (1 - ex) * Fraction(g(x, 0)))
        return total
    g1 = np.broadcast_to(np.asarray(g(D.X, 1), dtype=np.float64), (D.size,))
    g0 = np.broadcast_to(np.asarray(g(D.X, 0), dtype=np.float64), (D.size,))
    return _finite(_weighted(D, g1, g0))


def prediction_values(D: FiniteDistribution, f) -> np.ndarray:
    """Values of predictor ``f`` on the support, checked to lie in [0, 1]."""
    if isinstance(f, np.ndarray):
        vals = np.asarray(f, dtype=np.float64)
        if vals.shape != (D.size,):
            raise DomainMismatchError("value array does not match the support size")
    else:
        vals = np.asarray(f.evaluate(D.X), dtype=np.float64)
    if np.any(~np.isfinite(vals)) or np.any((vals < 0) | (vals > 1)):
        raise ContractViolationError("predictor output outside [0, 1] on the support")
    return vals


def squared_loss(D: FiniteDistribution, f, exact: bool = False):
    """L(f) = E[(y - f(x))^2] = sum_x w [eta (1-f)^2 + (1-eta) f^2]."""
    if exact:
        vals = prediction_values(D, f)
        lookup = {x: Fraction(float(v)) for (x, _, _), v in zip(D.points(), vals)}
        return expectation(D, lambda x, y: (y - lookup[x]) ** 2, exact=True)
    v = prediction_values(D, f)
    return _finite(_weighted(D, (1.0 - v) ** 2, v * v))


def bayes_loss(D: FiniteDistribution) -> float:
    """Squared loss of f = eta, i.e. sum_x w eta (1 - eta)."""
    return math.fsum(D.w * D.eta * (1.0 - D.eta))


def mean_label(D: FiniteDistribution) -> float:
    return math.fsum(D.w * D.eta)


# --- JSON I/O -------------------------------------------------------------

def _num_out(v, exact_val=None):
    if exact_val is not None:
        if exact_val.denominator == 1:
            return int(exact_val.numerator)
        return f"{exact_val.numerator}/{exact_val.denominator}"
    return float(v)


def to_json_dict(D: FiniteDistribution) -> dict:
    we, ee = D.exact if D.exact is not None else (None, None)
    pts = []
    for i in range(D.size):
        x = D.X[i]
        xs = [int(v) for v in x] if D.feature_kind == "pm1" else [float(v) for v in x]
        pts.append({
            "x": xs,
            "w": _num_out(D.w[i], we[i] if we else None),
            "eta": _num_out(D.eta[i], ee[i] if ee else None),
        })
    return {"dim": D.dim, "feature_kind": D.feature_kind, "points": pts}


def _num_in(v):
    if isinstance(v, bool):
        raise InvalidArgumentError("booleans are not numbers here")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"bad rational {v!r}") from exc
    raise InvalidArgumentError(f"expected a number, got {v!r}")


def from_json_dict(obj: dict) -> FiniteDistribution:
    try:
        dim = obj["dim"]
        kind = obj["feature_kind"]
        raw = obj["points"]
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed distribution: missing {exc}") from exc
    if not isinstance(dim, int) or dim < 1:
        raise InvalidArgumentError("dim must be a positive integer")
    pts = []
    for p in raw:
        x = p["x"]
        if len(x) != dim:
            raise InvalidArgumentError("point dimension does not match dim")
        pts.append((x, _num_in(p["w"]), _num_in(p["eta"])))
    return FiniteDistribution.from_points(pts, kind)


def dumps(D: FiniteDistribution) -> str:
    return json.dumps(to_json_dict(D), indent=None, separators=(",", ":")) + "\n"


def load(path) -> FiniteDistribution:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{path}: invalid JSON ({exc})") from exc
    return from_json_dict(obj)


def dump(D: FiniteDistribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(D))
