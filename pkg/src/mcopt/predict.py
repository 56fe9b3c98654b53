"""Predictors (outputs in [0,1]) and auditors (outputs in [-1,1]).

Every object here evaluates a whole support matrix at once:
``p.evaluate(X)`` for predictors and ``c.evaluate(X, v)`` for auditors, where
``v`` holds the prediction at each row. Auditors that ignore ``v`` have
``uses_v == False``; those are the ones admissible for multiaccuracy.

Coordinates are 0-based throughout. A junta over ``coords`` indexes its table
by reading the coordinates (-1 -> 0, +1 -> 1) as a binary number with the
smallest coordinate as the most significant bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _config, _kernels
from .dist import cube_points, majority
from .errors import (
    ContractViolationError,
    DomainMismatchError,
    InvalidArgumentError,
    ResourceLimitError,
)


def clip01(z):
    return np.clip(z, 0.0, 1.0)


# --- juntas ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _Junta:
    coords: tuple
    table: np.ndarray

    lo = 0.0
    hi = 1.0
    uses_v = False

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if any(c < 0 for c in coords) or any(a >= b for a, b in zip(coords, coords[1:])):
            raise InvalidArgumentError(f"coords must be strictly increasing and >= 0: {coords}")
        table = np.array(self.table, dtype=np.float64)
        if table.shape != (1 << len(coords),):
            raise InvalidArgumentError(
                f"table length {table.size} != 2**{len(coords)} for coords {coords}")
        if np.any(~np.isfinite(table)) or np.any((table < self.lo) | (table > self.hi)):
            raise InvalidArgumentError(f"table values must lie in [{self.lo}, {self.hi}]")
        table.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "table", table)

    @property
    def size(self):
        return len(self.coords)

    def evaluate(self, X, v=None):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.coords and self.coords[-1] >= X.shape[1]:
            raise DomainMismatchError(
                f"junta uses coordinate {self.coords[-1]} but inputs have dim {X.shape[1]}")
        bits = np.ascontiguousarray((X > 0).astype(np.uint8))
        return self.table[_kernels.cell_index(bits, np.array(self.coords, dtype=np.int64))]

    def __call__(self, x, v=None):
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :])[0])


class JuntaPredictor(_Junta):
    """f(x) = table[x_S], values in [0, 1]. A 0-junta is a constant."""


class JuntaAuditor(_Junta):
    """c(x) = table[x_S], values in [-1, 1]; ignores the prediction."""

    lo = -1.0


def constant_junta(value: float) -> JuntaPredictor:
    return JuntaPredictor((), [value])


def majority_auditor(coords: Sequence[int]) -> JuntaAuditor:
    """MAJ(x_S) as a junta auditor; ``len(coords)`` must be odd."""
    coords = tuple(sorted(coords))
    if len(coords) % 2 == 0:
        raise InvalidArgumentError("majority needs an odd number of coordinates")
    return JuntaAuditor(coords, majority(cube_points(len(coords))))


def coordinate_auditor(i: int) -> JuntaAuditor:
    return JuntaAuditor((i,), [-1.0, 1.0])


def compose_update_junta(f: JuntaPredictor, c: JuntaAuditor, beta: float) -> JuntaPredictor:
    """h(z) = clip(f(z_S) + beta * c(z_T)) as a junta on S | T.

    Coordinates the result no longer depends on are kept.
    """
    if not -1.0 <= beta <= 1.0:
        raise InvalidArgumentError(f"beta must lie in [-1, 1], got {beta}")
    union = tuple(sorted(set(f.coords) | set(c.coords)))
    if len(union) > _config.ENUMERATION_LIMIT:
        raise ResourceLimitError(f"composed junta would have {len(union)} coordinates")
    Z = cube_points(len(union)) if union else np.zeros((1, 0))
    pos = {j: p for p, j in enumerate(union)}
    bits = np.ascontiguousarray((Z > 0).astype(np.uint8))
    fi = _kernels.cell_index(bits, np.array([pos[j] for j in f.coords], dtype=np.int64))
    ci = _kernels.cell_index(bits, np.array([pos[j] for j in c.coords], dtype=np.int64))
    return JuntaPredictor(union, clip01(f.table[fi] + beta * c.table[ci]))


# --- tables ---------------------------------------------------------------

def _key(x):
    return tuple(float(v) for v in np.asarray(x, dtype=np.float64).ravel())


def _lookup(table, X, what):
    out = np.empty(X.shape[0])
    for i, row in enumerate(X):
        try:
            out[i] = table[_key(row)]
        except KeyError:
            raise DomainMismatchError(f"{what} undefined at x={_key(row)}") from None
    return out


class TablePredictor:
    """Explicit map from support points to values in [0, 1]."""

    uses_v = False

    def __init__(self, values: dict):
        self.values = {_key(k): float(v) for k, v in values.items()}
        vals = np.fromiter(self.values.values(), dtype=np.float64, count=len(self.values))
        if np.any(~np.isfinite(vals)) or np.any((vals < 0) | (vals > 1)):
            raise InvalidArgumentError("table predictor values must lie in [0, 1]")

    @classmethod
    def from_values(cls, D, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (D.size,):
            raise DomainMismatchError("one value per support point is required")
        return cls({tuple(row): v for row, v in zip(D.X.tolist(), values.tolist())})

    def evaluate(self, X, v=None):
        return _lookup(self.values, np.atleast_2d(np.asarray(X, dtype=np.float64)), "predictor")

    def __call__(self, x, v=None):
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :])[0])


class TableAuditor:
    """Per-point table with one of three piecewise rules in the prediction v.

    * ``const``:    c(x, v) = a(x)
    * ``interval``: c(x, v) = a(x) * [lo <= v < hi]   (``hi >= 1`` includes v = 1)
    * ``affine``:   c(x, v) = clip(a(x) + b(x) v, -1, 1)
    """

    RULES = ("const", "interval", "affine")

    def __init__(self, values: dict, rule: str = "const", slopes: Optional[dict] = None,
                 lo: float = 0.0, hi: float = 1.0):
        if rule not in self.RULES:
            raise InvalidArgumentError(f"rule must be one of {self.RULES}")
        self.rule = rule
        self.values = {_key(k): float(v) for k, v in values.items()}
        self.slopes = {_key(k): float(v) for k, v in (slopes or {}).items()}
        self.lo, self.hi = float(lo), float(hi)
        if rule != "affine" and any(abs(v) > 1 for v in self.values.values()):
            raise InvalidArgumentError("auditor table values must lie in [-1, 1]")
        if rule == "affine" and set(self.slopes) != set(self.values):
            raise InvalidArgumentError("affine rule needs a slope for every point")
        if rule == "interval" and not lo < hi:
            raise InvalidArgumentError("interval rule needs lo < hi")

    @property
    def uses_v(self):
        return self.rule != "const"

    @classmethod
    def from_values(cls, D, values, rule="const", slopes=None, lo=0.0, hi=1.0):
        rows = D.X.tolist()
        vals = dict(zip(map(tuple, rows), np.asarray(values, dtype=float).tolist()))
        sl = None
        if slopes is not None:
            sl = dict(zip(map(tuple, rows), np.asarray(slopes, dtype=float).tolist()))
        return cls(vals, rule, sl, lo, hi)

    def evaluate(self, X, v=None):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        a = _lookup(self.values, X, "auditor")
        if self.rule == "const":
            return a
        if v is None:
            raise InvalidArgumentError("this auditor needs the prediction v")
        v = np.asarray(v, dtype=np.float64)
        if self.rule == "interval":
            inside = (v >= self.lo) & ((v < self.hi) | ((self.hi >= 1.0) & (v <= self.hi)))
            return np.where(inside, a, 0.0)
        return np.clip(a + _lookup(self.slopes, X, "auditor") * v, -1.0, 1.0)

    def __call__(self, x, v=None):
        vv = None if v is None else np.array([v], dtype=np.float64)
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :], vv)[0])


class FunctionAuditor:
    """Wraps an arbitrary vectorized ``fn(X, v)``; not serializable."""

    def __init__(self, fn: Callable, uses_v: bool = True, name: str = "function"):
        self.fn = fn
        self.uses_v = uses_v
        self.name = name

    def evaluate(self, X, v=None):
        return np.asarray(self.fn(np.atleast_2d(X), v), dtype=np.float64)

    def __call__(self, x, v=None):
        vv = None if v is None else np.array([v], dtype=np.float64)
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :], vv)[0])


# --- ReLU DAGs -----------------------------------------------------------

ACTIVATIONS = ("relu", "linear")


def parse_ref(ref: str):
    """``"x3"`` -> ("x", 3), ``"v"`` -> ("v", 0), ``"n5"`` -> ("n", 5)."""
    if ref == "v":
        return ("v", 0)
    if isinstance(ref, str) and len(ref) > 1 and ref[0] in "xn" and ref[1:].isdigit():
        return (ref[0], int(ref[1:]))
    raise InvalidArgumentError(f"bad node reference {ref!r}")


@dataclass(frozen=True)
class Node:
    inputs: tuple
    w: tuple
    b: float = 0.0
    act: str = "relu"

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "w", tuple(float(v) for v in self.w))
        object.__setattr__(self, "b", float(self.b))
        if len(self.inputs) != len(self.w):
            raise InvalidArgumentError("node needs one weight per input")
        if self.act not in ACTIVATIONS:
            raise InvalidArgumentError(f"activation must be one of {ACTIVATIONS}")
        if not all(math.isfinite(v) for v in self.w + (self.b,)):
            raise InvalidArgumentError("node weights must be finite")


@dataclass(frozen=True, eq=False)
class ReluDag:
    """Feed-forward DAG of ReLU (or linear) nodes in topological order.

    Input coordinates ``x0..x{d-1}`` and the optional prediction slot ``v``
    are pseudo-nodes and are not counted in :attr:`size`.
    """

    n_inputs: int
    nodes: tuple
    output: int
    has_v_input: bool = False

    def __post_init__(self):
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if self.n_inputs < 0:
            raise InvalidArgumentError("n_inputs must be nonnegative")
        if not 0 <= self.output < len(nodes):
            raise InvalidArgumentError("output must index an existing node")
        for i, node in enumerate(nodes):
            for ref in node.inputs:
                kind, j = parse_ref(ref)
                if kind == "x" and j >= self.n_inputs:
                    raise InvalidArgumentError(f"node {i}: dangling input {ref}")
                if kind == "v" and not self.has_v_input:
                    raise InvalidArgumentError(f"node {i}: no prediction slot to read")
                if kind == "n" and j >= i:
                    raise InvalidArgumentError(f"node {i}: reference to n{j} breaks topological order")

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def uses_v(self):
        return self.has_v_input

    def forward(self, X, v=None):
        """Activations of all nodes, shape ``(N, size)``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_inputs:
            raise DomainMismatchError(f"DAG expects {self.n_inputs} inputs, got {X.shape[1]}")
        if self.has_v_input:
            if v is None:
                raise InvalidArgumentError("DAG reads the prediction slot but v is missing")
            v = np.broadcast_to(np.asarray(v, dtype=np.float64), (X.shape[0],))
        acts = np.empty((X.shape[0], len(self.nodes)))
        for i, node in enumerate(self.nodes):
            z = np.full(X.shape[0], node.b)
            for ref, wt in zip(node.inputs, node.w):
                kind, j = parse_ref(ref)
                src = X[:, j] if kind == "x" else (v if kind == "v" else acts[:, j])
                z = z + wt * src
            acts[:, i] = np.maximum(z, 0.0) if node.act == "relu" else z
        return acts

    def evaluate(self, X, v=None):
        return self.forward(X, v)[:, self.output]

    def __call__(self, x, v=None):
        vv = None if v is None else np.array([v], dtype=np.float64)
        return float(self.evaluate(np.asarray(x, dtype=np.float64)[None, :], vv)[0])


# --- uniform evaluation contract -----------------------------------------

def eval_predictor(p, x) -> float:
    """Evaluate a predictor at a single point, enforcing the [0, 1] contract."""
    x = np.asarray(x, dtype=np.float64).ravel()
    val = p(x)
    if not (math.isfinite(val) and 0.0 <= val <= 1.0):
        raise ContractViolationError(f"predictor output {val} outside [0, 1]")
    return val


def auditor_values(c, X, v=None) -> np.ndarray:
    """Auditor outputs on the rows of ``X`` given predictions ``v``, checked in [-1, 1]."""
    vals = np.asarray(c.evaluate(X, v if c.uses_v else None), dtype=np.float64)
    if vals.shape != (np.atleast_2d(X).shape[0],):
        raise DomainMismatchError("auditor returned the wrong number of values")
    if np.any(~np.isfinite(vals)) or np.any(np.abs(vals) > 1.0):
        raise ContractViolationError("auditor output outside [-1, 1]")
    return vals


def describe(obj) -> str:
    if isinstance(obj, _Junta):
        return f"{type(obj).__name__}(coords={list(obj.coords)})"
    if isinstance(obj, ReluDag):
        return f"ReluDag(nodes={obj.size})"
    if isinstance(obj, TableAuditor):
        return f"TableAuditor({obj.rule})"
    if isinstance(obj, FunctionAuditor):
        return obj.name
    return type(obj).__name__


# --- JSON ------------------------------------------------------------------

def _key_str(key):
    return ",".join(str(int(v)) if float(v).is_integer() else repr(float(v)) for v in key)


def _parse_key(s):
    try:
        return tuple(float(t) for t in s.split(","))
    except ValueError as exc:
        raise InvalidArgumentError(f"bad table key {s!r}") from exc


def dag_to_json(g: ReluDag) -> dict:
    return {
        "kind": "relu_dag",
        "inputs": g.n_inputs,
        "has_v_input": g.has_v_input,
        "nodes": [{"in": list(n.inputs), "w": list(n.w), "b": n.b, "act": n.act} for n in g.nodes],
        "output": g.output,
    }


def dag_from_json(obj: dict) -> ReluDag:
    try:
        nodes = [Node(n["in"], n["w"], n.get("b", 0.0), n.get("act", "relu")) for n in obj["nodes"]]
        return ReluDag(int(obj["inputs"]), tuple(nodes), int(obj["output"]),
                       bool(obj.get("has_v_input", False)))
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed relu_dag: {exc}") from exc


def to_json(obj) -> dict:
    if isinstance(obj, JuntaAuditor):
        return {"kind": "junta_auditor", "coords": list(obj.coords), "table": obj.table.tolist()}
    if isinstance(obj, JuntaPredictor):
        return {"kind": "junta", "coords": list(obj.coords), "table": obj.table.tolist()}
    if isinstance(obj, TablePredictor):
        return {"kind": "table", "values": {_key_str(k): v for k, v in obj.values.items()}}
    if isinstance(obj, TableAuditor):
        out = {"kind": "table_auditor", "rule": obj.rule,
               "values": {_key_str(k): v for k, v in obj.values.items()}}
        if obj.rule == "affine":
            out["slopes"] = {_key_str(k): v for k, v in obj.slopes.items()}
        if obj.rule == "interval":
            out["lo"], out["hi"] = obj.lo, obj.hi
        return out
    if isinstance(obj, ReluDag):
        return dag_to_json(obj)
    raise InvalidArgumentError(f"{type(obj).__name__} is not serializable")


def from_json(obj: dict, role: str = "predictor"):
    """Decode a predictor (``role="predictor"``) or auditor (``role="auditor"``).

    ``{"kind": "junta"}`` decodes to a :class:`JuntaAuditor` in the auditor role.
    """
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InvalidArgumentError("expected an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind in ("junta", "junta_auditor"):
            cls = JuntaAuditor if (role == "auditor" or kind == "junta_auditor") else JuntaPredictor
            return cls(tuple(obj["coords"]), obj["table"])
        if kind == "majority":
            return majority_auditor(obj["coords"])
        if kind == "table":
            vals = {_parse_key(k): v for k, v in obj["values"].items()}
            if role == "auditor":
                return TableAuditor(vals)
            return TablePredictor(vals)
        if kind == "table_auditor":
            vals = {_parse_key(k): v for k, v in obj["values"].items()}
            slopes = {_parse_key(k): v for k, v in obj.get("slopes", {}).items()}
            return TableAuditor(vals, obj.get("rule", "const"), slopes,
                                obj.get("lo", 0.0), obj.get("hi", 1.0))
        if kind == "relu_dag":
            return dag_from_json(obj)
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed {kind} object: {exc}") from exc
    raise InvalidArgumentError(f"unknown kind {kind!r}")
