"""Composing a predictor network with an auditor network into clip(f + beta c).

The composed DAG reuses f's output node as the auditor's prediction input and
adds exactly two ReLU nodes, so |h| = |f| + |c| + 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .predict import Node, ReluDag, clip01, parse_ref
from .rng import default_rng


def clip_gadget(u_inputs, u_weights, u_bias, first_index):
    """Two ReLU nodes computing clip(u) for u = u_weights . u_inputs + u_bias.

    ``first_index`` is the position the first node will take in the DAG:
    p1 = ReLU(u - 1), p2 = ReLU(u - p1).
    """
    u_inputs, u_weights = list(u_inputs), [float(v) for v in u_weights]
    p1 = Node(tuple(u_inputs), tuple(u_weights), float(u_bias) - 1.0, "relu")
    p2 = Node(tuple(u_inputs) + (f"n{first_index}",), tuple(u_weights) + (-1.0,),
              float(u_bias), "relu")
    return p1, p2


def clip_dag() -> ReluDag:
    """Single-input network computing clip(x0)."""
    return ReluDag(1, clip_gadget(["x0"], [1.0], 0.0, 0), output=1)


def _shift(ref, offset, v_ref):
    kind, j = parse_ref(ref)
    if kind == "n":
        return f"n{j + offset}"
    if kind == "v":
        return v_ref
    return ref


def compose_clip_update(f: ReluDag, c: ReluDag, beta: float) -> ReluDag:
    """Network for h(x) = clip(f(x) + beta c(x, f(x))).

    Nodes of f come first, then c with its prediction slot wired to f's output,
    then the two clip nodes. c's output may be linear; it stays an internal
    linear node until :func:`inline_linear_nodes` removes it.
    """
    if not -1.0 <= beta <= 1.0:
        raise InvalidArgumentError(f"beta must lie in [-1, 1], got {beta}")
    if f.has_v_input:
        raise InvalidArgumentError("predictor network must not read a prediction slot")
    if f.n_inputs != c.n_inputs:
        raise InvalidArgumentError(
            f"input dimension mismatch: f has {f.n_inputs}, c has {c.n_inputs}")
    n = f.size
    f_out = f"n{f.output}"
    nodes = list(f.nodes)
    for node in c.nodes:
        nodes.append(Node(tuple(_shift(r, n, f_out) for r in node.inputs), node.w, node.b, node.act))
    c_out = f"n{c.output + n}"
    nodes.extend(clip_gadget([f_out, c_out], [1.0, beta], 0.0, len(nodes)))
    return ReluDag(f.n_inputs, tuple(nodes), output=len(nodes) - 1, has_v_input=False)


def inline_linear_nodes(g: ReluDag) -> ReluDag:
    """Remove every non-output linear node by substituting its affine map into consumers."""
    expansions = {}
    kept = []
    for i, node in enumerate(g.nodes):
        coeffs = {}
        bias = node.b
        for ref, wt in zip(node.inputs, node.w):
            kind, j = parse_ref(ref)
            if kind == "n" and j in expansions:
                sub, sub_b = expansions[j]
                for r2, w2 in sub.items():
                    coeffs[r2] = coeffs.get(r2, 0.0) + wt * w2
                bias += wt * sub_b
            else:
                coeffs[ref] = coeffs.get(ref, 0.0) + wt
        if node.act == "linear" and i != g.output:
            expansions[i] = (coeffs, bias)
        else:
            kept.append((i, coeffs, bias, node.act))
    new_index = {old: new for new, (old, *_rest) in enumerate(kept)}

    def remap(ref):
        kind, j = parse_ref(ref)
        return f"n{new_index[j]}" if kind == "n" else ref

    nodes = tuple(Node(tuple(remap(r) for r in coeffs), tuple(coeffs.values()), bias, act)
                  for _, coeffs, bias, act in kept)
    return ReluDag(g.n_inputs, nodes, new_index[g.output], g.has_v_input)


@dataclass(frozen=True)
class CompositionReport:
    node_count_f: int
    node_count_c: int
    node_count_h: int
    max_abs_discrepancy: float
    tolerance: float = 1e-9

    @property
    def count_ok(self):
        return self.node_count_h == self.node_count_f + self.node_count_c + 2

    @property
    def ok(self):
        return self.max_abs_discrepancy <= self.tolerance


def sample_inputs(d: int, samples: int = 1000, seed: int = 0, box=(-1.0, 1.0)) -> np.ndarray:
    return default_rng(seed).uniform(box[0], box[1], size=(samples, d))


def reference_update(f: ReluDag, c: ReluDag, beta: float, X) -> np.ndarray:
    fv = f.evaluate(X)
    return clip01(fv + beta * c.evaluate(X, fv))


def functional_equality_check(h: ReluDag, f: ReluDag, c: ReluDag, beta: float, inputs=None,
                              samples: int = 1000, seed: int = 0) -> CompositionReport:
    """max |h(x) - clip(f(x) + beta c(x, f(x)))| over sampled inputs."""
    X = sample_inputs(f.n_inputs, samples, seed) if inputs is None else np.asarray(inputs, float)
    disc = float(np.max(np.abs(h.evaluate(X) - reference_update(f, c, beta, X))))
    return CompositionReport(f.size, c.size, h.size, disc)


# --- random networks ---------------------------------------------------------

def _random_affine(rng, sources, max_fan=4):
    fan = int(rng.integers(1, min(max_fan, len(sources)) + 1))
    picks = rng.choice(len(sources), size=fan, replace=False)
    return [sources[i] for i in sorted(picks)], rng.normal(0.0, 1.0, size=fan), rng.normal(0.0, 0.5)


def random_predictor_dag(d: int, n: int, rng) -> ReluDag:
    """Random n-node network (n >= 2) whose last two nodes clip its output into [0, 1]."""
    if n < 2:
        raise InvalidArgumentError("a clipped predictor network needs at least 2 nodes")
    nodes = []
    for i in range(n - 2):
        ins, w, b = _random_affine(rng, [f"x{j}" for j in range(d)] + [f"n{j}" for j in range(i)])
        nodes.append(Node(tuple(ins), tuple(w), b, "relu"))
    ins, w, b = _random_affine(rng, [f"x{j}" for j in range(d)] + [f"n{j}" for j in range(n - 2)])
    nodes.extend(clip_gadget(ins, w, b + 0.5, n - 2))
    return ReluDag(d, tuple(nodes), output=n - 1)


def random_auditor_dag(d: int, k: int, rng) -> ReluDag:
    """Random k-node auditor (k >= 3) reading (x, v); output 2 clip(u) - 1 in [-1, 1]."""
    if k < 3:
        raise InvalidArgumentError("a bounded auditor network needs at least 3 nodes")
    base = [f"x{j}" for j in range(d)] + ["v"]
    nodes = []
    for i in range(k - 3):
        ins, w, b = _random_affine(rng, base + [f"n{j}" for j in range(i)])
        nodes.append(Node(tuple(ins), tuple(w), b, "relu"))
    ins, w, b = _random_affine(rng, base[:-1] + [f"n{j}" for j in range(k - 3)])
    ins, w = ins + ["v"], list(w) + [float(rng.normal())]
    nodes.extend(clip_gadget(ins, w, b + 0.5, k - 3))
    nodes.append(Node((f"n{k - 2}",), (2.0,), -1.0, "linear"))
    return ReluDag(d, tuple(nodes), output=k - 1, has_v_input=True)


def random_pair(d: int, seed: int, n_range=(2, 8), k_range=(3, 8)):
    rng = default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    k = int(rng.integers(k_range[0], k_range[1] + 1))
    return random_predictor_dag(d, n, rng), random_auditor_dag(d, k, rng), float(rng.uniform(-1, 1))
