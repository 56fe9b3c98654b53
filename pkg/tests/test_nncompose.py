import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcopt import nncompose
from mcopt.errors import InvalidArgumentError
from mcopt.predict import Node, ReluDag, clip01


def test_clip_gadget():
    g = nncompose.clip_dag()
    z = np.linspace(-3, 3, 601)[:, None]
    assert np.array_equal(g.evaluate(z), np.clip(z[:, 0], 0, 1))
    assert g.size == 2


def test_composition_small():
    f = ReluDag(1, nncompose.clip_gadget(["x0"], [0.5], 0.5, 0), output=1)
    c = ReluDag(1, (Node(("x0", "v"), (1.0, -1.0), 0.0, "linear"),), output=0, has_v_input=True)
    h = nncompose.compose_clip_update(f, c, 0.5)
    assert h.size == f.size + c.size + 2
    X = np.linspace(-1, 1, 21)[:, None]
    fx = np.clip(0.5 * X[:, 0] + 0.5, 0, 1)
    assert np.allclose(h.evaluate(X), clip01(fx + 0.5 * (X[:, 0] - fx)), atol=1e-15)


def test_composition_input_mismatch():
    f, c, _ = nncompose.random_pair(2, 0)
    c3 = nncompose.random_auditor_dag(3, 3, np.random.default_rng(0))
    with pytest.raises(InvalidArgumentError):
        nncompose.compose_clip_update(f, c3, 0.1)
    with pytest.raises(InvalidArgumentError):
        nncompose.compose_clip_update(f, c, 1.5)


def test_random_dags_respect_ranges():
    rng = np.random.default_rng(1)
    f = nncompose.random_predictor_dag(3, 6, rng)
    c = nncompose.random_auditor_dag(3, 5, rng)
    X = nncompose.sample_inputs(3, 500, 2)
    fv = f.evaluate(X)
    assert fv.min() >= 0 and fv.max() <= 1
    cv = c.evaluate(X, fv)
    assert cv.min() >= -1 and cv.max() <= 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32))
def test_composition_random(d, seed):
    f, c, beta = nncompose.random_pair(d, seed)
    h = nncompose.compose_clip_update(f, c, beta)
    rep = nncompose.functional_equality_check(h, f, c, beta, samples=300, seed=seed)
    assert rep.count_ok and rep.ok
    g = nncompose.inline_linear_nodes(h)
    assert g.size == h.size - 1
    X = nncompose.sample_inputs(d, 300, seed + 1)
    assert np.max(np.abs(g.evaluate(X) - h.evaluate(X))) <= 1e-12
