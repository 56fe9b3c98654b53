import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcopt import proper
from mcopt.dist import random_distribution
from mcopt.errors import InvalidArgumentError
from mcopt.predict import majority_auditor

from conftest import random_table_auditor

SPECS = [proper.SQUARED, proper.XENT]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
def test_grid_checks(spec):
    dev = proper.check_spec(spec)
    assert dev["propriety"] <= 1e-12
    assert dev["grad_dual_roundtrip"] <= 1e-9
    assert dev["dual_loss_identity"] <= 1e-9
    for key in ("grad_range", "smoothness", "secant_range", "convexity", "anchor"):
        assert dev[key] <= 1e-12, key


def test_xent_values():
    assert proper.dual_of(proper.XENT, 0.5) == 0.0
    assert proper.dual_of(proper.XENT, 0.75) == pytest.approx(math.log(3))
    assert proper.primal_of(proper.XENT, math.log(3)) == pytest.approx(0.75)
    assert proper.dual_loss(proper.XENT, 1, 0.0) == pytest.approx(math.log(2))
    with pytest.raises(InvalidArgumentError):
        proper.dual_of(proper.XENT, 1.0)


def test_squared_dual_loss_matches_loss():
    v = np.linspace(0, 1, 11)
    for y in (0, 1):
        t = proper.dual_of(proper.SQUARED, v)
        assert np.allclose(proper.dual_loss(proper.SQUARED, y, t), (y - v) ** 2, atol=1e-15)


def test_xent_update_on_majority(maj3):
    g0 = proper.DualPredictor.constant(maj3, 0.0)
    g1, beta = proper.proper_update(proper.XENT, maj3, g0, majority_auditor([0, 1, 2]))
    assert beta == 0.5
    assert sorted(set(g1.evaluate(maj3.X).tolist())) == [-2.0, 2.0]


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32))
def test_update_drop(spec, m, seed):
    D = random_distribution(m, seed, weights="random")
    rng = np.random.default_rng(seed)
    g = proper.DualPredictor.from_values(D, rng.uniform(-2, 2, D.size))
    c = random_table_auditor(D, rng)
    before = proper.expected_dual_loss(spec, D, g.evaluate(D.X))
    g2, beta = proper.proper_update(spec, D, g, c)
    after = proper.expected_dual_loss(spec, D, g2.evaluate(D.X))
    assert after <= before - beta ** 2 / (2 * spec.lam) + 1e-12


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s.name)
def test_boost_terminates(spec):
    D = random_distribution(3, 4)
    rng = np.random.default_rng(4)
    aud = [random_table_auditor(D, rng) for _ in range(5)]
    tr = proper.proper_boost(spec, D, proper.DualPredictor.constant(D, spec.t0), aud, 0.05)
    assert tr.iterations <= tr.cap
    assert tr.final_max_violation <= 0.05


def test_dual_predictor_json_roundtrip(maj3):
    g = proper.DualPredictor.from_values(maj3, np.linspace(-3, 3, 8))
    back = proper.DualPredictor.from_json(g.to_json())
    assert np.array_equal(back.evaluate(maj3.X), g.evaluate(maj3.X))


def test_unknown_spec():
    with pytest.raises(InvalidArgumentError):
        proper.get_spec("hinge")
