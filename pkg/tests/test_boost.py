import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcopt.boost import hkrr_boost, iteration_cap, loss_reduction_update, update_terms
from mcopt.dist import random_distribution, squared_loss
from mcopt.errors import InvalidArgumentError
from mcopt.predict import constant_junta, coordinate_auditor, majority_auditor

from conftest import random_table_auditor, random_table_predictor


def test_majority_update_is_exact(maj3):
    h, beta = loss_reduction_update(maj3, constant_junta(0.5), majority_auditor([0, 1, 2]))
    assert beta == 0.5
    assert squared_loss(maj3, h) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32))
def test_loss_drop(m, seed):
    D = random_distribution(m, seed, weights="random")
    rng = np.random.default_rng(seed)
    f = random_table_predictor(D, rng)
    c = random_table_auditor(D, rng)
    t = update_terms(D, f, c)
    assert t.loss_h <= t.loss_f - t.beta ** 2 + 1e-12
    assert t.loss_h <= t.loss_g + 1e-15
    assert t.loss_g == pytest.approx(t.loss_f - 2 * t.beta ** 2 + t.beta ** 2 * t.mean_c2, abs=1e-12)


def test_pm1_identity():
    D = random_distribution(3, 5, weights="random")
    rng = np.random.default_rng(5)
    t = update_terms(D, random_table_predictor(D, rng), random_table_auditor(D, rng, pm1=True))
    assert t.mean_c2 == pytest.approx(1.0, abs=1e-15)
    assert t.loss_g == pytest.approx(t.loss_f - t.beta ** 2, abs=1e-12)


def test_iteration_cap():
    assert iteration_cap(0.1) == 100
    assert iteration_cap(0.3) == 12


def test_boost_majority(maj3):
    tr = hkrr_boost(maj3, constant_junta(0.5),
                    [coordinate_auditor(i) for i in range(3)] + [majority_auditor([0, 1, 2])], 0.1)
    assert tr.iterations == 1
    assert tr.steps[0].name.startswith("JuntaAuditor(coords=[0, 1, 2]")
    assert tr.final_max_violation == 0.0


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.3])
def test_boost_random(gamma):
    D = random_distribution(3, 9)
    rng = np.random.default_rng(9)
    aud = [random_table_auditor(D, rng) for _ in range(6)]
    tr = hkrr_boost(D, constant_junta(0.5), aud, gamma)
    assert tr.iterations <= iteration_cap(gamma)
    assert tr.final_max_violation <= gamma
    losses = [s.loss_before for s in tr.steps] + [squared_loss(D, tr.final)]
    assert all(b <= a - s.beta ** 2 + 1e-12 for a, b, s in zip(losses, losses[1:], tr.steps))


def test_boost_rejects_bad_gamma(maj3):
    with pytest.raises(InvalidArgumentError):
        hkrr_boost(maj3, constant_junta(0.5), [], 0.0)
