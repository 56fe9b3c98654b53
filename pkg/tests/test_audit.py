import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcopt import audit
from mcopt.audit import ma_violation, max_ma_violation_juntas, mc_violation
from mcopt.dist import random_distribution
from mcopt.errors import InvalidArgumentError
from mcopt.predict import (JuntaAuditor, JuntaPredictor, TableAuditor, constant_junta,
                           coordinate_auditor, majority_auditor)

from conftest import all_sign_juntas, random_table_predictor


def brute_max_ma(D, f, k):
    """Enumerate every k-subset and every sign table on it."""
    best = 0.0
    for S in itertools.combinations(range(D.dim), k):
        for table in all_sign_juntas(k):
            best = max(best, abs(ma_violation(D, f, JuntaAuditor(S, table))))
    return best


def test_majority_examples(maj3):
    f = constant_junta(0.5)
    assert mc_violation(maj3, f, majority_auditor([0, 1, 2])) == 0.5
    assert mc_violation(maj3, f, coordinate_auditor(0)) == 0.25
    v3, w3 = max_ma_violation_juntas(maj3, f, 3)
    assert v3 == 0.5 and w3.coords == (0, 1, 2)
    v1, w1 = max_ma_violation_juntas(maj3, f, 1)
    assert v1 == 0.25 and w1.coords == (0,)


def test_k_zero_is_bias(maj3):
    f = constant_junta(0.3)
    v, _ = max_ma_violation_juntas(maj3, f, 0)
    assert v == pytest.approx(0.2, abs=1e-15)


@pytest.mark.parametrize("seed", range(12))
def test_max_ma_matches_sign_enumeration(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4))
    D = random_distribution(m, seed, weights="random")
    f = random_table_predictor(D, rng)
    for k in range(m + 1):
        if (1 << k) > 8:
            continue
        v, witness = max_ma_violation_juntas(D, f, k)
        assert v == pytest.approx(brute_max_ma(D, f, k), abs=1e-14)
        assert ma_violation(D, f, witness) == pytest.approx(v, abs=1e-14)


def test_ma_rejects_prediction_dependent_auditor(maj3):
    c = TableAuditor.from_values(maj3, np.ones(8), "interval", lo=0, hi=0.5)
    with pytest.raises(InvalidArgumentError):
        ma_violation(maj3, constant_junta(0.5), c)
    assert mc_violation(maj3, constant_junta(0.5), c) == 0.0  # v = 0.5 is outside [0, 0.5)


def test_audit_class(maj3):
    res = audit.audit_class(maj3, constant_junta(0.5),
                            [majority_auditor([0, 1, 2]), coordinate_auditor(2)], 0.3)
    assert [r.passed for r in res] == [False, True]
    assert not audit.all_passed(res)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32), st.floats(0, 1))
def test_max_ma_monotone_in_k(m, seed, c):
    D = random_distribution(m, seed)
    f = constant_junta(c)
    vals = [max_ma_violation_juntas(D, f, k)[0] for k in range(m + 1)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0 <= v <= 1 for v in vals)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32), st.floats(-1, 1), st.floats(-1, 1))
def test_violation_linear_in_auditor(m, seed, a, b):
    D = random_distribution(m, seed)
    f = JuntaPredictor((0,), [0.2, 0.7])
    c1, c2 = coordinate_auditor(0), majority_auditor([0])
    mixed = JuntaAuditor((0,), a / 2 * c1.table + b / 2 * c2.table)
    lhs = mc_violation(D, f, mixed)
    rhs = a / 2 * mc_violation(D, f, c1) + b / 2 * mc_violation(D, f, c2)
    assert math.isclose(lhs, rhs, abs_tol=1e-12)
