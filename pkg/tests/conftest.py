import itertools

import numpy as np
import pytest

from mcopt.dist import FiniteDistribution, cube_points, make_majority_distribution, random_distribution
from mcopt.predict import TableAuditor, TablePredictor


@pytest.fixture
def maj3():
    return make_majority_distribution(3)


def random_dist(m, seed, weights="random"):
    return random_distribution(m, seed, weights=weights)


def random_table_predictor(D, rng):
    return TablePredictor.from_values(D, rng.uniform(0, 1, D.size))


def random_table_auditor(D, rng, pm1=False):
    """Random auditor; one of the three table rules unless ``pm1``."""
    if pm1:
        return TableAuditor.from_values(D, rng.choice([-1.0, 1.0], D.size))
    rule = ("const", "interval", "affine")[int(rng.integers(3))]
    a = rng.uniform(-1, 1, D.size)
    if rule == "affine":
        return TableAuditor.from_values(D, a, "affine", slopes=rng.uniform(-2, 2, D.size))
    if rule == "interval":
        lo = float(rng.uniform(0, 0.7))
        return TableAuditor.from_values(D, a, "interval", lo=lo, hi=lo + 0.3)
    return TableAuditor.from_values(D, a)


def all_sign_juntas(k):
    """Every {-1,1}-valued table on 2^k cells."""
    for signs in itertools.product((-1.0, 1.0), repeat=1 << k):
        yield np.array(signs)


def cube_dist(m, eta, w=None):
    X = cube_points(m)
    w = np.full(len(X), 1 / len(X)) if w is None else np.asarray(w)
    return FiniteDistribution(X, w, np.asarray(eta, dtype=float))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
