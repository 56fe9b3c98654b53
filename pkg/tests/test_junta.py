import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from mcopt import junta
from mcopt.dist import make_majority_distribution, random_distribution, squared_loss
from mcopt.errors import InvalidArgumentError, TheoremCheckError
from mcopt.predict import JuntaPredictor, constant_junta


def numeric_opt(D, n):
    """Minimize each cell's loss numerically for every n-subset."""
    best = math.inf
    for S in itertools.combinations(range(D.dim), n):
        table = []
        for cell in range(1 << n):
            bits = [(cell >> (n - 1 - j)) & 1 for j in range(n)]
            mask = np.all((D.X[:, list(S)] > 0) == np.array(bits, bool), axis=1)
            w, eta = D.w[mask], D.eta[mask]
            res = minimize_scalar(lambda v: float(np.sum(w * (eta * (1 - v) ** 2 + (1 - eta) * v * v))),
                                  bounds=(0, 1), method="bounded", options={"xatol": 1e-10})
            table.append(res.x)
        best = min(best, squared_loss(D, JuntaPredictor(S, np.clip(table, 0, 1))))
    return best


def test_majority_opt_curve(maj3):
    assert [junta.junta_opt(maj3, n)[0] for n in range(4)] == [0.25, 0.1875, 0.125, 0.0]


def test_clamp_above_m(maj3):
    opt, w = junta.junta_opt(maj3, 7)
    assert opt == 0.0 and len(w.coords) == 3


@pytest.mark.parametrize("seed", range(6))
def test_opt_matches_numeric_minimization(seed):
    D = random_distribution(3, seed, weights="random")
    for n in range(4):
        exact, wit = junta.junta_opt(D, n)
        assert exact <= numeric_opt(D, n) + 1e-9
        assert exact == pytest.approx(numeric_opt(D, n), abs=1e-9)
        assert squared_loss(D, wit) == pytest.approx(exact, abs=1e-12)


def test_empty_cells_default_half():
    from mcopt.dist import FiniteDistribution
    D = FiniteDistribution(np.array([[1.0, 1.0], [1.0, -1.0]]), [0.5, 0.5], [1.0, 0.0])
    f = junta.conditional_mean_junta(D, (0,))
    assert f.table.tolist() == [0.5, 0.5]


def test_unlucky_sizes_and_bound():
    opts = [1.0, 0.5, 0.45, 0.0]
    assert junta.unlucky_sizes(opts, 1, 0.2) == [0, 2]
    # three unlucky sizes > k/alpha = 2; impossible for a real loss curve in [0, 1]
    with pytest.raises(TheoremCheckError):
        junta.OptCurve.from_opts([3.0, 2.0, 1.0, 0.0], 1, 0.5)
    with pytest.raises(TheoremCheckError):
        junta.OptCurve.from_opts([0.2, 0.3], 1, 0.1)


def test_verify_upper_majority(maj3):
    rep = junta.verify_upper_bound(maj3, 1, 0.2)
    assert rep["ok"] and rep["unlucky"] == []
    assert [r["violation"] for r in rep["rows"]] == [0.25, 0.25, 0.25]


@pytest.mark.parametrize("eps", [0.0, 0.01])
def test_verify_upper_random(eps):
    for seed in range(4):
        rep = junta.verify_upper_bound(random_distribution(4, seed), 2, 0.1, eps, seed=seed)
        assert rep["ok"]


def test_lower_bound_witness_majority():
    D = make_majority_distribution(9)
    rng = np.random.default_rng(0)
    for n in range(7):
        f = junta.random_junta(9, n, rng)
        terms = junta.lower_bound_terms(D, f, 3)
        assert abs(terms["f_term"]) < 1e-15
        assert junta.lower_bound_witness(D, f, 3) > math.sqrt(3 / 9) / math.pi


def test_lower_bound_dimension():
    assert junta.lower_bound_dimension(1, 1 / (4 * math.pi ** 2)) == (1, 3)
    assert junta.lower_bound_dimension(3, 1 / (3 * math.pi ** 2)) == (3, 7)
    assert junta.lower_bound_dimension(4, 0.01)[0] == 3


def test_lower_bound_experiment_default_m():
    rep = junta.lower_bound_experiment(1, 1 / (4 * math.pi ** 2), per_n=3)
    assert rep["m"] == 3 and rep["count_ok"]
    assert all(r["value"] > r["sqrt_alpha"] for r in rep["rows"])


def test_lower_bound_rejects_large_alpha():
    with pytest.raises(InvalidArgumentError):
        junta.lower_bound_experiment(3, 0.05)
    with pytest.raises(InvalidArgumentError):
        junta.lower_bound_experiment(3, 0.05, m=9)


def test_lower_bound_needs_majority():
    with pytest.raises(InvalidArgumentError):
        junta.lower_bound_terms(random_distribution(3, 0), constant_junta(0.5), 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32))
def test_opt_nonincreasing_and_bracketed(m, seed):
    D = random_distribution(m, seed, weights="random")
    curve = junta.opt_curve(D, m, 1, 0.1)
    assert all(b <= a + 1e-12 for a, b in zip(curve.opts, curve.opts[1:]))
    from mcopt.dist import bayes_loss
    assert curve.opts[-1] == pytest.approx(bayes_loss(D), abs=1e-12)
    assert curve.opts[0] <= 0.25 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32), st.floats(0.001, 0.05))
def test_perturbation_within_epsilon(m, seed, eps):
    D = random_distribution(m, seed)
    _, f = junta.junta_opt(D, min(2, m))
    g = junta.perturb_junta(D, f, eps, np.random.default_rng(seed))
    assert squared_loss(D, g) <= squared_loss(D, f) + eps + 1e-12
