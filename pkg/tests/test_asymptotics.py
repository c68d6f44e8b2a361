import itertools

import numpy as np
import pytest
from scipy.linalg import fractional_matrix_power
from scipy.optimize import minimize_scalar

from qsdkit.asymptotics import (
    chernoff_classical,
    chernoff_multi,
    chernoff_two,
    finite_n_error,
    repeated_measurement_sim,
    sandwich_check,
)
from qsdkit.errors import DimensionCapExceeded, WrongCount
from qsdkit.minerror import helstrom_two_state
from qsdkit.operators import Ensemble, Povm, outcome_distribution, projector
from qsdkit.random import random_density

from .conftest import KET0, KETP


def _chernoff_oracle(a, b):
    # oracle: dense fractional powers from scipy plus bounded scalar minimisation
    f = lambda s: np.trace(fractional_matrix_power(a, s) @ fractional_matrix_power(b, 1 - s)).real
    res = minimize_scalar(f, bounds=(1e-6, 1 - 1e-6), method="bounded", options={"xatol": 1e-12})
    return -np.log(min(res.fun, f(1e-6), f(1 - 1e-6)))


def test_chernoff_zero_plus():
    res = chernoff_two(projector(KET0), projector(KETP))
    assert abs(res.xi - np.log(2)) <= 1e-12
    assert not res.disjoint


def test_chernoff_full_rank_vs_oracle(rng):
    for _ in range(10):
        a, b = random_density(3, rng), random_density(3, rng)
        assert abs(chernoff_two(a, b).xi - _chernoff_oracle(a, b)) <= 1e-8


def test_chernoff_commuting_equals_classical(rng):
    for _ in range(10):
        p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
        u = np.linalg.qr(rng.normal(size=(4, 4)))[0]
        a, b = u @ np.diag(p) @ u.T, u @ np.diag(q) @ u.T
        assert abs(chernoff_two(a, b).xi - chernoff_classical(p, q).xi) <= 1e-10


def test_chernoff_disjoint_and_identical():
    res = chernoff_two(projector(KET0), projector([0, 1]))
    assert res.disjoint and np.isinf(res.xi)
    same = chernoff_two(np.eye(2) / 2, np.eye(2) / 2)
    assert abs(same.xi) <= 1e-12


def test_chernoff_bounds_helstrom(rng):
    # p_err <= (1/2) min_s tr[rho^s sigma^(1-s)] for equal priors
    for _ in range(10):
        a, b = random_density(2, rng), random_density(2, rng)
        err = 1 - helstrom_two_state(Ensemble([0.5, 0.5], [a, b])).p_guess
        assert err <= 0.5 * np.exp(-chernoff_two(a, b).xi) + 1e-12


def test_chernoff_multi_is_min_pairwise(rng):
    states = [random_density(2, rng) for _ in range(4)]
    pair = min(chernoff_two(a, b).xi for a, b in itertools.combinations(states, 2))
    assert chernoff_multi(states) == pair
    with pytest.raises(WrongCount):
        chernoff_multi(states[:1])


def test_finite_n_zero_plus():
    est = finite_n_error(projector(KET0), projector(KETP), n_max=10)
    assert abs(est.fitted_exponent - np.log(2)) <= 0.15 * np.log(2)
    # pure states: exact error (1 - sqrt(1 - s^(2n)))/2 with s^2 = 1/2
    exact = 0.5 * (1 - np.sqrt(1 - 0.5 ** est.n_values))
    assert np.allclose(est.error_probs, exact, atol=1e-12)
    assert np.all(np.diff(est.error_probs) < 0)


def test_finite_n_commuting_exact_exponent():
    a, b = np.diag([1.0, 0.0]), np.eye(2) / 2
    est = finite_n_error(a, b, n_max=10)
    assert np.allclose(est.error_probs, 0.5 ** est.n_values / 2)
    xi = chernoff_classical([1, 0], [0.5, 0.5]).xi
    assert abs(est.fitted_exponent - xi) <= 0.1 * xi
    assert est.pairs()[0] == (1, 0.25)


def test_finite_n_cap():
    with pytest.raises(DimensionCapExceeded):
        finite_n_error(np.eye(2) / 2, np.eye(2) / 2, n_max=13)


def test_sandwich_ordered(rng):
    states = [projector(v) for v in ([1, 0], [np.cos(0.6), np.sin(0.6)], [np.cos(1.2), np.sin(1.2)])]
    rep = sandwich_check(states, 6)
    assert rep.ordered
    assert rep.lower <= rep.upper
    assert np.all(np.diff(rep.error_probs) < 0)


def _repeated_oracle(ens, povm, n):
    # oracle: every outcome sequence, no grouping by type
    P = outcome_distribution(ens, povm)
    q = ens.priors
    total = 0.0
    for seq in itertools.product(range(P.shape[1]), repeat=n):
        total += min(q[0] * np.prod(P[0, list(seq)]), q[1] * np.prod(P[1, list(seq)]))
    return total


def test_repeated_measurement_vs_enumeration(rng):
    ens = Ensemble([0.4, 0.6], [random_density(2, rng), random_density(2, rng)])
    povm = Povm([np.diag([0.7, 0.1]), np.diag([0.2, 0.3]), np.diag([0.1, 0.6])])
    for n in (1, 3, 5):
        assert abs(repeated_measurement_sim(ens, povm, n) - _repeated_oracle(ens, povm, n)) <= 1e-12


def test_repeated_no_better_than_collective():
    a, b = projector(KET0), projector(KETP)
    ens = Ensemble([0.5, 0.5], [a, b])
    povm = helstrom_two_state(ens).povm
    collective = finite_n_error(a, b, n_max=6).error_probs
    for n in range(1, 7):
        assert repeated_measurement_sim(ens, povm, n) >= collective[n - 1] - 1e-12


def test_repeated_uninformative():
    ens = Ensemble([0.5, 0.5], [projector(KET0), projector(KETP)])
    assert np.isclose(repeated_measurement_sim(ens, Povm([np.eye(2) / 2, np.eye(2) / 2]), 4), 0.5)
