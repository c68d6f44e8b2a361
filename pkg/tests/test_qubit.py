import numpy as np
import pytest

from qsdkit.ensembles import equatorial, isosceles, isosceles_guess, trine, trine_measurement_vectors
from qsdkit.errors import ReconstructionFailed, WrongDimension
from qsdkit.minerror import helstrom_two_state, solve_fixed_point
from qsdkit.operators import Ensemble, density_from_bloch, projector
from qsdkit.qubit import WeightedBlochBall, dual_reduction, min_enclosing_ball_of_balls, reconstruct_povm, solve_qubit
from qsdkit.random import random_ensemble


def _rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


def test_single_ball():
    ball = min_enclosing_ball_of_balls([WeightedBlochBall(np.array([0.1, 0.2, 0.3]), 0.4)])
    assert np.allclose(ball.center, [0.1, 0.2, 0.3])
    assert np.isclose(ball.radius, 0.4)


def test_two_balls_closed_form(rng):
    for _ in range(50):
        c1, c2 = rng.normal(size=3) * 0.3, rng.normal(size=3) * 0.3
        q1, q2 = rng.random(), rng.random()
        d = np.linalg.norm(c1 - c2)
        ball = min_enclosing_ball_of_balls([WeightedBlochBall(c1, q1), WeightedBlochBall(c2, q2)])
        if d > abs(q1 - q2):
            assert abs(ball.radius - (q1 + q2 + d) / 2) <= 1e-10
        else:
            # one ball contains the other
            assert abs(ball.radius - max(q1, q2)) <= 1e-10


def test_nested_ball_wins():
    big = WeightedBlochBall(np.zeros(3), 0.9)
    small = WeightedBlochBall(np.array([0.1, 0, 0]), 0.1)
    ball = min_enclosing_ball_of_balls([big, small])
    assert np.isclose(ball.radius, 0.9)
    assert np.allclose(ball.center, 0)


def test_ball_minimality_against_sampling(rng):
    for _ in range(10):
        ens = random_ensemble(4, 2, rng)
        balls = dual_reduction(ens)
        ball = min_enclosing_ball_of_balls(balls)
        cs = np.array([b.center for b in balls])
        qs = np.array([b.weight for b in balls])
        # feasibility
        assert np.all(np.linalg.norm(ball.center - cs, axis=1) + qs <= ball.radius + 1e-10)
        # random centres never need a smaller radius
        trial = ball.center + rng.normal(size=(2000, 3)) * 0.05
        need = np.max(np.linalg.norm(trial[:, None] - cs[None], axis=2) + qs[None], axis=1)
        assert need.min() >= ball.radius - 1e-12


def test_rotation_covariance(rng):
    for _ in range(10):
        ens = random_ensemble(3, 2, rng)
        balls = dual_reduction(ens)
        r = _rotation(rng)
        rot = [WeightedBlochBall(r @ b.center, b.weight) for b in balls]
        b0, b1 = min_enclosing_ball_of_balls(balls), min_enclosing_ball_of_balls(rot)
        assert abs(b0.radius - b1.radius) <= 1e-10
        assert np.allclose(r @ b0.center, b1.center, atol=1e-8)


def test_trine_geometry():
    sol = solve_qubit(trine())
    assert abs(sol.p_guess - 2 / 3) <= 1e-12
    assert sol.active_set == (0, 1, 2)
    assert np.allclose(sol.ball.center, 0, atol=1e-12)
    assert sol.passed and sol.method == "enclosing-ball"
    phi = trine_measurement_vectors()
    # element for state k is (2/3)|phi_j><phi_j| with the pairing 1<->2, 2<->1, 3<->3
    for k, j in ((0, 1), (1, 0), (2, 2)):
        assert np.allclose(sol.povm.elements[k], 2 / 3 * projector(phi[j]), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
def test_equatorial(n):
    sol = solve_qubit(equatorial(n))
    assert abs(sol.p_guess - 2 / n) <= 1e-10
    assert sol.passed


@pytest.mark.parametrize("theta", [0.2, 0.8, 1.3, 1.7, 2.5])
def test_isosceles(theta):
    sol = solve_qubit(isosceles(0.3, theta))
    assert abs(sol.p_guess - isosceles_guess(theta)) <= 1e-10
    assert sol.passed
    if theta < np.pi / 2:
        assert sol.active_set == (0, 2)
        assert np.allclose(sol.povm.elements[1], 0, atol=1e-10)


def test_qubit_agrees_with_helstrom(rng):
    for _ in range(20):
        ens = random_ensemble(2, 2, rng)
        assert abs(solve_qubit(ens).p_guess - helstrom_two_state(ens).p_guess) <= 1e-9


def test_qubit_agrees_with_fixed_point(rng):
    for _ in range(30):
        ens = random_ensemble(int(rng.integers(2, 6)), 2, rng, pure_fraction=0.5)
        sol = solve_qubit(ens)
        assert sol.passed
        assert abs(sol.p_guess - solve_fixed_point(ens).p_guess) <= 1e-7
        assert abs(sol.p_guess - sol.result.p_guess) <= 1e-7


def test_equal_prior_residuals_equal(rng):
    ens = random_ensemble(4, 2, rng, equal_priors=True)
    sol = solve_qubit(ens)
    active = list(sol.active_set)
    r = sol.result.residuals[active]
    assert np.allclose(r, r[0], atol=1e-7)


def test_dominant_prior_is_trivial():
    ens = Ensemble([0.9, 0.1], [density_from_bloch([0, 0, 0.2]), density_from_bloch([0, 0, -0.2])])
    sol = solve_qubit(ens)
    assert np.isclose(sol.p_guess, 0.9)
    assert np.allclose(sol.povm.elements[0], np.eye(2))
    assert sol.passed


def test_reconstruct_failure():
    w = [np.array([0, 0, 1.0]), np.array([0, 1.0, 0])]
    with pytest.raises(ReconstructionFailed):
        reconstruct_povm(w, [0, 1], 2)


def test_wrong_dimension():
    with pytest.raises(WrongDimension):
        solve_qubit(Ensemble([1.0], [np.eye(3) / 3]))
