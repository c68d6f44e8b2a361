import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from qsdkit.applications import exclusion_solve, unitary_distinguishability
from qsdkit.asymptotics import chernoff_two
from qsdkit.io import decode_matrix, encode_matrix
from qsdkit.minerror import helstrom_two_state, solve_fixed_point, square_root_measurement
from qsdkit.operators import Ensemble, outcome_distribution
from qsdkit.qubit import solve_qubit
from qsdkit.random import random_density, random_ensemble, random_unitary

seeds = st.integers(0, 2**32 - 1)
FAST = settings(max_examples=40, deadline=None, derandomize=True)


@FAST
@given(seeds, st.integers(2, 5), st.integers(2, 3))
def test_guess_bounds_and_certificate(seed, n, d):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(n, d, rng)
    res = solve_fixed_point(ens)
    assert res.passed
    # guessing the likeliest state is feasible, so it cannot beat the certified optimum
    assert ens.priors.max() <= res.p_guess + res.certificate.suboptimality_bound + 1e-12
    assert res.p_guess <= 1 + 1e-9
    srm = outcome_distribution(ens, square_root_measurement(ens))
    assert res.p_guess >= float(np.sum(ens.priors * np.diag(srm))) - 1e-9
    # the dual bound tr K caps every measurement
    assert abs(np.trace(res.K).real - res.p_guess) <= 1e-7


@FAST
@given(seeds)
def test_helstrom_swap_symmetry(seed):
    rng = np.random.default_rng(seed)
    q = rng.random()
    a, b = random_density(2, rng), random_density(2, rng)
    p1 = helstrom_two_state(Ensemble([q, 1 - q], [a, b])).p_guess
    p2 = helstrom_two_state(Ensemble([1 - q, q], [b, a])).p_guess
    assert abs(p1 - p2) <= 1e-12


@FAST
@given(seeds, st.integers(2, 5))
def test_qubit_unitary_invariance(seed, n):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(n, 2, rng)
    u = random_unitary(2, rng)
    rot = Ensemble(ens.priors, [u @ s @ u.conj().T for s in ens.states])
    assert abs(solve_qubit(ens).p_guess - solve_qubit(rot).p_guess) <= 1e-9


@FAST
@given(seeds)
def test_chernoff_symmetric_nonnegative(seed):
    rng = np.random.default_rng(seed)
    a, b = random_density(2, rng), random_density(2, rng)
    x, y = chernoff_two(a, b).xi, chernoff_two(b, a).xi
    assert x >= 0 and abs(x - y) <= 1e-10


@FAST
@given(seeds, st.floats(-np.pi, np.pi))
def test_unitary_value_range_and_phase(seed, phase):
    rng = np.random.default_rng(seed)
    U1, U2 = random_unitary(2, rng), random_unitary(2, rng)
    u = unitary_distinguishability(U1, U2).u
    v = unitary_distinguishability(U1, np.exp(1j * phase) * U2).u
    assert 0 <= u <= 2 and abs(u - v) <= 1e-9


@settings(max_examples=20, deadline=None, derandomize=True)
@given(seeds, st.integers(2, 4), st.integers(2, 3))
def test_exclusion_range(seed, n, d):
    rng = np.random.default_rng(seed)
    ens = random_ensemble(n, d, rng)
    res = exclusion_solve(ens)
    assert -1e-12 <= res.value <= ens.priors.min() + 1e-12
    assert res.gap >= -1e-9 and res.certified
    # for two states the optimum is q_1 plus the negative part of q_2 rho_2 - q_1 rho_1
    if n == 2:
        w = np.linalg.eigvalsh(ens.weighted[1] - ens.weighted[0])
        assert -1e-12 <= res.value - (ens.priors[0] + w[w < 0].sum()) <= res.gap + 1e-12


@FAST
@given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), min_size=4, max_size=4))
def test_matrix_json_roundtrip(entries):
    a = np.array(entries).reshape(2, 2)
    assert np.array_equal(decode_matrix(encode_matrix(a)), a)
