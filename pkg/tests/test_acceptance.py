"""Acceptance criteria 1-14, one test each, at their stated tolerances.

Each test prints a single PASS/FAIL line; the lines are also collected into the
pytest terminal summary. Run standalone with ``python3 -m tests.test_acceptance``.
"""

import subprocess
import sys

import numpy as np
import pytest

from qsdkit.applications import (
    exclusion_solve,
    min_entropy,
    nosignaling_saturation,
    pbr_ensemble,
    simulate_witness_table,
    unitary_distinguishability,
    unitary_repetition_n,
    witness_bound,
    witness_value,
)
from qsdkit.asymptotics import chernoff_classical, chernoff_two, finite_n_error
from qsdkit.cli import bundled_scenarios, main, run_suite
from qsdkit.ensembles import isosceles, isosceles_guess, mirror_ensemble, pure_pair, trine, trine_measurement_vectors, trine_vectors
from qsdkit.errors import ZeroClickProbability
from qsdkit.minerror import (
    gu_ensemble,
    gu_guessing_probability,
    helstrom_two_state,
    mirror_symmetric_guess,
    mirror_threshold,
    solve_fixed_point,
)
from qsdkit.operators import Ensemble, Povm, outcome_distribution, projector
from qsdkit.qubit import solve_qubit
from qsdkit.random import random_density, random_ensemble, random_unitary
from qsdkit.solve import solve_min_error
from qsdkit.strategies import confidence_of, max_confidence, usd_reciprocal, usd_two_pure

from .conftest import ACCEPTANCE_LINES


def verdict(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _random_kets(d, k, rng):
    v = rng.normal(size=(k, d)) + 1j * rng.normal(size=(k, d))
    return list(v / np.linalg.norm(v, axis=1, keepdims=True))


def test_criterion_01_helstrom_cross_solver():
    rng = np.random.default_rng(101)
    worst, certified = 0.0, True
    for _ in range(500):
        q = rng.uniform(0.05, 0.95)
        ens = Ensemble([q, 1 - q], [random_density(2, rng), random_density(2, rng)])
        h, g, f = helstrom_two_state(ens), solve_qubit(ens), solve_fixed_point(ens)
        ps = [h.p_guess, g.p_guess, f.p_guess]
        worst = max(worst, max(ps) - min(ps))
        certified &= h.passed and g.passed and f.passed
    verdict(1, worst <= 1e-6 and certified, f"max pairwise gap {worst:.2e}, certificates {'pass' if certified else 'FAIL'}")


def test_criterion_02_trine():
    ens = trine()
    g, f = solve_qubit(ens), solve_fixed_point(ens)
    err_p = max(abs(g.p_guess - 2 / 3), abs(f.p_guess - 2 / 3))
    phi = trine_measurement_vectors()
    target = [2 / 3 * projector(phi[j]) for j in (1, 0, 2)]
    err_m = max(np.max(np.abs(m - t)) for m, t in zip(g.povm.elements, target))
    ok = err_p <= 1e-9 and err_m <= 1e-7 and g.passed and f.passed
    verdict(2, ok, f"|p - 2/3| {err_p:.1e}, POVM deviation {err_m:.1e}")


def test_criterion_03_isosceles():
    worst, null_ok, sat_ok = 0.0, True, True
    for theta0 in (0.0, 0.4):
        for theta in np.linspace(0.05, np.pi - 0.05, 40):
            sol = solve_qubit(isosceles(theta0, theta))
            worst = max(worst, abs(sol.p_guess - isosceles_guess(theta)))
            if theta < np.pi / 2 - 1e-6:
                null_ok &= bool(np.max(np.abs(sol.povm.elements[1])) <= 1e-8)
            else:
                sat_ok &= abs(sol.p_guess - 2 / 3) <= 1e-8
    verdict(3, worst <= 1e-8 and null_ok and sat_ok, f"max deviation {worst:.1e}, middle element null {null_ok}, saturation {sat_ok}")


def test_criterion_04_mirror():
    worst = 0.0
    for p in np.round(np.arange(0.05, 0.5001, 0.05), 10):
        for theta in np.round(np.arange(0.1, 1.5001, 0.1), 10):
            res = solve_fixed_point(mirror_ensemble(p, theta))
            worst = max(worst, abs(mirror_symmetric_guess(p, theta) - res.p_guess))
    jump = 0.0
    for theta in np.round(np.arange(0.1, 1.5001, 0.1), 10):
        ps = mirror_threshold(theta)
        jump = max(jump, abs(mirror_symmetric_guess(ps, theta) - mirror_symmetric_guess(ps * (1 - 1e-12), theta)))
    verdict(4, worst <= 1e-6 and jump <= 1e-6, f"max deviation {worst:.1e}, branch jump at p_* {jump:.1e}")


def test_criterion_05_gu():
    rng = np.random.default_rng(105)
    worst, helst = 0.0, 0.0
    for d in (2, 3, 4):
        for copies in (1, 2):
            for _ in range(5):
                c = np.abs(rng.normal(size=d))
                c /= np.linalg.norm(c)
                ens = gu_ensemble(c, d, copies)
                closed = gu_guessing_probability(c, d, copies)
                worst = max(worst, abs(closed - solve_fixed_point(ens).p_guess))
                if d == 2:
                    helst = max(helst, abs(closed - helstrom_two_state(ens).p_guess))
    verdict(5, worst <= 1e-6 and helst <= 1e-12, f"max deviation {worst:.1e}, d=2 vs Helstrom {helst:.1e}")


def test_criterion_06_usd():
    worst_q, worst_x = 0.0, 0.0
    for c in np.round(np.arange(0.1, 0.9001, 0.1), 10):
        ens = pure_pair(c)
        psi = [np.linalg.eigh(s)[1][:, -1] for s in ens.states]
        for res in (usd_two_pure(*psi), usd_reciprocal(ens)):
            worst_q = max(worst_q, abs(res.inconclusive_rate - c))
            p = outcome_distribution(ens, res.povm)
            worst_x = max(worst_x, p[0, 1], p[1, 0])
    verdict(6, worst_q <= 1e-8 and worst_x <= 1e-10, f"|Q - c| {worst_q:.1e}, cross-click {worst_x:.1e}")


def test_criterion_07_max_confidence():
    worst = 0.0
    for theta in np.linspace(0.02, np.pi / 4 - 0.02, 25):
        ens = Ensemble.from_pure(np.full(3, 1 / 3), trine_vectors(theta))
        res = max_confidence(ens)
        worst = max(worst, np.max(np.abs(res.confidences - 2 / 3)))
        worst = max(worst, np.max(np.abs(res.povm.elements[-1] - np.diag([1 - np.tan(theta) ** 2, 0]))))
    rng = np.random.default_rng(107)
    violations = 0
    for _ in range(200):
        ens = random_ensemble(int(rng.integers(2, 5)), int(rng.integers(2, 4)), rng)
        mc, me = max_confidence(ens), solve_min_error(ens)
        for k in range(len(ens)):
            try:
                c_me = confidence_of(ens, me.povm, k)
            except ZeroClickProbability:
                continue
            violations += mc.confidences[k] < c_me - 1e-7
    verdict(7, worst <= 1e-7 and violations == 0, f"trine deviation {worst:.1e}, dominance violations {violations}/200 ensembles")


def test_criterion_08_chernoff():
    rng = np.random.default_rng(108)
    xi = chernoff_two(projector([1, 0]), projector([1, 1])).xi
    pure_err = abs(xi - np.log(2))
    comm = 0.0
    for _ in range(50):
        p, q = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(3))
        comm = max(comm, abs(chernoff_two(np.diag(p), np.diag(q)).xi - chernoff_classical(p, q).xi))
    est = finite_n_error(projector([1, 0]), projector([1, 1]), n_max=10)
    rel = abs(est.fitted_exponent - np.log(2)) / np.log(2)
    ok = pure_err <= 4 * np.finfo(float).eps and comm <= 1e-10 and rel <= 0.15
    verdict(8, ok, f"|xi - log 2| {pure_err:.1e}, commuting {comm:.1e}, finite-n relative {rel:.3f}")


def test_criterion_09_witness():
    row = [witness_bound(7, d) for d in range(2, 8)]
    printed_row = [12.25, 16.33, 18.38, 19.60, 20.42, 21.0]
    row_err = max(abs(a - b) for a, b in zip(row, printed_row))
    rng = np.random.default_rng(109)
    worst, preps = -np.inf, 0
    while preps < 1000:
        n = int(rng.integers(3, 8))
        if preps % 2:
            states = [random_density(2, rng, rank=int(rng.integers(1, 3))) for _ in range(n)]
        else:
            # rotated, slightly perturbed great-circle states sit on the bound
            u = random_unitary(2, rng)
            phis = 2 * np.pi * np.arange(n) / n + rng.normal(scale=0.05, size=n)
            states = [u @ projector([1, np.exp(1j * f)]) @ u.conj().T for f in phis]
        meas = None
        if rng.random() < 0.5:
            meas = {}
            for a in range(n):
                for b in range(a):
                    u = random_unitary(2, rng)
                    meas[(a + 1, b + 1)] = u @ np.diag([1.0, rng.random()]) @ u.conj().T
        worst = max(worst, witness_value(simulate_witness_table(states, meas)) - witness_bound(n, 2))
        preps += n
    verdict(9, row_err <= 0.005 and worst <= 1e-6, f"row deviation {row_err:.4f}, max W - Q_2 {worst:.2e} over {preps} preparations")


def test_criterion_10_nosignaling():
    rng = np.random.default_rng(110)
    worst, certified = 0.0, True
    for d, count in ((2, 500), (3, 100)):
        for _ in range(count):
            rep = nosignaling_saturation(random_ensemble(int(rng.integers(2, 6)), d, rng))
            worst = max(worst, abs(rep.product - 1))
            certified &= rep.certified
    verdict(10, worst <= 1e-6 and certified, f"max |p_guess sum p_i - 1| {worst:.1e}, certificates {'pass' if certified else 'FAIL'}")


def test_criterion_11_exclusion():
    res = exclusion_solve(pbr_ensemble(np.arccos(1 / np.sqrt(2)), 2))
    single = exclusion_solve(Ensemble([1.0], [random_density(3, np.random.default_rng(111))]))
    ok = res.value <= 1e-6 and res.gap <= 1e-6 and single.value == 1.0
    verdict(11, ok, f"PBR value {res.value:.1e}, gap {res.gap:.1e}, single-state value {single.value}")


def test_criterion_12_unitaries():
    X, Z = np.array([[0, 1], [1, 0]]), np.diag([1, -1])
    xz = unitary_distinguishability(X, Z, use_ancilla=True)
    rng = np.random.default_rng(112)
    shortfall = 0.0
    for k in range(200):
        d = 2 if k % 2 == 0 else 3
        U1, U2 = random_unitary(d, rng), random_unitary(d, rng)
        a = unitary_distinguishability(U1, U2, use_ancilla=True).u
        b = unitary_distinguishability(U1, U2, use_ancilla=False).u
        shortfall = max(shortfall, b - a)
    n = unitary_repetition_n(np.eye(2), np.diag([1, np.exp(1j * np.pi / 3)]))
    ok = abs(xz.u - 2) <= 1e-12 and abs(xz.p_guess - 1) <= 1e-12 and shortfall <= 1e-12 and n == 3
    verdict(12, ok, f"X/Z u {xz.u:.12f}, p_guess {xz.p_guess:.12f}, max u(plain) - u(ancilla) {shortfall:.1e}, repetition n {n}")


def test_criterion_13_min_entropy():
    rng = np.random.default_rng(113)
    worst = 0.0
    for _ in range(100):
        ens = random_ensemble(int(rng.integers(2, 5)), int(rng.integers(2, 4)), rng)
        worst = max(worst, abs(min_entropy(ens) + np.log2(solve_min_error(ens).p_guess)))
    ens = Ensemble.from_pure([0.5, 0.5], [[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]])
    h = min_entropy(ens)
    from_helstrom = -np.log2(helstrom_two_state(ens).p_guess)
    ok = worst <= 1e-9 and abs(h - 0.22853) <= 1e-4 and abs(h - from_helstrom) <= 1e-9
    verdict(13, ok, f"identity deviation {worst:.1e}, H_min {h:.6f} bits")


def test_criterion_14_cli_determinism(tmp_path):
    outputs = []
    for run in range(2):
        proc = subprocess.run([sys.executable, "-m", "qsdkit.cli", "suite", "--seed", "0"], capture_output=True)
        reports = []
        for path in sorted(p for p in bundled_scenarios().glob("*.json") if p.name != "manifest.json"):
            out = tmp_path / f"{run}-{path.stem}.json"
            code = main(["run", str(path), "--format", "json", "--no-timing", "--seed", "0", "--out", str(out)])
            reports.append((code, out.read_bytes()))
        outputs.append((proc.returncode, proc.stdout, reports))
    (c0, csv0, r0), (c1, csv1, r1) = outputs
    rows = csv0.decode().splitlines()[1:]
    green = c0 == 0 and c1 == 0 and all(r.split(",")[2] == "pass" for r in rows) and all(c == 0 for c, _ in r0)
    identical = csv0 == csv1 and r0 == r1
    in_process = run_suite()[0].encode() == csv0
    verdict(14, green and identical and in_process, f"{len(rows)} scenarios green {green}, byte-identical {identical}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
