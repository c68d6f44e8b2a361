"""Quantities built on the discrimination solvers.

Dimension witnesses, min-entropy, steering and the no-signaling bound, state
exclusion with product ensembles, discrimination of two unitaries, and mutual
information against the Holevo quantity.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np
from scipy.optimize import minimize, nnls

from .errors import MissingPairs, NotFound, NotUnitary, OutOfRange, WrongCount
from .barrier import min_trace_dominating
from .minerror import TAU_CERT
from .operators import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    Ensemble,
    Povm,
    Tolerances,
    hermitize,
    outcome_distribution,
    partial_trace,
    shannon_entropy,
    tensor,
    validate_density,
    von_neumann_entropy,
)
from .solve import solve_min_error

log = logging.getLogger(__name__)


# dimension witness

@dataclass(frozen=True)
class WitnessReport:
    value: float
    n: int
    bounds: dict
    certified_min_dimension: int


def witness_bound(n: int, d: int) -> float:
    """Q_d = (N^2 / 2)(1 - 1/min(d, N))."""
    if n < 2 or d < 1:
        raise OutOfRange("need N >= 2 and d >= 1")
    return n * n / 2 * (1 - 1 / min(d, n))


def witness_value(table: dict) -> float:
    """Sum over pairs x > x' of (p(1 | x, {x,x'}) - p(1 | x', {x,x'}))^2.

    ``table`` maps the ordered key (x, x') to p(k=1 | preparation x, setting {x, x'});
    both orders of every pair must be present.
    """
    labels = sorted({x for key in table for x in key})
    missing = []
    total = 0.0
    for i, a in enumerate(labels):
        for b in labels[:i]:
            if (a, b) not in table or (b, a) not in table:
                missing.append((a, b))
                continue
            pa, pb = float(table[(a, b)]), float(table[(b, a)])
            if not (0 <= pa <= 1 and 0 <= pb <= 1):
                raise OutOfRange(f"probabilities for pair {(a, b)} outside [0, 1]")
            total += (pa - pb) ** 2
    if missing or len(labels) < 2:
        raise MissingPairs(f"missing entries for pairs {missing}" if missing else "need at least two preparations")
    return total


def witness_report(table: dict, tol: float = TAU_CERT) -> WitnessReport:
    n = len({x for key in table for x in key})
    w = witness_value(table)
    bounds = {d: witness_bound(n, d) for d in range(1, n + 1)}
    dmin = next(d for d in range(1, n + 1) if w <= bounds[d] + tol)
    return WitnessReport(w, n, bounds, dmin)


def read_witness_csv(path) -> dict:
    """Long-format table with header x,x',p."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {(int(r["x"]), int(r["x'"])): float(r["p"]) for r in rows}


def write_witness_csv(table: dict, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "x'", "p"])
        for (a, b) in sorted(table):
            w.writerow([a, b, repr(float(table[(a, b)]))])


def simulate_witness_table(states, measurements=None) -> dict:
    """p(1 | x, {x,x'}) from states and one two-outcome POVM {M, I - M} per pair.

    By default each pair is measured with its Helstrom projector (equal priors).
    """
    n = len(states)
    table = {}
    for a in range(n):
        for b in range(a):
            if measurements is not None:
                m = np.asarray(measurements[(a + 1, b + 1)])
            else:
                w, v = np.linalg.eigh(hermitize(states[a] - states[b]))
                pos = v[:, w > 0]
                m = pos @ pos.conj().T
            table[(a + 1, b + 1)] = float(np.clip(np.trace(m @ states[a]).real, 0, 1))
            table[(b + 1, a + 1)] = float(np.clip(np.trace(m @ states[b]).real, 0, 1))
    return table


# min-entropy and no-signaling

def min_entropy(ensemble: Ensemble) -> float:
    """H_min = -log2 p_guess in bits."""
    return float(-np.log2(solve_min_error(ensemble).p_guess))


@dataclass(frozen=True)
class SteeringScenario:
    shared_state: np.ndarray
    measurements: tuple
    pairs: tuple  # (p_i, rho_i, sigma_i)
    bob_marginal: np.ndarray
    consistency_error: float


def steering_build(shared_state, alice_measurements, dims: tuple[int, int]) -> SteeringScenario:
    """Bob's conditional states for each two-outcome measurement {M_i, I - M_i} of Alice.

    ``shared_state`` is a bipartite vector or density matrix on dA x dB.
    """
    s = np.asarray(shared_state, dtype=complex)
    rho = np.outer(s.ravel(), s.ravel().conj()) if s.ndim == 1 or 1 in s.shape else s
    rho = validate_density(rho)
    dA, dB = dims
    bob = partial_trace(rho, dims, keep="B")
    pairs, meas, worst = [], [], 0.0
    for m in alice_measurements:
        povm = m if isinstance(m, Povm) else Povm([m, np.eye(dA) - np.asarray(m)])
        if len(povm) != 2:
            raise WrongCount("steering measurements have two outcomes")
        meas.append(povm)
        parts = []
        for el in povm.elements:
            x = partial_trace(tensor(el, np.eye(dB)) @ rho, dims, keep="B")
            parts.append(hermitize(x))
        p = float(np.trace(parts[0]).real)
        r = parts[0] / p if p > 1e-15 else bob
        sg = parts[1] / (1 - p) if p < 1 - 1e-15 else bob
        worst = max(worst, float(np.max(np.abs(p * r + (1 - p) * sg - bob))))
        pairs.append((p, r, sg))
    return SteeringScenario(rho, tuple(meas), tuple(pairs), bob, worst)


@dataclass(frozen=True)
class NoSignalingReport:
    p_guess: float
    p: np.ndarray
    product: float
    decomposition_error: float
    certified: bool


def nosignaling_saturation(ensemble: Ensemble, tol_cert: float = TAU_CERT) -> NoSignalingReport:
    """Check that the optimum saturates p_guess * sum_i p_i = 1 with p_i = q_i / tr K.

    Each K / tr K is split as p_i rho_i + (1 - p_i) sigma_i; the reported error
    covers both the reconstruction and any negativity of the sigma_i.
    """
    res = solve_min_error(ensemble, tol_cert)
    K = res.K
    trK = float(np.trace(K).real)
    p = ensemble.priors / trK
    err = 0.0
    for i, (pi, rho) in enumerate(zip(p, ensemble.states)):
        sigma = res.complementary_states[i]
        if sigma is None:
            continue
        recon = pi * rho + (1 - pi) * sigma
        err = max(err, float(np.max(np.abs(recon - K / trK))))
        err = max(err, float(-min(0.0, np.linalg.eigvalsh(sigma)[0] * res.residuals[i])))
    return NoSignalingReport(trK, p, trK * float(p.sum()), err, res.passed)


# state exclusion

@dataclass(frozen=True)
class ExclusionResult:
    value: float
    povm: Povm
    dual_K: np.ndarray
    gap: float
    certified: bool

    @property
    def perfect(self) -> bool:
        return self.value <= 1e-6


BARRIER_MAX_DIM = 16


def _exclusion_mapped(ensemble: Ensemble, max_iter: int, tol_cert: float):
    """Map exclusion onto a minimum-error problem and solve that.

    With c = max_i lambda_max(q_i rho_i) the operators B_i = c I - q_i rho_i are
    positive, and sum_i tr[M_i B_i] = c d - objective, a minimum-error problem for
    q'_i = tr B_i / T, rho'_i = B_i / tr B_i, T = N c d - 1. Its dual optimum K'
    gives the candidate c I - T K' <= q_i rho_i.
    """
    d = ensemble.dim
    R = ensemble.weighted
    c = max(float(np.linalg.eigvalsh(r)[-1]) for r in R)
    B = [hermitize(c * np.eye(d) - r) for r in R]
    traces = np.array([np.trace(b).real for b in B])
    T = float(traces.sum())
    states = [b / t if t > 1e-15 else np.eye(d) / d for b, t in zip(B, traces)]
    # the objective error is the inner error magnified by T (and d for the dual shift)
    inner = tol_cert / max(1.0, T * d)
    res = solve_min_error(Ensemble(traces / T, states), tol_cert=inner, max_iter=max_iter)
    return res.povm, c * np.eye(d) - T * res.K


def exclusion_solve(ensemble: Ensemble, max_iter: int = 10_000, tol_cert: float = TAU_CERT) -> ExclusionResult:
    """Minimise sum_i q_i tr[M_i rho_i] over POVMs, with a rigorous duality gap.

    Qubits go through the exact minimum-error solvers after an affine map; up to
    dimension ``BARRIER_MAX_DIM`` the dual max tr K s.t. K <= q_i rho_i is solved
    by a log-barrier method whose central path also yields the POVM; larger
    problems use the mapped fixed point. The dual candidate is shifted down by
    any residual infeasibility, and K = 0 (always feasible) is used when better.
    """
    n, d = len(ensemble), ensemble.dim
    R = ensemble.weighted
    if n == 1:
        K = R[0].copy()
        return ExclusionResult(1.0, Povm([np.eye(d)]), K, 0.0, True)
    if 2 < d <= BARRIER_MAX_DIM:
        Kneg, M = min_trace_dominating(-R)
        povm, K = Povm(M), -Kneg
    else:
        povm, K = _exclusion_mapped(ensemble, max_iter, tol_cert)
    value = float(np.einsum("iab,iba->", R, povm.stack).real)
    # always answering "not k" costs q_k
    k = int(np.argmin(ensemble.priors))
    if ensemble.priors[k] < value:
        value = float(ensemble.priors[k])
        povm = Povm([np.eye(d) if i == k else np.zeros((d, d)) for i in range(n)])
    shift = max(float(np.linalg.eigvalsh(hermitize(K - r))[-1]) for r in R)
    K = K - max(shift, 0.0) * np.eye(d)
    if np.trace(K).real < 0:
        K = np.zeros((d, d), dtype=complex)
    gap = value - float(np.trace(K).real)
    return ExclusionResult(max(value, 0.0), povm, K, gap, bool(gap <= tol_cert))


def pbr_ensemble(theta: float, n: int, cap: int = DEFAULT_CAP) -> Ensemble:
    """Equiprobable products |psi_x1> ... |psi_xn> with |psi_k> = cos(t/2)|0> + (-1)^k sin(t/2)|1>."""
    if not 0 < theta <= np.pi / 2:
        raise OutOfRange("theta must lie in (0, pi/2]")
    if 2**n > cap:
        from .errors import DimensionCapExceeded

        raise DimensionCapExceeded(f"2^{n} exceeds the cap {cap}")
    base = [np.array([np.cos(theta / 2), (-1) ** k * np.sin(theta / 2)]) for k in (0, 1)]
    vecs = []
    for bits in product((0, 1), repeat=n):
        v = np.ones(1)
        for b in bits:
            v = np.kron(v, base[b])
        vecs.append(v)
    return Ensemble.from_pure(np.full(2**n, 2.0**-n), vecs)


# unitary discrimination

@dataclass(frozen=True)
class UnitaryReport:
    u: float
    p_guess: float
    perfect: bool
    optimal_input: np.ndarray
    certified: bool
    hull_distance: float
    label: str


def _check_unitary(u, tol: Tolerances) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) > tol.herm:
        raise NotUnitary("matrix is not unitary")
    return u


def _max_gap(phases: np.ndarray) -> float:
    a = np.sort(np.mod(phases, 2 * np.pi))
    gaps = np.diff(np.concatenate([a, [a[0] + 2 * np.pi]]))
    return float(gaps.max())


def _hull_distance(phases: np.ndarray) -> float:
    """Distance from 0 to the convex hull of exp(i phases)."""
    g = _max_gap(phases)
    return 0.0 if g <= np.pi + 1e-12 else float(-np.cos(g / 2))


def _trace_distance_pure(a: np.ndarray, b: np.ndarray) -> float:
    return float(2 * np.sqrt(max(0.0, 1 - abs(np.vdot(a, b)) ** 2)))


def unitary_distinguishability(U1, U2, use_ancilla: bool = True, starts: int = 64, tol: Tolerances = DEFAULT_TOL) -> UnitaryReport:
    """Largest ||U1 rho U1^+ - U2 rho U2^+||_1 over inputs.

    With W = U1^+ U2, <psi|W|psi> ranges over the convex hull of W's eigenvalues
    (W is normal), so u = 2 sqrt(1 - delta^2) with delta the distance from 0 to that
    hull. An explicit input with barycentric amplitudes attains it; the ancilla
    version uses the same weights on a maximally correlated input. If the explicit
    input falls short, a multi-start local search supplies a lower bound.
    """
    U1, U2 = _check_unitary(U1, tol), _check_unitary(U2, tol)
    d = len(U1)
    W = U1.conj().T @ U2
    lam, vec = np.linalg.eig(W)
    lam = lam / np.abs(lam)
    delta = _hull_distance(np.angle(lam))
    bound = 2 * np.sqrt(max(0.0, 1 - delta**2))
    A = np.vstack([lam.real, lam.imag, 1e3 * np.ones(d)])
    w, _ = nnls(A, np.array([0.0, 0.0, 1e3]))
    w = w / w.sum()
    # orthonormalise eigenvectors of the normal matrix W
    vec, _ = np.linalg.qr(vec)
    if use_ancilla:
        psi = sum(np.sqrt(w[k]) * np.kron(vec[:, k], np.eye(d)[k]) for k in range(d))
        a, b = np.kron(U1, np.eye(d)) @ psi, np.kron(U2, np.eye(d)) @ psi
    else:
        psi = vec @ np.sqrt(w)
        a, b = U1 @ psi, U2 @ psi
    u = _trace_distance_pure(a, b)
    certified = abs(u - bound) <= 1e-9
    label = "exact"
    if not certified:
        u_search, psi_s = _search_input(U1, U2, starts)
        if u_search > u:
            u, psi = u_search, psi_s
        certified = abs(u - bound) <= 1e-9
        label = "exact" if certified else "lower bound"
    u = min(u, 2.0)
    return UnitaryReport(u, (1 + u / 2) / 2, bool(delta <= 1e-12), psi, certified, delta, label)


def _search_input(U1, U2, starts: int):
    d = len(U1)
    rng = np.random.default_rng(0)

    def neg(x):
        z = x[:d] + 1j * x[d:]
        nz = np.linalg.norm(z)
        if nz < 1e-12:
            return 0.0
        z = z / nz
        return -_trace_distance_pure(U1 @ z, U2 @ z)

    best, arg = -1.0, None
    for _ in range(starts):
        x0 = rng.normal(size=2 * d)
        r = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
        if -r.fun > best:
            z = r.x[:d] + 1j * r.x[d:]
            best, arg = -r.fun, z / np.linalg.norm(z)
    return best, arg


def unitary_repetition_n(U1, U2, n_cap: int = 1000, tol: Tolerances = DEFAULT_TOL) -> int:
    """Smallest n with 0 in the eigenvalue hull of (U1^+ U2)^n."""
    U1, U2 = _check_unitary(U1, tol), _check_unitary(U2, tol)
    lam = np.linalg.eigvals(U1.conj().T @ U2)
    ph = np.angle(lam)
    spread = np.max(np.abs(np.angle(lam / lam[0])))
    if spread < 1e-9:
        raise NotFound(f"unitaries coincide up to phase; no n <= {n_cap}")
    for n in range(1, n_cap + 1):
        if _max_gap(n * ph) <= np.pi + 1e-9:
            return n
    raise NotFound(f"no perfect repetition up to n = {n_cap}")


# information quantities

def mutual_information(ensemble: Ensemble, povm: Povm) -> float:
    """I(A:B) in bits between the preparation label and the outcome."""
    p_k_i = outcome_distribution(ensemble, povm)
    joint = ensemble.priors[:, None] * p_k_i
    return float(max(0.0, shannon_entropy(joint.sum(axis=1)) + shannon_entropy(joint.sum(axis=0)) - shannon_entropy(joint.ravel())))


def holevo_chi(ensemble: Ensemble) -> float:
    """S(rho) - sum_i q_i S(rho_i) in bits."""
    mixed = von_neumann_entropy(hermitize(ensemble.average))
    return float(max(0.0, mixed - sum(q * von_neumann_entropy(s) for q, s in zip(ensemble.priors, ensemble.states))))
