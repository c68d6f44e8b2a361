"""Unambiguous, maximum-confidence and fixed-inconclusive-rate discrimination."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import Infeasible, InvalidOperator, NoConvergence, SingularEnsemble, ZeroClickProbability
from .minerror import TAU_CERT
from .operators import (
    DEFAULT_TOL,
    Ensemble,
    Povm,
    Tolerances,
    hermitian_eigensystem,
    hermitize,
    ket,
    matrix_power_psd,
    support_projector,
    trace_norm,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UsdResult:
    povm: Povm
    success_prob: float
    inconclusive_rate: float
    error_prob: float
    coefficients: np.ndarray
    strategy: str = "usd"


@dataclass(frozen=True)
class MaxConfResult:
    confidences: np.ndarray
    povm: Povm
    inconclusive_weight: float
    coefficients: np.ndarray
    degenerate: tuple
    strategy: str = "maxconf"


@dataclass(frozen=True)
class FixedRateProblem:
    omega: np.ndarray
    rate: float
    projected: Ensemble
    omega_sqrt: np.ndarray

    def lift(self, povm_tilde: Povm) -> Povm:
        """Map a POVM on the projected ensemble back, appending the inconclusive element."""
        s = self.omega_sqrt
        d = s.shape[0]
        elements = [s @ m @ s for m in povm_tilde.elements]
        elements.append(np.eye(d) - self.omega)
        return Povm(elements)


def _is_pure(rho: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(np.trace(rho @ rho).real - 1) < tol


def _pure_vector(rho: np.ndarray) -> np.ndarray:
    return hermitian_eigensystem(rho).vectors[:, 0]


def usd_feasible(ensemble: Ensemble, tol: Tolerances = DEFAULT_TOL) -> tuple[bool, str]:
    """Whether every state can be identified unambiguously with non-zero probability.

    Each state's support must not lie inside the span of the other supports; for
    pure states this is linear independence (full-rank Gram matrix).
    """
    n = len(ensemble)
    if all(_is_pure(s) for s in ensemble.states):
        psi = np.array([_pure_vector(s) for s in ensemble.states]).T
        sv = np.linalg.svd(psi, compute_uv=False)
        if n > ensemble.dim or sv[-1] < 1e-8:
            return False, "pure states are linearly dependent"
        return True, "pure states are linearly independent"
    blocked = []
    for i in range(n):
        others = [ensemble.states[j] for j in range(n) if j != i]
        if not others:
            continue
        P = support_projector(sum(others), tol)
        leak = np.linalg.norm((np.eye(ensemble.dim) - P) @ support_projector(ensemble.states[i], tol), 2)
        if leak < 1e-8:
            blocked.append(i)
    if blocked:
        return False, f"support of state(s) {blocked} lies in the span of the others"
    return True, "each support leaves the span of the others"


def _usd_result(ensemble: Ensemble, conclusive: list, coefficients) -> UsdResult:
    d = ensemble.dim
    inc = hermitize(np.eye(d) - sum(conclusive))
    povm = Povm(list(conclusive) + [inc])
    p = np.einsum("kab,iba->ik", povm.stack, np.array(ensemble.states)).real
    q = ensemble.priors
    n = len(ensemble)
    success = float(np.sum(q * np.diag(p[:, :n])))
    Q = float(np.sum(q * p[:, n]))
    error = float(np.sum(q[:, None] * p[:, :n]) - success)
    return UsdResult(povm, success, Q, error, np.asarray(coefficients, dtype=float))


def usd_two_pure(psi1, psi2, priors=(0.5, 0.5)) -> UsdResult:
    """Optimal unambiguous discrimination of two pure states.

    For q1 <= q2 the three-outcome measurement is optimal while s^2 <= q1/q2
    (s = |<psi1|psi2>|); beyond that the best strategy is projective and only the
    more likely state is ever identified.
    """
    a, b = ket(psi1), ket(psi2)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    q1, q2 = float(priors[0]), float(priors[1])
    ov = np.vdot(b, a)
    s = abs(ov)
    if s > 1 - 1e-12:
        raise Infeasible("identical states cannot be discriminated unambiguously")
    perp2 = a - ov * b  # in span, orthogonal to psi2
    perp2 /= np.linalg.norm(perp2)
    perp1 = b - np.conj(ov) * a
    perp1 /= np.linalg.norm(perp1)
    if q1 == 0 or q2 == 0:
        c1, c2 = (0.0, 1.0) if q1 == 0 else (1.0, 0.0)
    elif s**2 <= min(q1, q2) / max(q1, q2):
        c1 = (1 - s * np.sqrt(q2 / q1)) / (1 - s**2)
        c2 = (1 - s * np.sqrt(q1 / q2)) / (1 - s**2)
    else:
        c1, c2 = (1.0, 0.0) if q1 > q2 else (0.0, 1.0)
    m1 = c1 * np.outer(perp2, perp2.conj())
    m2 = c2 * np.outer(perp1, perp1.conj())
    ens = Ensemble.from_pure([q1, q2], [a, b])
    return _usd_result(ens, [m1, m2], [c1, c2])


def _reciprocal_coefficients(gram: np.ndarray, q: np.ndarray, mu_final: float = 1e-13, max_newton: int = 200):
    """Maximise q.eta subject to diag(eta) <= gram and eta >= 0 by a log-barrier method."""
    n = len(q)
    eta = np.full(n, 0.5 * np.linalg.eigvalsh(gram)[0])
    qs = q / max(q.max(), 1e-300)

    def phi(x, mu):
        S = gram - np.diag(x)
        w = np.linalg.eigvalsh(S)
        if np.any(x <= 0) or w[0] <= 0:
            return -np.inf
        return qs @ x + mu * (np.sum(np.log(w)) + np.sum(np.log(x)))

    mu = 1.0
    while True:
        for _ in range(max_newton):
            S = gram - np.diag(eta)
            Sinv = np.linalg.inv(S)
            g = qs - mu * np.diag(Sinv).real + mu / eta
            H = -mu * np.abs(Sinv) ** 2 - mu * np.diag(1 / eta**2)
            step = np.linalg.solve(H, -g)
            dec = g @ step
            t, f0 = 1.0, phi(eta, mu)
            # decrement below the round-off of phi itself: nothing left to gain
            if dec < 1e-14 * max(1.0, mu) or dec < 1e-13 * abs(f0):
                break
            while phi(eta + t * step, mu) < f0 + 0.25 * t * (g @ step) and t > 1e-12:
                t *= 0.5
            if t <= 1e-12:
                # no representable ascent left: the decrement is at round-off level
                break
            eta = eta + t * step
        else:
            raise NoConvergence("barrier Newton iterations exhausted")
        if mu <= mu_final:
            return eta
        mu = max(mu * 0.1, mu_final)


def usd_reciprocal(ensemble: Ensemble) -> UsdResult:
    """Optimal unambiguous discrimination of linearly independent pure states.

    Conclusive elements must be eta_i |f_i><f_i| with f_i the reciprocal basis
    (<f_i|psi_j> = delta_ij), so zero cross-clicks hold by construction. With Gram
    matrix G the constraint sum eta_i |f_i><f_i| <= I becomes diag(eta) <= G.
    """
    ok, why = usd_feasible(ensemble)
    if not ok or not all(_is_pure(s) for s in ensemble.states):
        raise Infeasible(why if not ok else "reciprocal construction needs pure states")
    psi = np.array([_pure_vector(s) for s in ensemble.states]).T
    gram = psi.conj().T @ psi
    recip = psi @ np.linalg.inv(gram)
    eta = _reciprocal_coefficients(gram, ensemble.priors)
    eta = np.clip(eta, 0, None)
    conclusive = [e * np.outer(recip[:, i], recip[:, i].conj()) for i, e in enumerate(eta)]
    return _usd_result(ensemble, conclusive, eta)


def max_confidence(ensemble: Ensemble, tol: Tolerances = DEFAULT_TOL) -> MaxConfResult:
    """Maximum-confidence measurement M_k = c_k rho^-1/2 Q_k rho^-1/2.

    Q_k projects onto the top eigenvector of rho^-1/2 q_k rho_k rho^-1/2. Weights
    are first scaled by a common factor keeping the remainder positive, then raised
    one at a time in index order as far as positivity allows.
    """
    rho = ensemble.average
    if np.trace(rho).real <= 0:
        raise SingularEnsemble("average state has empty support")
    S = matrix_power_psd(rho, -0.5, tol)
    d = ensemble.dim
    ys, conf, degenerate = [], [], []
    for R in ensemble.weighted:
        es = hermitian_eigensystem(hermitize(S @ R @ S), tol)
        top = es.values[0]
        degenerate.append(bool(len(es.values) > 1 and es.values[1] > top - 1e-9 * max(top, 1e-300)))
        ys.append(S @ es.vectors[:, 0])
        conf.append(float(top))
    Y = [np.outer(y, y.conj()) for y in ys]
    lam = np.linalg.eigvalsh(hermitize(sum(Y)))[-1]
    c = np.full(len(Y), 1.0 / lam)
    for k, y in enumerate(ys):
        A = hermitize(np.eye(d) - sum(ck * Yk for ck, Yk in zip(c, Y)))
        w, v = np.linalg.eigh(A)
        keep = w > 1e-12
        coeff = v.conj().T @ y
        if np.linalg.norm(coeff[~keep]) > 1e-9 * np.linalg.norm(y):
            continue
        quad = np.sum(np.abs(coeff[keep]) ** 2 / w[keep])
        if quad > 0:
            c[k] += 1.0 / quad
    elements = [ck * Yk for ck, Yk in zip(c, Y)]
    remainder = hermitize(np.eye(d) - sum(elements))
    w, v = np.linalg.eigh(remainder)
    remainder = (v * np.clip(w, 0, None)) @ v.conj().T
    povm = Povm(elements + [remainder])
    return MaxConfResult(np.array(conf), povm, float(np.trace(rho @ remainder).real), c, tuple(degenerate))


def confidence_of(ensemble: Ensemble, povm: Povm, k: int, tol_cert: float = TAU_CERT) -> float:
    """Bayes probability that state k was sent given outcome k."""
    m = povm.elements[k]
    click = float(np.trace(ensemble.average @ m).real)
    if click <= tol_cert:
        raise ZeroClickProbability(f"outcome {k} fires with probability {click:.2e}")
    return float(ensemble.priors[k] * np.trace(m @ ensemble.states[k]).real / click)


def fixed_rate_reduction(ensemble: Ensemble, m_inconclusive, tol: Tolerances = DEFAULT_TOL) -> FixedRateProblem:
    """Project the ensemble onto the conclusive part Omega = I - M_inc.

    rho~_i = Omega^1/2 rho_i Omega^1/2 / tr[Omega rho_i] and
    q~_i = q_i tr[Omega rho_i] / (1 - Q) with Q = tr[rho M_inc].
    """
    m = np.asarray(m_inconclusive, dtype=complex)
    d = ensemble.dim
    if m.shape != (d, d) or np.max(np.abs(m - m.conj().T)) > tol.herm:
        raise InvalidOperator("inconclusive element must be a Hermitian d x d matrix")
    m = hermitize(m)
    w = np.linalg.eigvalsh(m)
    if w[0] < -tol.psd or w[-1] > 1 + tol.psd:
        raise InvalidOperator("inconclusive element must satisfy 0 <= M <= I")
    omega = np.eye(d) - m
    Q = float(np.trace(ensemble.average @ m).real)
    if Q > 1 - 1e-12:
        raise InvalidOperator("inconclusive element absorbs every outcome")
    s = matrix_power_psd(hermitize(omega), 0.5, tol) if w[-1] < 1 - 1e-15 else _sqrt_psd_clip(omega)
    states, weights = [], []
    for q, rho in zip(ensemble.priors, ensemble.states):
        t = float(np.trace(omega @ rho).real)
        weights.append(q * max(t, 0.0))
        states.append(hermitize(s @ rho @ s) / t if t > 1e-14 else rho)
    priors = np.array(weights) / (1 - Q)
    priors = priors / priors.sum()
    return FixedRateProblem(omega, Q, Ensemble(priors, states), s)


def _sqrt_psd_clip(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(hermitize(a))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def two_state_error_at(ensemble: Ensemble, m_inconclusive) -> tuple[float, float]:
    """(Q, minimal error) for two states given the inconclusive element.

    Closed form ((1 - Q) - ||Omega^1/2 (q1 rho1 - q2 rho2) Omega^1/2||_1) / 2.
    """
    m = hermitize(np.asarray(m_inconclusive, dtype=complex))
    s = _sqrt_psd_clip(np.eye(ensemble.dim) - m)
    X = ensemble.weighted[0] - ensemble.weighted[1]
    Q = float(np.trace(ensemble.average @ m).real)
    return Q, float(max(0.0, ((1 - Q) - trace_norm(hermitize(s @ X @ s))) / 2))


@dataclass(frozen=True)
class ErrorCurve:
    rates: np.ndarray
    errors: np.ndarray
    label: str = "restricted-family search (upper bound on the optimal error)"

    def points(self) -> list[tuple[float, float]]:
        return [(float(q), float(e)) for q, e in zip(self.rates, self.errors)]


def _family_operator(u: np.ndarray, a: float, b: float) -> np.ndarray:
    P = np.outer(u, u.conj())
    return a * P + b * (np.eye(len(u)) - P)


def _family_params(u: np.ndarray, rho: np.ndarray, Q: float, tau: float):
    """Map (u, tau) to weights (a, b) with a p_u + b (1 - p_u) = Q and a, b in [0, 1]."""
    pu = float(np.vdot(u, rho @ u).real)
    if pu < 1e-12:
        return 0.0, min(1.0, Q / (1 - pu))
    if pu > 1 - 1e-12:
        return min(1.0, Q / pu), 0.0
    lo = max(0.0, (Q - pu) / (1 - pu))
    hi = min(1.0, Q / (1 - pu))
    b = lo + tau * (hi - lo)
    return (Q - b * (1 - pu)) / pu, b


def error_vs_inconclusive_curve(ensemble: Ensemble, rates, seed: int = 0) -> ErrorCurve:
    """Least error found at each inconclusive rate for two states.

    Inconclusive elements are searched over a P_u + b (I - P_u) on the joint
    support (grid plus Nelder-Mead), seeded with the unambiguous element when the
    states are pure. A monotone envelope is applied afterwards: from a point
    (Q_j, e_j) one can always reach (Q, e_j (1 - Q)/(1 - Q_j)) for Q > Q_j by
    declaring extra outcomes inconclusive.
    """
    if len(ensemble) != 2:
        raise ValueError("the error/inconclusive trade-off is defined for two states")
    rates = np.sort(np.asarray(rates, dtype=float))
    P = support_projector(ensemble.average)
    w, v = np.linalg.eigh(P)
    V = v[:, w > 0.5]
    r = V.shape[1]
    comp = Ensemble(ensemble.priors, [hermitize(V.conj().T @ s @ V) for s in ensemble.states])
    rho = comp.average

    seeds = []
    if r == 2:
        for th in np.linspace(0, np.pi, 13):
            for ph in np.linspace(0, 2 * np.pi, 12, endpoint=False):
                seeds.append(np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)]))
    elif r > 2:
        rng = np.random.default_rng(seed)
        for _ in range(150):
            z = rng.normal(size=r) + 1j * rng.normal(size=r)
            seeds.append(z / np.linalg.norm(z))
    if r >= 2:
        X = comp.weighted[0] - comp.weighted[1]
        seeds += list(np.linalg.eigh(X)[1].T) + list(np.linalg.eigh(rho)[1].T)
        if all(_is_pure(s) for s in comp.states):
            try:
                usd = usd_two_pure(_pure_vector(comp.states[0]), _pure_vector(comp.states[1]), comp.priors)
                seeds += list(np.linalg.eigh(usd.povm.elements[-1])[1].T)
            except Infeasible:
                pass

    def err(u, Q, tau):
        u = u / np.linalg.norm(u)
        a, b = _family_params(u, rho, Q, tau)
        return two_state_error_at(comp, _family_operator(u, a, b))[1]

    def unpack(x):
        u = x[:r] + 1j * x[r : 2 * r]
        n = np.linalg.norm(u)
        return (u / n if n > 1e-12 else np.eye(r)[0]), float(np.clip(x[-1], 0, 1))

    errors = []
    for Q in rates:
        if Q >= 1 - 1e-12:
            errors.append(0.0)
            continue
        if r == 1:
            errors.append(float((1 - Q) * min(comp.priors)))
            continue
        trials = sorted(
            ((err(u, Q, tau), i, tau) for i, u in enumerate(seeds) for tau in (0.0, 0.25, 0.5, 0.75, 1.0)),
            key=lambda z: (z[0], z[1], z[2]),
        )
        best = trials[0][0]
        for e0, i, tau in trials[:4]:
            x0 = np.concatenate([seeds[i].real, seeds[i].imag, [tau]])
            res = minimize(
                lambda x: err(*unpack(x)[:1], Q, unpack(x)[1]),
                x0,
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000},
            )
            best = min(best, float(res.fun))
        errors.append(best)
    errors = np.array(errors)
    for k in range(len(rates)):
        for j in range(k):
            if rates[j] < 1:
                errors[k] = min(errors[k], errors[j] * (1 - rates[k]) / (1 - rates[j]))
    return ErrorCurve(rates, errors)
