"""Chernoff exponents, tensor-power error decay and repeated-measurement simulation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import gammaln

from .errors import DimensionCapExceeded, DimensionMismatch, NotDistribution, WrongCount
from .minerror import solve_fixed_point
from .operators import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    Ensemble,
    Povm,
    Tolerances,
    check_distribution,
    hermitize,
    outcome_distribution,
    tensor_power,
    trace_norm,
    validate_density,
)

log = logging.getLogger(__name__)

GRID_POINTS = 101
GOLDEN = (np.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class ChernoffResult:
    xi: float
    s_star: float
    s_grid: np.ndarray = field(repr=False)
    trace_curve: np.ndarray = field(repr=False)
    disjoint: bool = False
    grid_beats_refined: bool = False


@dataclass(frozen=True)
class ExponentEstimate:
    n_values: np.ndarray
    error_probs: np.ndarray
    fitted_exponent: float
    fit_residual: float

    @property
    def rates(self) -> np.ndarray:
        """-(1/n) log p_error,n for each n."""
        with np.errstate(divide="ignore"):
            return -np.log(self.error_probs) / self.n_values

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(n), float(p)) for n, p in zip(self.n_values, self.error_probs)]


def _spectral_curve(lam: np.ndarray, mu: np.ndarray, overlap: np.ndarray):
    """s -> sum_ij lam_i^s mu_j^(1-s) |<a_i|b_j>|^2 with 0^x = 0 for every x."""
    pos_l, pos_m = lam > 0, mu > 0
    lam, mu = lam[pos_l], mu[pos_m]
    w = overlap[np.ix_(pos_l, pos_m)]
    ll, lm = np.log(lam), np.log(mu)

    def f(s):
        return float(np.sum(w * np.exp(s * ll[:, None] + (1 - s) * lm[None, :])))

    return f, float(np.sum(w))


def _minimize_curve(f) -> tuple[float, float, np.ndarray, np.ndarray, bool]:
    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    vals = np.array([f(s) for s in grid])
    k = int(np.argmin(vals))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, GRID_POINTS - 1)]
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-10:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    cand = [(fc, c), (fd, d), (f(lo), lo), (f(hi), hi), (vals[k], grid[k])]
    fmin, smin = min(cand)
    flag = vals.min() < fmin - 1e-9
    if flag:
        log.warning("trace curve grid minimum beats the golden-section refinement")
    return fmin, smin, grid, vals, flag


def _chernoff_from(f, support_overlap) -> ChernoffResult:
    if support_overlap < 1e-15:
        grid = np.linspace(0.0, 1.0, GRID_POINTS)
        return ChernoffResult(np.inf, 0.5, grid, np.zeros_like(grid), disjoint=True)
    fmin, smin, grid, vals, flag = _minimize_curve(f)
    xi = max(0.0, -np.log(fmin))
    return ChernoffResult(float(xi), float(smin), grid, vals, False, bool(flag))


def chernoff_two(rho1, rho2, tol: Tolerances = DEFAULT_TOL) -> ChernoffResult:
    """Quantum Chernoff exponent -log min_s tr[rho1^s rho2^(1-s)] in nats."""
    a = validate_density(rho1, tol)
    b = validate_density(rho2, tol)
    if a.shape != b.shape:
        raise DimensionMismatch("states must share a dimension")
    la, va = np.linalg.eigh(a)
    lb, vb = np.linalg.eigh(b)
    cut = tol.eig
    la = np.where(la > cut, la, 0.0)
    lb = np.where(lb > cut, lb, 0.0)
    ov = np.abs(va.conj().T @ vb) ** 2
    f, sup = _spectral_curve(la, lb, ov)
    return _chernoff_from(f, sup)


def chernoff_classical(p0, p1, tol: Tolerances = DEFAULT_TOL) -> ChernoffResult:
    """Classical Chernoff exponent -log min_s sum_i p0_i^s p1_i^(1-s)."""
    a = check_distribution(p0, tol)
    b = check_distribution(p1, tol)
    if a.shape != b.shape:
        raise NotDistribution("distributions live on different alphabets")
    f, sup = _spectral_curve(a, b, np.eye(len(a)))
    return _chernoff_from(f, sup)


def chernoff_multi(states, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest pairwise Chernoff exponent of a set of states."""
    if len(states) < 2:
        raise WrongCount("need at least two states")
    return min(chernoff_two(a, b, tol).xi for a, b in combinations(states, 2))


def _fit_slope(ns: np.ndarray, ps: np.ndarray) -> tuple[float, float]:
    if np.any(ps <= 0):
        return np.inf, 0.0
    half = ns >= ns[len(ns) // 2] if len(ns) > 1 else np.ones_like(ns, dtype=bool)
    x, y = ns[half].astype(float), -np.log(ps[half])
    if len(x) == 1:
        return float(y[0] / x[0]), 0.0
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[0]), float(np.sqrt(res[0] / len(x))) if len(res) else 0.0


def finite_n_error(rho1, rho2, priors=(0.5, 0.5), n_max: int = 10, cap: int = DEFAULT_CAP) -> ExponentEstimate:
    """Helstrom error on rho1^(x)n versus rho2^(x)n for n = 1..n_max.

    The exponent is the least-squares slope of -log p_error,n over the last half
    of the range, which suppresses the sub-exponential prefactor.
    """
    a = validate_density(rho1)
    b = validate_density(rho2)
    if a.shape[0] ** n_max > cap:
        raise DimensionCapExceeded(f"{a.shape[0]}^{n_max} exceeds the cap {cap}")
    q1, q2 = priors
    ns = np.arange(1, n_max + 1)
    ps = []
    for n in ns:
        X = q1 * tensor_power(a, n, cap) - q2 * tensor_power(b, n, cap)
        ps.append(max(0.0, 0.5 * (1 - trace_norm(hermitize(X)))))
    ps = np.array(ps)
    slope, resid = _fit_slope(ns, ps)
    return ExponentEstimate(ns, ps, slope, resid)


@dataclass(frozen=True)
class SandwichReport:
    lower: float
    empirical: float
    upper: float
    fitted: float
    n: int
    error_probs: np.ndarray

    @property
    def ordered(self) -> bool:
        return self.lower <= self.upper

    @property
    def within(self) -> bool:
        return self.lower - 1e-9 <= self.fitted and self.empirical <= self.upper + 1e-9


def sandwich_check(states, n: int, cap: int = DEFAULT_CAP) -> SandwichReport:
    """Compare the empirical decay of the optimal error with xi/3 and xi.

    xi is the smallest pairwise Chernoff exponent. The empirical value is
    -(1/n) log p_error,n with p_error,n from the certified solver on n copies and
    equal priors; being asymptotic, the bounds are reported rather than enforced.
    """
    states = [validate_density(s) for s in states]
    d = states[0].shape[0]
    if d**n > cap:
        raise DimensionCapExceeded(f"{d}^{n} exceeds the cap {cap}")
    xi = chernoff_multi(states)
    ps = []
    for k in range(1, n + 1):
        ens = Ensemble.uniform([tensor_power(s, k, cap) for s in states])
        ps.append(max(0.0, 1 - solve_fixed_point(ens).p_guess))
    ps = np.array(ps)
    emp = -np.log(ps[-1]) / n if ps[-1] > 0 else np.inf
    slope, _ = _fit_slope(np.arange(1, n + 1), ps)
    return SandwichReport(xi / 3, float(emp), xi, slope, n, ps)


def repeated_measurement_sim(ensemble: Ensemble, povm: Povm, n: int) -> float:
    """Error of n independent measurements followed by the optimal classical decision.

    Sums min(q1 P1(x), q2 P2(x)) over outcome sequences, grouped exactly by type
    (outcome counts), so no sampling is involved.
    """
    if len(ensemble) != 2:
        raise WrongCount("repeated measurement compares two states")
    P = outcome_distribution(ensemble, povm)
    q1, q2 = ensemble.priors
    K = P.shape[1]
    with np.errstate(divide="ignore"):
        logP = np.log(P)
    total = 0.0
    for counts in _compositions(n, K):
        c = np.array(counts)
        logm = gammaln(n + 1) - np.sum(gammaln(c + 1))
        terms = []
        for q, lp in ((q1, logP[0]), (q2, logP[1])):
            used = c > 0
            s = np.sum(c[used] * lp[used])
            terms.append(q * np.exp(logm + s) if np.isfinite(s) else 0.0)
        total += min(terms)
    return float(total)


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest
