"""Exact minimum-error discrimination for qubit ensembles.

For qubits the dual constraint K >= q_i rho_i with K = (t I + b.sigma)/2 reads
t - q_i >= |b - q_i v_i|. The optimum is therefore the smallest "ball of balls":
find the least t such that one centre b lies within t - q_i of every scaled Bloch
vector q_i v_i. It is solved exactly by enumerating support sets of at most four
balls, after which complementary states and the optimal POVM follow in closed form.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import nnls

from .errors import ReconstructionFailed, WrongDimension
from .minerror import TAU_CERT, DiscriminationResult, OptimalityCertificate, _result, solve_fixed_point
from .operators import I2, PAULIS, Ensemble, Povm, bloch_vector, operator_from_bloch

log = logging.getLogger(__name__)

TAU_GEO = 1e-10
ACTIVE_THRESHOLD = 1 - 1e-7


@dataclass(frozen=True)
class WeightedBlochBall:
    center: np.ndarray
    weight: float


@dataclass(frozen=True)
class EnclosingBall:
    center: np.ndarray
    radius: float
    support: tuple = ()

    def symmetry_operator(self) -> np.ndarray:
        return operator_from_bloch(self.radius, self.center)


@dataclass(frozen=True)
class QubitSolution:
    p_guess: float
    ball: EnclosingBall
    complementary_bloch: tuple
    active_set: tuple
    povm: Povm
    certificate: OptimalityCertificate
    result: DiscriminationResult
    method: str = "enclosing-ball"

    @property
    def passed(self) -> bool:
        return self.certificate.passed


def dual_reduction(ensemble: Ensemble) -> list[WeightedBlochBall]:
    """One ball per state: centre q_i v_i, weight q_i."""
    if ensemble.dim != 2:
        raise WrongDimension(f"qubit reduction needs dimension 2, got {ensemble.dim}")
    return [WeightedBlochBall(q * bloch_vector(rho), float(q)) for q, rho in zip(ensemble.priors, ensemble.states)]


def _solve_quadratic(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Real roots of a t^2 + b t + c = 0 row-wise, shape (k, 2); NaN where absent."""
    out = np.full((len(a), 2), np.nan)
    lin = np.abs(a) < 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        out[lin, 0] = -c[lin] / b[lin]
        q = ~lin
        disc = b[q] ** 2 - 4 * a[q] * c[q]
        disc = np.where((disc < 0) & (disc > -1e-12), 0.0, disc)
        sq = np.sqrt(disc)
        # numerically stable pair of roots
        s = -0.5 * (b[q] + np.where(b[q] >= 0, sq, -sq))
        r1 = s / a[q]
        r2 = np.where(s != 0, c[q] / s, r1)
        out[q, 0] = r1
        out[q, 1] = r2
    return out


def _candidates(centers: np.ndarray, weights: np.ndarray, subset: np.ndarray):
    """Equal-touching solutions (b, t) for a batch of support subsets, shape (m, k)."""
    c0 = centers[subset[:, 0]]
    q0 = weights[subset[:, 0]]
    if subset.shape[1] == 1:
        return c0, q0
    A = np.transpose(centers[subset[:, 1:]] - c0[:, None, :], (0, 2, 1))  # (m, 3, k-1)
    qj = weights[subset[:, 1:]]
    u = np.sum(A**2, axis=1) - (qj**2 - q0[:, None] ** 2)
    w = 2 * (qj - q0[:, None])
    G = 2 * np.einsum("mai,maj->mij", A, A)
    ok = np.abs(np.linalg.det(G)) > 1e-14 * np.maximum(1.0, np.einsum("mii->m", G)) ** (G.shape[1])
    bs, ts = [], []
    if not np.any(ok):
        return np.empty((0, 3)), np.empty(0)
    A, u, w, G, c0, q0 = A[ok], u[ok], w[ok], G[ok], c0[ok], q0[ok]
    alpha = np.linalg.solve(G, u[..., None])[..., 0]
    beta = np.linalg.solve(G, w[..., None])[..., 0]
    Aa = np.einsum("mai,mi->ma", A, alpha)
    Ab = np.einsum("mai,mi->ma", A, beta)
    roots = _solve_quadratic(
        np.sum(Ab**2, axis=1) - 1, 2 * np.sum(Aa * Ab, axis=1) + 2 * q0, np.sum(Aa**2, axis=1) - q0**2
    )
    for r in range(2):
        t = roots[:, r]
        b = c0 + Aa + t[:, None] * Ab
        bs.append(b)
        ts.append(t)
    return np.concatenate(bs), np.concatenate(ts)


def min_enclosing_ball_of_balls(balls: list[WeightedBlochBall], tol: float = TAU_GEO) -> EnclosingBall:
    """Least t with some b such that |b - c_i| <= t - q_i for all balls.

    Every support set of one to four balls is solved in closed form; candidates are
    verified against all constraints and the minimal t wins, ties going to the
    lexicographically smallest centre.
    """
    centers = np.array([b.center for b in balls], dtype=float).reshape(-1, 3)
    weights = np.array([b.weight for b in balls], dtype=float)
    n = len(balls)
    best = None
    for k in range(1, min(4, n) + 1):
        subset = np.array(list(combinations(range(n), k)), dtype=int)
        b, t = _candidates(centers, weights, subset)
        if len(t) == 0:
            continue
        good = np.isfinite(t)
        b, t = b[good], t[good]
        slack = np.linalg.norm(b[:, None, :] - centers[None], axis=2) + weights[None] - t[:, None]
        feas = np.max(slack, axis=1) <= tol
        feas &= t >= weights.max() - tol
        for idx in np.flatnonzero(feas):
            key = (round(float(t[idx]), 12), tuple(np.round(b[idx], 12)))
            if best is None or key < best[0]:
                best = (key, b[idx].copy(), float(t[idx]))
    if best is None:
        raise RuntimeError("no feasible support set found")
    _, b, t = best
    touching = tuple(
        int(i) for i in np.flatnonzero(np.linalg.norm(b - centers, axis=1) + weights - t >= -1e-9)
    )
    return EnclosingBall(b, t, touching)


def _complementary(ball: EnclosingBall, balls: list[WeightedBlochBall]):
    ws = []
    for bb in balls:
        r = ball.radius - bb.weight
        ws.append(None if r <= TAU_GEO else (ball.center - bb.center) / r)
    return ws


def reconstruct_povm(w_vectors: list, active: list[int], n: int, tol: float = 1e-9) -> Povm:
    """M_i = alpha_i (I - w_i.sigma)/2 on the active set, alpha >= 0 from NNLS.

    Active complementary vectors are normalised to unit length so every element is
    rank one and exactly orthogonal to its pure complementary state.
    """
    if not active:
        raise ReconstructionFailed("empty active set")
    W = np.array([w_vectors[i] / np.linalg.norm(w_vectors[i]) for i in active])
    A = np.vstack([np.ones(len(active)), W.T])
    rhs = np.array([2.0, 0.0, 0.0, 0.0])
    alpha, resid = nnls(A, rhs)
    if resid > tol:
        raise ReconstructionFailed(f"no non-negative weights (residual {resid:.2e})")
    elements = [np.zeros((2, 2), dtype=complex) for _ in range(n)]
    for a, i, w in zip(alpha, active, W):
        elements[i] = a * (I2 - np.einsum("k,kab->ab", w, PAULIS)) / 2
    # remove the O(resid) completeness defect
    defect = I2 - sum(elements)
    elements[active[int(np.argmax(alpha))]] = elements[active[int(np.argmax(alpha))]] + defect
    return Povm(elements)


def solve_qubit(ensemble: Ensemble, tol_cert: float = TAU_CERT) -> QubitSolution:
    """Exact qubit optimum from the enclosing ball, with certified POVM.

    Falls back to the fixed-point solver if the POVM cannot be reconstructed.
    """
    balls = dual_reduction(ensemble)
    ball = min_enclosing_ball_of_balls(balls)
    n = len(balls)
    ws = _complementary(ball, balls)
    trivial = [i for i, w in enumerate(ws) if w is None]
    method = "enclosing-ball"
    if trivial:
        k = trivial[0]
        elements = [np.eye(2) if i == k else np.zeros((2, 2)) for i in range(n)]
        active = [k]
        povm = Povm(elements)
    else:
        active = [i for i, w in enumerate(ws) if np.linalg.norm(w) >= ACTIVE_THRESHOLD]
        try:
            povm = reconstruct_povm(ws, active, n)
        except ReconstructionFailed as exc:
            log.warning("qubit reconstruction failed (%s); using fixed-point solver", exc)
            povm = None
    if povm is not None:
        res = _result(ensemble, povm.elements, tol_cert, method)
        if not res.passed:
            log.warning("reconstructed qubit POVM failed its certificate; using fixed-point solver")
            povm = None
    if povm is None:
        res = solve_fixed_point(ensemble, tol_cert=tol_cert)
        method = "fixed-point-fallback"
        povm = res.povm
    return QubitSolution(
        p_guess=ball.radius,
        ball=ball,
        complementary_bloch=tuple(ws),
        active_set=tuple(active),
        povm=povm,
        certificate=res.certificate,
        result=res,
        method=method,
    )
