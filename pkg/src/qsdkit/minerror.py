"""Minimum-error discrimination.

Closed forms (two states, geometrically uniform states, mirror-symmetric qubit
triples), a fixed-point solver for any number of states in any dimension, and the
optimality certificate that every solver output is checked against.

A POVM {M_i} is optimal iff the Hermitian operator K = sum_i q_i rho_i M_i satisfies
K >= q_j rho_j for every j; then p_guess = tr K and K = q_i rho_i + r_i sigma_i with
complementary states sigma_i orthogonal to M_i.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadCoefficients,
    CertificateFailed,
    DimensionCapExceeded,
    DimensionMismatch,
    NoConvergence,
    NotDistribution,
    OutOfRange,
    WrongCount,
)
from .operators import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    Ensemble,
    Povm,
    Tolerances,
    dagger,
    hermitize,
    ket,
    matrix_power_psd,
    tensor_power,
    trace_norm,
)

log = logging.getLogger(__name__)

TAU_CERT = 1e-7
MAX_ITER = 10_000


@dataclass(frozen=True)
class OptimalityCertificate:
    """Residuals of the optimality conditions for a candidate POVM.

    ``passed`` requires every residual to be at most ``tol``. ``suboptimality_bound``
    is a rigorous bound on p_opt - primal: shifting K by the dual infeasibility
    gives a feasible dual point.
    """

    dual_feasibility_gap: float
    complementarity_residual: float
    pairwise_residual: float
    primal_dual_gap: float
    suboptimality_bound: float
    tol: float = TAU_CERT

    @property
    def passed(self) -> bool:
        return max(
            self.dual_feasibility_gap,
            self.complementarity_residual,
            self.pairwise_residual,
            abs(self.primal_dual_gap),
        ) <= self.tol


@dataclass(frozen=True)
class DiscriminationResult:
    p_guess: float
    povm: Povm
    K: np.ndarray
    residuals: np.ndarray
    complementary_states: tuple
    certificate: OptimalityCertificate
    method: str = ""
    iterations: int = 0
    converged: bool = True
    monotone: bool = True
    history: tuple = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return self.certificate.passed


def _symmetry_operator(weighted: np.ndarray, elements: np.ndarray) -> np.ndarray:
    return hermitize(np.einsum("iab,ibc->ac", weighted, elements))


def check_optimality(ensemble: Ensemble, povm: Povm, tol_cert: float = TAU_CERT) -> OptimalityCertificate:
    """Evaluate the optimality conditions of ``povm`` for ``ensemble``.

    The POVM must have one element per state (zero elements are allowed). Residuals
    are measured in operator norm.
    """
    if len(povm) != len(ensemble) or povm.dim != ensemble.dim:
        raise DimensionMismatch(
            f"POVM with {len(povm)} elements of dim {povm.dim} for {len(ensemble)} states of dim {ensemble.dim}"
        )
    R = ensemble.weighted
    M = povm.stack
    K = _symmetry_operator(R, M)
    slack = K[None] - R
    dual_gap = max(0.0, -float(np.linalg.eigvalsh(slack)[:, 0].min()))
    comp = float(np.max(np.abs(np.einsum("iab,iba->i", slack, M))))
    n = len(ensemble)
    pairwise = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            X = M[i] @ (R[i] - R[j]) @ M[j]
            pairwise = max(pairwise, float(np.linalg.norm(X, 2)))
    primal = float(np.einsum("iab,iba->", R, M).real)
    gap = float(np.trace(K).real) - primal
    bound = abs(gap) + ensemble.dim * dual_gap
    return OptimalityCertificate(dual_gap, comp, pairwise, gap, bound, tol_cert)


def _result(ensemble: Ensemble, elements, tol_cert: float, method: str, **extra) -> DiscriminationResult:
    povm = Povm(elements)
    cert = check_optimality(ensemble, povm, tol_cert)
    R = ensemble.weighted
    K = _symmetry_operator(R, povm.stack)
    trK = float(np.trace(K).real)
    residuals = trK - ensemble.priors
    comp = tuple(
        hermitize(K - R[i]) / residuals[i] if residuals[i] > tol_cert else None for i in range(len(ensemble))
    )
    primal = float(np.einsum("iab,iba->", R, povm.stack).real)
    return DiscriminationResult(
        p_guess=primal,
        povm=povm,
        K=K,
        residuals=residuals,
        complementary_states=comp,
        certificate=cert,
        method=method,
        **extra,
    )


def helstrom_two_state(ensemble: Ensemble, tol: Tolerances = DEFAULT_TOL, tol_cert: float = TAU_CERT) -> DiscriminationResult:
    """Optimal two-state discrimination by the spectral split of q1 rho1 - q2 rho2.

    M_1 projects onto the strictly positive eigenspace; the rest, including the
    kernel, goes to M_2. ``p_guess`` is the closed form 1/2 + ||X||_1 / 2.
    """
    if len(ensemble) != 2:
        raise WrongCount(f"Helstrom needs exactly two states, got {len(ensemble)}")
    X = ensemble.weighted[0] - ensemble.weighted[1]
    w, v = np.linalg.eigh(hermitize(X))
    pos = v[:, w > tol.eig]
    m1 = pos @ pos.conj().T
    m2 = np.eye(ensemble.dim) - m1
    res = _result(ensemble, [m1, m2], tol_cert, "helstrom")
    closed = 0.5 + 0.5 * trace_norm(X, tol)
    return DiscriminationResult(**{**res.__dict__, "p_guess": closed})


def _fold_leftover(M: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Add I - sum(M) to the element whose state overlaps it most."""
    d = M.shape[-1]
    left = hermitize(np.eye(d) - M.sum(axis=0))
    if np.max(np.abs(left)) < 1e-14:
        return M
    k = int(np.argmax(np.einsum("iab,ba->i", R, left).real))
    M = M.copy()
    M[k] = M[k] + left
    return M


def square_root_measurement(ensemble: Ensemble, tol: Tolerances = DEFAULT_TOL) -> Povm:
    """Pretty-good measurement M_i = rho^-1/2 q_i rho_i rho^-1/2.

    Complete on the support of rho; the kernel projector is folded into one
    element so the result is a full POVM.
    """
    R = ensemble.weighted
    S = matrix_power_psd(ensemble.average, -0.5, tol)
    M = hermitize(S[None] @ R @ S[None])
    return Povm(_fold_leftover(M, R))


def _pinv_sqrt(G: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(G)
    top = w[-1]
    keep = w > 1e-13 * top if top > 0 else np.zeros_like(w, dtype=bool)
    f = np.zeros_like(w)
    f[keep] = 1.0 / np.sqrt(w[keep])
    return (v * f) @ v.conj().T


def solve_fixed_point(
    ensemble: Ensemble,
    max_iter: int = MAX_ITER,
    tol_cert: float = TAU_CERT,
    seed_povm: Povm | None = None,
    check_every: int = 10,
    strict: bool = False,
) -> DiscriminationResult:
    """Iterate M_i <- G^-1/2 R_i M_i R_i G^-1/2 with R_i = q_i rho_i, G = sum_j R_j M_j R_j.

    Starts from the square-root measurement (or ``seed_povm``) and stops as soon as
    the optimality certificate passes. On failure the last iterate is returned with
    ``converged=False``, or :class:`NoConvergence` is raised when ``strict``.
    """
    R = ensemble.weighted
    n = len(ensemble)
    if seed_povm is not None:
        if len(seed_povm) != n:
            raise DimensionMismatch("seed POVM must have one element per state")
        M = seed_povm.stack
        method = "fixed-point"
    else:
        M = square_root_measurement(ensemble).stack
        method = "fixed-point"
        norms = np.linalg.norm(M, axis=(1, 2))
        if np.any((norms < 1e-12) & (ensemble.priors > 0)):
            M = np.repeat(np.eye(ensemble.dim, dtype=complex)[None] / n, n, axis=0)
            method = "fixed-point(uniform-seed)"

    history = [float(np.einsum("iab,iba->", R, M).real)]
    monotone = True
    it = 0
    cert = None
    while True:
        if it % check_every == 0 or it >= max_iter:
            cert = check_optimality(ensemble, Povm(M), tol_cert)
            if cert.passed or it >= max_iter:
                break
        X = R @ M @ R
        S = _pinv_sqrt(hermitize(X.sum(axis=0)))
        M = _fold_leftover(hermitize(S[None] @ X @ S[None]), R)
        it += 1
        value = float(np.einsum("iab,iba->", R, M).real)
        if value < history[-1] - 1e-10:
            monotone = False
        history.append(value)

    res = _result(
        ensemble,
        M,
        tol_cert,
        method,
        iterations=it,
        converged=cert.passed,
        monotone=monotone,
        history=tuple(history),
    )
    if not res.converged:
        log.warning("fixed-point solver stopped after %d iterations without a certificate", it)
        if strict:
            raise NoConvergence(f"certificate not passed after {it} iterations", res)
    return res


def gu_coefficients(coefficients, d: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    c = np.asarray(coefficients, dtype=float).ravel()
    if c.shape != (d,) or np.any(c < 0) or abs(np.sum(c**2) - 1) > 1e-9:
        raise BadCoefficients("need d non-negative coefficients with unit 2-norm")
    return c


def gu_symmetry(d: int, copies: int = 1) -> np.ndarray:
    """U^{(x)N} with U = sum_m exp(2 pi i m / d) |m><m|."""
    u = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return tensor_power(u, copies, cap=np.inf)


def gu_ensemble(coefficients, d: int, copies: int = 1, cap: int = DEFAULT_CAP) -> Ensemble:
    """d equiprobable states |psi_a>^{(x)N}, |psi_a> = sum_n c_n exp(2 pi i n a / d) |n>."""
    c = gu_coefficients(coefficients, d)
    if d**copies > cap:
        raise DimensionCapExceeded(f"{d}^{copies} exceeds the cap {cap}")
    n = np.arange(d)
    states = []
    for a in range(d):
        psi = c * np.exp(2j * np.pi * n * a / d)
        rho = np.outer(psi, psi.conj())
        states.append(tensor_power(rho, copies, cap))
    return Ensemble.uniform(states)


def gu_guessing_probability(coefficients, d: int, copies: int = 1, cap: int = DEFAULT_CAP) -> float:
    """Closed-form optimum for geometrically uniform pure states.

    p = |sum_eta (sum_m exp(2 pi i eta m / d) <psi_m|psi_0>^N)^(1/2)|^2 / d^2. The
    inner sums are d times the Gram-matrix eigenvalues, hence real and
    non-negative; the principal root is taken after clipping round-off.
    """
    c = gu_coefficients(coefficients, d)
    if d**copies > cap:
        raise DimensionCapExceeded(f"{d}^{copies} exceeds the cap {cap}")
    m = np.arange(d)
    overlaps = np.array([np.sum(c**2 * np.exp(-2j * np.pi * m * k / d)) for k in m]) ** copies
    inner = np.array([np.sum(np.exp(2j * np.pi * eta * m / d) * overlaps) for eta in m])
    if np.max(np.abs(inner.imag)) > 1e-9 or inner.real.min() < -1e-9:
        log.warning("GU spectrum not real non-negative: %s", inner)
    roots = np.sqrt(np.clip(inner.real, 0, None))
    return float(np.sum(roots) ** 2 / d**2)


def mirror_threshold(theta: float) -> float:
    return 1.0 / (2.0 + np.cos(theta) * (np.cos(theta) + np.sin(theta)))


def mirror_symmetric_guess(p: float, theta: float) -> float:
    """Guessing probability for the mirror-symmetric triple with priors (p, p, 1 - 2p).

    The two side states make angle +-theta with |+> in state space (+-2 theta on the
    Bloch sphere).
    """
    if not 0 <= p <= 0.5 or not 0 <= theta <= np.pi / 2:
        raise OutOfRange("need p in [0, 1/2] and theta in [0, pi/2]")
    s, c = np.sin(theta), np.cos(theta)
    if p >= mirror_threshold(theta):
        return float(p * (1 + np.sin(2 * theta)))
    return float((1 - 2 * p) * (p * s**2 + 1 - 2 * p - p * c**2) / (1 - 2 * p - p * c**2))


def classical_guess(joint) -> float:
    """sum_y max_x p(x, y) for a joint table with rows x and columns y."""
    p = np.asarray(joint, dtype=float)
    if p.ndim != 2 or np.any(p < 0) or abs(p.sum() - 1) > 1e-9:
        raise NotDistribution("joint table must be a 2-D probability array")
    return float(p.max(axis=0).sum())


def variational_distance(joint) -> float:
    """Average excess of the best posterior over the uniform guess 1/N."""
    p = np.asarray(joint, dtype=float)
    py = p.sum(axis=0)
    mask = py > 0
    post = p[:, mask] / py[mask]
    return float(np.sum(py[mask] * (post.max(axis=0) - 1.0 / p.shape[0])))


@dataclass(frozen=True)
class GeneralForm:
    random_guess: float
    average_residual: float
    residuals: np.ndarray
    p_guess: float


def general_form_report(result: DiscriminationResult, n: int | None = None) -> GeneralForm:
    """Split p_guess into the random guess 1/N plus the mean residual (1/N) sum r_i."""
    if not result.passed:
        raise CertificateFailed("general form needs a certified optimum")
    n = len(result.residuals) if n is None else n
    R = float(np.mean(result.residuals))
    if abs(1.0 / n + R - result.p_guess) > result.certificate.tol:
        raise CertificateFailed("p_guess does not match 1/N + R")
    return GeneralForm(1.0 / n, R, np.array(result.residuals), result.p_guess)


def average_confidence(ensemble: Ensemble, povm: Povm) -> float:
    """sum_k p(M_k) p(rho_k | M_k), which equals sum_k q_k tr[M_k rho_k]."""
    rho = ensemble.average
    total = 0.0
    for k, m in enumerate(povm.elements[: len(ensemble)]):
        click = np.trace(rho @ m).real
        if click > 0:
            total += click * ensemble.priors[k] * np.trace(m @ ensemble.states[k]).real / click
    return float(total)


def pure_state_overlap(a, b) -> complex:
    return complex(np.vdot(ket(a), ket(b)))


__all__ = [
    "DiscriminationResult",
    "OptimalityCertificate",
    "GeneralForm",
    "check_optimality",
    "helstrom_two_state",
    "square_root_measurement",
    "solve_fixed_point",
    "gu_ensemble",
    "gu_symmetry",
    "gu_guessing_probability",
    "mirror_threshold",
    "mirror_symmetric_guess",
    "classical_guess",
    "variational_distance",
    "general_form_report",
    "average_confidence",
    "dagger",
]
