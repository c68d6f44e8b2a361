"""Log-barrier Newton method for min tr K subject to K >= R_i (Hermitian d x d).

On the central path M_i = mu (K - R_i)^-1 sums to I, so the central points give
a primal POVM with duality gap N d mu. Cost grows like d^6, so this is meant
for small dimensions.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence
from .operators import hermitize


def _hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    basis = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1
        basis.append(e)
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = 1 / np.sqrt(2)
            basis.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[j, k], e[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            basis.append(e)
    return np.array(basis)


def min_trace_dominating(R, mu_final: float = 1e-13, max_newton: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Return (K, M) with K >= R_i approximately minimising tr K and M_i = mu (K - R_i)^-1."""
    R = np.asarray(R, dtype=complex)
    n, d = R.shape[0], R.shape[1]
    E = _hermitian_basis(d)
    Ev = E.reshape(d * d, d * d)  # row a = vec(E_a)
    tr_e = np.einsum("aii->a", E).real
    spectra = [np.linalg.eigvalsh(hermitize(r)) for r in R]
    top = max(float(w[-1]) for w in spectra)
    scale = max(max(float(np.abs(w).max()) for w in spectra), 1e-300)
    x = np.zeros(d * d)
    x[:d] = top + scale  # K = (top + scale) I, strictly feasible

    def mat(v):
        return np.einsum("a,aij->ij", v, E)

    def phi(v, mu):
        K = mat(v)
        total = float(tr_e @ v)
        for r in R:
            w = np.linalg.eigvalsh(hermitize(K - r))
            if w[0] <= 0:
                return np.inf
            total -= mu * float(np.sum(np.log(w)))
        return total

    mu = scale
    while True:
        for _ in range(max_newton):
            K = mat(x)
            A = np.array([np.linalg.inv(hermitize(K - r)) for r in R])
            g = tr_e - mu * np.einsum("kij,aji->a", A, E).real
            H = np.zeros((d * d, d * d))
            for a in A:
                # tr[A E_a A E_b] = vec(E_a)^H (A^T kron A) vec(E_b) up to conjugation
                H += (Ev.conj() @ np.kron(a, a.T) @ Ev.T).real
            H *= mu
            step = np.linalg.solve(H, -g)
            dec = -g @ step
            f0 = phi(x, mu)
            # dec / mu is the squared Newton decrement of the scaled barrier
            # or the decrease is below the round-off of tr K itself
            if dec <= 1e-20 * mu or dec <= 1e-15 * max(abs(f0), scale):
                break
            t = 1.0
            while phi(x + t * step, mu) > f0 - 0.25 * t * dec and t > 1e-10:
                t *= 0.5
            if t <= 1e-10:
                break
            x = x + t * step
        else:
            raise NoConvergence("barrier Newton iterations exhausted")
        if mu <= mu_final * scale:
            K = mat(x)
            M = hermitize(np.array([mu * np.linalg.inv(hermitize(K - r)) for r in R]))
            # remove the residual completeness defect of the last centring step
            w, v = np.linalg.eigh(hermitize(M.sum(axis=0)))
            S = (v / np.sqrt(w)) @ v.conj().T
            return hermitize(K), hermitize(S[None] @ M @ S[None])
        mu = max(mu * 0.1, mu_final * scale)
