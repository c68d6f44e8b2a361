"""Dense Hermitian matrix algebra, state and POVM validation, Bloch geometry,
norms and entropies.

Matrices are plain complex ``numpy`` arrays. Validated objects (states inside an
:class:`Ensemble`, elements of a :class:`Povm`) are stored read-only so they can be
shared between threads without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    IncompleteMeasurement,
    NoConvergence,
    NotDistribution,
    NotHermitian,
    NotPositive,
    TraceNotOne,
    VectorOutsideBall,
    WrongDimension,
)

DEFAULT_CAP = 4096

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances; every public operation accepts an override."""

    herm: float = 1e-9
    psd: float = 1e-9
    trace: float = 1e-9
    comp: float = 1e-8
    eig: float = 1e-10


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Eigensystem:
    values: np.ndarray  # real, descending
    vectors: np.ndarray  # columns, orthonormal


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def as_square(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise WrongDimension(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(np.conj(a), -1, -2)


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + dagger(a)) / 2


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def _require_hermitian(a: np.ndarray, tol: float) -> np.ndarray:
    err = hermiticity_error(a)
    if err > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {err:.3e} > {tol:.1e}")
    return hermitize(a)


def ket(vector) -> np.ndarray:
    """Normalised column of amplitudes."""
    v = np.asarray(vector, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero vector is not a state")
    return v / norm


def projector(vector) -> np.ndarray:
    v = ket(vector)
    return np.outer(v, v.conj())


def validate_density(matrix, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Check that ``matrix`` is a density operator and return a clean copy.

    Small asymmetry (up to ``tol.herm``) is removed by Hermitizing, eigenvalues in
    ``[-tol.psd, 0)`` are clipped to zero. The returned array is read-only.
    """
    a = _require_hermitian(as_square(matrix), tol.herm)
    tr = np.trace(a).real
    if abs(tr - 1.0) > tol.trace:
        raise TraceNotOne(f"trace is {tr!r}")
    w, v = np.linalg.eigh(a)
    if w[0] < -tol.psd:
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} < -{tol.psd:.1e}")
    if w[0] < 0:
        a = hermitize((v * np.clip(w, 0, None)) @ v.conj().T)
    return _frozen(a)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # make the largest-magnitude component of each column real positive
    idx = np.argmax(np.abs(vectors) > np.abs(vectors).max(axis=0) * (1 - 1e-8), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def hermitian_eigensystem(h, tol: Tolerances = DEFAULT_TOL) -> Eigensystem:
    """Deterministic eigen-decomposition with descending eigenvalues."""
    a = _require_hermitian(as_square(h), tol.herm)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    w, v = w[::-1], _fix_phases(v[:, ::-1])
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.max(np.abs((v * w) @ v.conj().T - a)) > tol.eig * scale:
        raise NoConvergence("eigen-decomposition failed to reconstruct the input")
    return Eigensystem(values=w, vectors=v)


def trace_norm(a, tol: Tolerances = DEFAULT_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    a = _require_hermitian(as_square(a), tol.herm)
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def bloch_vector(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    rho = as_square(rho)
    if rho.shape != (2, 2):
        raise WrongDimension("Bloch vectors exist only for qubits")
    return np.array([np.trace(rho @ p).real for p in PAULIS])


def density_from_bloch(v, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """rho(v) = (I + v.sigma) / 2."""
    v = np.asarray(v, dtype=float).ravel()
    if v.shape != (3,):
        raise WrongDimension("Bloch vector must have three components")
    if np.linalg.norm(v) > 1 + tol.psd:
        raise VectorOutsideBall(f"|v| = {np.linalg.norm(v):.6g} > 1")
    return (I2 + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z) / 2


def operator_from_bloch(t: float, b) -> np.ndarray:
    """(t I + b.sigma) / 2 for an arbitrary real 3-vector ``b``."""
    return (t * I2 + b[0] * PAULI_X + b[1] * PAULI_Y + b[2] * PAULI_Z) / 2


def tensor_power(rho, n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    rho = as_square(rho)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if rho.shape[0] ** n > cap:
        raise DimensionCapExceeded(f"{rho.shape[0]}^{n} exceeds the cap {cap}")
    out = rho
    for _ in range(n - 1):
        out = np.kron(out, rho)
    return out


def tensor(*ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def partial_trace(rho, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one side of a bipartite operator; ``keep`` is ``"A"`` or ``"B"``."""
    rho = as_square(rho)
    da, db = dims
    if rho.shape[0] != da * db:
        raise DimensionMismatch(f"operator of dim {rho.shape[0]} is not {da}x{db}")
    r = rho.reshape(da, db, da, db)
    if keep.upper() == "A":
        return np.einsum("ijkj->ik", r)
    if keep.upper() == "B":
        return np.einsum("jijk->ik", r)
    raise ValueError("keep must be 'A' or 'B'")


def matrix_power_psd(a, exponent: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral power of a PSD operator, acting on the support only.

    Eigenvalues below ``tol.eig`` relative to the largest one are treated as kernel
    and map to zero for every exponent, so negative exponents give the
    support-restricted (pseudo-) inverse power.
    """
    a = _require_hermitian(as_square(a), tol.herm)
    w, v = np.linalg.eigh(a)
    top = max(float(w[-1]), 0.0)
    if w[0] < -tol.psd * max(1.0, top):
        raise NotPositive(f"smallest eigenvalue {w[0]:.3e} is negative")
    keep = w > tol.eig * top if top > 0 else np.zeros_like(w, dtype=bool)
    f = np.zeros_like(w)
    f[keep] = w[keep] ** exponent
    return (v * f) @ v.conj().T


def support_projector(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    return matrix_power_psd(a, 0.0, tol)


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    rho = validate_density(rho, tol)
    w = np.clip(np.linalg.eigvalsh(rho), 0, None)
    return shannon_entropy(w[w > tol.eig])


def check_distribution(p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.size == 0 or np.any(~np.isfinite(p)) or np.any(p < -tol.psd):
        raise NotDistribution("entries must be finite and non-negative")
    if abs(p.sum() - 1.0) > tol.trace:
        raise NotDistribution(f"entries sum to {p.sum()!r}")
    return np.clip(p, 0, None)


@dataclass(frozen=True)
class Ensemble:
    """Prior weights and states {q_i, rho_i}."""

    priors: np.ndarray
    states: tuple

    def __init__(self, priors: Sequence[float], states: Sequence, tol: Tolerances = DEFAULT_TOL):
        states = tuple(validate_density(s, tol) for s in states)
        if not states:
            raise ValueError("an ensemble needs at least one state")
        if len(priors) != len(states):
            raise DimensionMismatch(f"{len(priors)} priors for {len(states)} states")
        dims = {s.shape[0] for s in states}
        if len(dims) != 1:
            raise DimensionMismatch(f"states have mixed dimensions {sorted(dims)}")
        q = check_distribution(priors, tol)
        q.setflags(write=False)
        object.__setattr__(self, "priors", q)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_pure(cls, priors, vectors, tol: Tolerances = DEFAULT_TOL) -> "Ensemble":
        return cls(priors, [projector(v) for v in vectors], tol)

    @classmethod
    def from_bloch(cls, priors, vectors, tol: Tolerances = DEFAULT_TOL) -> "Ensemble":
        return cls(priors, [density_from_bloch(v, tol) for v in vectors], tol)

    @classmethod
    def uniform(cls, states, tol: Tolerances = DEFAULT_TOL) -> "Ensemble":
        return cls(np.full(len(states), 1.0 / len(states)), states, tol)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    @property
    def weighted(self) -> np.ndarray:
        """Stack of q_i rho_i, shape (N, d, d)."""
        return self.priors[:, None, None] * np.array(self.states)

    @property
    def average(self) -> np.ndarray:
        return self.weighted.sum(axis=0)

    def __eq__(self, other):
        if not isinstance(other, Ensemble):
            return NotImplemented
        return (
            len(self) == len(other)
            and np.array_equal(self.priors, other.priors)
            and all(np.array_equal(a, b) for a, b in zip(self.states, other.states))
        )

    __hash__ = None


@dataclass(frozen=True)
class Povm:
    """Positive operators summing to the identity."""

    elements: tuple

    def __init__(self, elements: Sequence, tol: Tolerances = DEFAULT_TOL):
        els = [as_square(m) for m in elements]
        if not els:
            raise ValueError("a POVM needs at least one element")
        d = els[0].shape[0]
        if any(m.shape != (d, d) for m in els):
            raise DimensionMismatch("POVM elements have different shapes")
        clean = []
        for k, m in enumerate(els):
            m = _require_hermitian(m, tol.herm)
            lo = np.linalg.eigvalsh(m)[0]
            if lo < -tol.psd:
                raise NotPositive(f"element {k} has eigenvalue {lo:.3e}")
            clean.append(_frozen(m))
        err = np.max(np.abs(sum(clean) - np.eye(d)))
        if err > tol.comp:
            raise IncompleteMeasurement(f"elements sum to identity only within {err:.3e}")
        object.__setattr__(self, "elements", tuple(clean))

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def stack(self) -> np.ndarray:
        return np.array(self.elements)

    __hash__ = None


def outcome_distribution(ensemble: Ensemble, povm: Povm, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Table p[i, k] = tr[M_k rho_i]."""
    if ensemble.dim != povm.dim:
        raise DimensionMismatch(f"states of dim {ensemble.dim}, POVM of dim {povm.dim}")
    p = np.einsum("kab,iba->ik", povm.stack, np.array(ensemble.states)).real
    if np.any(np.abs(p.sum(axis=1) - 1) > tol.comp):
        raise IncompleteMeasurement("outcome probabilities do not sum to one")
    return np.clip(p, 0.0, 1.0)
