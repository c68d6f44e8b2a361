"""Seeded random states, ensembles and unitaries for the randomized test suites."""

from __future__ import annotations

import numpy as np

from .operators import Ensemble


def random_pure(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Induced-measure mixed state (Ginibre with ``rank`` columns)."""
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_ensemble(
    n: int,
    d: int,
    rng: np.random.Generator,
    pure_fraction: float = 0.5,
    equal_priors: bool = False,
) -> Ensemble:
    states = [random_pure(d, rng) if rng.random() < pure_fraction else random_density(d, rng) for _ in range(n)]
    priors = np.full(n, 1.0 / n) if equal_priors else rng.dirichlet(np.ones(n))
    return Ensemble(priors, states)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
