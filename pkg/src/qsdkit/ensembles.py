"""Named qubit ensembles used throughout the examples and tests."""

from __future__ import annotations

import numpy as np

from .operators import Ensemble

_W = np.exp(2j * np.pi / 3)
PLUS = np.array([1, 1]) / np.sqrt(2)
MINUS = np.array([1, -1]) / np.sqrt(2)


def trine_vectors(theta0: float = np.pi / 4) -> list[np.ndarray]:
    """cos(theta0)|0> + w^k sin(theta0)|1> with phases w, 1, w^-1 (w = exp(2 pi i / 3))."""
    c, s = np.cos(theta0), np.sin(theta0)
    return [np.array([c, ph * s]) for ph in (_W, 1.0, np.conj(_W))]


def trine(theta0: float = np.pi / 4) -> Ensemble:
    """Equiprobable trine at Hilbert-space latitude ``theta0``; pi/4 lies on the equator."""
    return Ensemble.from_pure(np.full(3, 1 / 3), trine_vectors(theta0))


def trine_measurement_vectors() -> list[np.ndarray]:
    """Equatorial directions (|0> + e^{i phi}|1>)/sqrt2 for phi = 0, 2pi/3, -2pi/3."""
    return [np.array([1, ph]) / np.sqrt(2) for ph in (1.0, _W, np.conj(_W))]


def isosceles(theta0: float, theta: float) -> Ensemble:
    """Three equiprobable real states at Bloch polar angles theta0 + theta, theta0, theta0 - theta.

    ``theta`` is the Bloch-sphere half-opening of the triangle at the middle state.
    """
    vecs = [
        np.array([np.cos((theta0 + theta) / 2), np.sin((theta0 + theta) / 2)]),
        np.array([np.cos(theta0 / 2), np.sin(theta0 / 2)]),
        np.array([np.cos((theta0 - theta) / 2), np.sin((theta0 - theta) / 2)]),
    ]
    return Ensemble.from_pure(np.full(3, 1 / 3), vecs)


def isosceles_guess(theta: float) -> float:
    """Optimal guess for the isosceles triple as a function of the Bloch half-opening."""
    if theta <= np.pi / 2:
        return (1 + np.sin(theta)) / 3
    return 2 / 3


def mirror_vectors(theta: float) -> list[np.ndarray]:
    return [np.cos(theta) * PLUS + np.sin(theta) * MINUS, np.cos(theta) * PLUS - np.sin(theta) * MINUS, PLUS.copy()]


def mirror_ensemble(p: float, theta: float) -> Ensemble:
    """Mirror-symmetric triple with priors (p, p, 1 - 2p)."""
    return Ensemble.from_pure([p, p, 1 - 2 * p], mirror_vectors(theta))


def equatorial(n: int) -> Ensemble:
    """n equiprobable pure states spread uniformly on the Bloch equator."""
    phis = 2 * np.pi * np.arange(n) / n
    return Ensemble.from_pure(np.full(n, 1 / n), [np.array([1, np.exp(1j * f)]) / np.sqrt(2) for f in phis])


def pure_pair(overlap: float, priors=(0.5, 0.5)) -> Ensemble:
    """Two real pure states with the given non-negative overlap, symmetric about |0>+|1>."""
    beta = np.arccos(overlap) / 2
    a = np.pi / 4 - beta
    b = np.pi / 4 + beta
    return Ensemble.from_pure(priors, [np.array([np.cos(a), np.sin(a)]), np.array([np.cos(b), np.sin(b)])])
