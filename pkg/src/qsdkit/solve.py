"""Pick the most exact minimum-error solver for an ensemble."""

from __future__ import annotations

from .minerror import TAU_CERT, DiscriminationResult, helstrom_two_state, solve_fixed_point
from .operators import Ensemble
from .qubit import solve_qubit


def solve_min_error(ensemble: Ensemble, tol_cert: float = TAU_CERT, max_iter: int = 10_000) -> DiscriminationResult:
    """Helstrom for two states, the enclosing-ball solver for qubits, fixed point otherwise."""
    if len(ensemble) == 2:
        return helstrom_two_state(ensemble, tol_cert=tol_cert)
    if ensemble.dim == 2:
        return solve_qubit(ensemble, tol_cert).result
    return solve_fixed_point(ensemble, max_iter=max_iter, tol_cert=tol_cert)
