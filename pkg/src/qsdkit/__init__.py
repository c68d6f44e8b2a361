"""Quantum state discrimination toolkit with certified optimal measurements."""

from .errors import *  # noqa: F401,F403
from .operators import Ensemble, Povm, Tolerances, DEFAULT_TOL
from .minerror import (
    DiscriminationResult,
    OptimalityCertificate,
    check_optimality,
    helstrom_two_state,
    solve_fixed_point,
    square_root_measurement,
    gu_ensemble,
    gu_guessing_probability,
    mirror_symmetric_guess,
    classical_guess,
    general_form_report,
)
from .qubit import solve_qubit, min_enclosing_ball_of_balls, dual_reduction, reconstruct_povm
from .solve import solve_min_error

__version__ = "0.1.0"
