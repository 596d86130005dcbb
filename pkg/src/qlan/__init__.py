"""Simulation toolkit for low-rank qudit state estimation: local models, Gaussian limits,
thresholded tomography, linear functionals and Schur-Weyl checks."""

from .errors import QlanError
from .local import CenterState, LocalParams, local_state, theta_loss
from .states import DensityMatrix, Observable, Povm, validate_state
from .tolerance import DEFAULT_TOL, Tolerance

__version__ = "0.1.0"

__all__ = [
    "CenterState",
    "DEFAULT_TOL",
    "DensityMatrix",
    "LocalParams",
    "Observable",
    "Povm",
    "QlanError",
    "Tolerance",
    "local_state",
    "theta_loss",
    "validate_state",
]
