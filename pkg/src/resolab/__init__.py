"""Resonances of a two-channel Schrodinger system near a transversal crossing.

The package pairs semiclassical width and position formulas with a
complex-distortion shooting solver that finds the same resonances
numerically, and a sweep harness that compares the two over a grid of
``h`` values.
"""

from .action import ActionData, action, action_derivatives, bohr_sommerfeld_energy, turning_points
from .asymptotics import (Resonance, im_g, k_window, lambda_k, predict_reduced, predict_thm1,
                          predict_thm2)
from .coupled_solver import build_mesh, propagate_basis, wronskian
from .crossing_integrals import SlopePair, crossing_integrals, mu, nu, nu_sum
from .errors import (ConfigError, ConsistencyError, ConvergenceError, DegenerateBasisError,
                     DomainError, InconclusiveCountError, InsufficientDataError, MisuseError,
                     RangeError, ResolabError, StiffnessError)
from .finder import SearchBox, count_zeros, find_resonances, seedless_search
from .model import CrossingModel, DistortionContour, default_contour, default_model, validate
from .specfun import airy_eval

__version__ = "0.1.0"

__all__ = [
    "ActionData", "action", "action_derivatives", "bohr_sommerfeld_energy", "turning_points",
    "Resonance", "im_g", "k_window", "lambda_k", "predict_reduced", "predict_thm1",
    "predict_thm2", "build_mesh", "propagate_basis", "wronskian", "SlopePair",
    "crossing_integrals", "mu", "nu", "nu_sum", "ConfigError", "ConsistencyError",
    "ConvergenceError", "DegenerateBasisError", "DomainError", "InconclusiveCountError",
    "InsufficientDataError", "MisuseError", "RangeError", "ResolabError", "StiffnessError",
    "SearchBox", "count_zeros", "find_resonances", "seedless_search", "CrossingModel",
    "DistortionContour", "default_contour", "default_model", "validate", "airy_eval",
]
