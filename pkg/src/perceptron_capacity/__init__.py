"""Storage-capacity bounds for the spherical perceptron when a fraction of patterns may be stored incorrectly."""

__version__ = "0.1.0"

from .classic import alpha_c, f_gar, i_sph, neg_lift_capacity
from .error_capacity import (
    alpha_from_threshold,
    alpha_upper,
    f_err_hat,
    f_wb_from_alpha,
    gardner_x,
    nu_hat,
)
from .exceptions import (
    BracketError,
    CapacityError,
    CombinatorialBlowupError,
    ConvergenceError,
    DomainError,
)
from .lifted import alpha_lower_lifted, i_wb_1, i_wb_hat, lift_aux, xi_lift
from .types import CapacityResult, LiftPoint, PerceptronParams

__all__ = [
    "__version__",
    "alpha_c",
    "f_gar",
    "i_sph",
    "neg_lift_capacity",
    "alpha_from_threshold",
    "alpha_upper",
    "f_err_hat",
    "f_wb_from_alpha",
    "gardner_x",
    "nu_hat",
    "BracketError",
    "CapacityError",
    "CombinatorialBlowupError",
    "ConvergenceError",
    "DomainError",
    "alpha_lower_lifted",
    "i_wb_1",
    "i_wb_hat",
    "lift_aux",
    "xi_lift",
    "CapacityResult",
    "LiftPoint",
    "PerceptronParams",
]
