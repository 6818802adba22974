"""Recovery of exponential signals from partial samples by Hankel completion
with per-column Vandermonde structure, plus a nuclear-norm baseline, ESPRIT
parameter estimation and experiment drivers."""
from .errors import ConfigError, DimensionError, ModelError, NumericalError, RankError
from .esprit import estimate, estimation_success, parameter_errors
from .hankel import HankelShape, antidiag_weights, default_square_shape, hankel_adjoint, hankel_pinv, hankelize
from .lrhm import LrhmConfig, solve_lrhm
from .metrics import recovery_success, rlne, snr_db
from .signals import (
    ExponentialModel,
    ObservationSet,
    add_noise,
    normalize,
    random_mask,
    random_model,
    synthesize,
    vandermonde_factor,
)
from .solver import SolverConfig, SolverReport, solve
from .svt import nuclear_norm, soft_threshold_singular_values

__version__ = "0.1.0"
