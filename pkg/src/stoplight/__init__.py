"""Queue length and its running maximum at a periodic two-phase traffic light."""

from .errors import *
from .walk import (EXACT, FLOAT, JointTable, DistVector, Params, PhaseKind, joint_dist,
                   make_params, max_dist, moment, s_marginal, validate_params)
from .series import Series, max_gf_coeffs, theta_series
from .ell2 import appendix_cascade, closed_form_g, quartic_zeros
from .stationary import stationary_model, stationary_moments, stationary_pmf
from .asymptotics import catalan_constant, convergence_report, limit_constants, sech_sum
from .montecarlo import SimConfig, estimate_moments, simulate_path, universality_experiment
