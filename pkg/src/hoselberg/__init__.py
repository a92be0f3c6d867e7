"""Type-A_n hypergeometric series, pattern integrals and Selberg-type closed forms."""

__version__ = "0.1.0"

from .errors import (AccuracyError, ConvergenceError, DegenerateParameterError, DimensionMismatchError,
                     DivergentIntegralError, DivergentWeightError, EmptyDomainError, HoselbergError,
                     InvalidRankError, OutsideChamberError, PoleError, ResonanceError)
from .roots import (RootSystem, WeylElement, build_root_system, check_weight, delta, pairing, rho, row_root,
                    weighted_half_sum, weyl_act, weyl_group, weyl_length)
from .special import (ClosedFormValue, a_coefficient, gamma, log_beta, log_gamma, opdam_value,
                      rank_one_conversion_factor, selberg_rhs)
from .series import (FormalSeries, RadialOperatorParams, apply_radial_operator, coefficient_deviation,
                     eigen_defect, eigenvalue, evaluate_at_one, evaluate_phi, hc_coefficients,
                     transformation_image)
from .quadrature import (IteratedDomain, JacobiRule, ProductIntegrand, QuadratureSpec, QuadResult,
                         gauss_jacobi, integrate_interval, integrate_iterated)
from .patterns import (IntegrandSpec, Pattern, PatternDomain, asymptotic_solution_numeric, build_integrand,
                       eigen_residual, identity_cycle, leading_exponent_numeric, selberg_lhs)
from .report import Report
from .checks import CheckRequest, run_check, run_suite

__all__ = [name for name in dir() if not name.startswith("_")]
