"""Numerical library for the subelliptic heat kernel on SU(2).

Heat kernel representations (spectral, integral, cut-locus closed form),
Carnot-Caratheodory distance, Heisenberg dilation limits, functional
inequality constants/verifiers, and a Lie-group Monte Carlo oracle.
"""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DegenerateChartWarning, DomainError,
                     NegativeCurvatureTerm, NoBracketError, OverflowGuard,
                     PoleAtOrigin, QuadratureNotConverged, SingularAtBoundary,
                     SlowDecayError, Su2HeatError, TruncationCapError)
from .geometry import (CylCoord, GroupElement, Jet2, apply_generator,
                       from_matrix, gamma, gamma2, to_matrix)
from .quadrature import QuadratureSpec, haar_integrate
from .su2_kernel import (KernelEval, KernelRep, TruncationPlan, green_function,
                         laplace_check, phi_ratio, pt, pt_cutlocus, pt_diagonal,
                         pt_integral, pt_spectral, pt_spectral_jet,
                         pt_star_shifted)
from .distance import DistanceResult, cc_distance, loglimit_distance, \
    small_time_asymptotic, theta_star
from .heisenberg import HeisPoint, dilation_limit_error, gaveau_kernel, heis_gamma
from .inequalities import (VerifyReport, a_const, c_const,
                           first_gradient_bound_check, grad_log_kernel_ratio,
                           harnack_ratio, lemma_limit_moment, li_yau_check,
                           li_yau_exponential_check, lp_bound_probe,
                           reverse_poincare_check)
from .sampler import Histogram2D, MCConfig, empirical_density, simulate_paths
