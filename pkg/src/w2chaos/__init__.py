"""Cumulant discrepancies and 2-Wasserstein bounds for second-chaos laws."""
from .chaos_model import (BaseNoise, ChaosCoefficients, CumulantVector, QPolynomial, TargetSpec,
                          cumulant_gap_sum, cumulants_from_coefficients, delta, delta_via_cumulants,
                          delta_via_roots, quadratic_form_coefficients, theta_coefficients, trace_powers)
from .errors import DomainError, InvalidTargetError, NumericalStabilityError
from .matching import (BoundConstants, CertifiedBound, MatchingResult, alpha_x_constant, bound_constants,
                       certified_upper_bound, certified_w2_bound, d_sigma, delta_p_gap, delta_x_constant,
                       eta_and_adherence, rational_independence_probe)
from .transport import (CFPoint, SampleBatch, cf_lower_bound, char_fn, coupled_w2_upper,
                        cumulant_series_gap, empirical_kolmogorov, empirical_w2, logderiv_gap_circle,
                        sample_chaos, tail_probe)

__version__ = "0.1.0"
