"""Gauss sums, theta near the real axis, and local behaviour of Riemann's function."""

from .contfrac import CertifiedReal, alpha_from_tau, cf_expand, tau_estimate, tau_sequence, tau_test_number
from .hoelder import HoelderFit, WitnessReport, estimate_alpha, predicted_alpha, witness_check
from .local import (
    RationalExpansion,
    TwistedPhi,
    asymptotic_terms,
    classify_re_behavior,
    expansion_constants,
    is_differentiable_f,
    remainder,
    twisted_phi_eval,
)
from .numtheory import (
    Rational,
    epsilon,
    gauss_sum_brute,
    gauss_sum_closed,
    gauss_sum_general,
    gauss_sum_general_brute,
    jacobi_symbol,
)
from .phi import (
    PhiIncrement,
    phi_derivative_identity_check,
    phi_increment_contour,
    phi_increment_series,
    phi_series,
    riemann_f,
)
from .precision import ComplexHP, PrecisionError
from .theta import ThetaResult, UpperHalfPoint, theta_auto, theta_direct, theta_near_rational

__version__ = "0.1.0"
