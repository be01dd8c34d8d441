"""Wasserstein KL-divergence between multivariate Gaussians.

Closed-form evaluation with a term-by-term breakdown, the quadratic transport
potential and gradient flow behind it, and independent Monte-Carlo / ODE /
quadrature verification of the formulas.
"""

from .errors import InvalidInput, NotPositiveDefinite, PreconditionViolated
from .gaussian import Gaussian, SampleStats, kl_divergence, sample, stats
from .oracle import (McEstimate, PushforwardResult, QuadratureRule,
                     inner_integral_quad, mc_wkl, pushforward_check,
                     random_pair, rk4_flow)
from .symmat import (RankTolerance, SpectralDecomp, SymMatrix, apply_spectral,
                     stable_fn, sym_eig)
from .transport import (QuadraticPotential, TransportSolution, flow, gradient,
                        potential_value, solve_potential, time_integral,
                        transport_ratio)
from .wkl import WklBreakdown, wkl_commuting, wkl_divergence, wkl_univariate

__version__ = "0.1.0"

__all__ = [
    "InvalidInput", "NotPositiveDefinite", "PreconditionViolated",
    "SymMatrix", "SpectralDecomp", "RankTolerance",
    "sym_eig", "apply_spectral", "stable_fn",
    "Gaussian", "SampleStats", "kl_divergence", "sample", "stats",
    "QuadraticPotential", "TransportSolution", "transport_ratio",
    "solve_potential", "flow", "potential_value", "gradient", "time_integral",
    "WklBreakdown", "wkl_divergence", "wkl_commuting", "wkl_univariate",
    "McEstimate", "QuadratureRule", "PushforwardResult", "rk4_flow",
    "inner_integral_quad", "mc_wkl", "pushforward_check", "random_pair",
]
