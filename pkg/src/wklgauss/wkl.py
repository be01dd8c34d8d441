"""Closed-form Wasserstein KL-divergence between Gaussians.

The divergence splits into a trace term, which measures the covariance
mismatch, and a mean term, which weights the mean difference by a spectral
function of the covariance ratio.  Unlike the classical KL-divergence it
stays finite and proportional to the squared mean distance as the
covariances shrink, so it respects the geometry of the sample space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, PreconditionViolated
from .gaussian import Gaussian
from .symmat import SymMatrix, fn_m, fn_q, fn_w, stable_fn, sym_eig
from .transport import transport_ratio

_COMMUTE_REL_TOL = 1e-10


@dataclass(frozen=True)
class WklBreakdown:
    """Divergence value with its two terms and the intermediate matrices.

    total == trace_term + mean_term holds exactly by construction.  ratio is
    the covariance transport ratio R (R cov0 R = cov1); spread_weight is the
    positive semi-definite matrix weighting the covariance square-root
    difference in the commuting form; mean_weight is its continuous
    completion, the positive-definite matrix weighting the mean difference.
    """

    total: float
    trace_term: float
    mean_term: float
    ratio: SymMatrix
    spread_weight: SymMatrix
    mean_weight: SymMatrix


def _breakdown(mu: Gaussian, nu: Gaussian, trace_term: float, ratio, decomp) -> WklBreakdown:
    spread_weight = SymMatrix(decomp.reconstruct(fn_q(decomp.eigvals)))
    mean_weight = SymMatrix(decomp.reconstruct(fn_w(decomp.eigvals)))
    diff = nu.mean - mu.mean
    mean_term = 0.25 * float(diff @ mean_weight.entries @ diff)
    return WklBreakdown(total=trace_term + mean_term, trace_term=trace_term,
                        mean_term=mean_term, ratio=ratio,
                        spread_weight=spread_weight, mean_weight=mean_weight)


def wkl_divergence(mu: Gaussian, nu: Gaussian) -> WklBreakdown:
    """Wasserstein KL-divergence from mu to nu, general covariances.

    The trace term is (1/4) tr((log(R^2) R^2 - R^2 + I) cov0) with R the
    transport ratio, evaluated by an explicit matrix product since R and cov0
    need not commute; the mean term is (1/4) (m1-m0)^T W (m1-m0) with W the
    mean-weight matrix.
    """
    if mu.dim != nu.dim:
        raise InvalidInput(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    ratio = transport_ratio(mu.cov, nu.cov)
    decomp = sym_eig(ratio)
    # log(R^2) R^2 - R^2 + I has eigen-function m(log r) = 2a e^{2a} - e^{2a} + 1
    growth_gap = decomp.reconstruct(fn_m(np.log(decomp.eigvals)))
    trace_term = 0.25 * float(np.sum(growth_gap * mu.cov.entries))
    return _breakdown(mu, nu, trace_term, ratio, decomp)


def wkl_commuting(mu: Gaussian, nu: Gaussian) -> WklBreakdown:
    """Simplified form valid when the covariances commute.

    The trace term becomes (1/4) || sqrt(Q) (sqrt(cov1) - sqrt(cov0)) ||_F^2
    with Q the spread-weight matrix; it must equal the general form on
    commuting inputs.  Raises PreconditionViolated for non-commuting
    covariances (use wkl_divergence there).
    """
    if mu.dim != nu.dim:
        raise InvalidInput(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    s0, s1 = mu.cov.entries, nu.cov.entries
    commutator = np.linalg.norm(s0 @ s1 - s1 @ s0)
    if commutator > _COMMUTE_REL_TOL * np.linalg.norm(s0) * np.linalg.norm(s1):
        raise PreconditionViolated("covariances do not commute")
    ratio = transport_ratio(mu.cov, nu.cov)
    decomp = sym_eig(ratio)
    q_mat = decomp.reconstruct(fn_q(decomp.eigvals))
    root_diff = sym_eig(nu.cov).apply(np.sqrt) - sym_eig(mu.cov).apply(np.sqrt)
    # ||sqrt(Q) X||_F^2 = tr(Q X^2) for symmetric X
    trace_term = 0.25 * float(np.sum(q_mat * (root_diff @ root_diff)))
    return _breakdown(mu, nu, trace_term, ratio, decomp)


def wkl_univariate(mu0: float, sigma0: float, mu1: float, sigma1: float) -> float:
    """Scalar fast path for univariate Gaussians N(mu0, sigma0^2), N(mu1, sigma1^2).

    Equals w(sigma1/sigma0) * ((sigma1 - sigma0)^2 + (mu1 - mu0)^2) / 4, which
    reproduces the case-split closed form for sigma0 != sigma1 and attains the
    limit (mu1 - mu0)^2 / 2 continuously as sigma1 -> sigma0 (the same series
    switchover as the multivariate path, so the two agree to ~1e-12).
    """
    if not (np.isfinite(sigma0) and np.isfinite(sigma1) and sigma0 > 0 and sigma1 > 0):
        raise InvalidInput("standard deviations must be positive and finite")
    if not (np.isfinite(mu0) and np.isfinite(mu1)):
        raise InvalidInput("means must be finite")
    weight = stable_fn("w", sigma1 / sigma0)
    return 0.25 * weight * ((sigma1 - sigma0) ** 2 + (mu1 - mu0) ** 2)
