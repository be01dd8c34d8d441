"""Quadratic transport potentials and their gradient flow.

Given two Gaussians there is a unique quadratic potential whose unit-time
gradient flow pushes the first onto the second.  This module solves for that
potential, evaluates the flow in closed form, and computes the inner time
integral of the divergence along it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPositiveDefinite
from .gaussian import Gaussian
from .symmat import SymMatrix, fn_k, fn_m, fn_m1, fn_m2, sym_eig

_PD_REL_TOL = 1e-12


class QuadraticPotential:
    """Potential f(x) = (1/2) x^T H x + l^T x with symmetric hessian H."""

    __slots__ = ("hessian", "linear")

    def __init__(self, hessian, linear):
        self.hessian = hessian if isinstance(hessian, SymMatrix) else SymMatrix(hessian)
        self.linear = np.asarray(linear, dtype=float)
        if self.linear.ndim != 1 or self.linear.shape[0] != self.hessian.dim:
            raise InvalidInput("linear term must be a vector matching the hessian dimension")
        if not np.all(np.isfinite(self.linear)):
            raise InvalidInput("linear term must be finite")

    @property
    def dim(self) -> int:
        return self.hessian.dim

    def __repr__(self):
        return f"QuadraticPotential(hessian={self.hessian.entries!r}, linear={self.linear!r})"


@dataclass(frozen=True)
class TransportSolution:
    """Solved transport potential plus the residuals of the defining equations.

    ratio is the positive-definite solution R of R cov0 R = cov1 (so the
    potential's hessian is log R).  riccati_residual and mean_residual are the
    relative errors of the covariance and mean transport identities; both
    should be at the rounding level (<= 1e-8) for well-conditioned inputs.
    """

    potential: QuadraticPotential
    ratio: SymMatrix
    riccati_residual: float
    mean_residual: float


def _pd_decomp(matrix, what: str):
    decomp = sym_eig(matrix)
    lam = decomp.eigvals
    if not (np.min(lam) > _PD_REL_TOL * max(1.0, float(np.max(lam)))):
        raise NotPositiveDefinite(f"{what} is not positive definite")
    return decomp


def transport_ratio(cov0, cov1) -> SymMatrix:
    """Unique positive-definite R with R cov0 R = cov1.

    Computed as cov0^{-1/2} (cov0^{1/2} cov1 cov0^{1/2})^{1/2} cov0^{-1/2}.
    """
    d0 = _pd_decomp(cov0, "cov0")
    s1 = np.asarray(cov1 if isinstance(cov1, SymMatrix) else SymMatrix(cov1))
    if s1.shape[0] != d0.eigvals.shape[0]:
        raise InvalidInput("covariance dimensions do not match")
    half = d0.apply(np.sqrt)
    inv_half = d0.apply(lambda lam: 1.0 / np.sqrt(lam))
    inner = _pd_decomp(half @ s1 @ half, "cov1")  # congruent to cov1, same definiteness
    root = inner.apply(np.sqrt)
    return SymMatrix(inv_half @ root @ inv_half)


def solve_potential(mu: Gaussian, nu: Gaussian) -> TransportSolution:
    """Quadratic potential whose unit-time gradient flow maps mu onto nu.

    The hessian is log of the transport ratio R; the linear term solves
    K b = mean1 - R mean0 where K has eigen-function k(a) = (e^a - 1)/a on the
    hessian's spectrum.  k is positive everywhere (k(0) = 1), so the solve
    needs no rank decision.  The solution is unique among quadratics.
    """
    if mu.dim != nu.dim:
        raise InvalidInput(f"dimension mismatch: {mu.dim} vs {nu.dim}")
    ratio = transport_ratio(mu.cov, nu.cov)
    dr = sym_eig(ratio)
    log_vals = np.log(dr.eigvals)
    hessian = SymMatrix(dr.reconstruct(log_vals))

    rhs = nu.mean - ratio.entries @ mu.mean
    u = dr.eigvecs
    b = u @ ((u.T @ rhs) / fn_k(log_vals))
    potential = QuadraticPotential(hessian, b)

    pushed_cov = ratio.entries @ mu.cov.entries @ ratio.entries
    riccati_residual = float(
        np.linalg.norm(pushed_cov - nu.cov.entries) / np.linalg.norm(nu.cov.entries))
    k_mat = dr.reconstruct(fn_k(log_vals))
    pushed_mean = ratio.entries @ mu.mean + k_mat @ b
    mean_residual = float(
        np.linalg.norm(pushed_mean - nu.mean) / max(1.0, np.linalg.norm(nu.mean)))

    return TransportSolution(potential=potential, ratio=ratio,
                             riccati_residual=riccati_residual,
                             mean_residual=mean_residual)


def potential_value(p: QuadraticPotential, x) -> float | np.ndarray:
    """f(x); accepts a single vector or a (m, dim) batch of row vectors."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = _check_points(p, arr)
    vals = 0.5 * np.einsum("ij,jk,ik->i", pts, p.hessian.entries, pts) + pts @ p.linear
    return float(vals[0]) if single else vals


def gradient(p: QuadraticPotential, x) -> np.ndarray:
    """grad f(x) = H x + l; accepts a vector or a batch of row vectors."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = _check_points(p, arr)
    out = pts @ p.hessian.entries + p.linear
    return out[0] if single else out


def flow(p: QuadraticPotential, t: float, x0) -> np.ndarray:
    """Closed-form gradient-flow map at time t.

    x(t) = e^{Ht} x0 + t k(Ht) l evaluated spectrally, where k(a) = (e^a-1)/a;
    exact for quadratic potentials and the identity at t = 0.  Accepts a
    single vector or a (m, dim) batch.
    """
    arr = np.asarray(x0, dtype=float)
    single = arr.ndim == 1
    pts = _check_points(p, arr)
    d = sym_eig(p.hessian)
    at = d.eigvals * t
    u = d.eigvecs
    moved = ((pts @ u) * np.exp(at)) @ u.T
    drift = u @ (t * fn_k(at) * (u.T @ p.linear))
    out = moved + drift
    return out[0] if single else out


def time_integral(p: QuadraticPotential, x0) -> float | np.ndarray:
    """Integral over t in [0,1] of f(flow at time 1) - f(flow at time t).

    Evaluated in the singularity-free grouping
        (1/4) x0^T m(H) x0 + (1/2) x0^T m1(H) l + (1/4) l^T m2(H) l
    whose eigen-functions are continuous in the hessian's spectrum (m2(0) = 2
    accounts exactly for the drift contribution on the null space).  Accepts
    a single vector or a batch; always >= 0.
    """
    arr = np.asarray(x0, dtype=float)
    single = arr.ndim == 1
    pts = _check_points(p, arr)
    d = sym_eig(p.hessian)
    u = d.eigvecs
    z = pts @ u
    c = u.T @ p.linear
    vals = (0.25 * ((z * z) @ fn_m(d.eigvals))
            + 0.5 * (z @ (fn_m1(d.eigvals) * c))
            + 0.25 * float((c * c) @ fn_m2(d.eigvals)))
    return float(vals[0]) if single else vals


def _check_points(p: QuadraticPotential, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != p.dim:
        raise InvalidInput(f"points must have dimension {p.dim}")
    return arr
