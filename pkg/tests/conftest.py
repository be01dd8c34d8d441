"""Shared random-instance generators for the test suite.

All generators are condition-bounded (covariance eigenvalues kept away from 0
and infinity) so the residual and CLT tolerances asserted by the tests are
honest for double precision.
"""

import numpy as np

from wklgauss import Gaussian, QuadraticPotential, SymMatrix, sym_eig


def rand_orthogonal(rng, dim):
    """Random orthogonal matrix from the spectral basis of a random symmetric one."""
    return sym_eig(rng.standard_normal((dim, dim))).eigvecs


def rand_spd(rng, dim, eig_range=(0.1, 10.0)):
    u = rand_orthogonal(rng, dim)
    return SymMatrix((u * rng.uniform(*eig_range, size=dim)) @ u.T)


def rand_symmetric(rng, dim, scale=1.0):
    return SymMatrix(scale * rng.standard_normal((dim, dim)))


def rand_gaussian(rng, dim, eig_range=(0.1, 10.0), mean_range=(-3.0, 3.0)):
    return Gaussian(rng.uniform(*mean_range, size=dim), rand_spd(rng, dim, eig_range))


def rand_gaussian_pair(rng, dim, eig_range=(0.1, 10.0), mean_range=(-3.0, 3.0)):
    return (rand_gaussian(rng, dim, eig_range, mean_range),
            rand_gaussian(rng, dim, eig_range, mean_range))


def rand_potential(rng, dim, eig_range=(-2.0, 2.0), linear_range=(-2.0, 2.0)):
    u = rand_orthogonal(rng, dim)
    hessian = (u * rng.uniform(*eig_range, size=dim)) @ u.T
    return QuadraticPotential(hessian, rng.uniform(*linear_range, size=dim))


def commuting_pair(rng, dim, eig_range=(0.1, 10.0), mean_range=(-3.0, 3.0)):
    """Two Gaussians whose covariances share an eigenbasis (hence commute)."""
    u = rand_orthogonal(rng, dim)
    cov0 = (u * rng.uniform(*eig_range, size=dim)) @ u.T
    cov1 = (u * rng.uniform(*eig_range, size=dim)) @ u.T
    return (Gaussian(rng.uniform(*mean_range, size=dim), cov0),
            Gaussian(rng.uniform(*mean_range, size=dim), cov1))
