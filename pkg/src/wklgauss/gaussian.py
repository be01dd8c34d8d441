"""Multivariate Gaussian type, sampling, empirical statistics and classical KL."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotPositiveDefinite
from .symmat import SymMatrix, SpectralDecomp, sym_eig

# Sampling is blocked so that concurrent producers can partition the sample
# index range; block b draws from an independent substream seeded by
# (seed, b).  Results depend on (seed, count, block_size) only.
DEFAULT_BLOCK_SIZE = 1 << 14

_PD_REL_TOL = 1e-12


class Gaussian:
    """A nondegenerate Gaussian N(mean, cov) with strictly PD covariance.

    The covariance is validated on construction: its smallest eigenvalue must
    exceed 1e-12 * max(1, largest eigenvalue).
    """

    __slots__ = ("mean", "cov", "_decomp")

    def __init__(self, mean, cov):
        self.mean = np.asarray(mean, dtype=float)
        if self.mean.ndim != 1:
            raise InvalidInput(f"mean must be a vector, got shape {self.mean.shape}")
        if not np.all(np.isfinite(self.mean)):
            raise InvalidInput("mean must be finite")
        self.cov = cov if isinstance(cov, SymMatrix) else SymMatrix(cov)
        if self.cov.dim != self.mean.shape[0]:
            raise InvalidInput(
                f"mean has length {self.mean.shape[0]} but cov is {self.cov.dim}x{self.cov.dim}")
        self._decomp = sym_eig(self.cov)
        lam = self._decomp.eigvals
        if not (np.min(lam) > _PD_REL_TOL * max(1.0, float(np.max(lam)))):
            raise NotPositiveDefinite(
                f"covariance is not positive definite (min eigenvalue {np.min(lam):.3e})")

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def cov_decomp(self) -> SpectralDecomp:
        return self._decomp

    def to_dict(self) -> dict:
        """JSON-ready representation {"mean": [...], "cov": [[...], ...]}."""
        return {"mean": self.mean.tolist(), "cov": self.cov.entries.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Gaussian":
        if not isinstance(d, dict) or "mean" not in d or "cov" not in d:
            raise InvalidInput("Gaussian JSON object must have 'mean' and 'cov' fields")
        try:
            mean = np.asarray(d["mean"], dtype=float)
            cov = np.asarray(d["cov"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"non-numeric or ragged Gaussian data: {exc}") from None
        return cls(mean, cov)

    def __repr__(self):
        return f"Gaussian(mean={self.mean!r}, cov={self.cov.entries!r})"


@dataclass(frozen=True)
class SampleStats:
    """Unbiased empirical mean and covariance of a sample set."""

    n_samples: int
    emp_mean: np.ndarray
    emp_cov: SymMatrix


def kl_divergence(p: Gaussian, q: Gaussian) -> float:
    """Classical KL-divergence KL(p || q) between Gaussians.

    Returns (1/2)[tr(Sq^-1 Sp) - n + (mq-mp)^T Sq^-1 (mq-mp) + ln det Sq/det Sp].
    """
    if p.dim != q.dim:
        raise InvalidInput(f"dimension mismatch: {p.dim} vs {q.dim}")
    dq = q.cov_decomp()
    dp = p.cov_decomp()
    q_inv = dq.apply(lambda lam: 1.0 / lam)
    diff = q.mean - p.mean
    trace = float(np.sum(q_inv * p.cov.entries))  # tr(AB) for symmetric A, B
    quad = float(diff @ q_inv @ diff)
    logdet = float(np.sum(np.log(dq.eigvals)) - np.sum(np.log(dp.eigvals)))
    return 0.5 * (trace - p.dim + quad + logdet)


def sample(g: Gaussian, count: int, seed: int,
           block_size: int = DEFAULT_BLOCK_SIZE) -> np.ndarray:
    """Draw i.i.d. samples from g as a (count, dim) array.

    Samples are mean + z S^{1/2} with S^{1/2} the symmetric square root of the
    covariance and z standard normal from numpy's PCG64 generator, so output
    is bit-reproducible for fixed (seed, count, block_size) on any platform.
    """
    if count < 1:
        raise InvalidInput("count must be >= 1")
    if seed < 0:
        raise InvalidInput("seed must be a nonnegative integer")
    if block_size < 1:
        raise InvalidInput("block_size must be >= 1")
    root = g.cov_decomp().apply(np.sqrt)
    out = np.empty((count, g.dim))
    for block, start in enumerate(range(0, count, block_size)):
        stop = min(start + block_size, count)
        rng = np.random.default_rng((seed, block))
        z = rng.standard_normal((stop - start, g.dim))
        out[start:stop] = g.mean + z @ root
    return out


def stats(samples) -> SampleStats:
    """Unbiased empirical mean and covariance (divisor n-1) of row vectors."""
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 2:
        raise InvalidInput("need at least 2 samples of equal dimension")
    n = x.shape[0]
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    return SampleStats(n_samples=n, emp_mean=mean, emp_cov=SymMatrix(cov))
