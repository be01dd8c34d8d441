"""Independent numerical verification of the closed forms.

Nothing here trusts the closed-form divergence algebra: the gradient flow can
be integrated by Runge-Kutta instead of its closed form, the inner time
integral is done by Gauss-Legendre quadrature, and the defining double
integral is estimated by Monte-Carlo over the source Gaussian.  Agreement of
these estimates with the formula is the package's correctness certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .gaussian import Gaussian, SampleStats, sample, stats
from .symmat import sym_eig
from .transport import QuadraticPotential, flow, potential_value, solve_potential

DEFAULT_QUAD_NODES = 16
DEFAULT_RK4_STEPS = 200


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integration over (0, 1); weights sum to 1."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size < 1:
            raise InvalidInput("nodes and weights must be 1-d arrays of equal length")
        if np.any(nodes <= 0) or np.any(nodes >= 1) or np.any(weights <= 0):
            raise InvalidInput("nodes must lie in (0, 1) and weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def gauss_legendre(cls, order: int) -> "QuadratureRule":
        """k-node Gauss-Legendre rule mapped to [0, 1] (exact to degree 2k-1)."""
        if order < 1:
            raise InvalidInput("order must be >= 1")
        x, w = np.polynomial.legendre.leggauss(order)
        return cls(nodes=(x + 1.0) / 2.0, weights=w / 2.0)


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo estimate with its standard error and reproducibility seed."""

    mean: float
    stderr: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class PushforwardResult:
    """Empirical statistics of flowed samples checked against the target."""

    sample_stats: SampleStats
    mean_err: float
    mean_bound: float
    cov_err: float
    cov_bound: float
    passed: bool


def rk4_flow(p: QuadraticPotential, x0, t_end, steps: int) -> np.ndarray:
    """Classical 4th-order Runge-Kutta integration of the gradient flow.

    x0 may be a vector or a (m, dim) batch; t_end may be a scalar or a
    per-row array (each row integrated to its own end time with the same
    number of steps).  Global error is O((t_end/steps)^4).
    """
    if steps < 1:
        raise InvalidInput("steps must be >= 1")
    arr = np.asarray(x0, dtype=float)
    t = np.asarray(t_end, dtype=float)
    single = arr.ndim == 1 and t.ndim == 0
    if arr.ndim == 1:
        arr = arr[None, :] if t.ndim == 0 else np.tile(arr, (t.shape[0], 1))
    if arr.shape[1] != p.dim:
        raise InvalidInput(f"points must have dimension {p.dim}")
    if t.ndim == 1 and t.shape[0] != arr.shape[0]:
        raise InvalidInput("t_end array must match the batch size")

    h = (t / steps) if t.ndim == 0 else (t / steps)[:, None]
    hmat = p.hessian.entries
    lin = p.linear
    x = arr.copy()
    for _ in range(steps):
        k1 = x @ hmat + lin
        k2 = (x + 0.5 * h * k1) @ hmat + lin
        k3 = (x + 0.5 * h * k2) @ hmat + lin
        k4 = (x + h * k3) @ hmat + lin
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x[0] if single else x


def _inner_integral_batch(p: QuadraticPotential, points: np.ndarray,
                          rule: QuadratureRule, flow_impl: str,
                          rk4_steps: int) -> np.ndarray:
    """Quadrature of f(flow at 1) - f(flow at t) for each row of points."""
    if flow_impl == "closed_form":
        def at(t, pts):
            return flow(p, float(t), pts)
    elif flow_impl == "rk4":
        def at(t, pts):
            return rk4_flow(p, pts, float(t), rk4_steps)
    else:
        raise InvalidInput(f"unknown flow_impl {flow_impl!r}")

    end_vals = np.atleast_1d(potential_value(p, at(1.0, points)))
    acc = np.zeros(points.shape[0])
    for t, w in zip(rule.nodes, rule.weights):
        acc += w * np.atleast_1d(potential_value(p, at(t, points)))
    return end_vals - acc


def inner_integral_quad(p: QuadraticPotential, x0, rule: QuadratureRule,
                        flow_impl: str = "closed_form",
                        rk4_steps: int = DEFAULT_RK4_STEPS) -> float:
    """Quadrature estimate of the inner time integral at a single point.

    With flow_impl='rk4' both the endpoint and the nodes are reached by
    Runge-Kutta integration, so the estimate is fully independent of the
    closed-form flow and of the time-integral identity it feeds.
    """
    arr = np.asarray(x0, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != p.dim:
        raise InvalidInput(f"x0 must be a vector of dimension {p.dim}")
    if flow_impl == "rk4":
        # one batched integration with per-row end times: rows = nodes + endpoint
        times = np.concatenate([rule.nodes, [1.0]])
        states = rk4_flow(p, arr, times, rk4_steps)
        vals = np.atleast_1d(potential_value(p, states))
        return float(vals[-1] - rule.weights @ vals[:-1])
    if flow_impl != "closed_form":
        raise InvalidInput(f"unknown flow_impl {flow_impl!r}")
    return float(_inner_integral_batch(p, arr[None, :], rule, flow_impl, rk4_steps)[0])


def mc_wkl(mu: Gaussian, nu: Gaussian, n_samples: int, seed: int,
           flow_impl: str = "closed_form",
           quad_nodes: int = DEFAULT_QUAD_NODES,
           rk4_steps: int = DEFAULT_RK4_STEPS) -> McEstimate:
    """Monte-Carlo estimate of the divergence from its defining double integral.

    Solves the transport potential, draws n_samples points from mu, applies
    the time quadrature to each, and averages.  Deterministic for a fixed
    (seed, n_samples); the same samples are used for either flow_impl so the
    two modes can be compared pointwise.
    """
    if n_samples < 100:
        raise InvalidInput("n_samples must be >= 100")
    sol = solve_potential(mu, nu)
    rule = QuadratureRule.gauss_legendre(quad_nodes)
    points = sample(mu, n_samples, seed)
    vals = _inner_integral_batch(sol.potential, points, rule, flow_impl, rk4_steps)
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / np.sqrt(n_samples))
    return McEstimate(mean=mean, stderr=stderr, n_samples=n_samples, seed=seed)


def pushforward_check(mu: Gaussian, nu: Gaussian, n_samples: int,
                      seed: int) -> PushforwardResult:
    """Empirically verify that the unit-time flow maps mu onto nu.

    Samples mu, pushes every sample through the closed-form flow at t = 1 and
    compares empirical mean/covariance of the images against nu within CLT
    envelopes (5 sigma heuristics, honest for moderate condition numbers):
        max_i |mean_i - nu.mean_i|  <= 5 sqrt(max diag cov1 / N)
        ||cov - cov1||_F            <= 5 ||cov1||_F sqrt(2(dim+1)/N)
    """
    if n_samples < 1000:
        raise InvalidInput("n_samples must be >= 1000")
    sol = solve_potential(mu, nu)
    images = flow(sol.potential, 1.0, sample(mu, n_samples, seed))
    st = stats(images)
    cov1 = nu.cov.entries
    mean_err = float(np.max(np.abs(st.emp_mean - nu.mean)))
    mean_bound = 5.0 * float(np.sqrt(np.max(np.diag(cov1)) / n_samples))
    cov_err = float(np.linalg.norm(st.emp_cov.entries - cov1))
    cov_bound = 5.0 * float(np.linalg.norm(cov1)) * float(
        np.sqrt(2.0 * (mu.dim + 1) / n_samples))
    return PushforwardResult(sample_stats=st, mean_err=mean_err, mean_bound=mean_bound,
                             cov_err=cov_err, cov_bound=cov_bound,
                             passed=(mean_err <= mean_bound and cov_err <= cov_bound))


def random_pair(rng, dim: int, eig_range=(0.25, 4.0),
                mean_range=(-2.0, 2.0)) -> tuple[Gaussian, Gaussian]:
    """Random well-conditioned Gaussian pair for verification runs.

    rng is a numpy Generator or an integer seed.  Covariance eigenvalues are
    uniform in eig_range (bounded condition number keeps the CLT envelopes
    honest); eigenvectors come from the spectral basis of a random symmetric
    matrix.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if dim < 1:
        raise InvalidInput("dim must be >= 1")

    def one() -> Gaussian:
        basis = sym_eig(rng.standard_normal((dim, dim))).eigvecs
        eigs = rng.uniform(*eig_range, size=dim)
        cov = (basis * eigs) @ basis.T
        mean = rng.uniform(*mean_range, size=dim)
        return Gaussian(mean, cov)

    return one(), one()


def random_potential(rng, dim: int, eig_range=(-2.0, 2.0),
                     linear_range=(-2.0, 2.0)) -> QuadraticPotential:
    """Random quadratic potential with hessian eigenvalues in eig_range."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    basis = sym_eig(rng.standard_normal((dim, dim))).eigvecs
    eigs = rng.uniform(*eig_range, size=dim)
    hessian = (basis * eigs) @ basis.T
    return QuadraticPotential(hessian, rng.uniform(*linear_range, size=dim))
