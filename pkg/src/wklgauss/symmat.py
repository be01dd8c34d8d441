"""Symmetric-matrix spectral calculus.

Everything downstream (transport potentials, divergence formulas, Gaussian
sampling) is built on a single factorization: the eigendecomposition of a
real symmetric matrix.  This module provides that decomposition plus
numerically stable evaluation of the scalar eigen-functions the closed-form
divergence needs, including the ones with removable singularities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import InvalidInput, NotPositiveDefinite

# Direct formulas for the functions below lose all significant digits in 0/0
# form near their singular point; inside this radius a truncated Taylor
# series is used instead.
SERIES_RADIUS = 1e-4

# Taylor coefficients (lowest degree first), all validated against
# high-precision direct evaluation in the test suite.
#   K_SERIES: (e^a - 1)/a         about a = 0
#   M_SERIES: 2a e^{2a} - e^{2a} + 1   about a = 0   (closed form: 2^n (n-1)/n!)
#   W_SERIES: (r^2 log(r^2) - r^2 + 1)/(r-1)^2  in powers of eps = r - 1
K_SERIES = (1.0, 1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720)
M_SERIES = (0.0, 0.0, 2.0, 8 / 3, 2.0, 16 / 15, 4 / 9, 16 / 105, 2 / 45)
W_SERIES = (2.0, 2 / 3, -1 / 6, 1 / 15, -1 / 30, 2 / 105, -1 / 84)


class SymMatrix:
    """A real symmetric matrix, symmetrized on construction.

    Construction accepts any square array-like; the stored entries are
    (S + S^T)/2 so floating-point asymmetry cannot accumulate through
    chained operations.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInput("matrix entries must be finite")
        self.entries = 0.5 * (a + a.T)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __repr__(self):
        return f"SymMatrix({self.entries!r})"


@dataclass(frozen=True)
class RankTolerance:
    """Relative threshold deciding which eigenvalues count as zero.

    An eigenvalue lam is classified as zero iff
    |lam| <= rel_tol * max(1, max_j |lam_j|), which makes the rank decision
    invariant under rescaling of the matrix.
    """

    rel_tol: float = 1e-12

    def __post_init__(self):
        if not (self.rel_tol > 0):
            raise InvalidInput("rel_tol must be positive")

    def threshold(self, eigvals: np.ndarray) -> float:
        return self.rel_tol * max(1.0, float(np.max(np.abs(eigvals), initial=0.0)))

    def zero_mask(self, eigvals: np.ndarray) -> np.ndarray:
        return np.abs(eigvals) <= self.threshold(eigvals)

    def is_positive_definite(self, eigvals: np.ndarray) -> bool:
        return bool(np.min(eigvals) > self.threshold(eigvals))


DEFAULT_RANK_TOL = RankTolerance()


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigendecomposition S = U diag(eigvals) U^T with eigvals ascending."""

    eigvecs: np.ndarray
    eigvals: np.ndarray

    def reconstruct(self, values: np.ndarray) -> np.ndarray:
        """U diag(values) U^T, symmetrized."""
        u = self.eigvecs
        out = (u * np.asarray(values, dtype=float)) @ u.T
        return 0.5 * (out + out.T)

    def apply(self, fn) -> np.ndarray:
        """Apply a scalar function to the eigenvalues and reassemble."""
        return self.reconstruct(fn(self.eigvals))


def sym_eig(matrix) -> SpectralDecomp:
    """Eigendecomposition of a symmetric matrix (eigenvalues ascending)."""
    s = matrix if isinstance(matrix, SymMatrix) else SymMatrix(matrix)
    eigvals, eigvecs = np.linalg.eigh(s.entries)
    return SpectralDecomp(eigvecs=eigvecs, eigvals=eigvals)


def _require_pd(eigvals: np.ndarray, tol: RankTolerance, what: str) -> None:
    if not tol.is_positive_definite(eigvals):
        raise NotPositiveDefinite(f"{what}: matrix is not positive definite "
                                  f"(min eigenvalue {np.min(eigvals):.3e})")


# ---------------------------------------------------------------------------
# Stable scalar eigen-functions.
#
# Each function has a direct branch (exact formula, rearranged via expm1/log1p
# to avoid catastrophic cancellation) and a series branch used within
# SERIES_RADIUS of the singular point.  The private branch functions are kept
# separate so tests and the self-test can compare them on either side of the
# switchover.
# ---------------------------------------------------------------------------

def _k_direct(a):
    return np.expm1(a) / a


def _k_series(a):
    return npoly.polyval(a, K_SERIES)


def _m_direct(a):
    return 2.0 * a * np.exp(2.0 * a) - np.expm1(2.0 * a)


def _m_series(a):
    return npoly.polyval(a, M_SERIES)


def _m1_series(a):
    return npoly.polyval(a, M_SERIES[1:])


def _m2_series(a):
    return npoly.polyval(a, M_SERIES[2:])


def _w_direct(r):
    eps = r - 1.0
    # numerator r^2 log(r^2) - (r^2 - 1), with log(r^2) = 2 log1p(eps) and
    # r^2 - 1 = eps (eps + 2) so the cancellation happens between
    # like-magnitude small terms instead of O(1) terms
    return (2.0 * r * r * np.log1p(eps) - eps * (eps + 2.0)) / (eps * eps)


def _w_series(eps):
    return npoly.polyval(eps, W_SERIES)


def _branch(x, singular_at, series, direct):
    x = np.asarray(x, dtype=float)
    offset = x - singular_at
    small = np.abs(offset) <= SERIES_RADIUS
    safe = np.where(small, singular_at + 1.0, x)  # dummy arg keeps direct() finite
    return np.where(small, series(offset), direct(safe))


def fn_k(a):
    """(e^a - 1)/a with k(0) = 1, elementwise."""
    return _branch(a, 0.0, _k_series, _k_direct)


def fn_m(a):
    """2a e^{2a} - e^{2a} + 1, elementwise (nonnegative, m(0) = 0)."""
    return _branch(a, 0.0, _m_series, _m_direct)


def fn_m1(a):
    """m(a)/a with the removable singularity filled in: m1(0) = 0."""
    return _branch(a, 0.0, _m1_series, lambda x: _m_direct(x) / x)


def fn_m2(a):
    """m(a)/a^2 with the removable singularity filled in: m2(0) = 2."""
    return _branch(a, 0.0, _m2_series, lambda x: _m_direct(x) / (x * x))


def fn_w(r):
    """(r^2 log(r^2) - r^2 + 1)/(r - 1)^2 continuously extended: w(1) = 2.

    Requires r > 0.  This is the eigen-function of the mean-weight matrix;
    the continuous extension at r = 1 is what keeps the divergence continuous
    when the two covariances coincide.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInput("w(r) requires r > 0")
    return _branch(r, 1.0, _w_series, _w_direct)


def fn_q(r):
    """Same as fn_w except q(1) = 0 (pseudoinverse convention).

    Requires r > 0.  The jump at r = 1 mirrors the pseudoinverse factors in
    the matrix it generates, which annihilate directions where r is exactly 1.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise InvalidInput("q(r) requires r > 0")
    out = _branch(r, 1.0, _w_series, _w_direct)
    return np.where(r == 1.0, 0.0, out)


_STABLE_FNS = {"k": fn_k, "m": fn_m, "m1": fn_m1, "m2": fn_m2, "q": fn_q, "w": fn_w}


def stable_fn(kind: str, x: float) -> float:
    """Evaluate one of the stable scalar eigen-functions at a point.

    kind is one of 'k', 'm', 'm1', 'm2' (any real argument) or 'q', 'w'
    (argument must be > 0).
    """
    try:
        fn = _STABLE_FNS[kind]
    except KeyError:
        raise InvalidInput(f"unknown stable function {kind!r}") from None
    if not np.isfinite(x):
        raise InvalidInput("argument must be finite")
    return float(fn(x))


def apply_spectral(matrix, fn_id: str, tol: RankTolerance | None = None) -> SymMatrix:
    """Apply a named scalar function to a symmetric matrix spectrally.

    Supported ids: 'exp', 'log', 'sqrt', 'pinv', 'null_proj' and the stable
    functions 'k', 'm', 'm1', 'm2', 'q', 'w'.  'log' and 'sqrt' require the
    matrix to be positive definite under the rank tolerance; 'pinv' inverts
    the eigenvalues not classified as zero and 'null_proj' projects onto the
    zero-classified eigenspace.
    """
    tol = tol if tol is not None else DEFAULT_RANK_TOL
    decomp = sym_eig(matrix)
    lam = decomp.eigvals

    if fn_id == "exp":
        values = np.exp(lam)
    elif fn_id in ("log", "sqrt"):
        _require_pd(lam, tol, fn_id)
        values = np.log(lam) if fn_id == "log" else np.sqrt(lam)
    elif fn_id == "pinv":
        zero = tol.zero_mask(lam)
        values = np.where(zero, 0.0, 1.0 / np.where(zero, 1.0, lam))
    elif fn_id == "null_proj":
        values = tol.zero_mask(lam).astype(float)
    elif fn_id in ("q", "w"):
        if np.any(lam <= 0):
            raise InvalidInput(f"{fn_id} requires positive eigenvalues")
        values = _STABLE_FNS[fn_id](lam)
    elif fn_id in _STABLE_FNS:
        values = _STABLE_FNS[fn_id](lam)
    else:
        raise InvalidInput(f"unknown spectral function id {fn_id!r}")

    return SymMatrix(decomp.reconstruct(values))
