"""Spectral decomposition and stable eigen-function tests."""

import math

import mpmath as mp
import numpy as np
import pytest

from conftest import rand_spd, rand_symmetric, rand_orthogonal
from wklgauss import (InvalidInput, NotPositiveDefinite, RankTolerance, SymMatrix,
                      apply_spectral, stable_fn, sym_eig)
from wklgauss import symmat

mp.mp.dps = 50


# ---------------------------------------------------------------------------
# SymMatrix / sym_eig
# ---------------------------------------------------------------------------

def test_symmetrizes_on_construction():
    s = SymMatrix([[1.0, 2.0], [0.0, 3.0]])
    assert np.array_equal(s.entries, s.entries.T)
    assert s.entries[0, 1] == 1.0


def test_rejects_nonsquare_and_nonfinite():
    with pytest.raises(InvalidInput):
        SymMatrix([[1.0, 2.0, 3.0]])
    with pytest.raises(InvalidInput):
        SymMatrix([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(InvalidInput):
        sym_eig(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_eig_already_diagonal():
    d = sym_eig(np.diag([2.0, 0.0]))
    assert np.allclose(d.eigvals, [0.0, 2.0])
    assert np.allclose(np.abs(d.eigvecs), np.eye(2)[:, ::-1])


def test_eig_identity():
    d = sym_eig(np.eye(3))
    assert np.allclose(d.eigvals, [1.0, 1.0, 1.0])


def test_eig_textbook_2x2():
    d = sym_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert np.allclose(d.eigvals, [1.0, 3.0])
    recon = d.reconstruct(d.eigvals)
    assert np.allclose(recon, [[2.0, 1.0], [1.0, 2.0]], atol=1e-12)


@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8])
def test_decomp_invariants_random(dim):
    rng = np.random.default_rng(100 + dim)
    for _ in range(5):
        s = rand_symmetric(rng, dim, scale=3.0)
        d = sym_eig(s)
        u = d.eigvecs
        assert np.linalg.norm(u.T @ u - np.eye(dim)) <= 1e-10 * dim
        scale = max(1.0, np.max(np.abs(d.eigvals)))
        assert np.linalg.norm(d.reconstruct(d.eigvals) - s.entries) <= 1e-10 * dim * scale
        assert np.all(np.diff(d.eigvals) >= 0)


def test_eig_deterministic():
    rng = np.random.default_rng(3)
    s = rand_symmetric(rng, 4)
    d1, d2 = sym_eig(s), sym_eig(s)
    assert np.array_equal(d1.eigvals, d2.eigvals)
    assert np.array_equal(d1.eigvecs, d2.eigvecs)


# ---------------------------------------------------------------------------
# apply_spectral
# ---------------------------------------------------------------------------

def test_sqrt_diagonal():
    out = apply_spectral(np.diag([4.0, 9.0]), "sqrt")
    assert np.allclose(out.entries, np.diag([2.0, 3.0]))


def test_pinv_and_null_proj():
    pinv = apply_spectral(np.diag([2.0, 0.0]), "pinv")
    assert np.allclose(pinv.entries, np.diag([0.5, 0.0]), atol=1e-15)
    proj = apply_spectral(np.diag([2.0, 0.0]), "null_proj")
    assert np.allclose(proj.entries, np.diag([0.0, 1.0]), atol=1e-15)


def test_log_exp_trivial():
    assert np.allclose(apply_spectral(np.eye(3), "log").entries, 0.0, atol=1e-15)
    assert np.allclose(apply_spectral(np.zeros((2, 2)), "exp").entries, np.eye(2))


def test_log_sqrt_reject_non_pd():
    for fn in ("log", "sqrt"):
        with pytest.raises(NotPositiveDefinite):
            apply_spectral(np.diag([1.0, -1.0]), fn)
        with pytest.raises(NotPositiveDefinite):
            apply_spectral(np.diag([1.0, 0.0]), fn)


def test_unknown_id_rejected():
    with pytest.raises(InvalidInput):
        apply_spectral(np.eye(2), "cosh")


def test_q_w_require_positive_spectrum():
    with pytest.raises(InvalidInput):
        apply_spectral(np.diag([1.0, -2.0]), "w")


def _expm_reference(a, terms=40):
    """Scaling-and-squaring Taylor reference, independent of the eigen path."""
    a = np.asarray(a, dtype=float)
    squarings = max(0, int(np.ceil(np.log2(max(np.linalg.norm(a, np.inf), 1e-30)))) + 1)
    b = a / (2.0 ** squarings)
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for k in range(1, terms):
        term = term @ b / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


@pytest.mark.parametrize("dim", [1, 2, 4, 8])
def test_exp_matches_series_reference(dim):
    rng = np.random.default_rng(40 + dim)
    for _ in range(5):
        s = rand_symmetric(rng, dim, scale=1.5)
        ours = apply_spectral(s, "exp").entries
        ref = _expm_reference(s.entries)
        assert np.linalg.norm(ours - ref) <= 1e-9 * max(1.0, np.linalg.norm(ref))


def test_projector_idempotent_and_annihilating():
    rng = np.random.default_rng(77)
    for dim, rank in [(3, 1), (4, 2), (6, 3)]:
        u = rand_orthogonal(rng, dim)
        eigs = np.concatenate([rng.uniform(0.5, 5.0, size=rank), np.zeros(dim - rank)])
        s = SymMatrix((u * eigs) @ u.T)
        p = apply_spectral(s, "null_proj").entries
        assert np.linalg.norm(p @ p - p) <= 1e-12 * dim
        tol = RankTolerance()
        lam = sym_eig(s).eigvals
        assert np.linalg.norm(p @ s.entries) <= 10 * dim * tol.threshold(lam)


def test_pseudoinverse_axioms_rank_deficient():
    rng = np.random.default_rng(78)
    for dim, rank in [(3, 2), (5, 3), (6, 2)]:
        u = rand_orthogonal(rng, dim)
        eigs = np.concatenate([rng.uniform(0.5, 5.0, size=rank), np.zeros(dim - rank)])
        a = SymMatrix((u * eigs) @ u.T)
        dag = apply_spectral(a, "pinv").entries
        norm_a = np.linalg.norm(a.entries)
        assert np.linalg.norm(a.entries @ dag @ a.entries - a.entries) <= 1e-10 * norm_a
        assert np.linalg.norm(dag @ a.entries @ dag - dag) <= 1e-10 * np.linalg.norm(dag)


def test_rank_tolerance_validation():
    with pytest.raises(InvalidInput):
        RankTolerance(0.0)
    with pytest.raises(InvalidInput):
        RankTolerance(-1e-9)


# ---------------------------------------------------------------------------
# stable_fn: exact limits, frozen values, branch agreement
# ---------------------------------------------------------------------------

def test_limit_values_exact():
    assert stable_fn("k", 0.0) == 1.0
    assert stable_fn("m", 0.0) == 0.0
    assert stable_fn("m1", 0.0) == 0.0
    assert stable_fn("m2", 0.0) == 2.0
    assert stable_fn("w", 1.0) == 2.0
    assert stable_fn("q", 1.0) == 0.0


def test_m_at_one():
    assert stable_fn("m", 1.0) == pytest.approx(math.e ** 2 + 1.0, rel=1e-14)


def test_q_at_two_frozen():
    # high-precision value of (4 ln 4 - 3), cross-checked with mpmath below
    assert stable_fn("q", 2.0) == pytest.approx(2.5451774444795625, rel=1e-13)
    assert stable_fn("q", 2.0) == pytest.approx(float(
        (4 * mp.log(4) - 4 + 1) / 1), rel=1e-13)


def test_domain_errors():
    for kind in ("q", "w"):
        with pytest.raises(InvalidInput):
            stable_fn(kind, 0.0)
        with pytest.raises(InvalidInput):
            stable_fn(kind, -1.0)
    with pytest.raises(InvalidInput):
        stable_fn("z", 1.0)
    with pytest.raises(InvalidInput):
        stable_fn("k", float("nan"))


def _mp_direct(kind, x):
    x = mp.mpf(x)
    if kind == "k":
        return (mp.e ** x - 1) / x
    if kind == "m":
        return 2 * x * mp.e ** (2 * x) - mp.e ** (2 * x) + 1
    if kind == "m1":
        return (2 * x * mp.e ** (2 * x) - mp.e ** (2 * x) + 1) / x
    if kind == "m2":
        return (2 * x * mp.e ** (2 * x) - mp.e ** (2 * x) + 1) / x ** 2
    if kind in ("q", "w"):
        return (x ** 2 * mp.log(x ** 2) - x ** 2 + 1) / (x - 1) ** 2
    raise AssertionError(kind)


@pytest.mark.parametrize("kind,center", [
    ("k", 0.0), ("m", 0.0), ("m1", 0.0), ("m2", 0.0), ("w", 1.0), ("q", 1.0)])
def test_series_coefficients_validated_against_high_precision(kind, center):
    # the stated [series] branch must reproduce the exact function near the
    # singular point; checked at |offset| = 1e-3, far beyond the switchover
    for offset in (1e-3, -1e-3, 2.5e-4):
        ref = float(_mp_direct(kind, center + offset))
        series = {
            "k": symmat._k_series, "m": symmat._m_series,
            "m1": symmat._m1_series, "m2": symmat._m2_series,
            "w": symmat._w_series, "q": symmat._w_series,
        }[kind](offset)
        assert series == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("kind", ["k", "m1", "m2", "w", "q"])
@pytest.mark.parametrize("offset", [1e-3, -1e-3, symmat.SERIES_RADIUS, -symmat.SERIES_RADIUS])
def test_series_and_direct_branches_agree(kind, offset):
    center = 1.0 if kind in ("q", "w") else 0.0
    direct = {
        "k": symmat._k_direct,
        "m1": lambda a: symmat._m_direct(a) / a,
        "m2": lambda a: symmat._m_direct(a) / (a * a),
        "w": lambda r: symmat._w_direct(r),
        "q": lambda r: symmat._w_direct(r),
    }[kind](center + offset if kind in ("q", "w") else offset)
    series = {
        "k": symmat._k_series, "m1": symmat._m1_series,
        "m2": symmat._m2_series, "w": symmat._w_series, "q": symmat._w_series,
    }[kind](offset)
    assert abs(series - direct) <= 1e-9 * max(1.0, abs(direct))


@pytest.mark.parametrize("kind,center,slope", [
    # |f(c+e) - f(c-e)| can only reflect the local slope plus rounding;
    # slopes at the singular point: k' = 1/2, m1' = 2, m2' = 8/3, w' = 2/3
    ("k", 0.0, 0.5), ("m1", 0.0, 2.0), ("m2", 0.0, 8 / 3), ("w", 1.0, 2 / 3)])
def test_continuity_across_singular_point(kind, center, slope):
    eps = 1e-6
    hi = stable_fn(kind, center + eps)
    lo = stable_fn(kind, center - eps)
    assert abs(hi - lo) <= 2 * eps * slope * 1.01 + 1e-8
    # values themselves stay pinned to the limit value
    limit = stable_fn(kind, center)
    assert abs(hi - limit) <= 2 * eps * slope * 1.01 + 1e-8


def test_m_nonnegative_on_grid():
    grid = np.linspace(-10.0, 10.0, 801)
    assert np.all(symmat.fn_m(grid) >= 0.0)


def test_w_positive_on_grid():
    grid = np.concatenate([np.linspace(1e-3, 5.0, 500), [1.0 - 1e-9, 1.0 + 1e-9, 1.0]])
    assert np.all(symmat.fn_w(grid) > 0.0)


def test_stable_fns_match_scalar_mpmath_away_from_singularity():
    for kind, pts in [("k", (-3.0, 0.5, 2.0)), ("m", (-2.0, 1.0, 2.5)),
                      ("m1", (-1.5, 0.7)), ("m2", (-1.0, 1.2)),
                      ("q", (0.3, 2.0, 5.0)), ("w", (0.3, 2.0, 5.0))]:
        for x in pts:
            assert stable_fn(kind, x) == pytest.approx(float(_mp_direct(kind, x)), rel=1e-12)


def test_apply_spectral_stable_fn_ids():
    rng = np.random.default_rng(9)
    s = rand_spd(rng, 3, eig_range=(0.5, 3.0))
    d = sym_eig(s)
    for fn_id, fn in [("k", symmat.fn_k), ("m", symmat.fn_m), ("m1", symmat.fn_m1),
                      ("m2", symmat.fn_m2), ("q", symmat.fn_q), ("w", symmat.fn_w)]:
        out = apply_spectral(s, fn_id)
        ref = d.reconstruct(fn(d.eigvals))
        assert np.allclose(out.entries, ref, atol=1e-13)
