"""Command-line interface: divergence reports, verification runs, CSV sweeps.

Exit codes: 0 success/pass, 1 verification failure, 2 input error,
3 numeric precondition (matrix not positive definite), 4 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import symmat
from .errors import InvalidInput, NotPositiveDefinite, PreconditionViolated
from .gaussian import Gaussian, kl_divergence
from .oracle import DEFAULT_QUAD_NODES, mc_wkl, pushforward_check, random_pair
from .symmat import RankTolerance
from .transport import solve_potential
from .wkl import wkl_divergence, wkl_univariate

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NOT_PD = 3
EXIT_IO_ERROR = 4

_REPORT_FMT = ".9g"   # reports are for humans
_CSV_FMT = ".15g"     # CSV is for regression comparison


def _fmt(x: float) -> str:
    return format(float(x), _REPORT_FMT)


def _csv(x: float) -> str:
    return format(float(x), _CSV_FMT)


def load_pair(path: str) -> tuple[Gaussian, Gaussian]:
    """Read a {"mu": {...}, "nu": {...}} Gaussian pair from a JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(doc, dict) or "mu" not in doc or "nu" not in doc:
        raise InvalidInput("pair file must be an object with 'mu' and 'nu' fields")
    mu = Gaussian.from_dict(doc["mu"])
    nu = Gaussian.from_dict(doc["nu"])
    if mu.dim != nu.dim:
        raise InvalidInput(f"dimension mismatch: mu is {mu.dim}-d, nu is {nu.dim}-d")
    return mu, nu


def _matrix_lines(name: str, m) -> list[str]:
    body = np.array2string(np.asarray(m), precision=9, suppress_small=False)
    return [f"{name}:"] + ["  " + line for line in body.splitlines()]


def cmd_wkl(args) -> int:
    mu, nu = load_pair(args.input)
    bd = wkl_divergence(mu, nu)
    print(f"wkl total      {_fmt(bd.total)}")
    print(f"  trace term   {_fmt(bd.trace_term)}")
    print(f"  mean term    {_fmt(bd.mean_term)}")
    if args.verbose:
        sol = solve_potential(mu, nu)
        print(f"  riccati residual  {_fmt(sol.riccati_residual)}")
        print(f"  mean residual     {_fmt(sol.mean_residual)}")
        for name, mat in (("transport ratio", bd.ratio.entries),
                          ("spread weight", bd.spread_weight.entries),
                          ("mean weight", bd.mean_weight.entries)):
            print("\n".join(_matrix_lines(name, mat)))
    return EXIT_OK


def cmd_kl(args) -> int:
    mu, nu = load_pair(args.input)
    if args.order == "mu-nu":
        value = kl_divergence(mu, nu)
    else:
        value = kl_divergence(nu, mu)
    print(f"kl ({args.order})  {_fmt(value)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.random is not None:
        mu, nu = random_pair(args.seed, args.random)
        print(f"random pair: dim={args.random} seed={args.seed}")
    elif args.input is not None:
        mu, nu = load_pair(args.input)
    else:
        raise InvalidInput("verify needs an input file or --random DIM")

    flow_impl = "closed_form" if args.flow == "closed" else "rk4"
    closed = wkl_divergence(mu, nu).total
    est = mc_wkl(mu, nu, args.samples, args.seed, flow_impl=flow_impl,
                 quad_nodes=args.quad_nodes)
    diff = abs(closed - est.mean)
    mc_ok = diff <= 3.0 * est.stderr
    push = pushforward_check(mu, nu, args.samples, args.seed)

    print(f"closed form    {_fmt(closed)}")
    print(f"mc estimate    {_fmt(est.mean)} +/- {_fmt(est.stderr)}"
          f"  (N={est.n_samples}, seed={est.seed}, flow={flow_impl})")
    ratio = diff / est.stderr if est.stderr > 0 else 0.0
    print(f"|closed - mc|  {_fmt(diff)}  ({_fmt(ratio)} stderr)"
          f"  -> {'ok' if mc_ok else 'MISMATCH'}")
    print(f"pushforward    mean err {_fmt(push.mean_err)} (bound {_fmt(push.mean_bound)}),"
          f" cov err {_fmt(push.cov_err)} (bound {_fmt(push.cov_bound)})"
          f"  -> {'ok' if push.passed else 'MISMATCH'}")
    passed = mc_ok and push.passed
    print(f"verdict        {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def _write_csv(path: str, header: list[str], rows) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_csv(v) for v in row) + "\n")
    except OSError as exc:
        raise _OutputError(f"cannot write {path}: {exc}") from None


class _OutputError(Exception):
    pass


def _grid(start: float, stop: float, step: float) -> list[float]:
    if not (step > 0 and start < stop):
        raise InvalidInput("grid requires step > 0 and start < stop")
    n = int(round((stop - start) / step))
    values = [start + i * step for i in range(n + 1)]
    return [v for v in values if v <= stop + 1e-9 * step]


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInput(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise InvalidInput(f"non-numeric range {text!r}") from None
    return start, stop, step


def _sweep_fig1_left() -> tuple[list[str], list[tuple]]:
    # equal variances, means 0 and 2: the wkl column is constant 2
    rows = []
    for j in range(200):
        sigma = (9 + 10 * j) / 100.0
        d_kl = kl_divergence(Gaussian([2.0], [[sigma ** 2]]),
                             Gaussian([0.0], [[sigma ** 2]]))
        d_wkl = wkl_univariate(0.0, sigma, 2.0, sigma)
        rows.append((sigma, d_kl, d_wkl))
    return ["sigma", "d_kl", "d_wkl"], rows


def _sweep_fig1_right(sigma_opts) -> tuple[list[str], list[tuple]]:
    # Argument-order convention: mu = N(0, sigma_opt^2), nu = N(0, sigma^2).
    # d_kl is the divergence from nu to mu; the two wkl columns carry both
    # argument orders because they differ (see the note printed by the
    # command).
    rows = []
    for opt in sigma_opts:
        for sigma in _grid(opt - 1.0, opt + 1.0, 0.1):
            if sigma <= 1e-9:
                continue  # zero variance is out of domain
            d_kl = kl_divergence(Gaussian([0.0], [[sigma ** 2]]),
                                 Gaussian([0.0], [[opt ** 2]]))
            rows.append((opt, sigma, d_kl,
                         wkl_univariate(0.0, opt, 0.0, sigma),
                         wkl_univariate(0.0, sigma, 0.0, opt)))
    return ["sigma_opt", "sigma", "d_kl", "d_wkl_mu_nu", "d_wkl_nu_mu"], rows


def _sweep_surface(grid0, grid1, mu0: float, mu1: float) -> tuple[list[str], list[tuple]]:
    rows = []
    for s0 in grid0:
        for s1 in grid1:
            d_wkl = wkl_univariate(mu0, s0, mu1, s1)
            d_kl = kl_divergence(Gaussian([mu1], [[s1 ** 2]]),
                                 Gaussian([mu0], [[s0 ** 2]]))
            rows.append((s0, s1, d_wkl, d_kl))
    return ["sigma0", "sigma1", "d_wkl", "d_kl"], rows


def cmd_sweep(args) -> int:
    if args.kind == "fig1-left":
        header, rows = _sweep_fig1_left()
    elif args.kind == "fig1-right":
        opts = args.sigma_opt if args.sigma_opt else [1.0, 3.0]
        header, rows = _sweep_fig1_right(opts)
    elif args.kind == "fig2-surface":
        grid = _grid(0.1, 4.0, 0.1)
        header, rows = _sweep_surface(grid, grid, 0.0, 1.0)
    else:  # custom
        if args.sigma0_range is None or args.sigma1_range is None:
            raise InvalidInput("custom sweep needs --sigma0-range and --sigma1-range")
        g0 = _grid(*_parse_range(args.sigma0_range))
        g1 = _grid(*_parse_range(args.sigma1_range))
        if any(v <= 0 for v in g0 + g1):
            raise InvalidInput("standard deviations must be positive")
        header, rows = _sweep_surface(g0, g1, args.mu0, args.mu1)

    _write_csv(args.out, header, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    if args.kind == "fig1-right":
        print("argument order: mu = N(0, sigma_opt^2), nu = N(0, sigma^2);"
              " d_wkl_mu_nu is the divergence from mu to nu, d_wkl_nu_mu the"
              " reverse. The two differ: the commonly tabulated curve for this"
              " comparison matches d_wkl_nu_mu.")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Self-test
# ---------------------------------------------------------------------------

def _selftest_stable_fns() -> tuple[bool, str]:
    checks = []
    # exact limit values at the singular points
    checks.append(abs(symmat.stable_fn("k", 0.0) - 1.0) == 0.0)
    checks.append(symmat.stable_fn("m", 0.0) == 0.0)
    checks.append(symmat.stable_fn("m1", 0.0) == 0.0)
    checks.append(abs(symmat.stable_fn("m2", 0.0) - 2.0) == 0.0)
    checks.append(abs(symmat.stable_fn("w", 1.0) - 2.0) == 0.0)
    checks.append(symmat.stable_fn("q", 1.0) == 0.0)
    # series and direct branches must agree on both sides of the switchover
    worst = 0.0
    for offset in (1e-3, -1e-3, symmat.SERIES_RADIUS, -symmat.SERIES_RADIUS):
        for series, direct in (
                (symmat._k_series, symmat._k_direct),
                (symmat._m1_series, lambda a: symmat._m_direct(a) / a),
                (symmat._m2_series, lambda a: symmat._m_direct(a) / (a * a))):
            s, d = series(offset), direct(offset)
            worst = max(worst, abs(s - d) / max(1.0, abs(d)))
        s, d = symmat._w_series(offset), symmat._w_direct(1.0 + offset)
        worst = max(worst, abs(s - d) / max(1.0, abs(d)))
    checks.append(worst <= 1e-9)
    # nonnegativity of the covariance-gap eigen-function
    grid = np.linspace(-10.0, 10.0, 401)
    checks.append(bool(np.all(symmat.fn_m(grid) >= 0.0)))
    return all(checks), f"worst branch disagreement {worst:.3e}"


def _selftest_transport(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst_r = worst_m = 0.0
    for i in range(25):
        dim = 1 + i % 5
        mu, nu = random_pair(rng, dim, eig_range=(0.1, 10.0), mean_range=(-3.0, 3.0))
        sol = solve_potential(mu, nu)
        worst_r = max(worst_r, sol.riccati_residual)
        worst_m = max(worst_m, sol.mean_residual)
    ok = worst_r <= 1e-10 and worst_m <= 1e-10
    return ok, f"max riccati residual {worst_r:.3e}, max mean residual {worst_m:.3e}"


def _selftest_oracle(seed: int, quad_nodes: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    n_samples = 10_000
    ratios = []
    for i in range(5):
        mu, nu = random_pair(rng, 1 + i % 3)
        closed = wkl_divergence(mu, nu).total
        est = mc_wkl(mu, nu, n_samples, seed + i, quad_nodes=quad_nodes)
        ratios.append(abs(closed - est.mean) / est.stderr if est.stderr > 0 else 0.0)
    ratios = np.asarray(ratios)
    # statistical acceptance at reduced N: tolerances are stderr-scaled
    ok = int(np.sum(ratios > 3.0)) <= 1 and bool(np.all(ratios <= 5.0))
    return ok, "stderr-scaled deviations " + ", ".join(f"{r:.2f}" for r in ratios)


def cmd_selftest(args) -> int:
    groups = (
        ("stable-fn", lambda: _selftest_stable_fns()),
        ("transport-residuals", lambda: _selftest_transport(args.seed)),
        ("oracle-agreement", lambda: _selftest_oracle(args.seed, args.quad_nodes)),
    )
    all_ok = True
    for name, run in groups:
        ok, detail = run()
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    print(f"selftest {'PASS' if all_ok else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wklgauss",
        description="Wasserstein KL-divergence between Gaussians: closed form, "
                    "verification, and CSV sweeps.")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for anything randomized (default 0)")
    parser.add_argument("--tol-rank", type=float, default=1e-12,
                        help="relative eigenvalue threshold for rank decisions")
    parser.add_argument("--quad-nodes", type=int, default=DEFAULT_QUAD_NODES,
                        help="Gauss-Legendre nodes for time quadrature")
    sub = parser.add_subparsers(dest="command", required=True)

    p_wkl = sub.add_parser("wkl", help="closed-form divergence from a JSON pair file")
    p_wkl.add_argument("input", help="JSON file with mu and nu")
    p_wkl.add_argument("--verbose", action="store_true",
                       help="also print intermediate matrices and residuals")
    p_wkl.set_defaults(run=cmd_wkl)

    p_kl = sub.add_parser("kl", help="classical KL-divergence from a JSON pair file")
    p_kl.add_argument("input", help="JSON file with mu and nu")
    p_kl.add_argument("--order", choices=("mu-nu", "nu-mu"), required=True,
                      help="argument order (required: the two differ)")
    p_kl.set_defaults(run=cmd_kl)

    p_ver = sub.add_parser("verify",
                           help="check the closed form against Monte-Carlo and pushforward")
    p_ver.add_argument("input", nargs="?", default=None, help="JSON pair file")
    p_ver.add_argument("--random", type=int, default=None, metavar="DIM",
                       help="use a random pair of this dimension instead of a file")
    p_ver.add_argument("--samples", type=int, default=100_000)
    p_ver.add_argument("--flow", choices=("closed", "rk4"), default="closed")
    p_ver.set_defaults(run=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="write a CSV parameter sweep")
    p_sweep.add_argument("--kind", required=True,
                         choices=("fig1-left", "fig1-right", "fig2-surface", "custom"))
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--sigma-opt", type=float, action="append", default=None,
                         help="fig1-right reference sigma (repeatable; default 1 and 3)")
    p_sweep.add_argument("--sigma0-range", default=None, metavar="START:STOP:STEP")
    p_sweep.add_argument("--sigma1-range", default=None, metavar="START:STOP:STEP")
    p_sweep.add_argument("--mu0", type=float, default=0.0)
    p_sweep.add_argument("--mu1", type=float, default=1.0)
    p_sweep.set_defaults(run=cmd_sweep)

    p_self = sub.add_parser("selftest", help="run the embedded invariant suite")
    p_self.set_defaults(run=cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = RankTolerance(args.tol_rank)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    # rank decisions (pseudoinverse / null-space classification) follow the flag
    symmat.DEFAULT_RANK_TOL = tol
    try:
        return args.run(args)
    except NotPositiveDefinite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PD
    except (InvalidInput, PreconditionViolated) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except _OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
