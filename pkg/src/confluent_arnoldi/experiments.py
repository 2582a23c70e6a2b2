"""Convergence experiments ex1..ex7: naive monomials vs Arnoldi bases.

Every experiment sweeps the degree ``n`` and records max-norm errors on a
fine grid (1000 points per interval, 2000 boundary points) for each method:

``naive``     monomial (confluent) Vandermonde, no Arnoldi
``arnoldi``   basis orthogonalized on the Hermite data
``values``    basis orthogonalized on function values only, derivative
              rows generated from its Hessenberg matrix
``lagrange``  values-only data (ex1-ex3), evaluated with derivatives
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from . import complex_extension as cx
from . import eigenproblems as eig
from .arnoldi_core import naive_confluent_matrix
from .fitting import (
    HERMITE,
    VALUES,
    evaluate,
    fit_hermite,
    fit_hermite_with_values_basis,
    fit_indefinite_integral,
    fit_values_only,
    hermite_data,
    lstsq,
    max_error,
    naive_eval,
    naive_fit,
)
from .grids import FINE_POINTS, chebyshev_points, equispaced_union, fine_grid
from .table import ResultTable

BOUNDARY_FINE_POINTS = 2000
NAIVE = cx.NAIVE


@dataclass
class ExperimentConfig:
    experiment: str
    n_min: Optional[int] = None
    n_max: Optional[int] = None
    step: Optional[int] = None
    points_factor: Optional[float] = None
    basis: str = "both"
    baseline: bool = True
    integrand: str = "sign"
    benchmark_n: int = 400
    seed: Optional[int] = None
    out: Optional[str] = None
    plot: Optional[str] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {sorted(EXPERIMENTS)}")
        exp = EXPERIMENTS[self.experiment]
        lo, hi, st = exp.degrees
        self.n_min = lo if self.n_min is None else self.n_min
        self.n_max = hi if self.n_max is None else self.n_max
        self.step = st if self.step is None else self.step
        if self.integrand not in INTEGRANDS:
            raise ValueError(f"unknown integrand {self.integrand!r}")
        if self.points_factor is None:
            self.points_factor = (INTEGRANDS[self.integrand][4] if self.experiment == "ex7"
                                  else exp.points_factor)
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.n_min < 0:
            raise ValueError("degrees must be >= 0")
        if self.basis not in ("hermite", "values", "both"):
            raise ValueError(f"unknown basis selector {self.basis!r}")
        if self.points_factor <= 0:
            raise ValueError("points factor must be positive")

    def degrees(self) -> List[int]:
        lo = self.n_min
        if self.experiment == "ex1":
            # Hermite interpolation needs odd n; start at the first odd degree
            lo += 1 - lo % 2
        ns = list(range(lo, self.n_max + 1, self.step))
        if self.experiment == "ex1":
            ns = [n for n in ns if n % 2 == 1]
        return ns

    def methods(self) -> List[str]:
        out = [NAIVE] if self.baseline else []
        if self.basis in ("hermite", "both"):
            out.append("arnoldi")
        if self.basis in ("values", "both"):
            out.append("values")
        return out


@dataclass(frozen=True)
class _Experiment:
    run: Callable
    degrees: tuple
    points_factor: float
    quantities: tuple
    extra_methods: tuple = ()


def _columns(cfg: ExperimentConfig) -> List[str]:
    exp = EXPERIMENTS[cfg.experiment]
    methods = cfg.methods()
    extra = [m for m in exp.extra_methods
             if (m != "naive_lagrange" or cfg.baseline)]
    cols = ["n"]
    for q in exp.quantities:
        cols += [f"err_{q}_{m}" for m in methods + extra]
    return cols


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Run one experiment over its degree range and return the error table.

    Writes ``cfg.out`` (CSV) and ``cfg.plot`` (SVG) when set.
    """
    exp = EXPERIMENTS[cfg.experiment]
    table = ResultTable(_columns(cfg))
    context = exp.run(cfg, None, None)
    for n in cfg.degrees():
        row = {"n": n}
        row.update(exp.run(cfg, n, context))
        table.append(row)
    if cfg.out:
        table.write_csv(cfg.out)
    if cfg.plot:
        from .table import emit_plot
        emit_plot(table, cfg.plot, title=cfg.experiment)
    return table


# ---------------------------------------------------------------- ex1, ex2

def _runge(x):
    return 1 / (1 + 25 * x ** 2)


def _runge_prime(x):
    return -50 * x / (1 + 25 * x ** 2) ** 2


def _hermite_errors(cfg, n, data, lagrange_nodes, f, fp, xx,
                    values_basis_nodes=None) -> Dict[str, float]:
    row = {}
    exact = (f(xx), fp(xx))
    fits = {}
    methods = cfg.methods()
    if NAIVE in methods:
        fits[NAIVE] = naive_eval(naive_fit(data, n), xx, 1)
        lag = hermite_data(f, [], lagrange_nodes)
        fits["naive_lagrange"] = naive_eval(naive_fit(lag, n), xx, 1)
    if "arnoldi" in methods:
        fits["arnoldi"] = evaluate(fit_hermite(data, n), xx, 1)
    if "values" in methods:
        fits["values"] = evaluate(fit_hermite_with_values_basis(data, n, values_basis_nodes),
                                  xx, 1)
    y = f(lagrange_nodes)
    fits["lagrange"] = evaluate(fit_values_only(lagrange_nodes, y, n), xx, 1)
    for m, (y, yp) in fits.items():
        row[f"err_f_{m}"] = max_error(y, exact[0])
        row[f"err_fp_{m}"] = max_error(yp, exact[1])
    return row


def _ex1(cfg, n, ctx):
    """Hermite interpolation of 1/(1+25x^2) in (n+1)/2 Chebyshev points.

    The values-orthogonalized basis cannot be built on (n+1)/2 nodes, so it
    is orthogonalized on the n+1 Chebyshev points of the Lagrange variant.
    """
    if n is None:
        return fine_grid([(-1, 1)])
    m = (n + 1) // 2
    data = hermite_data(_runge, [_runge_prime], chebyshev_points(m))
    lagrange = chebyshev_points(n + 1)
    return _hermite_errors(cfg, n, data, lagrange, _runge, _runge_prime, ctx,
                           values_basis_nodes=lagrange)


EX2_INTERVALS = [(-1.0, -1.0 / 3.0), (0.2, 1.0)]


def _sqrt_abs(x):
    return np.sqrt(np.abs(x))


def _sqrt_abs_prime(x):
    return np.sign(x) / (2 * np.sqrt(np.abs(x)))


def _ex2(cfg, n, ctx):
    """Least squares for sqrt|x| on two intervals, equispaced samples.

    Hermite data: ``points_factor*(n+1)`` points per interval; values-only
    data: twice as many.
    """
    if n is None:
        return fine_grid(EX2_INTERVALS)
    m = int(round(cfg.points_factor * (n + 1)))
    data = hermite_data(_sqrt_abs, [_sqrt_abs_prime], equispaced_union(EX2_INTERVALS, m))
    lag = equispaced_union(EX2_INTERVALS, 2 * m)
    return _hermite_errors(cfg, n, data, lag, _sqrt_abs, _sqrt_abs_prime, ctx)


# ---------------------------------------------------------------- ex3

EX3_POINTS = 500


def _ex3_f(x):
    return 1 / (10 - 9 * x)


def _ex3_fp_scaled(x):
    return -(2 / np.pi) * 9 / (10 - 9 * x) ** 2


def _ex3(cfg, n, ctx):
    """Fourier extension of 1/(10-9x) from [-1, 1] to period 4, 500 Chebyshev points."""
    if n is None:
        return fine_grid([(-1, 1)])
    x = chebyshev_points(EX3_POINTS)
    f, fp = _ex3_f(x), _ex3_fp_scaled(x)
    kinds = {NAIVE: NAIVE, "arnoldi": HERMITE, "values": VALUES}
    fits = {m: cx.fourier_fit_hermite(x, f, fp, n, kinds[m]) for m in cfg.methods()}
    fits["lagrange"] = cx.fourier_fit_hermite(x, f, None, n, VALUES)
    row = {}
    for m, model in fits.items():
        y, yp = cx.fourier_eval(model, ctx)
        row[f"err_f_{m}"] = max_error(y, _ex3_f(ctx))
        row[f"err_fp_{m}"] = max_error(yp, _ex3_fp_scaled(ctx))
    return row


# ---------------------------------------------------------------- ex4

def _ex4_u(z):
    return (np.log(0.8 + z) ** 2).real


def _ex4_dtn(z, nu):
    return (nu * 2 * np.log(0.8 + z) / (0.8 + z)).real


def _ex4(cfg, n, ctx):
    """DtN map on the blob curve with ``points_factor * n`` boundary samples."""
    if n is None:
        return cx.blob(BOUNDARY_FINE_POINTS)
    curve = cx.blob(max(int(round(cfg.points_factor * n)), 2 * n + 1))
    f = _ex4_u(curve.z)
    kinds = {NAIVE: NAIVE, "arnoldi": HERMITE, "values": VALUES}
    row = {}
    for m in cfg.methods():
        model = cx.harmonic_fit(curve, f, n, kinds[m])
        row[f"err_u_{m}"] = max_error(cx.harmonic_eval(model, ctx.z), _ex4_u(ctx.z))
        row[f"err_dtn_{m}"] = max_error(cx.dtn_evaluate(model, ctx),
                                        _ex4_dtn(ctx.z, ctx.normal))
    return row


# ---------------------------------------------------------------- ex5

EX5_MODES = (20, 40)


def _steklov_modes(curve, n, kind, modes, fine_z):
    """Eigenvalues/eigenfunctions (1-based ``modes``, ``lambda_1 = 0``)."""
    Q0, Q1, h = cx.basis_blocks(curve.z, n, kind)
    A, B = eig.steklov_matrices(Q0, Q1, curve.normal)
    pairs = eig.rect_eig_qr(eig.RectGEVP(A, B), tol=None, check_rank=kind != NAIVE)
    lams, funcs = [], []
    for k in modes:
        if k <= len(pairs):
            lams.append(pairs.lambdas[k - 1])
            funcs.append(eig.eigenfunction_values(h, pairs.vectors[:, k - 1], fine_z))
        else:
            lams.append(math.nan)
            funcs.append(None)
    return lams, funcs


def _ex5_curve(n, factor):
    return cx.ellipse(int(round(factor * n)) + 1)


def _ex5(cfg, n, ctx):
    """Steklov eigenvalues in the ellipse cos t + i sin(t)/5 against an n=benchmark run."""
    if n is None:
        fine = cx.ellipse(BOUNDARY_FINE_POINTS)
        nb = cfg.benchmark_n
        lams, funcs = _steklov_modes(_ex5_curve(nb, cfg.points_factor), nb, HERMITE,
                                     EX5_MODES, fine.z)
        return fine, lams, funcs
    fine, ref_lams, ref_funcs = ctx
    kinds = {NAIVE: NAIVE, "arnoldi": HERMITE, "values": VALUES}
    curve = _ex5_curve(n, cfg.points_factor)
    row = {}
    for m in cfg.methods():
        try:
            lams, funcs = _steklov_modes(curve, n, kinds[m], EX5_MODES, fine.z)
        except np.linalg.LinAlgError:
            continue
        for k, lam, u, rl, ru in zip(EX5_MODES, lams, funcs, ref_lams, ref_funcs):
            row[f"err_lam{k}_{m}"] = abs(lam - rl)
            row[f"err_p{k}_{m}"] = math.nan if u is None else eig.eigenfunction_error(u, ru)
    return row


# ---------------------------------------------------------------- ex6

EX6_MODES = (5, 10)


def sloshing_modes(n: int, points_per_side: int, kind: str = HERMITE, modes=EX6_MODES,
                   fine_points: int = FINE_POINTS):
    """Sloshing eigenpairs on the unit square; errors against ``k pi tanh(k pi)``.

    Mode ``k`` (1-based, ``lambda_1 = 0``) is compared with the analytic
    eigenvalue ``(k-1) pi tanh((k-1) pi)`` and eigenfunction
    ``cos((k-1) pi x)`` on the top side.  Returns
    ``(eigenvalue errors, eigenfunction errors, EigPairs)``.
    """
    sq = cx.unit_square(points_per_side)
    top = cx.side_mask(sq, "top")
    Q0, Q1, h = cx.basis_blocks(sq.z, n, kind)
    A, B = eig.steklov_matrices(Q0, Q1, sq.normal)
    B = np.where(top[:, None], B, 0.0)
    pairs = eig.rect_eig_svd(eig.RectGEVP(A, B, reduction="svd"), keep=A.shape[1], tol=None)
    xs = np.linspace(0, 1, fine_points)
    lam_err, fun_err = [], []
    for k in modes:
        if k > len(pairs):
            lam_err.append(math.nan)
            fun_err.append(math.nan)
            continue
        exact = eig.sloshing_eigenvalue(k - 1)
        lam_err.append(abs(pairs.lambdas[k - 1] - exact) / max(1.0, exact))
        u = eig.eigenfunction_values(h, pairs.vectors[:, k - 1], xs + 1j)
        fun_err.append(eig.eigenfunction_error(u, np.cos((k - 1) * np.pi * xs)))
    return lam_err, fun_err, pairs


def _ex6(cfg, n, ctx):
    """Sloshing modes, ``points_factor * (n+1)`` first-kind Chebyshev points per side."""
    if n is None:
        return None
    per_side = int(round(cfg.points_factor * (n + 1)))
    kinds = {NAIVE: NAIVE, "arnoldi": HERMITE, "values": VALUES}
    row = {}
    for m in cfg.methods():
        lam_err, fun_err, _ = sloshing_modes(n, per_side, kinds[m])
        for k, le, fe in zip(EX6_MODES, lam_err, fun_err):
            row[f"err_lam{k}_{m}"] = le
            row[f"err_p{k}_{m}"] = fe
    return row


# ---------------------------------------------------------------- ex7

EX7_INTERVALS = [(-1.0, -0.1), (0.1, 1.0)]


def _sign_setup(factor, n):
    return equispaced_union(EX7_INTERVALS, int(round(factor * (n + 1))))


def _runge_setup(factor, n):
    return chebyshev_points(max(int(round(factor * (n + 1))), n + 1))


INTEGRANDS = {
    # name: (integrand, antiderivative, intervals, node builder, default factor)
    "sign": (np.sign, np.abs, EX7_INTERVALS, _sign_setup, 5.0),
    "runge": (_runge, lambda x: np.arctan(5 * x) / 5, [(-1.0, 1.0)], _runge_setup, 1.0),
    "zero": (np.zeros_like, np.zeros_like, EX7_INTERVALS, _sign_setup, 5.0),
}


def antiderivative_error(p: np.ndarray, exact: np.ndarray, components) -> float:
    """Max error of ``p`` as an antiderivative: one free constant per grid component.

    ``components`` lists index slices of the fine grid, one per interval of
    the (possibly disconnected) domain.
    """
    worst = 0.0
    for sl in components:
        e = p[sl] - exact[sl]
        worst = max(worst, float(e.max() - e.min()) / 2)
    return worst


def _ex7(cfg, n, ctx):
    """Indefinite integral fit: ``p' ~ integrand``, constant coefficient pinned to 0."""
    f, F, intervals, nodes_for, _ = INTEGRANDS[cfg.integrand]
    if n is None:
        xx = fine_grid(intervals)
        comps = [slice(i * FINE_POINTS, (i + 1) * FINE_POINTS) for i in range(len(intervals))]
        return xx, comps
    xx, comps = ctx
    x = nodes_for(cfg.points_factor, n)
    y = f(x)
    row = {}
    for m in cfg.methods():
        if m == NAIVE:
            A = naive_confluent_matrix(x, n, 1)[x.size:]
            c, _ = lstsq(A[:, 1:], y) if n > 0 else (np.zeros(0), 0.0)
            p, pp = naive_eval(np.concatenate([[0.0], c]), xx, 1)
        else:
            model = fit_indefinite_integral(x, y, n, HERMITE if m == "arnoldi" else VALUES)
            p, pp = evaluate(model, xx, 1)
        row[f"err_p_{m}"] = antiderivative_error(p, F(xx), comps)
        row[f"err_pp_{m}"] = max_error(pp, f(xx))
    return row


EXPERIMENTS: Dict[str, _Experiment] = {
    "ex1": _Experiment(_ex1, (3, 149, 2), 1.0, ("f", "fp"), ("lagrange", "naive_lagrange")),
    "ex2": _Experiment(_ex2, (0, 100, 5), 5.0, ("f", "fp"), ("lagrange", "naive_lagrange")),
    "ex3": _Experiment(_ex3, (10, 150, 10), 1.0, ("f", "fp"), ("lagrange",)),
    "ex4": _Experiment(_ex4, (20, 320, 20), 10.0, ("u", "dtn")),
    "ex5": _Experiment(_ex5, (10, 100, 10), 10.0, ("lam20", "lam40", "p20", "p40")),
    "ex6": _Experiment(_ex6, (5, 60, 5), 20.0, ("lam5", "lam10", "p5", "p10")),
    "ex7": _Experiment(_ex7, (20, 320, 20), 5.0, ("p", "pp")),
}
