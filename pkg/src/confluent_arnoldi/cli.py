"""Command line front end: ``fit``, ``eval`` and ``experiment`` subcommands.

Exit codes: 0 success, 2 configuration/input error, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .arnoldi_core import BreakdownError
from .experiments import EXPERIMENTS, INTEGRANDS, ExperimentConfig, run_experiment
from .fitting import (
    HERMITE,
    VALUES,
    HermiteData,
    PolyModel,
    evaluate,
    fit_hermite,
    fit_hermite_with_values_basis,
    fit_indefinite_integral,
    fit_values_only,
)
from .table import ResultTable

log = logging.getLogger("confluent_arnoldi")

EXIT_OK, EXIT_CONFIG, EXIT_BREAKDOWN = 0, 2, 3


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- model I/O

def model_to_json(model: PolyModel) -> str:
    if model.field != "real":
        raise ConfigError("only real models can be serialized")
    return json.dumps({
        "d": model.d.tolist(),
        "h": model.h.tolist(),
        "order_fit": model.order_fit,
        "basis_kind": model.basis_kind,
        "residual": model.residual,
    }, indent=1)


def model_from_json(text: str) -> PolyModel:
    obj = json.loads(text)
    n = len(obj["d"]) - 1
    h = np.asarray(obj["h"], dtype=float).reshape(n + 1, n)
    return PolyModel(d=np.asarray(obj["d"], dtype=float), h=h,
                     order_fit=int(obj["order_fit"]), basis_kind=obj["basis_kind"],
                     residual=float(obj.get("residual", "nan")))


def read_columns(path) -> dict:
    """Numeric CSV with a header row, returned column-wise."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [[float(v) for v in r] for r in reader if r]
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    cols = np.array(rows, dtype=float).T
    return dict(zip(header, cols))


# ---------------------------------------------------------------- commands

def cmd_fit(args) -> int:
    cols = read_columns(args.data)
    if "x" not in cols or "f" not in cols:
        raise ConfigError("data file needs columns 'x' and 'f' (optionally fp, fpp, ...)")
    x = cols["x"]
    if args.integral:
        model = fit_indefinite_integral(x, cols["f"], args.degree, args.basis)
    else:
        derivs = []
        k = 1
        while f"f{'p' * k}" in cols:
            derivs.append(cols[f"f{'p' * k}"])
            k += 1
        data = HermiteData(x, cols["f"], derivs)
        if not derivs:
            model = fit_values_only(x, cols["f"], args.degree)
        elif args.basis == HERMITE:
            model = fit_hermite(data, args.degree)
        else:
            model = fit_hermite_with_values_basis(data, args.degree)
    text = model_to_json(model)
    if args.model:
        Path(args.model).write_text(text + "\n")
    else:
        print(text)
    log.info("degree %d fit, residual %.3e", model.n, model.residual)
    return EXIT_OK


def cmd_eval(args) -> int:
    model = model_from_json(Path(args.model).read_text())
    if args.nodes:
        s = read_columns(args.nodes)
        if "x" not in s:
            raise ConfigError("node file needs a column 'x'")
        s = s["x"]
    elif args.x:
        s = np.array(args.x, dtype=float)
    else:
        raise ConfigError("give evaluation nodes with --nodes or --x")
    blocks = evaluate(model, s, args.order)
    names = ["x", "p"] + [f"p{k}" for k in range(1, args.order + 1)]
    table = ResultTable(names, [tuple(float(v) for v in r)
                                for r in np.column_stack([s] + blocks)])
    if args.out:
        table.write_csv(args.out)
    else:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        experiment=args.id, n_min=args.n_min, n_max=args.n_max, step=args.step,
        points_factor=args.points_factor, basis=args.basis, baseline=args.baseline,
        integrand=args.integrand, benchmark_n=args.benchmark_n, seed=args.seed,
        out=args.out, plot=args.plot)
    table = run_experiment(cfg)
    if not args.out:
        sys.stdout.write(table.to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="confluent-arnoldi",
        description="Hermite fitting with confluent Vandermonde + Arnoldi bases.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit a polynomial to CSV data (columns x, f, fp, ...)")
    f.add_argument("--data", required=True)
    f.add_argument("--degree", "-n", type=int, required=True)
    f.add_argument("--basis", choices=[HERMITE, VALUES], default=HERMITE)
    f.add_argument("--integral", action="store_true",
                   help="treat column f as the integrand of an indefinite integral")
    f.add_argument("--model", help="output JSON model (default: stdout)")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="evaluate a fitted model and its derivatives")
    e.add_argument("--model", required=True)
    e.add_argument("--nodes", help="CSV with column x")
    e.add_argument("--x", type=float, nargs="+")
    e.add_argument("--order", type=int, default=1)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    x = sub.add_parser("experiment", help="run a convergence experiment")
    x.add_argument("id", choices=sorted(EXPERIMENTS))
    x.add_argument("--n-min", type=int)
    x.add_argument("--n-max", type=int)
    x.add_argument("--step", type=int)
    x.add_argument("--basis", choices=["hermite", "values", "both"], default="both")
    x.add_argument("--baseline", action=argparse.BooleanOptionalAction, default=True,
                   help="include the naive monomial baseline")
    x.add_argument("--points-factor", type=float,
                   help="sampling factor (ex2: points/interval per n+1, ex4: per n, "
                        "ex5: per n, ex6: points/side per n+1, ex7: points/interval per n+1)")
    x.add_argument("--integrand", choices=sorted(INTEGRANDS), default="sign",
                   help="ex7 integrand")
    x.add_argument("--benchmark-n", type=int, default=400, help="ex5 benchmark degree")
    x.add_argument("--seed", type=int, help="reserved; no experiment is random")
    x.add_argument("--out", help="CSV output path (default: stdout)")
    x.add_argument("--plot", help="SVG plot path")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except BreakdownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
