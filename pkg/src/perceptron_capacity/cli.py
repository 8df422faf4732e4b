"""Command-line front end emitting deterministic CSV (or JSON).

Exit codes: 0 success, 2 invalid input or domain error, 3 numerical
non-convergence.
"""

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .classic import alpha_c, neg_lift_capacity
from .error_capacity import alpha_upper, f_err_hat, nu_hat
from .exceptions import CapacityError, ConvergenceError, DomainError
from .lifted import alpha_lower_lifted, i_wb_1
from .monte_carlo import McConfig, capacity_sweep, f_err_concentration, i_wb_1_sampled
from .tables import REFERENCE, compute_table
from .types import LiftPoint, PerceptronParams

logger = logging.getLogger("perceptron_capacity")

EXIT_OK, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 2, 3


def fmt_bound(x):
    """Six significant digits, trailing zeros kept; empty cell for missing values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:#.6g}"


def fmt_resid(x):
    if x is None or math.isnan(x):
        return ""
    return f"{x:.6e}"


def parse_grid(text):
    """``start:stop:count`` to an evenly spaced list (``count`` may be 0)."""
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like start:stop:count, got {text!r}")
    if count < 0 or not (math.isfinite(start) and math.isfinite(stop)):
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}")
    return [float(v) for v in np.linspace(start, stop, count)]


class Table:
    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []

    def add(self, *cells):
        if len(cells) != len(self.columns):
            raise ValueError("row width does not match header")
        self.rows.append(list(cells))

    def render(self, fmt, metadata):
        if fmt == "json":
            records = [
                {c: _json_cell(v) for c, v in zip(self.columns, row)} for row in self.rows
            ]
            return json.dumps(records, indent=2) + "\n"
        lines = [f"# {line}" for line in metadata]
        lines.append(",".join(self.columns))
        lines.extend(",".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"


def _json_cell(text):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError:
        return text
    return value if math.isfinite(value) else text


def _lifted_columns(kappa, f_wb):
    """alpha_low and its optimizer; the error-free case uses the negative-margin bound."""
    if f_wb == 0.0:
        if kappa < 0.0:
            res = neg_lift_capacity(kappa)
            return res.alpha_bound, res.optimizer_point.c3_s, res.optimizer_point.gamma_per_s, None, res.residual
        return alpha_c(kappa), 0.0, 0.5, math.inf, 0.0
    res = alpha_lower_lifted(kappa, f_wb)
    p = res.optimizer_point
    return res.alpha_bound, p.c3_s, p.gamma_wb_s, p.nu_wb, res.residual


def cmd_capacity(args):
    params = PerceptronParams(args.kappa, args.fwb)
    upper = alpha_upper(params)
    low, c3, gamma, nu, residual = _lifted_columns(args.kappa, args.fwb)
    table = Table(["kappa", "f_wb", "alpha_u", "nu_c3to0", "alpha_low", "c3", "gamma", "nu", "residual"])
    table.add(
        fmt_bound(args.kappa),
        fmt_bound(args.fwb),
        fmt_bound(upper.alpha_bound),
        fmt_bound(nu_hat(params)),
        fmt_bound(low),
        fmt_bound(c3),
        fmt_bound(gamma),
        fmt_bound(nu),
        fmt_resid(residual),
    )
    return table, EXIT_OK


def _sweep_point(figure, x, kappa):
    if figure == 1:
        return [fmt_bound(x), fmt_bound(alpha_c(x))]
    if figure == 2:
        low = neg_lift_capacity(x).alpha_bound if x < 0.0 else alpha_c(x)
        return [fmt_bound(x), fmt_bound(alpha_c(x)), fmt_bound(low)]
    upper = alpha_upper(PerceptronParams(kappa, x)).alpha_bound
    if figure == 3:
        return [fmt_bound(kappa), fmt_bound(x), fmt_bound(upper)]
    low, c3, gamma, nu, _ = _lifted_columns(kappa, x)
    return [fmt_bound(kappa), fmt_bound(x), fmt_bound(upper), fmt_bound(low), fmt_bound(c3), fmt_bound(gamma), fmt_bound(nu)]


_SWEEP_COLUMNS = {
    1: ["kappa", "alpha_c"],
    2: ["kappa", "alpha_c", "alpha_lifted"],
    3: ["kappa", "f_wb", "alpha_u"],
    4: ["kappa", "f_wb", "alpha_u", "alpha_low", "c3", "gamma", "nu"],
}


def cmd_sweep(args):
    columns = _SWEEP_COLUMNS[args.figure]
    table = Table(columns)
    grid = sorted(args.grid)
    failures = 0
    domain_failure = False
    for x in grid:
        try:
            table.add(*_sweep_point(args.figure, x, args.kappa))
        except CapacityError as exc:
            failures += 1
            domain_failure = domain_failure or isinstance(exc, DomainError)
            logger.warning("sweep point %g failed: %s", x, exc)
            blank = [""] * len(columns)
            blank[columns.index("f_wb" if args.figure >= 3 else "kappa")] = fmt_bound(x)
            if args.figure >= 3:
                blank[0] = fmt_bound(args.kappa)
            table.add(*blank)
    if grid and failures > 0.1 * len(grid):
        return table, EXIT_DOMAIN if domain_failure else EXIT_CONVERGENCE
    return table, EXIT_OK


def cmd_tables(args):
    ids = [args.table] if args.table else sorted(REFERENCE)
    table = Table(
        [
            "table", "kappa", "f_wb", "xi_hat", "c3", "gamma", "nu", "alpha_low", "nu_c3to0", "alpha_u",
            "ref_xi_hat", "ref_c3", "ref_gamma", "ref_nu", "ref_alpha_low", "ref_nu_c3to0",
            "ref_alpha_u", "abs_dev_alpha_low", "rel_dev_alpha_low", "abs_dev_alpha_u", "rel_dev_alpha_u",
            "xi_at_ref_alpha", "note",
        ]
    )
    status = EXIT_OK
    for table_id in ids:
        for row in compute_table(table_id):
            ref = row.reference
            if not row.converged:
                status = EXIT_CONVERGENCE
            note = f"column labelled {ref.label} in source" if ref.label else ""
            table.add(
                str(table_id),
                fmt_bound(ref.kappa),
                fmt_bound(ref.f_wb),
                fmt_resid(row.xi_hat),
                fmt_bound(row.point.c3_s),
                fmt_bound(row.point.gamma_wb_s),
                fmt_bound(row.point.nu_wb),
                fmt_bound(row.alpha_low),
                fmt_bound(row.nu_c3to0),
                fmt_bound(row.alpha_u),
                fmt_resid(ref.xi_hat),
                fmt_bound(ref.c3),
                fmt_bound(ref.gamma),
                fmt_bound(ref.nu),
                fmt_bound(ref.alpha_low),
                fmt_bound(ref.nu_c3to0),
                fmt_bound(ref.alpha_u),
                fmt_resid(row.alpha_low - ref.alpha_low),
                fmt_resid(row.alpha_low / ref.alpha_low - 1.0),
                fmt_resid(row.alpha_u - ref.alpha_u),
                fmt_resid(row.alpha_u / ref.alpha_u - 1.0),
                fmt_resid(row.xi_at_reference_alpha),
                note,
            )
    return table, status


def cmd_mc_ferr(args):
    config = McConfig(args.seed, args.trials, 1, args.m, args.kappa, args.fwb)
    report = f_err_concentration(config)
    target = math.sqrt(f_err_hat(PerceptronParams(args.kappa, args.fwb)))
    table = Table(["kappa", "f_wb", "m", "errors_allowed", "trials", "mean", "std_error", "asymptotic"])
    table.add(
        fmt_bound(args.kappa), fmt_bound(args.fwb), str(args.m), str(config.errors_allowed),
        str(report.trials_used), fmt_bound(report.mean), fmt_resid(report.std_error), fmt_bound(target),
    )
    return table, EXIT_OK


def cmd_mc_feas(args):
    grid = args.alpha_grid if args.alpha_grid is not None else [args.m / args.n]
    config = McConfig(args.seed, args.trials, args.n, max(1, round(grid[0] * args.n)) if grid else 1,
                      args.kappa, args.fwb, args.entries)
    table = Table(["alpha", "m", "errors_allowed", "probability", "std_error"])
    for alpha, p, se in capacity_sweep(config, grid, args.mode):
        m = int(round(alpha * args.n))
        table.add(fmt_bound(alpha), str(m), str(math.floor(args.fwb * m)), fmt_bound(p), fmt_resid(se))
    return table, EXIT_OK


def cmd_mc_iwb(args):
    point = LiftPoint(args.c3, args.gamma, args.nu)
    if not (args.c3 > 0 and args.gamma > 0 and args.nu >= 0):
        raise DomainError("need c3 > 0, gamma > 0 and nu >= 0")
    report = i_wb_1_sampled(point, args.kappa, args.samples, args.seed)
    exact = i_wb_1(point, args.kappa)
    z = (report.mean - exact) / report.std_error if report.std_error > 0 else 0.0
    table = Table(["c3", "gamma", "nu", "kappa", "samples", "mean", "std_error", "closed_form", "z_score"])
    table.add(
        fmt_bound(args.c3), fmt_bound(args.gamma), fmt_bound(args.nu), fmt_bound(args.kappa),
        str(args.samples), fmt_bound(report.mean), fmt_resid(report.std_error), fmt_bound(exact),
        fmt_resid(z),
    )
    return table, EXIT_OK


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="perceptron-capacity",
        description="Storage-capacity bounds of the spherical perceptron with a fraction of wrong patterns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("-v", "--verbose", action="store_true", help="log optimizer diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", parents=[common], help="both bounds at one (kappa, f_wb)")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--fwb", type=float, default=0.0)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("sweep", parents=[common], help="curve data for figures 1-4")
    p.add_argument("--figure", type=int, choices=[1, 2, 3, 4], required=True)
    p.add_argument("--grid", type=parse_grid, required=True,
                   help="start:stop:count over kappa (figures 1, 2) or f_wb (figures 3, 4)")
    p.add_argument("--kappa", type=float, default=0.0, help="margin for figures 3 and 4")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tables", parents=[common], help="recompute the reference tables")
    p.add_argument("--table", type=int, choices=sorted(REFERENCE), default=None, help="default: all")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("mc-ferr", parents=[common], help="finite-m concentration of the error objective")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--fwb", type=float, default=0.0)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.set_defaults(func=cmd_mc_ferr)

    p = sub.add_parser("mc-feas", parents=[common], help="empirical feasibility probability over alpha")
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--fwb", type=float, default=0.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="single point alpha = m/n when no grid is given")
    p.add_argument("--alpha-grid", type=parse_grid, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--mode", choices=["auto", "exact", "greedy"], default="auto")
    p.add_argument("--entries", choices=["gaussian", "rademacher"], default="gaussian")
    p.set_defaults(func=cmd_mc_feas)

    p = sub.add_parser("mc-iwb", parents=[common], help="sampled check of the lifted expectation")
    p.add_argument("--c3", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.set_defaults(func=cmd_mc_iwb)
    return parser


def _metadata(args):
    skip = {"func", "out", "verbose", "command"}
    options = []
    for key in sorted(vars(args)):
        if key in skip:
            continue
        value = getattr(args, key)
        if isinstance(value, list):
            value = ";".join(fmt_bound(v) for v in value)
        options.append(f"--{key.replace('_', '-')}={value}")
    lines = [f"perceptron_capacity {__version__}", "command: " + " ".join([args.command] + options)]
    if hasattr(args, "seed"):
        lines.append(f"seed: {args.seed}")
    return lines


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "mc-feas" and args.alpha_grid is None and args.m is None:
        parser.error("mc-feas needs --alpha-grid or --m")
    try:
        table, status = args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    text = table.render(args.format, _metadata(args))
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
