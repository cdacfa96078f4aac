"""``wlp`` command line front end.

Every subcommand prints JSON on stdout (CSV with ``--format csv`` for curves).
Exit status is 1 for input/configuration errors and 2 when a numerical
routine cannot reach its tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import cdf as cdf_mod
from . import moments, oracle, reliability
from .dist import Exponential, RandomVector, Uniform, from_config
from .exceptions import NumericalError, WlpError
from .expr import LatticeInterval, evaluate, parse, vertex_table
from .setfunc import FuzzyMeasure

__all__ = ["main", "run"]

_OPEN = LatticeInterval(-math.inf, math.inf)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise WlpError(message)


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise WlpError(f"{what} must be a comma-separated list of numbers, got {text!r}") from None


def _grid(text):
    lo, hi, num = (text.split(",") + [None, None])[:3]
    try:
        return np.linspace(float(lo), float(hi), int(num))
    except (TypeError, ValueError):
        raise WlpError(f"--grid expects lo,hi,num, got {text!r}") from None


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _json(obj):
    return json.dumps(_clean(obj), separators=(",", ":"))


def _cell(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")


def _csv(header, *columns):
    rows = [",".join(header)]
    rows += [",".join(_cell(v) for v in row) for row in zip(*columns)]
    return "\n".join(rows)


def _read_source(value, stdin):
    if value == "-":
        return stdin.read()
    if value.lstrip().startswith(("[", "{")):
        return value
    try:
        with open(value) as fh:
            return fh.read()
    except OSError as exc:
        raise WlpError(f"cannot read {value!r}: {exc.strerror}") from None


def _random_vector(args, n, stdin):
    chosen = [bool(args.dist), bool(args.uniform), bool(getattr(args, "lambdas", None))]
    if sum(chosen) != 1:
        raise WlpError("give exactly one of --dist, --uniform, --lambdas")
    if args.dist:
        rv = from_config(_read_source(args.dist, stdin))
    elif args.uniform:
        rv = RandomVector([Uniform(0.0, 1.0)] * n)
    else:
        rv = RandomVector([Exponential(v) for v in _floats(args.lambdas, "--lambdas")])
    if len(rv) < n:
        raise WlpError(f"expression uses {n} variables but only {len(rv)} distributions were given")
    return rv


def _lattice(args, expr, rv=None, default=None):
    if args.lattice:
        bounds = _floats(args.lattice, "--lattice")
        if len(bounds) != 2:
            raise WlpError("--lattice expects a,b")
        return LatticeInterval(*bounds)
    if default is not None:
        return default
    if rv is None:
        return _OPEN
    lo, hi = rv.support
    consts = expr.constants()
    lo, hi = min([lo, *consts]), max([hi, *consts])
    if lo == hi:
        hi = lo + 1.0
    return LatticeInterval(lo, hi)


def _model(args, stdin, default_lattice=None):
    expr = parse(args.expr, _OPEN)
    rv = _random_vector(args, expr.arity(), stdin)
    lattice = _lattice(args, expr, rv, default_lattice)
    return expr, rv, vertex_table(expr, lattice, n=len(rv))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_eval(args, stdin):
    expr = parse(args.expr, _OPEN)
    lattice = _lattice(args, expr)
    x = _floats(args.point, "--point")
    return _json({"value": evaluate(expr, x, lattice)})


def _cmd_table(args, stdin):
    expr = parse(args.expr, _OPEN)
    lattice = _lattice(args, expr, default=LatticeInterval(0.0, 1.0))
    table = vertex_table(expr, lattice, n=args.n)
    if args.format == "csv":
        return _csv(["mask", "alpha"], range(len(table.alpha)), table.alpha)
    return _json({"n": table.n, "lattice": list(lattice), "alpha": table.alpha})


def _cmd_cdf(args, stdin):
    _, rv, table = _model(args, stdin)
    if args.at is not None:
        value = cdf_mod.cdf_at(table, rv, args.at, args.method)
        return _json({"y": args.at, "F": value})
    ys = _grid(args.grid)
    values = cdf_mod.cdf_grid(table, rv, ys, args.method)
    if args.format == "csv":
        return _csv(["y", "F"], ys, values)
    return _json({"y": ys, "F": values})


def _cmd_moment(args, stdin):
    _, rv, table = _model(args, stdin)
    report = {}
    if args.route == "uniform":
        if not all(d == Uniform(0.0, 1.0) for d in rv):
            raise WlpError("--route uniform needs every input uniform on [0, 1]")
        orders = {1, *args.raw} | {j for r in args.central for j in range(1, r + 1)}
        raw = {r: moments.uniform_raw_moment(table, r) for r in sorted(orders)}
        raw[0] = 1.0
        mean = raw[1]
        report["mean"] = mean
        if args.raw:
            report["raw"] = {str(r): raw[r] for r in args.raw}
        if args.central:
            # binomial expansion of E[(Y - mean)^r] in the exact raw moments
            report["central"] = {
                str(r): math.fsum(math.comb(r, j) * raw[j] * (-mean) ** (r - j) for j in range(r + 1))
                for r in args.central
            }
        route = "survival"
    else:
        route = args.route
        mean = moments.expectation(table, rv, moments.Identity(), route)
        report["mean"] = mean
        if args.raw:
            report["raw"] = {str(r): moments.raw_moment(table, rv, r, route) for r in args.raw}
        if args.central:
            report["central"] = {
                str(r): moments.central_moment(table, rv, r, mean, route) for r in args.central
            }
    if args.mgf is not None:
        report["mgf"] = {"t": args.mgf, "value": moments.mgf(table, rv, args.mgf, route)}
    return _json(report)


def _measure(args, stdin):
    return FuzzyMeasure.from_json(json.loads(_read_source(args.measure, stdin)))


def _cmd_integral(kind):
    integral = moments.sugeno_integral if kind == "sugeno" else moments.choquet_integral
    expected = moments.sugeno_expectation if kind == "sugeno" else moments.choquet_expectation

    def command(args, stdin):
        mu = _measure(args, stdin)
        if args.expectation:
            return _json({"expectation": expected(mu)})
        if args.point is None:
            raise WlpError("give --point or --expectation")
        return _json({"value": integral(mu, _floats(args.point, "--point"))})

    return command


def _cmd_reliability(args, stdin):
    expr, rv, table = _model(args, stdin, reliability.LIFETIME_LATTICE)
    model = reliability.SystemModel(expr, rv)
    if args.mttf:
        if all(isinstance(d, Exponential) for d in rv):
            rates = reliability.ExponentialRates(tuple(d.rate for d in rv))
            return _json({"mttf": reliability.mttf_exponential(table, rates), "method": "closed-form"})
        return _json({"mttf": reliability.mean_lifetime_numeric(model), "method": "numeric"})
    if args.at is not None:
        return _json({"t": args.at, "R": reliability.system_reliability(model, args.at)})
    if args.grid is None:
        raise WlpError("give --at, --grid or --mttf")
    ts = _grid(args.grid)
    values = reliability.reliability_curve(model, ts)
    if args.format == "csv":
        return _csv(["t", "R"], ts, values)
    return _json({"t": ts, "R": values})


def _cmd_simulate(args, stdin):
    expr, rv, _ = _model(args, stdin)
    grid = tuple(_grid(args.grid).tolist()) if args.grid else ()
    plan = oracle.SimulationPlan(args.samples, args.seed, expr, rv, grid)
    summary = oracle.simulate(plan)
    return _json(summary.to_dict())


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wlp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, expr=True, dist=False):
        p = sub.add_parser(name, help=help)
        if expr:
            p.add_argument("--expr", required=True, help="expression, e.g. 'max(min(x1,x2),x3)'")
            p.add_argument("--lattice", help="lattice bounds a,b (inf allowed)")
        if dist:
            p.add_argument("--dist", help="distribution JSON: file path, '-' for stdin, or inline")
            p.add_argument("--uniform", action="store_true", help="every variable uniform on [0, 1]")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.set_defaults(func=func)
        return p

    p = add("eval", _cmd_eval, "evaluate the expression at a point")
    p.add_argument("--point", required=True)

    p = add("table", _cmd_table, "vertex table alpha[S] = p(e_S)")
    p.add_argument("--n", type=int, help="number of variables (default: arity)")

    p = add("cdf", _cmd_cdf, "CDF of Y_p", dist=True)
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--at", type=float)
    where.add_argument("--grid", help="lo,hi,num")
    p.add_argument("--method", choices=[m.value for m in cdf_mod.CdfMethod], default="disjunctive")

    p = add("moment", _cmd_moment, "mean, raw/central moments, MGF", dist=True)
    p.add_argument("--raw", type=int, action="append", default=[])
    p.add_argument("--central", type=int, action="append", default=[])
    p.add_argument("--mgf", type=float)
    p.add_argument("--route", choices=("survival", "subset", "uniform"), default="survival")

    for kind in ("sugeno", "choquet"):
        p = add(kind, _cmd_integral(kind), f"{kind.capitalize()} integral", expr=False)
        p.add_argument("--measure", required=True, help="set function JSON (path, '-' or inline)")
        p.add_argument("--point")
        p.add_argument("--expectation", action="store_true")

    p = add("reliability", _cmd_reliability, "system reliability and MTTF", dist=True)
    p.add_argument("--lambdas", help="exponential failure rates, e.g. '1,2,0.5'")
    p.add_argument("--at", type=float, help="time t > 0")
    p.add_argument("--grid", help="t grid lo,hi,num")
    p.add_argument("--mttf", action="store_true")

    p = add("simulate", _cmd_simulate, "Monte Carlo summary", dist=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", help="ECDF grid lo,hi,num")
    return parser


def run(argv=None, stdin=None) -> tuple[int, str, str]:
    """Run the CLI; returns ``(exit_code, stdout_text, stderr_text)``."""
    stdin = sys.stdin if stdin is None else stdin
    try:
        args = build_parser().parse_args(argv)
        if not hasattr(args, "lambdas"):
            args.lambdas = None
        return 0, args.func(args, stdin) + "\n", ""
    except WlpError as exc:
        return 1, "", f"wlp: error: {exc}\n"
    except NumericalError as exc:
        return 2, "", f"wlp: numerical failure: {exc}\n"


def main(argv=None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
