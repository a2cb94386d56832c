"""Command-line interface: ``spillage <subcommand> [options]``.

Exit codes: 0 success, 2 usage error, 1 numeric-domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import analysis, approx, bench, core, occupancy, simulation
from .errors import NumericalDomainError, ParameterError


def _scale(text: str) -> float:
    """Parse a scale value; ``inf`` is the infinite-scale sentinel."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid scale value {text!r}") from None
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError("scale must be a non-negative number or 'inf'")
    return value


def _num(value) -> object:
    if value is None:
        return "undefined"
    if isinstance(value, (int, np.integer)):
        return int(value)
    return repr(float(value))


def _json_num(value):
    if value is None:
        return "undefined"
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    return value if math.isfinite(value) else repr(value)


class Output:
    def __init__(self, stream, fmt: str, err=None) -> None:
        self.stream = stream
        self.fmt = fmt
        self.err = err or sys.stderr

    def table(self, header: Sequence[str], rows, meta: Optional[dict] = None) -> None:
        if self.fmt == "json":
            doc = dict(meta or {})
            for i, name in enumerate(header):
                doc[name] = [_json_num(row[i]) for row in rows]
            json.dump(doc, self.stream, indent=2)
            self.stream.write("\n")
            return
        writer = csv.writer(self.stream, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_num(v) for v in row])

    def record(self, mapping: dict) -> None:
        if self.fmt == "json":
            json.dump({k: _json_num(v) for k, v in mapping.items()}, self.stream, indent=2)
            self.stream.write("\n")
            return
        writer = csv.writer(self.stream, lineterminator="\n")
        writer.writerow(list(mapping))
        writer.writerow([_num(v) for v in mapping.values()])


def _params(args) -> core.SpillageParams:
    return core.SpillageParams(args.n, args.k, args.phi)


def _params_json(p: core.SpillageParams) -> dict:
    return {"n": p.n, "k": p.k, "phi": _json_num(p.phi)}


def _mass_output(out: Output, lm: core.LogMassVector, log: bool) -> None:
    values = lm.logmass if log else lm.pmf
    if out.fmt == "json":
        doc = {
            "params": _params_json(lm.params),
            "support": [int(r) for r in lm.support],
            "values": [_json_num(v) for v in values],
            "method": lm.method.value,
            "log": log,
        }
        json.dump(doc, out.stream, indent=2)
        out.stream.write("\n")
    else:
        out.table(("r", "value"), zip(lm.support, values))


def cmd_pmf(args, out: Output) -> None:
    p = _params(args)
    lm = approx.approx_log_pmf(p, args.kernel) if args.approx else core.spillage_log_pmf(p)
    _mass_output(out, lm, args.log)


def cmd_approx(args, out: Output) -> None:
    _mass_output(out, approx.approx_log_pmf(_params(args), args.kernel), args.log)


def cmd_cdf(args, out: Output) -> None:
    lm = core.spillage_log_pmf(_params(args))
    if args.r is not None:
        out.record({"r": args.r, "cdf": core.spillage_cdf(lm, args.r)})
    else:
        out.table(("r", "cdf"), zip(lm.support, core.cdf_vector(lm)))


def cmd_quantile(args, out: Output) -> None:
    lm = core.spillage_log_pmf(_params(args))
    out.table(("q", "r"), [(q, core.spillage_quantile(lm, q)) for q in args.q])


def cmd_sample(args, out: Output) -> None:
    draws = core.spillage_sample(_params(args), args.count, args.seed)
    out.table(("draw",), [(int(d),) for d in draws])


def cmd_moments(args, out: Output) -> None:
    p = _params(args)
    if args.asymptotic:
        m = analysis.asymptotic_moments(p)
        out.record({"psi": m.psi, "mean": m.mean, "variance": m.variance,
                    "skewness": m.skewness, "kurtosis": m.kurtosis})
    else:
        m = analysis.exact_moments(p)
        out.record({"mean": m.mean, "variance": m.variance,
                    "skewness": m.skewness, "kurtosis": m.kurtosis})


def cmd_pgf(args, out: Output) -> None:
    p = _params(args)
    out.table(("z", "pgf"), [(z, analysis.pgf_eval(p, z)) for z in args.z])


def cmd_compare(args, out: Output) -> None:
    rec = bench.compare(args.n, args.k, args.phi, kernel=args.kernel)
    if out.fmt == "json":
        out.record({f: getattr(rec, f) for f in bench.CSV_FIELDS})
    else:
        bench.write_csv([rec], out.stream, timing=not args.no_timing)


def cmd_sweep(args, out: Output) -> None:
    grid = bench.GridSpec.parse(args.grid_spec) if args.grid_spec else bench.GridSpec()
    if args.n_max is not None:
        grid = bench.GridSpec(tuple(n for n in grid.n_values if n <= args.n_max),
                              grid.k_fractions, grid.phi_multipliers)
    records = bench.sweep(grid, kernel=args.kernel, workers=args.workers)
    if args.out in (None, "-"):
        bench.write_csv(records, out.stream, timing=not args.no_timing)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            bench.write_csv(records, fh, timing=not args.no_timing)
    if args.correlation:
        r = bench.variance_accuracy_correlation(records)
        print(f"pearson_lrmse_log_asym_variance={r!r}", file=out.err)


def cmd_mixture_check(args, out: Output) -> None:
    out.record({
        "n": args.n, "m": args.m, "theta": args.theta,
        "binomial_mixture_residual": occupancy.mixture_binomial_residual(args.n, args.m, args.theta),
        "occupancy_mixture_residual": occupancy.occupancy_mixture_residual(args.n, args.m, args.theta),
    })


def cmd_simulate(args, out: Output) -> None:
    params = occupancy.OccupancyParams(args.n, args.m, args.theta)
    run = simulation.simulate(params, args.trials, args.seed, workers=args.workers)
    cond = simulation.conditional_spillage_empirical(run, args.k)
    if cond.insufficient_data:
        raise NumericalDomainError(f"insufficient data: no trial produced K = {args.k}")
    rows = [(r, cond.empirical[r], cond.exact[r], cond.tv_distance) for r in range(cond.exact.size)]
    meta = {"params": {"n": args.n, "m": args.m, "theta": args.theta, "k": args.k,
                       "trials": args.trials, "seed": args.seed},
            "count": cond.count}
    out.table(("r", "empirical", "exact", "tv"), rows, meta=meta)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spillage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name, func, help_text, dist=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if dist:
            p.add_argument("--n", type=int, required=True, help="size parameter")
            p.add_argument("--k", type=int, required=True, help="occupancy parameter")
            p.add_argument("--phi", type=_scale, required=True, help="scale parameter (or 'inf')")
        return p

    def kernel_opt(p):
        p.add_argument("--kernel", choices=approx.KERNELS, default=approx.DEFAULT_KERNEL)

    p = command("pmf", cmd_pmf, "probability mass function")
    p.add_argument("--approx", action="store_true", help="use the saddle-point approximation")
    p.add_argument("--log", action="store_true", help="emit log-probabilities")
    kernel_opt(p)

    p = command("approx", cmd_approx, "approximate probability mass function")
    p.add_argument("--log", action="store_true")
    kernel_opt(p)

    p = command("cdf", cmd_cdf, "cumulative distribution function")
    p.add_argument("--r", type=int)

    p = command("quantile", cmd_quantile, "quantile function")
    p.add_argument("--q", type=float, nargs="+", required=True)

    p = command("sample", cmd_sample, "seeded random draws")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)

    p = command("moments", cmd_moments, "exact or asymptotic moments")
    p.add_argument("--asymptotic", action="store_true")

    p = command("pgf", cmd_pgf, "probability generating function")
    p.add_argument("--z", type=float, nargs="+", required=True)

    p = command("compare", cmd_compare, "accuracy of the approximation at one point")
    p.add_argument("--no-timing", action="store_true", help="leave runtime columns empty")
    kernel_opt(p)

    p = command("sweep", cmd_sweep, "accuracy sweep written as CSV", dist=False)
    p.add_argument("--n-max", type=int, help="drop grid sizes above this n")
    p.add_argument("--grid-spec", help="e.g. 'n=10,20,50;k=0.1,0.5,0.9;phi=0.25,1,4'")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="leave runtime columns empty")
    p.add_argument("--correlation", action="store_true",
                   help="report the lrmse / log-variance correlation on stderr")
    kernel_opt(p)

    p = command("mixture-check", cmd_mixture_check, "binomial mixture identity residuals", dist=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)

    p = command("simulate", cmd_simulate, "Monte-Carlo check of the conditional spillage law", dist=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    return parser


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, Output(stdout, args.format, stderr))
    except ParameterError as exc:
        print(f"spillage {args.command}: error: {exc}", file=stderr)
        return 2
    except (NumericalDomainError, ArithmeticError) as exc:
        print(f"spillage {args.command}: numeric error: {exc}", file=stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
