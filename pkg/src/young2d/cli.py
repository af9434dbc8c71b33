"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 hypothesis or constraint
violation, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .bounds import ControlModulus, DivergentSeriesError, verify_main_inequality
from .functions import HypothesisError, SampledFunction1D, SampledFunction2D, SizeError
from .integral import young_1d, young_2d, young_bound_1d
from .localtime import (CONVERGENCE_COLUMNS, MOMENT_COLUMNS, UndersamplingError,
                        bivariation_moments, check_oversampling, convergence_experiment)
from .sweep import SWEEP_COLUMNS, run_sweep, summarize
from .variation import bivariation_x, bivariation_y, joint_variation, p_variation

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NONCONVERGED = 0, 1, 2, 3
DEFAULT_SEED = 20240917


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _exponent(text: str) -> float:
    v = float(text)
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"exponent p={v} < 1 is not supported")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="young2d", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value file; command-line flags win")
    common.add_argument("--output", "-o", type=Path, help="write the result here instead of stdout")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes; 1 gives bitwise-reproducible output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("variation", parents=[common], help="p-variation and bivariation seminorms")
    p.add_argument("--input", type=Path, required=True, help="1D or 2D CSV")
    p.add_argument("--p", type=_exponent, default=1.0)
    p.add_argument("--q", type=_exponent, default=None, help="exponent for --bivariation-y (default: --p)")
    p.add_argument("--bivariation-x", action="store_true")
    p.add_argument("--bivariation-y", action="store_true")
    p.add_argument("--joint", action="store_true", help="joint p-variation of a 2D input")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="joint_mode", action="store_const", const="exact")
    mode.add_argument("--heuristic", dest="joint_mode", action="store_const", const="heuristic")
    p.add_argument("--seed", type=int, default=0, help="restart seed for --heuristic")

    p = sub.add_parser("integrate1d", parents=[common], help="1D Young integral of f dg")
    p.add_argument("--f", type=Path, required=True)
    p.add_argument("--g", type=Path, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-depth", type=int, default=14)
    p.add_argument("--p", type=_exponent, default=None, help="with --q, also print the Young bound")
    p.add_argument("--q", type=_exponent, default=None)

    p = sub.add_parser("integrate2d", parents=[common], help="2D Young integral of F dG")
    p.add_argument("--F", type=Path, required=True)
    p.add_argument("--G", type=Path, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--min-depth", type=int, default=0)

    p = sub.add_parser("verify", parents=[common],
                       help="maximal inequality for one (F, G) pair or a randomized sweep")
    p.add_argument("--sweep", action="store_true")
    p.add_argument("--n-cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--misscale", type=_int_list, default=[],
                   help="case ids whose G is inflated past its Hölder constant")
    p.add_argument("--F", type=Path)
    p.add_argument("--G", type=Path)
    p.add_argument("--p", type=_exponent, default=1.0)
    p.add_argument("--q", type=_exponent, default=1.0)
    p.add_argument("--p-tilde", type=float, default=1.5)
    p.add_argument("--q-tilde", type=float, default=1.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--c-lambda", type=float, default=1.0)
    p.add_argument("--c-mu", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-depth", type=int, default=11)
    p.add_argument("--series-terms", type=int, default=10 ** 5)

    p = sub.add_parser("localtime", parents=[common],
                       help="upcrossing approximation of Brownian local time")
    p.add_argument("--table", choices=["convergence", "moments"], default="convergence")
    p.add_argument("--ks", type=_int_list, default=[3, 4, 5, 6])
    p.add_argument("--n-paths", type=int, default=200)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n-steps", type=int, default=None,
                   help="default 2^(2 max(ks) + 6)")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--q1", type=float, default=1.1)
    p.add_argument("--q2", type=float, default=1.1)
    p.add_argument("--method", choices=["young", "exact"], default="young")
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Config values become subcommand defaults; explicit flags override them."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    if known.config is None or known.command not in subparsers:
        return parser.parse_args(argv)
    subparser = subparsers[known.command]
    actions = {a.dest: a for a in subparser._actions}
    defaults = {}
    try:
        lines = known.config.read_text().splitlines()
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
    for n, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            parser.error(f"{known.config}:{n}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        dest = key.replace("-", "_")
        act = actions.get(dest)
        if act is None or dest in ("config", "help"):
            parser.error(f"{known.config}:{n}: unknown key {key!r}")
        if act.nargs == 0:
            on = value.lower() in ("1", "true", "yes")
            defaults[dest] = act.const if on else act.default
        else:
            try:
                defaults[dest] = act.type(value) if act.type else value
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"{known.config}:{n}: bad value for {key}: {exc}")
        act.required = False
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _emit(args, text: str) -> None:
    if args.output is not None:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_variation(args) -> int:
    f = io.read_function(args.input)
    rows = []
    if isinstance(f, SampledFunction1D):
        if args.bivariation_x or args.bivariation_y or args.joint:
            raise UsageError("bivariation and joint variation need a 2D input")
        r = p_variation(f, args.p)
        rows.append(["p_variation", args.p, r.value, r.exact])
    else:
        if not (args.bivariation_x or args.bivariation_y or args.joint):
            args.bivariation_x = args.bivariation_y = True
        q = args.p if args.q is None else args.q
        if args.bivariation_x:
            r = bivariation_x(f, args.p)
            rows.append(["bivariation_x", args.p, r.value, r.exact])
        if args.bivariation_y:
            r = bivariation_y(f, q)
            rows.append(["bivariation_y", q, r.value, r.exact])
        if args.joint:
            r = joint_variation(f, args.p, args.joint_mode or "exact", seed=args.seed)
            rows.append(["joint_variation", args.p, r.value, r.exact])
    _emit(args, io.CsvTable(["quantity", "exponent", "value", "exact"], rows).to_text())
    return EXIT_OK


def cmd_integrate1d(args) -> int:
    f, g = io.read_function(args.f), io.read_function(args.g)
    if not (isinstance(f, SampledFunction1D) and isinstance(g, SampledFunction1D)):
        raise UsageError("integrate1d needs two 1D inputs")
    if f.domain != g.domain:
        raise UsageError(f"domains differ: {f.domain} vs {g.domain}")
    res = young_1d(f, g, args.tol, args.max_depth)
    header = ["value", "depth", "last_delta", "converged"]
    row = [res.value, res.depth_reached[0], res.last_delta, res.converged]
    if args.p is not None and args.q is not None:
        header.append("young_bound")
        row.append(young_bound_1d(f, g, args.p, args.q))
    _emit(args, io.CsvTable(header, [row]).to_text())
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_integrate2d(args) -> int:
    F, G = io.read_function(args.F), io.read_function(args.G)
    if not (isinstance(F, SampledFunction2D) and isinstance(G, SampledFunction2D)):
        raise UsageError("integrate2d needs two 2D inputs")
    if F.domain != G.domain:
        raise UsageError(f"domains differ: {F.domain} vs {G.domain}")
    res = young_2d(F, G, args.tol, args.max_depth, min_depth=args.min_depth)
    table = io.CsvTable(["value", "depth_x", "depth_y", "last_delta", "converged"],
                        [[res.value, *res.depth_reached, res.last_delta, res.converged]])
    _emit(args, table.to_text())
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    if args.sweep:
        rows = run_sweep(args.n_cases, args.seed, args.threads, args.misscale)
        summary = summarize(rows)
        comments = [f"seed={args.seed}"] + [f"{k}={v}" for k, v in summary.items()]
        _emit(args, io.CsvTable.from_dicts(rows, SWEEP_COLUMNS, comments).to_text())
        for r in rows:
            if r["status"] != "ok":
                print(f"case {r['case_id']}: {r['status']} (Hölder ratio {r['holder_ratio']:.4g})",
                      file=sys.stderr)
        return EXIT_OK if summary["all_satisfied"] else EXIT_HYPOTHESIS
    if args.F is None or args.G is None:
        raise UsageError("verify needs --F and --G, or --sweep")
    mod = ControlModulus(args.c_lambda, args.p_tilde, args.c_mu, args.q_tilde, args.alpha)
    F, G = io.read_function(args.F), io.read_function(args.G)
    if not (isinstance(F, SampledFunction2D) and isinstance(G, SampledFunction2D)):
        raise UsageError("verify needs two 2D inputs")
    rep = verify_main_inequality(F, G, args.p, args.q, mod, args.tol, args.max_depth,
                                 args.series_terms)
    _emit(args, io.dumps(rep) + "\n")
    if not rep.integral_converged:
        return EXIT_NONCONVERGED
    ok = rep.satisfied and rep.towghi_satisfied is not False
    return EXIT_OK if ok else EXIT_HYPOTHESIS


def cmd_localtime(args) -> int:
    ks = args.ks
    if not ks:
        raise UsageError("--ks is empty")
    n_steps = args.n_steps if args.n_steps is not None else 2 ** (2 * max(ks) + 6)
    for k in ks:
        check_oversampling(n_steps, k)
    if args.table == "convergence":
        rows = convergence_experiment(ks, args.n_paths, args.seed, args.m, args.T, n_steps,
                                      q1=args.q1, q2=args.q2, alpha=args.alpha, delta=args.delta,
                                      method=args.method, threads=args.threads)
        cols = CONVERGENCE_COLUMNS
    else:
        rows = bivariation_moments(ks, args.n_paths, args.seed, args.m, args.delta, args.T,
                                   n_steps, threads=args.threads)
        cols = MOMENT_COLUMNS
    comments = [f"seed={args.seed}", f"m={args.m}", f"T={args.T}", f"n_steps={n_steps}"]
    _emit(args, io.CsvTable.from_dicts(rows, cols, comments).to_text())
    return EXIT_OK


COMMANDS = {"variation": cmd_variation, "integrate1d": cmd_integrate1d,
            "integrate2d": cmd_integrate2d, "verify": cmd_verify, "localtime": cmd_localtime}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, sys.argv[1:] if argv is None else list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, io.ParseError, OSError) as exc:
        print(f"young2d: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisError, SizeError, UndersamplingError, DivergentSeriesError, ValueError) as exc:
        print(f"young2d: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS


if __name__ == "__main__":
    sys.exit(main())
