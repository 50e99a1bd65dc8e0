"""Command-line entry point.

Exit codes: 0 ok, 1 usage error, 2 failed assertion, 3 corrupt checkpoint,
4 work budget exceeded.

Output formats: CSV (default for tables) or JSON (``--format json``).
The default worker count comes from ``CARLETLAB_THREADS`` when ``--threads``
is absent.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from fractions import Fraction

from . import asymptotic, carlet, gf2n, hypersurface, planes
from .exact import decimal_render, format_rational, rational

EXIT_OK, EXIT_USAGE, EXIT_ASSERT, EXIT_CHECKPOINT, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational_arg(text: str) -> Fraction:
    try:
        return rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_set(text: str) -> set[int]:
    out: set[int] = set()
    for piece in filter(None, (p.strip() for p in text.split(","))):
        if "-" in piece:
            a, b = piece.split("-", 1)
            out.update(range(int(a), int(b) + 1))
        else:
            out.add(int(piece))
    return out


def _default_threads() -> int:
    env = os.environ.get("CARLETLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _emit(obj, fmt: str, csv_text: str = None) -> None:
    if fmt == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(json.dumps(obj, indent=None) + "\n")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise AssertionError(message)


def cmd_verify_planes(args) -> int:
    if args.delta_min < 3 or args.delta_min > args.delta_max:
        raise UsageError("--delta-min/--delta-max: need 3 <= delta-min <= delta-max")
    if args.checkpoint_every < 1:
        raise UsageError("--checkpoint-every must be >= 1")
    report = planes.verify_range(args.delta_min, args.delta_max, args.constant,
                                 checkpoint=args.checkpoint, workers=args.threads,
                                 checkpoint_every=args.checkpoint_every)
    _emit(report.to_json(), "json")
    lo, hi = args.delta_min, args.delta_max
    if args.expect_failures is not None:
        expected = {d for d in _int_set(args.expect_failures) if lo <= d <= hi}
    elif args.constant == planes.MAIN_CONSTANT:
        expected = {d for d in planes.EXCEPTIONAL if lo <= d <= hi}
    elif args.constant == planes.UNIFORM_CONSTANT:
        expected = set()
    else:
        return EXIT_OK
    _require(set(report.failures) == expected,
             f"failure set {report.failures} differs from expected {sorted(expected)}")
    return EXIT_OK


def cmd_exceptional_table(args) -> int:
    rows = planes.exceptional_table(args.constant)
    if args.format == "csv":
        _emit(None, "csv", planes.rows_to_csv(rows))
    else:
        _emit([{"delta": r.delta, "r_opt": r.r_opt, "computed_bound": r.computed_bound,
                "threshold": r.threshold, "verdict": r.verdict, "ratio_upper": r.ratio_upper}
               for r in rows], "json")
    _require(len(rows) == 32, "expected 32 rows")
    if args.constant == planes.MAIN_CONSTANT:
        _require(all(r.verdict == "Fail" for r in rows), "every exceptional delta should exceed 1.99")
    return EXIT_OK


def cmd_max_ratio(args) -> int:
    delta, bound = planes.max_ratio(args.delta_min, args.delta_max)
    _emit({"delta_argmax": delta, "ratio_upper": bound}, "json")
    return EXIT_OK


def cmd_asymptotic(args) -> int:
    if args.m < asymptotic.TAIL_START:
        raise UsageError(f"--m must be >= {asymptotic.TAIL_START}")
    prec = args.precision or asymptotic.PRECISION
    lam = asymptotic.lambda_optimum(prec)
    lead = asymptotic.leading_coefficient(args.m, prec)
    limit = asymptotic.limit_coefficient(prec)
    tail = asymptotic.verify_tail(args.constant, args.m, precision=prec)
    out = {
        "m": args.m,
        "lambda": [decimal_render(lam.lo, 10, "floor"), decimal_render(lam.hi, 10, "ceil")],
        "leading_coefficient": [decimal_render(lead.lo, 8, "floor"), decimal_render(lead.hi, 8, "ceil")],
        "limit_coefficient": [decimal_render(limit.lo, 8, "floor"), decimal_render(limit.hi, 8, "ceil")],
        "projected_constant": asymptotic.projected_constant(args.m, precision=prec),
        "tail": tail.to_json(),
    }
    _emit(out, "json")
    _require(tail.verdict == "Certified", f"tail verdict {tail.verdict}")
    return EXIT_OK


def cmd_derive_g(args) -> int:
    d = hypersurface.derive_g(args.b, args.delta_min, args.g_claimed)
    out = {"b": format_rational(d.b), "delta_min": d.delta_min,
           "g_minimal": decimal_render(d.g_minimal, 6, "ceil"),
           "g_claimed": None if d.g_claimed is None else format_rational(d.g_claimed), "verdict": d.verdict}
    _emit(out, "json")
    _require(d.verdict != "Fail", "derived G exceeds the claimed constant")
    return EXIT_OK


def cmd_estimate(args) -> int:
    try:
        est = hypersurface.estimate_bound(args.delta, args.n, args.q, args.mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(est.to_json(), "json")
    return EXIT_OK


def cmd_carlet_table(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = carlet.carlet_table(args.k_min, args.k_max, args.g_policy)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if args.format == "csv":
        _emit(None, "csv", carlet.rows_to_csv(rows))
    else:
        _emit([r.to_json() for r in rows], "json")
    if args.g_policy == "published":
        for r in rows:
            _require(r.n_min <= carlet.n_threshold(r.k),
                     f"k={r.k}: n_min={r.n_min} above ceil(13k/3 - 2)")
    return EXIT_OK


def cmd_carlet_asymptotic(args) -> int:
    if args.k < 100:
        raise UsageError("--k must be >= 100")
    const = carlet.asymptotic_constant(args.precision or 256)
    chain = carlet.y0_upper(args.k, args.precision or 512)
    out = {
        "constant": [decimal_render(const.lo, 8, "floor"), decimal_render(const.hi, 8, "ceil")],
        "bound": "-2817/1000",
        "y0_chain_k": args.k,
        "y0_chain_holds": chain.holds,
    }
    _emit(out, "json")
    _require(const.hi <= Fraction(-2817, 1000), "asymptotic constant above -2.817")
    _require(chain.holds, "y0 simplification chain not certified")
    return EXIT_OK


def _ctx(args) -> gf2n.FieldCtx:
    if not 2 <= args.n <= gf2n.MAX_N:
        raise UsageError(f"--n must be in [2, {gf2n.MAX_N}]")
    return gf2n.FieldCtx.alternate(args.n) if args.alternate_modulus else gf2n.FieldCtx(args.n)


def cmd_sumfree(args) -> int:
    ks = range(1, args.n) if args.all_k else [args.k]
    if args.k is None and not args.all_k:
        raise UsageError("--k or --all-k is required")
    if args.k is not None and not 1 <= args.k <= args.n:
        raise UsageError("--k must be in [1, n]")
    # budget is checked before the field tables are built
    for k in ks:
        gf2n._check_flats_budget(args.n, k, args.budget or gf2n.FLATS_BUDGET)
    ctx = _ctx(args)
    results = [gf2n.is_sum_free(ctx, k, budget=args.budget or gf2n.FLATS_BUDGET).to_json() for k in ks]
    _emit(results if args.all_k else results[0], "json")
    if args.all_k and not args.alternate_modulus and args.n >= 3:
        got = {r["k"] for r in results if r["sum_free"]}
        want = gf2n.expected_sum_free_set(args.n)
        _require(got == want, f"sum-free set {sorted(got)} differs from {sorted(want)}")
    return EXIT_OK


def cmd_variety(args) -> int:
    budget = args.budget or gf2n.VARIETY_BUDGET
    if (1 << args.n) ** args.k > budget:
        raise gf2n.BudgetExceeded(f"q^k = 2^{args.n * args.k} exceeds budget")
    counts = gf2n.variety_counts(_ctx(args), args.k, budget)
    _emit(counts.to_json(), "json")
    return EXIT_OK


def cmd_cross_check(args) -> int:
    ctx = _ctx(args)
    report = gf2n.cross_check(ctx, args.k, args.budget or gf2n.FLATS_BUDGET)
    _emit(report.to_json(), "json")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="carletlab", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--threads", type=int, default=None, help="worker processes (env CARLETLAB_THREADS)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--precision", type=int, default=None,
                   help="interval precision in bits for the asymptotic commands (>= 64)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("verify-planes", help="sweep delta and list where min_r F > C delta^(13/3); JSON report")
    s.add_argument("--delta-min", type=int, required=True)
    s.add_argument("--delta-max", type=int, required=True)
    s.add_argument("--constant", type=_rational_arg, default=planes.MAIN_CONSTANT, help='"p/q" or decimal')
    s.add_argument("--checkpoint", help='JSON {"constant": "p/q", "last_delta": int, "failures": [...]}')
    s.add_argument("--checkpoint-every", type=int, default=10_000)
    s.add_argument("--expect-failures", help="e.g. 6-37 or 6,7,8")
    s.set_defaults(func=cmd_verify_planes)

    s = sub.add_parser("exceptional-table", help="CSV delta,r_opt,computed_bound,threshold,verdict for delta in [6,37]")
    s.add_argument("--constant", type=_rational_arg, default=planes.MAIN_CONSTANT)
    s.set_defaults(func=cmd_exceptional_table)

    s = sub.add_parser("max-ratio", help="certified argmax of min_r F / delta^(13/3)")
    s.add_argument("--delta-min", type=int, default=2)
    s.add_argument("--delta-max", type=int, default=10_000)
    s.set_defaults(func=cmd_max_ratio)

    s = sub.add_parser("asymptotic", help="lambda, leading/limit coefficients and the tail certificate")
    s.add_argument("--m", type=int, default=asymptotic.TAIL_START)
    s.add_argument("--constant", type=_rational_arg, default=planes.MAIN_CONSTANT)
    s.set_defaults(func=cmd_asymptotic)

    s = sub.add_parser("derive-g", help="minimal point-count constant G for planes constant b")
    s.add_argument("--b", type=_rational_arg, required=True)
    s.add_argument("--delta-min", type=int, required=True)
    s.add_argument("--g-claimed", type=_rational_arg)
    s.set_defaults(func=cmd_derive_g)

    s = sub.add_parser("estimate", help="certified point-count error bound (JSON)")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--mode", choices=sorted(hypersurface.PUBLISHED_G), required=True)
    s.set_defaults(func=cmd_estimate)

    s = sub.add_parser("carlet-table", help="CSV k,g_used,n_min,n_min_odd_prime,j_value")
    s.add_argument("--k-min", type=int, default=3)
    s.add_argument("--k-max", type=int, default=99)
    s.add_argument("--g-policy", choices=("published", "best", "uniform"), default="published")
    s.set_defaults(func=cmd_carlet_table)

    s = sub.add_parser("carlet-asymptotic", help="enclosure of 2 log2(c) - 19/3 and the y0 chain")
    s.add_argument("--k", type=int, default=100)
    s.set_defaults(func=cmd_carlet_asymptotic)

    for name, func, help_text in (
        ("sumfree", cmd_sumfree, "brute-force k-th order sum-freeness of x^-1 (JSON)"),
        ("variety", cmd_variety, "exhaustive Theta_k / Moore counts (JSON)"),
        ("cross-check", cmd_cross_check, "variety count vs brute force (JSON)"),
    ):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--n", type=int, required=True)
        s.add_argument("--k", type=int, required=(name != "sumfree"))
        if name == "sumfree":
            s.add_argument("--all-k", action="store_true")
        s.add_argument("--budget", type=int, help="work budget override")
        s.add_argument("--alternate-modulus", action="store_true")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is None:
        args.threads = _default_threads()
    if args.threads < 1:
        print("carletlab: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.precision is not None and args.precision < 64:
        print("carletlab: error: --precision must be >= 64", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"carletlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except planes.CheckpointError as exc:
        print(f"carletlab: checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except gf2n.BudgetExceeded as exc:
        print(f"carletlab: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as exc:
        print(f"carletlab: assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT
    except ValueError as exc:
        # parameter validation inside the modules
        print(f"carletlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
