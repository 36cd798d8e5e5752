"""Command-line front end: ``lowdisc cf|dsum|dedekind|disc|experiment``.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 when an experiment's
asserted bound fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import experiments
from .contfrac import cf_expand, convergent_table, table_until
from .dedekind import barkan_estimate, dedekind_fast, dedekind_sum, theorem2_error
from .diophantine import block_sum, dsum
from .discrepancy import discrepancy_report
from .errors import LowdiscError
from .exactnum import ALPHA_GRAMMAR, Enclosure, format_rational, parse_spec

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_BOUND = 0, 2, 3, 4


class UsageError(Exception):
    pass


def show(x) -> str:
    """Exact values as ``num/den`` (integers bare); enclosures outward as ``[lo, hi]``."""
    if x is None:
        return "n/a"
    if isinstance(x, Enclosure):
        if not x.is_exact:
            return x.format(17)
        x = x.lo
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else format_rational(x)
    return str(x)


def _alpha(text: str):
    try:
        return parse_spec(text)
    except (ValueError, LowdiscError) as exc:
        msg = f"bad --alpha {text!r}: {exc}"
        if ALPHA_GRAMMAR not in msg:
            msg += f"\naccepted forms: {ALPHA_GRAMMAR}"
        raise UsageError(msg) from None


def _boolean(text: str) -> bool:
    t = text.lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _emit(args, records):
    """Print ``records`` (a list of dicts) as key = value lines or JSON lines."""
    for rec in records:
        if args.json:
            print(json.dumps({k: show(v) if not isinstance(v, (bool, int, str)) else v for k, v in rec.items()}))
        else:
            for k, v in rec.items():
                print(f"{k} = {show(v)}")


# -- subcommands -------------------------------------------------------------

def cmd_cf(args):
    spec = _alpha(args.alpha)
    cf = cf_expand(spec, args.terms)
    if args.json:
        rec = {"expansion": str(cf), "exact": cf.exact}
        if args.convergents:
            rec["convergents"] = [f"{p}/{q}" for p, q in convergent_table(cf).rows]
        print(json.dumps(rec))
        return EXIT_OK
    print(cf)
    if args.convergents:
        for k, (p, q) in enumerate(convergent_table(cf).rows, start=1):
            print(f"{k} {p}/{q}")
    return EXIT_OK


def cmd_dsum(args):
    spec = _alpha(args.alpha)
    res = dsum(spec, args.p, args.n, args.eps, method=args.method)
    records = [{"value": res.value, "n": res.n, "p": show(res.p), "term_count": res.term_count,
                "method": res.method}]
    if args.blocks:
        table = table_until(spec, args.n)
        ell = 1
        while ell + 1 <= len(table) and table.q(ell + 1) - 1 <= args.n:
            d = block_sum(spec, args.p, ell, args.eps, table=table)
            records.append({"ell": d.ell, "q_ell": d.q_ell, "a_ell": d.a_ell, "total": d.total,
                            "part_A": d.part_A, "part_B": d.part_B, "part_C": d.part_C,
                            "members_B": " ".join(map(str, d.members_B)) or "-",
                            "members_C": " ".join(map(str, d.members_C)) or "-",
                            "deviation": d.deviation, "bound": d.bound()})
            ell += 1
    _emit(args, records)
    return EXIT_OK


def cmd_dedekind(args):
    a, b, p = args.a, args.b, args.p
    method = args.method
    if method == "exact":
        q = args.q if args.q is not None else p
        v = dedekind_sum(a, b, p, q, args.include_k0)
        if args.json:
            _emit(args, [{"a": a, "b": b, "p": p, "q": q, "include_k0": v.include_k0, "value": v.value}])
        else:
            print(show(v.value))
    elif method == "theorem2":
        r = theorem2_error(a, b, p)
        _emit(args, [{"E": r.E, "bound": r.bound, "E_without_k0": r.E_without_k0, "holds": r.holds}])
    elif method == "fast":
        est, ind = dedekind_fast(a, b, p)
        _emit(args, [{"estimate": est, "rel_indicator": ind}])
    else:
        _emit(args, [{"estimate": barkan_estimate(a, b), "exact": dedekind_sum(a, b, 1, 1).value}])
    return EXIT_OK


def cmd_disc(args):
    spec = _alpha(args.alpha)
    rep = discrepancy_report(spec, args.n, args.method)
    rec = {"n": rep.n}
    for key in ("l2sq", "main_term", "cor4_term", "c_log_n"):
        v = getattr(rep, key)
        if v is not None:
            rec[key] = v
    for key, v in rep.residuals.items():
        rec[f"residual_{key}"] = v
    _emit(args, [rec])
    return EXIT_OK


def cmd_experiment(args):
    result = experiments.run_experiment(args.name)
    text = result.to_csv(timestamp=not args.no_timestamp)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif not args.json:
        sys.stdout.write(text)
    verdict = "PASS" if result.ok else "FAIL"
    rec = {"experiment": result.name, "verdict": verdict, "rows": len(result.rows)}
    rec.update({k: str(v) for k, v in result.summary.items()})
    if args.json:
        print(json.dumps(rec))
    else:
        print(f"{result.name}: {verdict} " + " ".join(f"{k}={v}" for k, v in result.summary.items()),
              file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK if result.ok else EXIT_BOUND


def _experiment_epilog() -> str:
    lines = ["experiments (CSV columns):"]
    for name, exp in experiments.EXPERIMENTS.items():
        lines.append(f"  {name}: {exp.description}")
        lines.append(f"      {','.join(exp.columns)}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="one JSON object per line")

    parser = argparse.ArgumentParser(
        prog="lowdisc",
        description="Certified continued fractions, Diophantine sums, Dedekind sums and L2 discrepancy.",
        epilog=f"alpha grammar: {ALPHA_GRAMMAR}",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", parents=[common], help="continued fraction expansion")
    p.add_argument("--alpha", required=True)
    p.add_argument("--terms", type=int, required=True, help="number of quotients, counting a_0")
    p.add_argument("--convergents", action="store_true", help="also print p_k/q_k, k = 1..")
    p.set_defaults(func=cmd_cf)

    p = sub.add_parser("dsum", parents=[common], help="sum of 1/(m^p ||m alpha||^p), m = 1..n")
    p.add_argument("--alpha", required=True)
    p.add_argument("--p", type=Fraction, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=Fraction, default=Fraction(1, 10**6))
    p.add_argument("--method", choices=("auto", "exact", "fast"), default="auto")
    p.add_argument("--blocks", action="store_true", help="also print the complete blocks in 1..n")
    p.set_defaults(func=cmd_dsum)

    p = sub.add_parser("dedekind", parents=[common], help="generalized Dedekind sums")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, default=None, help="second degree (exact method; default p)")
    p.add_argument("--method", choices=("exact", "theorem2", "fast", "barkan"), default="exact")
    p.add_argument("--include-k0", type=_boolean, default=False, metavar="true|false")
    p.set_defaults(func=cmd_dedekind)

    p = sub.add_parser("disc", parents=[common], help="L2 discrepancy of the Davenport set")
    p.add_argument("--alpha", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("exact", "theorem1", "cor4", "all"), default="all")
    p.set_defaults(func=cmd_disc)

    p = sub.add_parser("experiment", parents=[common], help="run a named acceptance sweep",
                       epilog=_experiment_epilog(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("name", choices=list(experiments.EXPERIMENTS))
    p.add_argument("--out", help="CSV destination (default: stdout)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the '# generated' line")
    p.set_defaults(func=cmd_experiment)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lowdisc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LowdiscError as exc:
        print(f"lowdisc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
