"""Command-line interface; one JSON object per output line."""
from __future__ import annotations

import argparse
import ast
import json
import operator
import os
import sys

from . import construct, scan
from .economy import classify
from .factor import U64, Factorization, factor_u64, is_prime, multiply_out


def parse_factorization(text: str) -> Factorization:
    """'2^3*3^2*5^2', '7^6' or a plain integer (factored if below 2^64)."""
    counts: dict[int, int] = {}
    for token in text.replace("·", "*").split("*"):
        token = token.strip()
        if not token:
            raise ValueError(f"empty factor in {text!r}")
        if "^" in token:
            p, e = token.split("^")
            p, e = int(p), int(e)
            if e < 1:
                raise ValueError(f"exponent must be >= 1 in {token!r}")
            if p < U64 and not is_prime(p):
                for q, a in factor_u64(p):
                    counts[q] = counts.get(q, 0) + a * e
                continue
            counts[p] = counts.get(p, 0) + e
        else:
            v = int(token)
            if v < 1:
                raise ValueError(f"factor must be positive in {token!r}")
            if v >= U64:
                counts[v] = counts.get(v, 0) + 1
            else:
                for q, a in factor_u64(v):
                    counts[q] = counts.get(q, 0) + a
    return sorted(counts.items())


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Pow: operator.pow}


def _int(text: str) -> int:
    """Integer argument; also accepts 1e6 and 5*10**8 + 1 style expressions."""
    text = text.strip().replace("_", "")
    if text.isdigit():
        return int(text)

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            if isinstance(node.value, float):
                if not node.value.is_integer():
                    raise ValueError
                return int(node.value)
            return node.value
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        value = ev(ast.parse(text, mode="eval").body)
    except (SyntaxError, ValueError):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if "e" in text.lower() and abs(value) > 2**53:
        raise argparse.ArgumentTypeError(f"{text!r} is too large for float notation; use 10**k")
    return value


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _config(args) -> scan.SieveConfig:
    kwargs = {"workers": args.threads}
    if getattr(args, "segment", None):
        kwargs["segment_size"] = args.segment
    return scan.SieveConfig(**kwargs)


def cmd_classify(args) -> int:
    factors = args.factors or []
    if factors and len(factors) != len(args.n):
        raise ValueError("give one --factors per n, or none")
    for i, text in enumerate(args.n):
        if not text.strip().isdigit():
            raise ValueError(f"not a positive decimal integer: {text!r}")
        n = int(text)
        if n < 1:
            raise ValueError(f"n must be >= 1, got {text}")
        f = parse_factorization(factors[i]) if factors else None
        if f is not None and multiply_out(f) != n:
            raise ValueError(f"--factors {factors[i]} does not multiply out to {n}")
        if f is None and n >= U64:
            raise ValueError(f"{n} >= 2^64 needs --factors")
        report = classify(n, args.base, f)
        if args.tsv:
            sys.stdout.write(f"{report.n}\t{report.delta}\t{report.phi}\t{report.h}\t{report.cls.value}\n")
        else:
            _emit({"record": "report", **report.to_json()})
    return 0


def cmd_hist(args) -> int:
    progress = None
    if args.progress:
        progress = lambda done, hi: print(f"scanned to {done} of {hi}", file=sys.stderr)
    hist = scan.histogram(args.lo, args.hi, args.base, _config(args), args.checkpoint, progress)
    if args.tsv:
        sys.stdout.write("h\tcount\n")
    for row in hist.rows():
        if args.tsv:
            sys.stdout.write(f"{row['h']}\t{row['count']}\n")
        else:
            _emit({"record": "histogram", "lo": str(hist.lo), "hi": str(hist.hi), "base": hist.base, **row})
    return 0


def cmd_runs(args) -> int:
    pred = scan.Predicate.parse(args.predicate)
    runs = scan.find_runs(args.lo, args.hi, args.base, pred, args.min_len, _config(args))
    for r in runs:
        if args.tsv:
            sys.stdout.write(f"{r.start}\t{r.length}\t{r.predicate.label}\n")
        else:
            _emit({"record": "run", **r.to_json()})
    return 0


def cmd_first(args) -> int:
    n = scan.first_with_h(args.base, args.limit, at_least=args.at_least, at_most=args.at_most, config=_config(args))
    cond = f"h >= {args.at_least}" if args.at_least is not None else f"h <= {args.at_most}"
    out = {"record": "first", "condition": cond, "limit": str(args.limit), "found": n is not None}
    if n is not None:
        out["n"] = str(n)
        out["report"] = classify(n, args.base).to_json()
    _emit(out)
    return 0


def cmd_construct(args) -> int:
    overrides = {}
    for item in args.m_override or []:
        j, _, expr = item.partition("=")
        if not expr:
            raise ValueError(f"--m-override expects j=value, got {item!r}")
        overrides[int(j)] = parse_factorization(expr)
    plan = construct.build_plan(args.t, args.k, args.base, args.variant, overrides)
    _emit({"record": "plan", **plan.to_json()})
    result = construct.dickson_search(plan, args.x_start, args.x_limit, workers=args.threads)
    out = {"record": "search", "x_start": str(args.x_start), "x_limit": str(args.x_limit), "found": result is not None}
    if result is None:
        _emit(out)
        return 0
    x, N = result
    out.update(x=str(x), N=str(N))
    _emit(out)
    reports = construct.verify_run(plan, N)
    for j, rep in zip(plan.offsets, reports):
        _emit({"record": "report", "offset": j, "k_frugal": rep.exact and rep.h >= plan.k, **rep.to_json()})
    return 0


def cmd_extravagant(args) -> int:
    n, f = construct.build_extravagant(args.k, args.base)
    rep = classify(n, args.base, f)
    _emit({
        "record": "extravagant",
        "k": args.k,
        "t": rep.delta // (args.k + 1),
        "n": str(n),
        "primes": [str(p) for p, _ in f],
        "report": rep.to_json(),
    })
    return 0


def _env_int(name: str, default: int | None) -> int | None:
    value = os.environ.get(name)
    return int(value) if value else default


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", type=int, default=_env_int("ECONOMICAL_BASE", 10))
    common.add_argument("--threads", type=int, default=_env_int("ECONOMICAL_THREADS", os.cpu_count() or 1))
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="tsv", action="store_false", help="JSON lines (default)")
    fmt.add_argument("--tsv", dest="tsv", action="store_true", help="tab-separated columns")
    common.set_defaults(tsv=False)

    parser = argparse.ArgumentParser(prog="economical", description="Digit economy of integers in base B.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="report delta, phi, h and class")
    p.add_argument("n", nargs="+")
    p.add_argument("--factors", action="append", help="factorization such as 2^3*7, one per n")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hist", parents=[common], help="histogram of h over [lo, hi)")
    p.add_argument("--lo", type=_int, default=1)
    p.add_argument("--hi", type=_int, required=True)
    p.add_argument("--segment", type=_int, default=None)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("runs", parents=[common], help="maximal runs of economical or k-frugal numbers")
    p.add_argument("--lo", type=_int, default=1)
    p.add_argument("--hi", type=_int, required=True)
    p.add_argument("--predicate", default="economical", help="economical, frugal or K-frugal")
    p.add_argument("--min-len", type=int, default=2)
    p.add_argument("--segment", type=_int, default=None)
    p.set_defaults(func=cmd_runs)

    p = sub.add_parser("first", parents=[common], help="smallest n with h(n) >= K or h(n) <= K")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--at-least", type=int)
    g.add_argument("--at-most", type=int)
    p.add_argument("--limit", type=_int, default=10**8)
    p.add_argument("--segment", type=_int, default=None)
    p.set_defaults(func=cmd_first)

    p = sub.add_parser("construct", parents=[common], help="CRT plan and prime search for a k-frugal run")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--variant", choices=[v.value for v in construct.Variant], default="baseline")
    p.add_argument("--m-override", nargs="*", metavar="J=VALUE")
    p.add_argument("--x-start", type=_int, default=0)
    p.add_argument("--x-limit", type=_int, default=10**6)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("extravagant", parents=[common], help="a number with h(n) = -k")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_extravagant)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, scan.ConfigError) as exc:
        print(f"economical {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
