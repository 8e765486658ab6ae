"""Command line entry point: ``polyinfo <command> ...``.

Exit codes: 0 success, 2 bad input or usage, 3 numerical or search
failure, 4 file system error.
"""

import argparse
import sys

from . import __version__
from ._fmt import fmt
from .camouflage import camouflage_generate, diffuse, masked_parity, parity_map, reduce
from .distribution import builtin, parity_distribution
from .errors import DistributionError, NotConvergedError, PolyinfoError, SearchError
from .fileformat import dumps, loads
from .pid import pid_broja, pid_imin
from .profiles import complexity_profile, connected_informations, marginal_utility
from .report import differing_rows, measure_suite
from .shannon import idiagram

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _add_source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--builtin", metavar="NAME", help="dyadic, triadic, xor3, camouflage4, giant_bit:N,K, parity:N")
    g.add_argument("--input", metavar="PATH", help="distribution file ('-' reads stdin)")
    return g


def _load(args):
    if getattr(args, "builtin", None):
        return builtin(args.builtin), args.builtin
    if args.input == "-":
        return loads(sys.stdin.read()), "stdin"
    with open(args.input, encoding="utf-8") as fh:
        return loads(fh.read()), args.input


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sets(spec):
    return [s for s in spec.split(",") if s]


def _table_text(report, compare=None, flagged=()):
    lines = [f"# polyinfo {__version__}  seed={report.seed}"]
    if compare is None:
        lines.append(f"# {report.source}")
        width = max(len(r.label) for r in report.rows)
        lines += [f"{r.label:<{width}}  {r.text()}" for r in report.rows]
    else:
        width = max(len(r.label) for r in report.rows)
        cells = [(r.label, r.text(), s.text(), r.key in flagged) for r, s in zip(report.rows, compare.rows)]
        w1 = max(len(report.source), *(len(c[1]) for c in cells))
        w2 = max(len(compare.source), *(len(c[2]) for c in cells))
        lines.append(f"{'':<{width}}  {report.source:<{w1}}  {compare.source}".rstrip())
        for label, a, b, flag in cells:
            lines.append(f"{label:<{width}}  {a:<{w1}}  {b:<{w2}}{'  *' if flag else ''}".rstrip())
        labels = [r.label for r in report.rows if r.key in flagged]
        lines.append(f"# {len(labels)} measures differ: {', '.join(labels) if labels else 'none'}")
    return "\n".join(lines) + "\n"


def _bounds(r):
    v = r.value
    if v is None:
        return "", "", ""
    if hasattr(v, "lower"):
        return fmt(v.value), fmt(v.lower), fmt(v.upper)
    return fmt(v), fmt(v), fmt(v)


def _table_csv(report, compare=None, flagged=()):
    if compare is None:
        lines = ["measure,value,lower,upper,status"]
        for r in report.rows:
            lines.append(",".join((r.key, *_bounds(r), r.status)))
    else:
        lines = ["measure,value_a,value_b,differs"]
        for r, s in zip(report.rows, compare.rows):
            lines.append(f"{r.key},{_bounds(r)[0]},{_bounds(s)[0]},{int(r.key in flagged)}")
    return "\n".join(lines) + "\n"


def cmd_table(args):
    render = _table_csv if args.format == "csv" else _table_text
    if args.compare:
        a, b = (measure_suite(builtin(n), args.seed, n) for n in args.compare)
        flagged = differing_rows(a, b)
        _emit(render(a, b, flagged), args.out)
        reports = (a, b)
    else:
        d, name = _load(args)
        rep = measure_suite(d, args.seed, name)
        _emit(render(rep), args.out)
        reports = (rep,)
    if any(r.status in ("NOT_CONVERGED", "OPTIMIZATION_DIVERGED") for rep in reports for r in rep.rows):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_idiagram(args):
    d, _ = _load(args)
    _emit(idiagram(d).to_csv(), args.out)
    return EXIT_OK


_PROFILES = {
    "complexity": complexity_profile,
    "connected": connected_informations,
    "mui": marginal_utility,
}


def cmd_profile(args):
    fn = _PROFILES[args.kind]
    if args.compare:
        texts = [fn(builtin(n)).to_csv() for n in args.compare]
        if args.out:
            for n, t in zip(args.compare, texts):
                _emit(t, f"{args.out}.{n}.csv")
        same = texts[0] == texts[1]
        sys.stdout.write(f"{args.kind} profiles of {args.compare[0]} and {args.compare[1]}: {'identical' if same else 'different'}\n")
        return EXIT_OK
    d, _ = _load(args)
    _emit(fn(d).to_csv(), args.out)
    return EXIT_OK


def cmd_pid(args):
    d, _ = _load(args)
    inputs = [_sets(args.input0), _sets(args.input1)]
    output = _sets(args.output)
    res = pid_broja(d, inputs, output) if args.method == "broja" else pid_imin(d, inputs, output)
    names = ("redundancy", "unique_0", "unique_1", "synergy")
    if args.format == "csv":
        lines = ["method,component,value"] + [f"{res.method},{n},{fmt(v)}" for n, v in zip(names, res.as_tuple())]
    else:
        lines = [f"# {res.method}: I({args.input0},{args.input1} : {args.output})"]
        lines += [f"{n:<10}  {fmt(v)}" for n, v in zip(names, res.as_tuple())]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_generate(args):
    kind = args.kind
    if kind == "camouflage":
        d = camouflage_generate(args.n, args.seed, args.method)
    elif kind == "parity":
        d = parity_distribution(args.n)
    elif kind == "masked_parity":
        d = masked_parity(args.n, args.seed)
    else:
        if not (args.builtin or args.input):
            raise DistributionError("BAD_PARAMETER", "diffuse needs --builtin or --input")
        src, _ = _load(args)
        m = parity_map(src, args.arity)
        d = diffuse(src, m)
        if reduce(d, m) != src:
            raise SearchError("MAP_INVALID", "diffusion round trip failed")
    _emit(dumps(d), args.out)
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="polyinfo", description="Information measures on finite joint distributions.")
    parser.add_argument("--version", action="version", version=f"polyinfo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table", help="full measure suite")
    g = _add_source(p, required=False)
    g.add_argument("--compare", nargs=2, metavar=("A", "B"), help="two built-ins side by side")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("idiagram", help="I-diagram atoms as CSV")
    _add_source(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_idiagram)

    p = sub.add_parser("profile", help="complexity, mui or connected profile as CSV")
    p.add_argument("--kind", choices=sorted(_PROFILES), required=True)
    g = _add_source(p, required=False)
    g.add_argument("--compare", nargs=2, metavar=("A", "B"))
    p.add_argument("--out", help="output path (prefix in --compare mode)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("pid", help="two-input partial information decomposition")
    _add_source(p)
    p.add_argument("input0", help="comma-separated variables")
    p.add_argument("input1")
    p.add_argument("output")
    p.add_argument("--method", choices=("broja", "imin"), default="broja")
    p.add_argument("--format", choices=("text", "csv"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pid)

    p = sub.add_parser("generate", help="write a constructed distribution")
    p.add_argument("kind", choices=("camouflage", "parity", "masked_parity", "diffuse"))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("construction", "search"), default="construction")
    p.add_argument("--arity", type=int, default=2)
    _add_source(p, required=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("table", "profile") and not (args.compare or args.builtin or args.input):
        parser.error(f"{args.command}: one of --builtin, --input or --compare is required")
    try:
        return args.func(args)
    except (NotConvergedError, SearchError) as exc:
        sys.stderr.write(f"polyinfo: {exc}\n")
        return EXIT_NUMERIC
    except PolyinfoError as exc:
        sys.stderr.write(f"polyinfo: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"polyinfo: IO_ERROR: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
