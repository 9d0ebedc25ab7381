"""Command-line front end.

    nestednets check FILE            static checks; exit 1 on errors
    nestednets translate FILE        print the flattened program
    nestednets run FILE [NET]        reduce a named net to normal form
    nestednets bench FILE [NET]      compare many reduction orders, nested and flat

Exit codes: 0 ok, 1 check or translation failure, 2 runtime fault, 3 step limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .cnap import PatternError, errors
from .engine import (ReductionError, RuntimeFault, StepLimitExceeded, Strategy,
                     reduce, reduce_all_orders)
from .program import Program
from .syntax import ParseError
from .terms import format_net

EXIT_OK, EXIT_CHECK, EXIT_FAULT, EXIT_LIMIT = 0, 1, 2, 3


class CheckFailed(Exception):
    pass


def _load(path: str) -> Program:
    try:
        return Program.load(path)
    except ParseError as exc:
        raise CheckFailed(f"{path}:{exc}") from None


def _checked(args, out) -> Program:
    prog = _load(args.file)
    if getattr(args, "unchecked", False):
        return prog
    diags = prog.check(strict=getattr(args, "strict", False))
    for d in diags:
        if d.severity != "error":
            print(f"{args.file}: {d}", file=sys.stderr)
    bad = errors(diags)
    if bad:
        for d in bad:
            print(f"{args.file}: {d}", file=out)
        raise CheckFailed(f"{args.file}: {len(bad)} error(s)")
    return prog


def cmd_check(args, out) -> int:
    prog = _load(args.file)
    diags = prog.check(strict=args.strict)
    if args.json:
        print(json.dumps([d.as_dict() for d in diags], indent=2), file=out)
    else:
        for d in diags:
            print(f"{args.file}: {d}", file=out)
    bad = errors(diags)
    if bad:
        return EXIT_CHECK
    if not args.json:
        print(f"{args.file}: ok ({len(prog.rules)} rules)", file=out)
    return EXIT_OK


def cmd_translate(args, out) -> int:
    prog = _checked(args, out)
    text = prog.dump_flat()
    if args.output:
        Path(args.output).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def _strategy(args) -> Strategy:
    return Strategy(args.strategy, args.seed)


def cmd_run(args, out) -> int:
    prog = _checked(args, out)
    rules = prog.flat_rules if args.flat else prog.rules
    net = prog.net(args.net)
    start = time.perf_counter()
    try:
        res = reduce(net, rules, _strategy(args), args.max_steps)
    except StepLimitExceeded as exc:
        _write_trace(args, exc.trace, out)
        print(f"step limit {exc.limit} reached", file=out)
        return EXIT_LIMIT
    elapsed = time.perf_counter() - start
    _write_trace(args, res.trace, out)
    print(format_net(res.net), file=out)
    print(f"steps: {res.steps}", file=out)
    print(f"time: {elapsed * 1000:.2f} ms", file=out)
    for note in res.notes:
        print(f"note: {note}", file=out)
    return EXIT_OK


def _write_trace(args, trace, out) -> None:
    if args.trace_file:
        Path(args.trace_file).write_text(trace.format() + "\n")
    elif args.trace:
        if trace:
            print(trace.format(), file=out)


def cmd_bench(args, out) -> int:
    prog = _checked(args, out)
    net = prog.net(args.net)
    ok = True
    reps = {}
    for label, rules in (("nested", prog.rules), ("flat", prog.flat_rules)):
        rep = reduce_all_orders(net, rules, args.trials, args.seed, args.max_steps)
        forms = rep.distinct_normal_forms()
        reps[label] = forms
        steps = sorted({r.steps for r in rep.runs if r.steps is not None})
        failed = [r for r in rep.runs if r.error]
        verdict = "PASS" if rep.ok else "FAIL"
        ok &= rep.ok
        print(f"{label}: {verdict} {len(rep.runs)} orders, {len(forms)} normal form(s), "
              f"steps {steps}", file=out)
        for nf in forms:
            print(f"  {format_net(nf)}", file=out)
        for r in failed:
            print(f"  {r.strategy}: {r.error}", file=out)
    if reps["nested"] and reps["flat"]:
        from .net import iso
        same = len(reps["nested"]) == 1 and len(reps["flat"]) == 1 and \
            iso(reps["nested"][0], reps["flat"][0])
        print(f"nested vs flat: {'PASS' if same else 'FAIL'}", file=out)
        ok &= same
    return EXIT_OK if ok else EXIT_CHECK


def _default_seed() -> int:
    try:
        return int(os.environ.get("INET_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nestednets",
                                 description="Interaction nets with nested conditional patterns.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="static checks of a program's rules")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="treat undecided checks as errors")
    p.add_argument("--json", action="store_true", help="print diagnostics as JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="print the program with flattened rules")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_translate)

    for name, func, helptext in (("run", cmd_run, "reduce a net to normal form"),
                                 ("bench", cmd_bench, "compare reduction orders")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file")
        p.add_argument("net", nargs="?", default="main")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--max-steps", type=int, default=100_000)
        p.add_argument("--strict", action="store_true")
        p.add_argument("--unchecked", action="store_true", help=argparse.SUPPRESS)
        if name == "run":
            p.add_argument("--strategy", choices=("fifo", "lifo", "random"), default="fifo")
            p.add_argument("--trace", action="store_true")
            p.add_argument("--trace-file")
            p.add_argument("--flat", action="store_true", help="run the flattened rules")
        else:
            p.add_argument("--trials", type=int, default=20)
        p.set_defaults(func=func)
    return ap


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except CheckFailed as exc:
        print(exc, file=sys.stderr)
        return EXIT_CHECK
    except PatternError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except KeyError as exc:
        print(f"{args.file}: {exc.args[0]}", file=sys.stderr)
        return EXIT_CHECK
    except RuntimeFault as exc:
        print(f"runtime fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except ReductionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
