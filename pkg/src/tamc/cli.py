"""Command-line surface.

Subcommands: run (execute one machine on a .lam file), convert
(print the wrapped or fully converted form), bisim (differential
check over files or generated terms), bench (counter table as CSV),
metrics (static numbers for one term).

Exit codes: 0 success, 1 a check or run failed (clash, fuel, bisim
divergence), 2 usage problems (bad flags, unreadable file, parse
error, open input). The TAMC_FUEL environment variable overrides the
default fuel everywhere; explicit --fuel flags win over it.
"""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import FAMILIES, bench, write_bench_csv
from .bisim import DEFAULT_BISIM_FUEL, bisim_check
from .calculi import DEFAULT_FUEL
from .generate import GenConfig, gen_corpus
from .machine_int import init_itam, step_itam, readback_itam
from .machine_source import SClos, STup, init_stam, step_stam, readback_stam
from .machine_target import init_ttam, step_ttam, readback_ttam
from .machine_common import MachineFinal
from .syntax import ParseError, parse, print_int, print_source, print_target
from .terms import (
    Abs,
    App,
    Closure,
    Proj,
    PVar,
    PVarBag,
    TClosure,
    Tuple,
    Var,
    VarBag,
    free_vars,
    metrics,
)
from .transforms import closure_convert, reverse_convert, unwrap, wrap


def _fail_usage(msg: str) -> int:
    print(f"tamc: {msg}", file=sys.stderr)
    return 2


def _read_term(path: str):
    """Parse one .lam file; returns a term or an int exit code."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        return _fail_usage(f"cannot read {path}: {e.strerror or e}")
    try:
        return parse(text)
    except ParseError as e:
        print(f"{path}:{e}", file=sys.stderr)
        return 2


def _env_fuel(default: int):
    raw = os.environ.get("TAMC_FUEL")
    if raw is None:
        return default
    try:
        fuel = int(raw)
    except ValueError:
        return None
    return fuel if fuel > 0 else None


def _brief(t, budget: int = 14) -> str:
    parts: list[str] = []

    def go(t):
        nonlocal budget
        if budget <= 0:
            parts.append("...")
            return
        budget -= 1
        match t:
            case Var(name=name):
                parts.append(name)
            case PVar(base=base, index=i):
                parts.append(f"pi{i} {base}")
            case Abs(params=params):
                parts.append(f"fun/{len(params)}")
            case App(fn=fn, arg=arg):
                parts.append("(")
                go(fn)
                parts.append(" ")
                go(arg)
                parts.append(")")
            case Proj(index=i, arg=arg):
                parts.append(f"pi{i} ")
                go(arg)
            case Tuple(items=items):
                parts.append("<")
                for k, it in enumerate(items):
                    if k:
                        parts.append(", ")
                    go(it)
                parts.append(">")
            case Closure(body=b, bag=bag) | TClosure(body=b, bag=bag):
                parts.append("[")
                go(b)
                bagmark = "v" if isinstance(bag, (VarBag, PVarBag)) else "!"
                parts.append(f"]{bagmark}")
            case SClos(abs=ab):
                parts.append("clos ")
                go(ab)
            case STup(items=items):
                parts.append(f"tup/{len(items)}")
            case _:
                parts.append("?")

    go(t)
    return "".join(parts)


_MACHINES = {
    "source": (init_stam, step_stam, readback_stam),
    "int": (init_itam, step_itam, readback_itam),
    "target": (init_ttam, step_ttam, readback_ttam),
}

_PRINCIPAL = {"ebeta": "beta", "epi": "pi"}


def _focus_summary(state) -> str:
    focus = state.focus
    if type(focus).__name__ == "Unev":
        return "u " + _brief(focus.term)
    return "v " + _brief(focus)


def _depths(state) -> tuple[int, int]:
    if hasattr(state, "cstack"):
        return len(state.cstack), len(state.astack)
    return len(state.stack), 0


def _entry_summary(e) -> str:
    name = type(e).__name__
    if hasattr(e, "term"):
        return f"{name} {_brief(e.term, 8)}"
    if hasattr(e, "value"):
        return f"{name} {_brief(e.value, 8)}"
    if hasattr(e, "index"):
        return f"{name} {e.index}"
    return f"{name} pending={len(e.pending)} done={len(e.done)}"


def _dump_state(step_no: int, state) -> None:
    print(f"state {step_no}:")
    print(f"  focus: {_focus_summary(state)}")
    entries = state.cstack if hasattr(state, "cstack") else state.stack
    for e in reversed(entries):
        print(f"  cstack: {_entry_summary(e)}")
    if hasattr(state, "astack"):
        print(f"  astack: {len(state.astack)} frame(s)")


def _cmd_run(args) -> int:
    t = _read_term(args.file)
    if isinstance(t, int):
        return t
    free = free_vars(t)
    if free:
        return _fail_usage(f"{args.file}: term is open (free: {', '.join(v.name for v in free)})")
    fuel = args.fuel if args.fuel is not None else _env_fuel(DEFAULT_FUEL)
    if fuel is None or fuel <= 0:
        return _fail_usage("fuel must be a positive integer")
    init, stepf, readback = _MACHINES[args.machine]
    if args.machine == "int":
        t = wrap(t)
    elif args.machine == "target":
        t = closure_convert(t)
    state = init(t)
    if args.dump_states:
        _dump_state(0, state)
    final = None
    steps = 0
    for i in range(1, fuel + 1):
        r = stepf(state)
        if isinstance(r, MachineFinal):
            final = r
            break
        state = r.state
        steps = i
        if args.dump_states:
            _dump_state(i, state)
        elif args.trace:
            label = _PRINCIPAL.get(r.name, "-")
            cdepth, adepth = _depths(state)
            print(f"{i}\t{r.name}\t{label}\t{_focus_summary(state)}\t{cdepth}\t{adepth}")
    else:
        r = stepf(state)
        if isinstance(r, MachineFinal):
            final = r
    if final is None:
        print(f"fuel exhausted after {steps} transitions")
        return 1
    if final.status == "clash":
        print(f"clash: {final.clash.value}")
        return 1
    result = readback(state)
    if args.machine == "int":
        result = unwrap(result)
    elif args.machine == "target":
        result = reverse_convert(result)
    print(print_source(result))
    return 0


def _cmd_convert(args) -> int:
    t = _read_term(args.file)
    if isinstance(t, int):
        return t
    if args.to == "int":
        print(print_int(wrap(t)))
        return 0
    try:
        ct = closure_convert(t)
    except ValueError as e:
        return _fail_usage(f"{args.file}: {e}")
    print(print_target(ct))
    return 0


def _cmd_bisim(args) -> int:
    fuel = args.fuel if args.fuel is not None else _env_fuel(DEFAULT_BISIM_FUEL)
    if fuel is None or fuel <= 0:
        return _fail_usage("fuel must be a positive integer")
    terms = []
    if args.files:
        for path in args.files:
            t = _read_term(path)
            if isinstance(t, int):
                return t
            if free_vars(t):
                return _fail_usage(f"{path}: term is open")
            terms.append(t)
    else:
        terms = gen_corpus(GenConfig(seed=args.seed), args.count)
    bad = 0
    for t in terms:
        rep = bisim_check(t, fuel=fuel)
        print(rep.summary())
        if not rep.ok:
            bad += 1
            for f in rep.failures:
                print(f"  {f}")
    print(f"{len(terms) - bad}/{len(terms)} agreed")
    return 0 if bad == 0 else 1


def _cmd_bench(args) -> int:
    fuel = args.fuel if args.fuel is not None else _env_fuel(DEFAULT_FUEL)
    if fuel is None or fuel <= 0:
        return _fail_usage("fuel must be a positive integer")
    ns = range(1, args.n_max + 1)
    rows = bench(args.family, ns, fuel=fuel)
    if args.machine != "all":
        rows = [r for r in rows if r.machine == args.machine]
    if args.csv:
        try:
            with open(args.csv, "w", encoding="utf-8", newline="") as f:
                write_bench_csv(rows, f)
        except OSError as e:
            return _fail_usage(f"cannot write {args.csv}: {e.strerror or e}")
    else:
        write_bench_csv(rows, sys.stdout)
    return 0


def _cmd_metrics(args) -> int:
    t = _read_term(args.file)
    if isinstance(t, int):
        return t
    m = metrics(t)
    free = free_vars(t)
    closed = "yes" if not free else "no"
    line = f"size={m.size} width={m.width} height={m.height} closed={closed}"
    if free:
        line += " free=" + ",".join(v.name for v in free)
    print(line)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tamc",
        description="Closure-conversion workbench: run, convert, and cross-check "
        "three lambda calculi and their tupled abstract machines.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="run one machine on a .lam file")
    p.add_argument("file")
    p.add_argument("--machine", choices=("source", "int", "target"), default="source")
    p.add_argument("--trace", action="store_true", help="print one line per transition")
    p.add_argument("--dump-states", action="store_true", help="print full states instead")
    p.add_argument("--fuel", type=int, default=None)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("convert", help="print the intermediate or target form")
    p.add_argument("file")
    p.add_argument("--to", choices=("int", "target"), required=True)
    p.set_defaults(fn=_cmd_convert)

    p = sub.add_parser("bisim", help="differential check: six executions per term")
    p.add_argument("files", nargs="*", help=".lam files; omit to generate terms")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--fuel", type=int, default=None)
    p.set_defaults(fn=_cmd_bisim)

    p = sub.add_parser("bench", help="instrumented counters as CSV")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--machine", choices=("source", "int", "target", "all"), default="all")
    p.add_argument("--csv", default=None, help="write to this file instead of stdout")
    p.add_argument("--fuel", type=int, default=None)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("metrics", help="size, width, height of one term")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_metrics)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else 2
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
