"""Command-line driver: simulate, search, verify, enumerate, bounds.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 strategy fault,
4 round cap reached, 5 memo budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from ._backend import BACKEND
from .adversary import ADVERSARIES, DEFAULT_POOL, make_adversary, run_adversary, run_schedule
from .errors import (
    InvalidTreeError,
    MemoryBudgetExceeded,
    ScheduleFormatError,
    StrategyFault,
)
from .search import (
    DEFAULT_MAX_ENTRIES,
    SearchResult,
    bound_window,
    exact_tstar,
    lower_bound,
    replay_witness,
    upper_bound,
    verify_bounds,
)
from .trees import MAX_ENUMERATE_N, Schedule, enumerate_trees, load_schedule

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_STRATEGY = 3
EXIT_CAP = 4
EXIT_BUDGET = 5

DEFAULT_SEED = 0


class InputError(Exception):
    pass


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def parse_range(spec: str) -> list[int]:
    """``"7"`` or ``"2..5"`` (inclusive)."""
    try:
        if ".." in spec:
            lo, hi = spec.split("..", 1)
            lo_i, hi_i = int(lo), int(hi)
            if lo_i > hi_i:
                raise ValueError
            return list(range(lo_i, hi_i + 1))
        return [int(spec)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO..HI, got {spec!r}") from None


def cmd_simulate(args) -> int:
    if args.adversary == "file":
        if not args.input:
            raise InputError("--adversary file needs --input")
        schedule = load_schedule(args.input)
        n = schedule.n
        trace = run_schedule(schedule, cap=args.cap)
    else:
        if args.n is None:
            raise InputError("--n is required unless --adversary file")
        n = args.n
        if n < 1:
            raise InputError(f"--n must be positive, got {n}")
        strategy = make_adversary(args.adversary, n, seed=args.seed, pool=args.pool)
        trace = run_adversary(strategy, n, cap=args.cap)

    if args.format == "json":
        data = trace.to_json()
    elif args.format == "csv":
        data = trace.to_csv()
    else:
        data = None
    if data is not None and not args.output:
        sys.stdout.write(data)
        return EXIT_OK if trace.completed else EXIT_CAP
    if data is not None:
        _write(data, args.output)

    w = bound_window(n)
    print(f"adversary={trace.strategy if args.adversary != 'file' else 'file'} n={n}")
    if not trace.completed:
        print(f"cap reached after {len(trace.rounds)} rounds without broadcast")
        return EXIT_CAP
    ok = trace.tstar <= w.upper
    print(f"t*={trace.tstar} broadcaster={trace.broadcaster}")
    print(f"window=[{w.lower},{w.upper}]")
    print(f"upper bound check: {'PASS' if ok else 'FAIL'} (t*={trace.tstar} <= {w.upper})")
    return EXIT_OK if ok else EXIT_FAIL


def _backend_arg(name: str) -> str | None:
    return None if name == "auto" else name


def cmd_search(args) -> int:
    try:
        result = exact_tstar(
            args.n,
            canonicalize=args.canonicalize,
            max_entries=args.max_entries,
            workers=args.workers,
            expensive=args.expensive,
            backend=_backend_arg(args.backend),
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.output:
        _write(result.to_json(timing=args.timing), args.output)
    check = verify_bounds(result)
    replay_ok = replay_witness(result)
    w = result.window
    print(f"n={result.n} t*={result.tstar} window=[{w.lower},{w.upper}] {'PASS' if check.passed else 'FAIL'}")
    print(f"witness length={len(result.witness)} replay={'OK' if replay_ok else 'MISMATCH'}")
    s = result.stats
    line = (
        f"stats: expanded={s.expanded} memo_entries={s.entries} memo_hits={s.hits} "
        f"backend={s.backend} workers={s.workers} canonicalize={result.canonicalize}"
    )
    if args.timing:
        line += f" wall_time={s.wall_time:.3f}s"
    print(line)
    return EXIT_OK if check.passed and replay_ok else EXIT_FAIL


def cmd_verify(args) -> int:
    try:
        obj = json.loads(Path(args.input).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.input}: {exc}") from exc

    if isinstance(obj, dict) and "witness" in obj:
        try:
            result = SearchResult.from_dict(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed search result: {exc}") from exc
        check = verify_bounds(result)
        replay_ok = replay_witness(result)
        print(check)
        print(f"witness replay: {'OK' if replay_ok else 'MISMATCH'}")
        return EXIT_OK if check.passed and replay_ok else EXIT_FAIL

    schedule = Schedule.from_dict(obj)
    trace = run_schedule(schedule)
    w = bound_window(schedule.n)
    if not trace.completed:
        print(f"FAIL: schedule of {len(schedule)} trees ends without broadcast")
        return EXIT_FAIL
    ok = trace.tstar <= w.upper
    recorded = obj.get("tstar") if isinstance(obj, dict) else None
    if recorded is not None and recorded != trace.tstar:
        ok = False
        print(f"recorded t*={recorded} but replay gives t*={trace.tstar}")
    print(f"{'PASS' if ok else 'FAIL'}: n={schedule.n} t*={trace.tstar} window=[{w.lower},{w.upper}]")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_enumerate(args) -> int:
    if not 1 <= args.n <= MAX_ENUMERATE_N:
        raise InputError(f"enumerate supports 1 <= n <= {MAX_ENUMERATE_N}, got {args.n}")
    trees = list(enumerate_trees(args.n))
    if args.dump:
        Path(args.dump).write_text(Schedule(tuple(trees), args.n).to_json())
    print(len(trees))
    return EXIT_OK


def cmd_bounds(args) -> int:
    rows = []
    for n in args.n:
        if n < 1:
            raise InputError(f"n must be positive, got {n}")
        raw_lower = -(-(3 * n - 1) // 2) - 2
        lo, hi = lower_bound(n), upper_bound(n)
        notes = []
        if raw_lower < 0:
            notes.append(f"lower clamped from {raw_lower}")
        if lo > hi:
            notes.append("WARN lower > upper")
        rows.append((n, lo, hi, "; ".join(notes)))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lower", "upper"])
        for n, lo, hi, _ in rows:
            w.writerow([n, lo, hi])
        _write(buf.getvalue(), args.output)
        return EXIT_OK
    lines = [f"{'n':>6} {'lower':>6} {'upper':>6}"]
    for n, lo, hi, note in rows:
        lines.append(f"{n:>6} {lo:>6} {hi:>6}" + (f"  {note}" if note else ""))
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="treecast", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="play one adversary and report t*")
    sim.add_argument("--adversary", choices=ADVERSARIES + ("file",), default="path")
    sim.add_argument("--n", type=int)
    sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sim.add_argument("--cap", type=int, help="round cap (default n^2, or the schedule length)")
    sim.add_argument("--pool", type=int, default=DEFAULT_POOL, help="greedy candidate pool for n > 7")
    sim.add_argument("--input", help="schedule JSON for --adversary file")
    sim.add_argument("--output", help="write the trace here")
    sim.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sim.set_defaults(func=cmd_simulate)

    se = sub.add_parser("search", help="exact worst-case t* for small n")
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--canonicalize", action=argparse.BooleanOptionalAction, default=True)
    se.add_argument("--workers", type=int, default=1)
    se.add_argument("--expensive", action="store_true", help="allow n=6")
    se.add_argument("--max-entries", type=int, default=DEFAULT_MAX_ENTRIES)
    se.add_argument("--backend", choices=("auto", "compiled", "python"), default="auto")
    se.add_argument("--timing", action="store_true", help="report wall time (breaks byte-identical output)")
    se.add_argument("--output", help="write the search result JSON here")
    se.set_defaults(func=cmd_search)

    ve = sub.add_parser("verify", help="replay a search result, trace, or schedule and check bounds")
    ve.add_argument("--input", required=True)
    ve.set_defaults(func=cmd_verify)

    en = sub.add_parser("enumerate", help="count (and optionally dump) all rooted trees")
    en.add_argument("--n", type=int, required=True)
    en.add_argument("--dump", help="write all trees as schedule JSON")
    en.set_defaults(func=cmd_enumerate)

    bo = sub.add_parser("bounds", help="tabulate the lower/upper bound window")
    bo.add_argument("--n", type=parse_range, required=True, help="N or LO..HI")
    bo.add_argument("--format", choices=("text", "csv"), default="text")
    bo.add_argument("--output")
    bo.set_defaults(func=cmd_bounds)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("cap", "workers", "max_entries"):
        value = getattr(args, name, None)
        if value is not None and value < 1:
            print(f"error: --{name.replace('_', '-')} must be at least 1", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ScheduleFormatError, InvalidTreeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except StrategyFault as exc:
        print(f"strategy fault: {exc}", file=sys.stderr)
        return EXIT_STRATEGY
    except MemoryBudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
