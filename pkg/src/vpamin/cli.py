"""Command-line front end: ``vpamin <command> ...``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 resource limit
(``--max-states``), 3 a check failed (``--verify`` mismatch, languages
differ, relation not RAQ).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .oracle import bounded_equiv, check_raq
from .partition import StatePartition
from .quotient import MinimizeReport, minimize
from .randgen import RandomSpec, generate
from .reachability import compute_tops, make_live, trim
from .textfmt import VpaSyntaxError, load, serialize
from .vpa import UnknownSymbolError, accepts, validate

log = logging.getLogger("vpamin")

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_CHECK = 0, 1, 2, 3

SWEEP_COLUMNS = ["density", "samples", "mean_trim", "mean_min", "time_s"]


class InputError(Exception):
    pass


def _read(path: str):
    try:
        vpa = load(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e
    except (VpaSyntaxError, UnknownSymbolError) as e:
        raise InputError(f"{path}: {e}") from e
    problems = validate(vpa)
    if problems:
        raise InputError(f"{path}: " + "; ".join(problems))
    return vpa


def _append_csv(path: str, columns: list[str], rows: list[dict]) -> None:
    p = Path(path)
    new = not p.exists() or p.stat().st_size == 0
    with p.open("a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns)
        if new:
            w.writeheader()
        w.writerows(rows)


def cmd_minimize(args) -> int:
    vpa = _read(args.input)
    if vpa.n_states > args.max_states:
        log.error("%s has %d states, over --max-states %d", args.input, vpa.n_states, args.max_states)
        return EXIT_LIMIT
    trace_fh = open(args.trace, "w") if args.trace else None
    try:
        trace = (lambda line: trace_fh.write(line + "\n")) if trace_fh else None
        res = minimize(vpa, use_theory=not args.no_theory, name=args.name or Path(args.input).stem,
                       trace=trace)
    finally:
        if trace_fh:
            trace_fh.close()
    status = EXIT_OK
    if args.verify is not None:
        ok, word = bounded_equiv(vpa, res.vpa, args.verify)
        if not ok:
            log.error("verification failed: languages differ on %r", vpa.alphabet.format(word))
            status = EXIT_CHECK
    text = serialize(res.vpa)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.csv:
        _append_csv(args.csv, MinimizeReport.columns(), [res.report.row()])
    r = res.report
    log.info("%s: %d -> %d states, %d vars, %d clauses, %.1f ms",
             r.name, r.states_in, r.states_out, r.vars, r.clauses, r.time_ms)
    return status


def cmd_generate(args) -> int:
    spec = RandomSpec(
        n_states=args.states, n_internal=args.internal, n_call=args.call, n_return=args.ret,
        accept_density=args.accept_density, trans_density=args.trans_density,
        stack_density=args.stack_density, seed=args.seed,
    )
    text = serialize(generate(spec))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_accepts(args) -> int:
    vpa = _read(args.input)
    try:
        word = vpa.alphabet.word(" ".join(args.word))
    except UnknownSymbolError as e:
        raise InputError(str(e)) from e
    print("accepted" if accepts(vpa, word) else "rejected")
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = _read(args.a), _read(args.b)
    if a.alphabet != b.alphabet:
        raise InputError("the two automata use different alphabets")
    ok, word = bounded_equiv(a, b, args.max_len)
    if ok:
        print(f"equivalent up to length {args.max_len}")
        return EXIT_OK
    print(f"differ on: {a.alphabet.format(word) or '<empty word>'}")
    return EXIT_CHECK


def cmd_check_raq(args) -> int:
    vpa = _read(args.input)
    live = make_live(trim(vpa), returns_only=True) if args.prepare else vpa
    blocks = []
    for chunk in filter(None, (c.strip() for c in args.blocks.split(";"))):
        try:
            blocks.append([live.state_id(s.strip()) for s in chunk.split(",")])
        except ValueError as e:
            raise InputError(f"unknown state in block {chunk!r}") from e
    try:
        part = StatePartition.from_blocks(live.n_states, blocks)
    except ValueError as e:
        raise InputError(str(e)) from e
    bad = check_raq(live, compute_tops(live), part)
    if bad is None:
        print("ok")
        return EXIT_OK
    print("violated " + bad.describe(live))
    return EXIT_CHECK


def _sweep_seed(base: int, point: int, i: int) -> int:
    return int(np.random.SeedSequence([base, point, i]).generate_state(1, dtype=np.uint64)[0])


def sweep_point(args, point: int, density: float) -> dict:
    trim_sizes, min_sizes = [], []
    for i in range(args.samples):
        spec = RandomSpec(
            n_states=args.states, n_internal=args.internal, n_call=args.call, n_return=args.ret,
            accept_density=args.accept_density, trans_density=density,
            stack_density=args.stack_density, seed=_sweep_seed(args.seed, point, i),
        )
        vpa = generate(spec)
        res = minimize(vpa)
        trim_sizes.append(res.trimmed_states)
        min_sizes.append(res.vpa.n_states)
    return {
        "density": f"{density:.4f}",
        "samples": args.samples,
        "mean_trim": f"{np.mean(trim_sizes):.4f}",
        "mean_min": f"{np.mean(min_sizes):.4f}",
    }


def densities(lo: float, hi: float, step: float) -> list[float]:
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1 if step > 0 else 1
    return [round(lo + k * step, 10) for k in range(max(count, 0))]


def run_sweep(args) -> list[dict]:
    points = densities(args.dmin, args.dmax, args.dstep)

    def job(item):
        t0 = time.perf_counter()
        row = sweep_point(args, *item)
        row["time_s"] = f"{time.perf_counter() - t0:.3f}"
        return row

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        return list(pool.map(job, enumerate(points)))


def cmd_sweep(args) -> int:
    rows = run_sweep(args)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
            w.writeheader()
            w.writerows(rows)
    else:
        w = csv.DictWriter(sys.stdout, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


def _add_random_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--states", "-n", type=int, default=30)
    p.add_argument("--internal", type=int, default=1, help="number of internal symbols")
    p.add_argument("--call", type=int, default=1, help="number of call symbols")
    p.add_argument("--return", dest="ret", type=int, default=1, help="number of return symbols")
    p.add_argument("--accept-density", type=float, default=0.5)
    p.add_argument("--stack-density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vpamin", description="Reduce visibly pushdown automata by quotienting.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimize", help="reduce an automaton file")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--csv", help="append a report row to this CSV file")
    p.add_argument("--max-states", type=int, default=10000)
    p.add_argument("--verify", type=int, metavar="LEN",
                   help="check bounded language equality up to LEN; exit 3 on mismatch")
    p.add_argument("--no-theory", action="store_true", help="emit transitivity clauses instead")
    p.add_argument("--name", help="row name for --csv (default: input file stem)")
    p.add_argument("--trace", metavar="FILE", help="write the solver trace here")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; minimize is deterministic")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("generate", help="write a random automaton")
    _add_random_opts(p)
    p.add_argument("--trans-density", type=float, default=1.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("accepts", help="test membership of one word")
    p.add_argument("input")
    p.add_argument("word", nargs="*", help="symbols, e.g. c1 r a (nothing for the empty word)")
    p.set_defaults(func=cmd_accepts)

    p = sub.add_parser("equiv-bounded", help="compare two languages up to a length")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--max-len", type=int, default=8)
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("check-raq", help="check a partition against the closure conditions")
    p.add_argument("input")
    p.add_argument("--blocks", required=True, help='blocks like "q1,q2;q3,q4"; unlisted states are singletons')
    p.add_argument("--no-prepare", dest="prepare", action="store_false",
                   help="use the automaton as given instead of trimming and completing returns")
    p.set_defaults(func=cmd_check_raq)

    p = sub.add_parser("sweep", help="mean sizes after trimming and after minimizing, per density")
    _add_random_opts(p)
    p.add_argument("--samples", "-N", type=int, default=50)
    p.add_argument("--dmin", type=float, default=0.02)
    p.add_argument("--dmax", type=float, default=2.0)
    p.add_argument("--dstep", type=float, default=0.1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as e:
        log.error("%s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
