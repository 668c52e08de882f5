"""Command-line front end: ``solve``, ``compare``, ``gen`` and ``bench run``.

Results go to standard output as JSON (or CSV for benchmark tables). Errors
are printed as a JSON object ``{"error": code, "message": ...}`` and the
process exits with a non-zero status.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable

from .diagram import game_to_source, load
from .errors import CompMPGError, DisagreementDetected
from .generators import (
    BENCH_WEIGHTS,
    gen_arity_experiment,
    gen_arity_instance,
    gen_dr_experiment,
    gen_dr_instance,
    gen_layered,
    gen_mining,
)
from .oracle import DEFAULT_BRUTE_LIMIT, brute_force_solve, progress_measure_solve
from .semantics import DEFAULT_LEAF_LIMIT, EvalStats, Status, classify_all, evaluate, result_json
from .syntax import flatten

CSV_COLUMNS = ("instance", "positions", "edges", "mode", "wall-ms", "status")
EXIT_ERROR = 2
EXIT_DISAGREEMENT = 3


def parse_weight_range(text: str) -> tuple[int, int]:
    sep = ":" if ":" in text else ","
    try:
        lo, hi = (int(x) for x in text.split(sep))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI but got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty weight range {lo}..{hi}")
    return lo, hi


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise CompMPGError(f"cannot read {path}: {e.strerror}") from None


# ---------------------------------------------------------------- library API

def solve_source(source: str, mode: str = "meager", leaf_limit: int = DEFAULT_LEAF_LIMIT,
                 winners_only: bool = False) -> dict:
    """Parse, check, evaluate and classify a diagram."""
    dag = load(source)
    stats = EvalStats()
    F = evaluate(dag, mode, leaf_limit, stats)
    positions, edges = dag.flat_size()
    return {
        "semantics": mode,
        "arity": {"dom": [F.arity.left.right, F.arity.left.left],
                  "cod": [F.arity.right.right, F.arity.right.left]},
        "results": result_json(F, winners_only),
        "stats": {**stats.to_json(), "dag_nodes": dag.node_count(),
                  "flat_positions": positions, "flat_edges": edges},
    }


def oracle_statuses(game, oracle: str, budget_s: float | None = None,
                    brute_limit: int = DEFAULT_BRUTE_LIMIT) -> tuple[list[Status] | None, float]:
    """Statuses of all entrances of a closed game and the wall time in ms.

    The status list is None when the progress measure ran out of budget.
    """
    t0 = time.perf_counter()
    if oracle == "brute":
        out = [brute_force_solve(game, i, brute_limit) for i in range(game.n_entrances)]
    elif oracle == "pm":
        res = progress_measure_solve(game, budget_s)
        out = [res.status[i] for i in range(game.n_entrances)] if res.completed else None
    else:
        raise CompMPGError(f"unknown oracle {oracle!r}")
    return out, (time.perf_counter() - t0) * 1000


def compare_source(source: str, oracle: str = "brute", leaf_limit: int = DEFAULT_LEAF_LIMIT,
                   corrupt: Callable[[list[Status]], list[Status]] | None = None,
                   brute_limit: int = DEFAULT_BRUTE_LIMIT) -> dict:
    """Meager classification against a monolithic oracle on the flattened game.

    ``corrupt`` is a test hook applied to the compositional statuses before
    they are compared. Raises DisagreementDetected on any mismatch.
    """
    dag = load(source)
    t0 = time.perf_counter()
    F = evaluate(dag, "meager", leaf_limit)
    comp = classify_all(F)
    comp_ms = (time.perf_counter() - t0) * 1000
    if corrupt is not None:
        comp = corrupt(comp)
    game = flatten(dag)
    orc, orc_ms = oracle_statuses(game, oracle, brute_limit=brute_limit)
    if not (comp_ms > 0 and orc_ms > 0):
        raise CompMPGError("a side of the comparison did not run")
    bad = [i + 1 for i, (a, b) in enumerate(zip(comp, orc)) if a != b]
    if bad or len(comp) != len(orc):
        raise DisagreementDetected(
            f"entrances {bad}: compositional {[s.value for s in comp]} vs {oracle} {[s.value for s in orc]}")
    return {
        "agree": True,
        "oracle": oracle,
        "positions": len(game.role),
        "edges": game.n_edges(),
        "statuses": [s.value for s in comp],
        "compositional_ms": round(comp_ms, 3),
        "oracle_ms": round(orc_ms, 3),
    }


def _bench_one(job: tuple) -> list[dict]:
    name, source, modes, leaf_limit, budget_s = job
    dag = load(source)
    positions, edges = dag.flat_size()
    rows = []
    game = None
    for mode in modes:
        if mode in ("fat", "meager"):
            t0 = time.perf_counter()
            F = evaluate(dag, mode, leaf_limit)
            status = "/".join(s.value for s in classify_all(F))
            ms = (time.perf_counter() - t0) * 1000
        else:
            if game is None:
                game = flatten(dag)
            sts, ms = oracle_statuses(game, mode, budget_s)
            status = "/".join(s.value for s in sts) if sts is not None else "timeout"
        rows.append({"instance": name, "positions": positions, "edges": edges,
                     "mode": mode, "wall-ms": round(ms, 3), "status": status})
    return rows


def bench_rows(instances: list[tuple[str, str]], modes: list[str], leaf_limit: int = DEFAULT_LEAF_LIMIT,
               budget_s: float | None = None, jobs: int = 1) -> list[dict]:
    work = [(name, src, modes, leaf_limit, budget_s) for name, src in instances]
    if jobs <= 1:
        results = [_bench_one(w) for w in work]
    else:
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_bench_one, work))
    return [row for rows in results for row in rows]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- commands

def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_solve(args) -> int:
    source = _read(args.file)
    out = solve_source(source, args.semantics, args.leaf_limit, args.winners_only)
    out["file"] = args.file
    if args.emit_flat:
        text = game_to_source(flatten(load(source))) + "\n"
        load(text)  # the emitted leaf must read back as a valid game
        Path(args.emit_flat).write_text(text)
        out["flat_file"] = args.emit_flat
    if args.stats == "csv":
        stats = out.pop("stats")
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(stats), lineterminator="\n")
        w.writeheader()
        w.writerow(stats)
        sys.stderr.write(buf.getvalue())
    _emit(out)
    return 0


def cmd_compare(args) -> int:
    corrupt = None
    if args.corrupt:
        flip = {Status.WINNING: Status.LOSING, Status.LOSING: Status.WINNING, Status.PENDING: Status.WINNING}
        corrupt = lambda sts: [flip[sts[0]]] + sts[1:]  # noqa: E731
    out = compare_source(_read(args.file), args.oracle, args.leaf_limit, corrupt, args.brute_limit)
    out["file"] = args.file
    _emit(out)
    return 0


def _generate(args) -> list[tuple[str, str]] | str:
    wr = args.weight_range
    if args.family == "mining":
        return gen_mining(args.seed, args.floors, args.floor_positions, args.loop_arity, wr)
    if args.family == "layered":
        return gen_layered(args.seed, args.layers, weight_range=wr)
    if args.family == "dr":
        if args.count:
            return gen_dr_experiment(args.seed, count=args.count, weight_range=wr)
        return gen_dr_instance(args.seed, args.dr, weight_range=wr)
    if args.count:
        return gen_arity_experiment(args.seed, count=args.count, weight_range=wr)
    return gen_arity_instance(args.seed, args.arity, weight_range=wr)


def cmd_gen(args) -> int:
    out = _generate(args)
    if isinstance(out, str):
        if args.out:
            Path(args.out).write_text(out)
        else:
            sys.stdout.write(out)
        return 0
    if not args.out:
        raise CompMPGError("a suite (--count) needs --out DIR")
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    for name, src in out:
        (d / f"{name}.mpg").write_text(src)
    _emit({"written": len(out), "dir": str(d)})
    return 0


def _bench_instances(args) -> list[tuple[str, str]]:
    if args.files:
        return [(Path(f).stem, _read(f)) for f in args.files]
    wr = args.weight_range
    fam = args.family
    if fam == "mining":
        return [(f"mining-s{s}-f{n}", gen_mining(s, n, args.floor_positions, args.loop_arity, wr))
                for s in range(args.seed, args.seed + args.count) for n in args.floors]
    if fam == "layered":
        return [(f"layered-s{s}-l{args.layers}", gen_layered(s, args.layers, weight_range=wr))
                for s in range(args.seed, args.seed + args.count)]
    if fam == "dr":
        return gen_dr_experiment(args.seed, count=args.count, weight_range=wr)
    return gen_arity_experiment(args.seed, count=args.count, weight_range=wr)


def cmd_bench(args) -> int:
    modes = [m for m in args.modes.split(",") if m]
    for m in modes:
        if m not in ("fat", "meager", "brute", "pm"):
            raise CompMPGError(f"unknown mode {m!r}")
    rows = bench_rows(_bench_instances(args), modes, args.leaf_limit, args.budget, args.jobs)
    if args.stats == "json":
        _emit(rows)
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="compmpg", description="Compositional solver for open mean payoff games.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, weight=False):
        sp.add_argument("--leaf-limit", type=int, default=DEFAULT_LEAF_LIMIT,
                        help="maximum number of choice positions in one leaf game")
        sp.add_argument("--seed", type=int, default=0)
        if weight:
            sp.add_argument("--weight-range", type=parse_weight_range, default=BENCH_WEIGHTS,
                            help="LO,HI (write --weight-range=-5,5 for a negative LO)")

    s = sub.add_parser("solve", help="classify every entrance of a diagram")
    s.add_argument("file", help="diagram source, or - for standard input")
    s.add_argument("--semantics", choices=("fat", "meager"), default="meager")
    s.add_argument("--winners-only", action="store_true", help="omit the denotations")
    s.add_argument("--emit-flat", metavar="PATH", help="also write the flattened game as one leaf")
    s.add_argument("--stats", choices=("json", "csv"), default="json")
    common(s)
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("compare", help="check the meager result against a monolithic oracle")
    c.add_argument("file")
    c.add_argument("--oracle", choices=("brute", "pm"), default="pm")
    c.add_argument("--brute-limit", type=int, default=DEFAULT_BRUTE_LIMIT,
                   help="largest game (in positions) the brute-force oracle accepts")
    c.add_argument("--corrupt", action="store_true", help=argparse.SUPPRESS)
    common(c)
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("gen", help="generate benchmark diagrams")
    g.add_argument("family", choices=("mining", "layered", "dr", "arity"))
    g.add_argument("--floors", type=int, default=4)
    g.add_argument("--floor-positions", type=int, default=40)
    g.add_argument("--loop-arity", type=int, default=1)
    g.add_argument("--layers", type=int, default=20)
    g.add_argument("--dr", type=int, default=1)
    g.add_argument("--arity", type=int, default=1)
    g.add_argument("--count", type=int, default=0, help="emit a suite of this many instances into --out")
    g.add_argument("--out", help="output file (single instance) or directory (suite)")
    common(g, weight=True)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="benchmark runner")
    bsub = b.add_subparsers(dest="bench_command", required=True)
    r = bsub.add_parser("run", help="time solvers and print a CSV table")
    r.add_argument("files", nargs="*", help="diagram files; without files a family is generated")
    r.add_argument("--family", choices=("mining", "layered", "dr", "arity"), default="mining")
    r.add_argument("--floors", type=_int_list, default=[4, 64, 256])
    r.add_argument("--floor-positions", type=int, default=40)
    r.add_argument("--loop-arity", type=int, default=1)
    r.add_argument("--layers", type=int, default=20)
    r.add_argument("--count", type=int, default=1)
    r.add_argument("--modes", default="meager,pm", help="comma list of fat, meager, brute, pm")
    r.add_argument("--budget", type=float, default=None, help="seconds allowed to the progress measure")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--stats", choices=("json", "csv"), default="csv")
    common(r, weight=True)
    r.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DisagreementDetected as e:
        _emit(e.to_json())
        return EXIT_DISAGREEMENT
    except CompMPGError as e:
        _emit(e.to_json())
        return EXIT_ERROR
    except ValueError as e:
        _emit({"error": "InvalidArgument", "message": str(e)})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
