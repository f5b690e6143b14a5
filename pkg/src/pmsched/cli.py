"""Command line: generate, solve, validate and check instances, run benchmarks."""

from __future__ import annotations

import argparse
import csv
import io as _io
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from . import bounds, lns, oracle
from .instgen import GenParams, generate
from .io import (format_instance, format_solution, parse_solution, read_instance, write_instance,
                 write_solution)
from .model import (ContractError, Criterion, Instance, PartialSchedule, Schedule, evaluate,
                    partial_value, schedule_violation, validate_instance)
from .search import CountMode, SearchConfig, Strategy, solve_exact, solve_lds

CORPUS_ENV = "PMSCHED_CORPUS"
TREE_METHODS = ("exact", "dbdfs", "ldstop", "ldslow")
LNS_METHODS = tuple(v.value for v in lns.Variant)
BENCH_ONLY = ("heuristic", "ect")
METHODS = TREE_METHODS + LNS_METHODS
INSTANCE_SUFFIXES = (".txt", ".inst", ".dat")


@dataclass
class MethodOptions:
    counting: str = "binary"
    binary_depth: int = 0
    budget: int | None = None
    window: tuple[int, int] | None = None
    lb_cp: bool = True
    lb_srpt: bool = True
    energetic: bool = True
    front_rule: bool = False
    maxflow_rule: bool = False
    adapted: bool = False
    k_max: int | None = None
    k_limit: int = 3
    x: int | None = None
    depth_limit: int | None = None
    d_bin: int | None = None
    seed: int = 0


@dataclass
class RunResult:
    method: str
    value: int
    nodes: int
    elapsed: float
    time_to_best: float
    optimal: bool
    schedule: Schedule | None = None
    params: dict | None = None


def search_config(crit: Criterion, opts: MethodOptions, strategy: Strategy,
                  time_limit: float | None) -> SearchConfig:
    return SearchConfig(criterion=crit, strategy=strategy, job_count=CountMode(opts.counting),
                        binary_depth=opts.binary_depth, max_discrepancies=opts.budget,
                        disc_window=opts.window, lb_cp=opts.lb_cp, lb_srpt=opts.lb_srpt,
                        energetic=opts.energetic, front_rule=opts.front_rule,
                        maxflow_rule=opts.maxflow_rule, adapted_rules=opts.adapted,
                        time_limit=time_limit, seed=opts.seed)


def run_method(inst: Instance, method: str, crit: Criterion, time_limit: float | None = None,
               opts: MethodOptions | None = None) -> RunResult:
    opts = opts or MethodOptions()
    t0 = time.perf_counter()
    if method == "heuristic":
        ps = bounds.upper_bound(inst, PartialSchedule.empty(inst), crit)
        dt = time.perf_counter() - t0
        return RunResult(method, partial_value(ps, crit), 0, dt, dt, False,
                         Schedule.from_partial(ps, inst))
    if method == "ect":
        value = oracle.best_ect_list(inst, crit)
        dt = time.perf_counter() - t0
        return RunResult(method, value, 0, dt, dt, False)
    if method in TREE_METHODS:
        strategy = Strategy.DFS if method == "exact" else Strategy(method)
        cfg = search_config(crit, opts, strategy, time_limit)
        sol = solve_exact(inst, cfg) if method == "exact" else solve_lds(inst, cfg)
        params = dict(strategy=strategy.value, counting=opts.counting, budget=opts.budget,
                      window=opts.window, time_limit=time_limit)
        return RunResult(method, sol.value, sol.stats.nodes, sol.stats.elapsed,
                         sol.stats.time_to_best, sol.optimal, sol.schedule, params)
    if method in LNS_METHODS:
        base = replace(lns.default_search(), criterion=crit, lb_cp=opts.lb_cp, lb_srpt=opts.lb_srpt,
                       energetic=opts.energetic, maxflow_rule=opts.maxflow_rule)
        cfg = lns.LnsConfig(variant=lns.Variant(method), k_max=opts.k_max, k_limit=opts.k_limit,
                            x=opts.x, depth_limit=opts.depth_limit, d_bin=opts.d_bin,
                            time_limit=time_limit, seed=opts.seed, search=base)
        res = lns.run(inst, cfg)
        return RunResult(method, res.value, res.stats.nodes, res.stats.elapsed,
                         res.stats.time_to_best, False, res.schedule, res.params)
    raise ContractError(f"unknown method {method!r}")


# bench ------------------------------------------------------------------

@dataclass
class BenchRow:
    method: str
    nb_best: int
    total: int
    avg_nodes: float
    avg_time: float
    avg_tbest: float
    avg_dev: float

    @property
    def pct_best(self) -> float:
        return 100.0 * self.nb_best / self.total if self.total else 0.0


def deviation(value: int, best: int) -> float:
    """Percent gap to the best known value; the denominator is floored at 1."""
    return 100.0 * (value - best) / max(abs(best), 1)


def bench_rows(results: Sequence[dict[str, RunResult]], methods: Sequence[str]) -> list[BenchRow]:
    rows = []
    n = len(results)
    best = [min(r[m].value for m in methods) for r in results]
    for m in methods:
        runs = [r[m] for r in results]
        rows.append(BenchRow(
            method=m,
            nb_best=sum(run.value == b for run, b in zip(runs, best)),
            total=n,
            avg_nodes=sum(run.nodes for run in runs) / n if n else 0.0,
            avg_time=sum(run.elapsed for run in runs) / n if n else 0.0,
            avg_tbest=sum(run.time_to_best for run in runs) / n if n else 0.0,
            avg_dev=sum(deviation(run.value, b) for run, b in zip(runs, best)) / n if n else 0.0,
        ))
    return rows


def format_rows(rows: Sequence[BenchRow], fmt: str, times: bool = True,
                skipped: Sequence[tuple[str, str]] = ()) -> str:
    header = ["method", "NbBest", "NbBest%", "AvgNodes"]
    if times:
        header += ["AvgTCPU", "AvgTBest"]
    header += ["AvgDev%"]
    table = []
    for r in rows:
        line = [r.method, str(r.nb_best), f"{r.pct_best:.1f}", f"{r.avg_nodes:.1f}"]
        if times:
            line += [f"{r.avg_time:.3f}", f"{r.avg_tbest:.3f}"]
        line += [f"{r.avg_dev:.1f}"]
        table.append(line)
    if fmt == "csv":
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(table)
        for name, why in skipped:
            buf.write(f"# skipped {name}: {why}\n")
        return buf.getvalue()
    widths = [max(len(x[c]) for x in [header] + table) for c in range(len(header))]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    out += ["  ".join(x.ljust(w) if c == 0 else x.rjust(w) for c, (x, w) in enumerate(zip(line, widths)))
            for line in table]
    out += [f"skipped {name}: {why}" for name, why in skipped]
    return "\n".join(out) + "\n"


def _bench_one(args) -> dict[str, RunResult]:
    inst, methods, crit, time_limit, opts = args
    return {m: replace(run_method(inst, m, crit, time_limit, opts), schedule=None) for m in methods}


def bench(instances: Sequence[Instance], methods: Sequence[str], crit: Criterion,
          time_limit: float | None = None, opts: MethodOptions | None = None,
          workers: int = 1) -> list[BenchRow]:
    jobs = [(inst, tuple(methods), crit, time_limit, opts) for inst in instances]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map keeps instance order whatever the completion order
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(j) for j in jobs]
    return bench_rows(results, methods)


# corpus helpers -------------------------------------------------------------

def load_instance(path: str | Path) -> Instance:
    """Read and validate; raises :class:`ContractError` on a bad instance."""
    try:
        inst = read_instance(path)
    except (OSError, ValueError) as exc:
        raise ContractError(str(exc)) from None
    problem = validate_instance(inst)
    if problem:
        raise ContractError(f"{path}: {problem}")
    return inst


def instance_paths(target: str | Path) -> list[Path]:
    path = Path(target)
    if path.is_dir():
        return sorted(p for p in path.iterdir() if p.suffix in INSTANCE_SUFFIXES)
    return [path]


def load_corpus(target: str | Path) -> tuple[list[tuple[str, Instance]], list[tuple[str, str]]]:
    loaded, skipped = [], []
    for p in instance_paths(target):
        try:
            loaded.append((p.name, load_instance(p)))
        except (OSError, ContractError) as exc:
            print(f"warning: skipping {p}: {exc}", file=sys.stderr)
            skipped.append((p.name, str(exc)))
    return loaded, skipped


# commands -------------------------------------------------------------------

def cmd_gen(args) -> int:
    made = []
    for i in range(args.count):
        params = GenParams(n=args.n, m=args.m, seed=args.seed + i, edge_density=args.density,
                           setup_range=tuple(args.setup_range), proc_range=tuple(args.proc_range),
                           tau=args.tau, rho=args.rho, alpha_range=tuple(args.alpha_range))
        made.append((params, generate(params)))
    if args.out is None:
        if args.count != 1:
            print("error: --out DIR is required with --count > 1", file=sys.stderr)
            return 2
        sys.stdout.write(format_instance(made[0][1]))
        return 0
    out = Path(args.out)
    if args.count == 1 and out.suffix:
        out.parent.mkdir(parents=True, exist_ok=True)
        write_instance(made[0][1], out)
        return 0
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "manifest.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "n", "m", "seed", "edge_density", "tau", "rho"])
        for params, inst in made:
            name = f"n{params.n}_m{params.m}_s{params.seed}.txt"
            write_instance(inst, out / name)
            w.writerow([name, params.n, params.m, params.seed, params.edge_density, params.tau, params.rho])
    return 0


def options_from(args) -> MethodOptions:
    return MethodOptions(counting=args.counting, binary_depth=args.binary_depth, budget=args.budget,
                         window=tuple(args.window) if args.window else None,
                         lb_cp=not args.no_lb_cp, lb_srpt=not args.no_lb_srpt,
                         energetic=not args.no_energetic, front_rule=args.front_rule,
                         maxflow_rule=args.maxflow_rule, adapted=args.adapted, k_max=args.k_max,
                         k_limit=args.k_limit, x=args.x, depth_limit=args.depth_limit,
                         d_bin=args.d_bin, seed=args.seed)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    crit = Criterion.parse(args.criterion)
    res = run_method(inst, args.method, crit, args.time_limit, options_from(args))
    if args.out:
        write_solution(res.schedule, res.value, args.out)
    fields = dict(method=res.method, criterion=crit.value, value=res.value, nodes=res.nodes,
                  elapsed=f"{res.elapsed:.3f}", time_to_best=f"{res.time_to_best:.3f}",
                  optimal=res.optimal)
    for k, v in (res.params or {}).items():
        fields.setdefault(k, v)
    if args.format == "csv":
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(fields.keys())
        w.writerow(fields.values())
    else:
        for k, v in fields.items():
            print(f"{k}: {v}")
        if args.show:
            sys.stdout.write(format_solution(res.schedule, res.value))
    return 0


def cmd_validate(args) -> int:
    try:
        inst = load_instance(args.instance)
    except ContractError as exc:
        print(f"invalid instance: {exc}")
        return 1
    if args.solution is None:
        print(f"instance ok: n={inst.n} m={inst.m} edges={len(inst.edges)}")
        return 0
    text = Path(args.solution).read_text()
    try:
        value, sched = parse_solution(text, inst)
    except (ContractError, ValueError, IndexError) as exc:
        print(f"invalid solution: {exc}")
        return 1
    problem = schedule_violation(sched, inst)
    if problem:
        print(f"infeasible: {problem}")
        return 1
    actual = evaluate(sched, inst, Criterion.parse(args.criterion))
    if actual != value:
        print(f"value mismatch: file says {value}, schedule gives {actual}")
        return 1
    if format_solution(sched, value) != text:
        print("solution is feasible but not in canonical form")
        return 1
    print(f"solution ok: {value}")
    return 0


def cmd_check(args) -> int:
    target = args.target or os.environ.get(CORPUS_ENV)
    if not target:
        print(f"error: give a file or directory, or set {CORPUS_ENV}", file=sys.stderr)
        return 2
    corpus, skipped = load_corpus(target)
    crits = [Criterion.parse(c) for c in args.criterion] if args.criterion else list(Criterion)
    cfg_kw = dict(front_rule=args.front_rule, maxflow_rule=args.maxflow_rule)
    bad = total = 0
    for name, inst in corpus:
        if inst.n > oracle.MAX_ORACLE_JOBS:
            print(f"{name}: skipped, n={inst.n} too large for the oracle")
            continue
        for crit in crits:
            ref = oracle.brute_force(inst, crit).value
            got = solve_exact(inst, SearchConfig(criterion=crit, **cfg_kw)).value
            total += 1
            ok = got == ref
            bad += not ok
            print(f"{name} {crit.value} {got}/{ref} {'match' if ok else 'MISMATCH'}")
    print(f"{total - bad}/{total} match")
    return 1 if bad or skipped else 0


def cmd_bench(args) -> int:
    target = args.corpus or os.environ.get(CORPUS_ENV)
    if not target:
        print(f"error: give --corpus or set {CORPUS_ENV}", file=sys.stderr)
        return 2
    corpus, skipped = load_corpus(target)
    crit = Criterion.parse(args.criterion)
    rows = bench([inst for _, inst in corpus], args.methods, crit, args.time_limit,
                 options_from(args), workers=args.workers)
    sys.stdout.write(format_rows(rows, args.format, times=not args.omit_times, skipped=skipped))
    return 0


def _add_method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--criterion", "-c", default="sum", help="sum (total completion) or lmax")
    p.add_argument("--time-limit", type=float, default=None, help="wall-clock seconds")
    p.add_argument("--counting", choices=[c.value for c in CountMode], default="binary")
    p.add_argument("--binary-depth", type=int, default=0)
    p.add_argument("--budget", type=int, default=None, help="discrepancy budget for tree methods")
    p.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"), default=None,
                   help="depths where discrepancies are allowed, LO <= depth < HI")
    p.add_argument("--no-lb-cp", action="store_true")
    p.add_argument("--no-lb-srpt", action="store_true")
    p.add_argument("--no-energetic", action="store_true")
    p.add_argument("--front-rule", action="store_true")
    p.add_argument("--maxflow-rule", action="store_true")
    p.add_argument("--adapted", action="store_true", help="discrepancy-adapted front rule")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--k-limit", type=int, default=3)
    p.add_argument("--x", type=int, default=None, help="band width for hdcdds")
    p.add_argument("--depth-limit", type=int, default=None)
    p.add_argument("--d-bin", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "csv"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate random instances")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--density", type=float, default=0.2)
    g.add_argument("--setup-range", type=int, nargs=2, default=(1, 10))
    g.add_argument("--proc-range", type=int, nargs=2, default=(1, 5))
    g.add_argument("--tau", type=float, default=0.5)
    g.add_argument("--rho", type=float, default=0.5)
    g.add_argument("--alpha-range", type=float, nargs=2, default=(-0.5, 1.5))
    g.add_argument("--out", "-o", default=None, help="file (single instance) or directory")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    s.add_argument("instance")
    s.add_argument("--method", "-m", choices=METHODS, default="exact")
    s.add_argument("--out", "-o", default=None, help="write the solution here")
    s.add_argument("--show", action="store_true", help="print the schedule")
    _add_method_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="validate an instance and optionally a solution")
    v.add_argument("instance")
    v.add_argument("solution", nargs="?")
    v.add_argument("--criterion", "-c", default="sum")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("check", help="compare the exact solver with brute force")
    c.add_argument("target", nargs="?", help=f"file or directory (default ${CORPUS_ENV})")
    c.add_argument("--criterion", "-c", action="append")
    c.add_argument("--front-rule", action="store_true")
    c.add_argument("--maxflow-rule", action="store_true")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="run methods over a corpus and tabulate")
    b.add_argument("--corpus", default=None, help=f"directory (default ${CORPUS_ENV})")
    b.add_argument("--methods", nargs="+", choices=METHODS + BENCH_ONLY, default=["exact", "heuristic"])
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--omit-times", action="store_true", help="drop timing columns for stable output")
    _add_method_flags(b)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ContractError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
