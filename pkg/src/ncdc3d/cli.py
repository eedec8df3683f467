"""Command-line front end.

Exit codes: 0 when a verdict, explanation or inference is produced, 1 when
the network is proven inconsistent (only on a grid at or above the exact
bound), 2 for usage, parse and validation errors, 3 when the budget runs out
or nothing was found on a grid below the bound.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from enum import Enum
from typing import TextIO

from . import asp_emit, oracle
from .fixtures import FIXTURES, fixture, fixture_text, replicate
from .model import BasicRelation, GridSpec, Network, NetworkError, Solution
from .parser import ParseError, parse_network
from .solver import (
    BudgetExceeded,
    InconsistentNetwork,
    NoExplanation,
    SolveOptions,
    Status,
    check,
    explain,
    grid_for,
    infer,
    verify_solution,
)

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3


class OutputFormat(Enum):
    HUMAN = "human"
    STRUCTURED = "structured"


@dataclass
class RunConfig:
    command: str
    source: str | None = None
    grid: GridSpec | None = None
    connected: bool | None = None
    enumerate: bool = False
    max_nodes: int | None = None
    time_limit: float | None = None
    output: OutputFormat = OutputFormat.HUMAN
    workers: int = 1
    mode: str = "check"
    facts_only: bool = False
    solve: bool = False
    copies: int = 3
    base: str = "marine"

    def __post_init__(self) -> None:
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise ValueError("the node budget must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("the time limit must be positive")
        if self.workers < 1:
            raise ValueError("the worker count must be positive")
        if self.copies < 1:
            raise ValueError("the number of copies must be positive")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# input


def parse_grid(text: str) -> GridSpec:
    """``9`` for a cube or ``MxNxP``."""
    parts = text.lower().split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; use N or MxNxP") from None
    if len(dims) == 1:
        dims *= 3
    if len(dims) != 3 or min(dims) < 1:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}; use N or MxNxP")
    return GridSpec(*dims)


def read_source(source: str | None, stdin: TextIO) -> str:
    """File contents, ``-`` for standard input, or a bundled fixture name."""
    if source is None or source == "-":
        return stdin.read()
    if os.path.exists(source):
        with open(source, encoding="utf-8", newline="") as fh:
            return fh.read()
    if source in FIXTURES:
        return fixture_text(source)
    raise UsageError(f"no such file or bundled fixture: {source}")


def load(cfg: RunConfig, stdin: TextIO) -> Network:
    net = parse_network(read_source(cfg.source, stdin))
    if cfg.connected is not None:
        net = Network(net.objects, net.constraints, net.ab_marks, net.infer_requests, cfg.connected, net.grid)
    return net


# ---------------------------------------------------------------------------
# output


def _pairs(pairs) -> list[list[str]]:
    return sorted([list(p) for p in pairs])


def document(
    verdict: str,
    grid: GridSpec,
    solution: Solution | None = None,
    inferred: dict[str, list[str]] | None = None,
    cost: tuple[int, int] | None = None,
    budget_exhausted: bool = False,
) -> dict:
    """The structured result; every field is always present."""
    objects = {}
    if solution is not None:
        objects = {name: [list(c) for c in obj.sorted_cells()] for name, obj in solution.assignment.items()}
    return {
        "verdict": verdict,
        "grid": list(grid.dims),
        "objects": objects,
        "dropped_defaults": _pairs(solution.dropped_defaults) if solution else [],
        "violated": _pairs(solution.violated) if solution else [],
        "inferred": inferred or {},
        "cost": list(cost) if cost is not None else (list(solution.cost) if solution else None),
        "budget_exhausted": budget_exhausted,
    }


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True)


def _human(doc: dict, out: TextIO, message: str = "") -> None:
    out.write(f"verdict: {doc['verdict']}\n")
    out.write("grid: {}x{}x{}\n".format(*doc["grid"]))
    if message:
        out.write(f"note: {message}\n")
    if doc["cost"] is not None:
        out.write("cost: violated={} dropped_defaults={}\n".format(*doc["cost"]))
    for key in ("violated", "dropped_defaults"):
        if doc[key]:
            out.write(f"{key}: " + ", ".join(f"({u}, {v})" for u, v in doc[key]) + "\n")
    for pair, rels in doc["inferred"].items():
        out.write(f"infer {pair}: {' | '.join(rels)}\n")
    if doc["objects"]:
        out.write("witness:\n")
        for name, cells in doc["objects"].items():
            xs, ys, zs = zip(*cells)
            out.write(f"  {name}: {len(cells)} cells, box [{min(xs)},{max(xs)}]x[{min(ys)},{max(ys)}]"
                      f"x[{min(zs)},{max(zs)}]\n")
            out.write("    " + " ".join(f"({x},{y},{z})" for x, y, z in cells) + "\n")


def _emit(cfg: RunConfig, doc: dict, out: TextIO, message: str = "") -> None:
    if cfg.output is OutputFormat.STRUCTURED:
        out.write(dumps(doc) + "\n")
    else:
        _human(doc, out, message)


def _sorted_tokens(rels) -> list[str]:
    return [r.token for r in sorted(rels, key=BasicRelation.sort_key)]


# ---------------------------------------------------------------------------
# commands


def _opts(cfg: RunConfig) -> SolveOptions:
    return SolveOptions(grid=cfg.grid, max_nodes=cfg.max_nodes, time_limit=cfg.time_limit, workers=cfg.workers)


def cmd_check(cfg: RunConfig, net: Network, out: TextIO) -> int:
    verdict = check(net, _opts(cfg))
    doc = document(verdict.status.value, verdict.grid, verdict.solution,
                   budget_exhausted=verdict.status is Status.UNKNOWN)
    _emit(cfg, doc, out, verdict.message)
    return {
        Status.CONSISTENT: EXIT_OK,
        Status.INCONSISTENT: EXIT_INCONSISTENT,
        Status.NOT_FOUND: EXIT_UNKNOWN,
        Status.UNKNOWN: EXIT_UNKNOWN,
    }[verdict.status]


def cmd_explain(cfg: RunConfig, net: Network, out: TextIO) -> int:
    grid = grid_for(net, cfg.grid)
    try:
        exp = explain(net, _opts(cfg))
    except NoExplanation as err:
        _emit(cfg, document("not_found" if err.incomplete else "inconsistent", err.grid), out, str(err))
        return EXIT_UNKNOWN if err.incomplete else EXIT_INCONSISTENT
    except BudgetExceeded as err:
        _emit(cfg, document("unknown", grid, budget_exhausted=True), out, str(err))
        return EXIT_UNKNOWN
    verdict = "consistent" if not exp.violated else "explained"
    _emit(cfg, document(verdict, exp.witness.grid, exp.witness, cost=exp.cost), out)
    return EXIT_OK


def cmd_infer(cfg: RunConfig, net: Network, out: TextIO) -> int:
    grid = grid_for(net, cfg.grid)
    if not net.infer_requests:
        raise UsageError("the network has no 'infer' requests")
    try:
        result = infer(net, enumerate=cfg.enumerate, opts=_opts(cfg))
    except InconsistentNetwork as err:
        v = err.verdict
        _emit(cfg, document(v.status.value, v.grid), out, v.message)
        return EXIT_INCONSISTENT if v.status is Status.INCONSISTENT else EXIT_UNKNOWN
    except BudgetExceeded as err:
        _emit(cfg, document("unknown", grid, budget_exhausted=True), out, str(err))
        return EXIT_UNKNOWN
    inferred = {f"{u}/{v}": _sorted_tokens(inf.relations) for (u, v), inf in result.items()}
    _emit(cfg, document("consistent", grid, inferred=inferred), out)
    return EXIT_OK


def cmd_emit(cfg: RunConfig, net: Network, out: TextIO) -> int:
    if cfg.facts_only:
        out.write(asp_emit.emit_facts(net))
        return EXIT_OK
    grid = grid_for(net, cfg.grid)
    program = asp_emit.emit_program(net, grid, cfg.mode)
    if not cfg.solve:
        out.write(program)
        return EXIT_OK
    try:
        res = asp_emit.solve_external(program, timeout=cfg.time_limit)
    except TimeoutError as err:
        _emit(cfg, document("unknown", grid, budget_exhausted=True), out, str(err))
        return EXIT_UNKNOWN
    if res is None:
        status = "inconsistent" if grid.complete else "not_found"
        _emit(cfg, document(status, grid), out)
        return EXIT_INCONSISTENT if grid.complete else EXIT_UNKNOWN
    atoms, _ = res
    sol = asp_emit.decode_answer_set(atoms, net, grid)
    problems = verify_solution(net, sol)
    if problems:
        raise RuntimeError("decoded answer set fails re-check: " + "; ".join(problems))
    inferred = {}
    if cfg.mode == "infer":
        from .semantics import relation_of
        inferred = {f"{u}/{v}": [relation_of(sol[u], sol[v]).token] for u, v in net.infer_requests}
    _emit(cfg, document("consistent" if not sol.violated else "explained", grid, sol, inferred), out)
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, net: Network, out: TextIO) -> int:
    grid = grid_for(net, cfg.grid)
    if cfg.mode == "explain":
        try:
            k, sets = oracle.oracle_optimal_explanation(net, grid)
        except NoExplanation as err:
            _emit(cfg, document("inconsistent", grid), out, str(err))
            return EXIT_INCONSISTENT
        if cfg.output is OutputFormat.STRUCTURED:
            out.write(dumps({"cost": k, "grid": list(grid.dims),
                             "optimal_sets": sorted(_pairs(s) for s in sets)}) + "\n")
        else:
            out.write(f"grid: {grid.m}x{grid.n}x{grid.p}\nminimum violations: {k}\n")
            for s in sorted(_pairs(s) for s in sets):
                out.write("  {" + ", ".join(f"({u}, {v})" for u, v in s) + "}\n")
        return EXIT_OK
    if cfg.mode == "infer":
        if not net.infer_requests:
            raise UsageError("the network has no 'infer' requests")
        inferred = {f"{u}/{v}": _sorted_tokens(oracle.oracle_infer_all(net, grid, (u, v)))
                    for u, v in net.infer_requests}
        verdict = "consistent" if all(inferred.values()) else "inconsistent"
        _emit(cfg, document(verdict, grid, inferred=inferred), out)
        return EXIT_OK if verdict == "consistent" else EXIT_INCONSISTENT
    verdict = oracle.oracle_check(net, grid)
    _emit(cfg, document(verdict.status.value, grid, verdict.solution), out)
    if verdict.consistent:
        return EXIT_OK
    return EXIT_INCONSISTENT if grid.complete else EXIT_UNKNOWN


@dataclass(frozen=True)
class BenchRow:
    instance: str
    objects: int
    constraints: int
    grid: int
    nodes: int
    seconds: float
    verdict: str


def bench_rows(cfg: RunConfig, stdin: TextIO | None = None) -> list[BenchRow]:
    """Replication series of the base network, then the building pair."""
    base = parse_network(read_source(cfg.base, stdin or sys.stdin))
    series = [(f"M{k}", replicate(base, k)) for k in range(1, cfg.copies + 1)]
    series += [("B1", fixture("building_B1")), ("B1'", fixture("building_B1_prime"))]
    rows = []
    for name, net in series:
        start = time.perf_counter()
        verdict = check(net, _opts(cfg))
        elapsed = time.perf_counter() - start
        # inference requests count as constraints, as in the published table
        size = len(net.constraints) + len(net.infer_requests)
        rows.append(BenchRow(name, len(net.objects), size, grid_for(net, cfg.grid).m,
                             verdict.nodes, elapsed, verdict.status.value))
    return rows


def cmd_bench(cfg: RunConfig, stdin: TextIO, out: TextIO) -> int:
    rows = bench_rows(cfg, stdin)
    if cfg.output is OutputFormat.STRUCTURED:
        out.write(json.dumps([r.__dict__ for r in rows], sort_keys=True) + "\n")
        return EXIT_OK
    out.write(f"{'Instance':<9}{'|V|':>5}{'|C|':>6}{'Grid':>12}{'Nodes':>10}{'Time (s)':>11}  Verdict\n")
    for r in rows:
        grid = f"{r.grid}x{r.grid}x{r.grid}"
        out.write(f"{r.instance:<9}{r.objects:>5}{r.constraints:>6}{grid:>12}{r.nodes:>10}"
                  f"{r.seconds:>11.3f}  {r.verdict}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry points


def run(cfg: RunConfig, stdin: TextIO | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        if cfg.command == "bench":
            return cmd_bench(cfg, stdin, out)
        net = load(cfg, stdin)
        handler = {
            "check": cmd_check,
            "explain": cmd_explain,
            "infer": cmd_infer,
            "emit": cmd_emit,
            "oracle": cmd_oracle,
        }[cfg.command]
        return handler(cfg, net, out)
    except ParseError as e:
        err.write(f"parse error: {e}\n")
        return EXIT_USAGE
    except (NetworkError, UsageError, oracle.CapExceeded, KeyError, OSError) as e:
        err.write(f"error: {e}\n")
        return EXIT_USAGE
    except BudgetExceeded as e:
        err.write(f"budget exhausted: {e}\n")
        return EXIT_UNKNOWN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncdc3d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, source: bool = True) -> None:
        if source:
            p.add_argument("source", nargs="?", default="-",
                           help="network file, '-' for standard input, or a bundled fixture name")
        p.add_argument("--grid", type=parse_grid, help="grid size, N or MxNxP (default: exact bound)")
        conn = p.add_mutually_exclusive_group()
        conn.add_argument("--connected", dest="connected", action="store_true", default=None,
                          help="require target objects to be connected")
        conn.add_argument("--disconnected", dest="connected", action="store_false",
                          help="allow disconnected objects")
        p.add_argument("--max-nodes", type=int, help="search node budget")
        p.add_argument("--time-limit", type=float, help="wall-clock budget in seconds")
        p.add_argument("--structured", action="store_true", help="print one JSON document")
        p.add_argument("--workers", type=int, default=1, help="worker processes for the search")

    common(sub.add_parser("check", help="decide consistency and print a witness"))
    common(sub.add_parser("explain", help="fewest constraints to give up"))
    p = sub.add_parser("infer", help="relations for the requested pairs")
    common(p)
    p.add_argument("--enumerate", action="store_true", help="every realizable relation, not one witness")
    p = sub.add_parser("emit", help="print answer-set facts or a full program")
    common(p)
    p.add_argument("--mode", choices=[m.value for m in asp_emit.Mode], default="check")
    p.add_argument("--facts-only", action="store_true")
    p.add_argument("--solve", action="store_true", help="solve with clingo and decode the answer set")
    p = sub.add_parser("oracle", help="exhaustive ground truth on tiny grids")
    common(p)
    p.add_argument("--mode", choices=["check", "explain", "infer"], default="check")
    p = sub.add_parser("bench", help="replication scaling table")
    common(p, source=False)
    p.add_argument("--base", default="marine", help="network to replicate (file or fixture name)")
    p.add_argument("--copies", type=int, default=3, help="largest number of copies")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        source=getattr(args, "source", None),
        grid=args.grid,
        connected=args.connected,
        enumerate=getattr(args, "enumerate", False),
        max_nodes=args.max_nodes,
        time_limit=args.time_limit,
        output=OutputFormat.STRUCTURED if args.structured else OutputFormat.HUMAN,
        workers=args.workers,
        mode=getattr(args, "mode", "check"),
        facts_only=getattr(args, "facts_only", False),
        solve=getattr(args, "solve", False),
        copies=getattr(args, "copies", 3),
        base=getattr(args, "base", "marine"),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as e:
        parser.error(str(e))
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
