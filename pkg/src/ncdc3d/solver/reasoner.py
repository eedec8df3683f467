"""Consistency checking, explanation and inference over whole networks.

A network splits into independent parts (connected components of its
constraint graph). For each part, the decisions that are not spatial
(which disjunct holds, which constraints are given up, which defaults are
dropped) are enumerated outermost in increasing lexicographic cost
``(violations, dropped defaults)``; the first effective network whose basic
constraints admit a configuration is optimal for that part.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Sequence

from ..model import (
    MBB,
    BasicRelation,
    Constraint,
    Disjunctive,
    GridSpec,
    Network,
    Pair,
    Solution,
    SpatialObject,
    validate_network,
)
from .. import semantics
from .cells import classify, feasible_cells, realizable_masks
from .search import Budget, BudgetExceeded, ComponentSearch, Ranks

Cell = tuple[int, int, int]


class Status(Enum):
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"
    NOT_FOUND = "not_found"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`check`. Only ``CONSISTENT`` carries a solution."""

    status: Status
    grid: GridSpec
    solution: Solution | None = None
    nodes: int = 0
    message: str = ""

    @property
    def consistent(self) -> bool:
        return self.status is Status.CONSISTENT


@dataclass(frozen=True)
class Explanation:
    violated: frozenset[Pair]
    cost: tuple[int, int]
    witness: Solution
    nodes: int = 0


@dataclass(frozen=True)
class Inference:
    pair: Pair
    relations: frozenset[BasicRelation]
    known: bool = False


class NoExplanation(RuntimeError):
    """Even giving up every non-mandatory constraint leaves the network unsolvable."""

    def __init__(self, message: str, grid: GridSpec, incomplete: bool = False):
        super().__init__(message)
        self.grid = grid
        self.incomplete = incomplete


class InconsistentNetwork(RuntimeError):
    def __init__(self, verdict: Verdict):
        super().__init__(verdict.message or verdict.status.value)
        self.verdict = verdict


class SolverError(RuntimeError):
    """A produced witness failed its independent re-check (an internal bug)."""


@dataclass(frozen=True)
class EndpointConfig:
    """Candidate bounding box per object."""

    boxes: Mapping[str, MBB]

    def fits(self, grid: GridSpec) -> bool:
        return all(grid.contains((b.inf_x, b.inf_y, b.inf_z)) and grid.contains((b.sup_x, b.sup_y, b.sup_z))
                   for b in self.boxes.values())


@dataclass(frozen=True)
class EffectiveNetwork:
    """Non-spatial decisions for one part: the basic constraints actually enforced."""

    enforced: tuple[tuple[Pair, BasicRelation], ...]
    choices: tuple[tuple[Pair, int], ...] = ()
    violated: frozenset[Pair] = frozenset()
    dropped: frozenset[Pair] = frozenset()
    ab_dropped: frozenset[Pair] = frozenset()

    @property
    def cost(self) -> tuple[int, int]:
        return (len(self.violated), len(self.dropped))

    def refs(self, u: str) -> list[tuple[str, BasicRelation]]:
        return [(pair[1], rel) for pair, rel in self.enforced if pair[0] == u]


@dataclass
class SolveOptions:
    grid: GridSpec | None = None
    max_nodes: int | None = None
    time_limit: float | None = None
    workers: int = 1


# ---------------------------------------------------------------------------
# grid and single-object operations


def grid_for(net: Network, override: GridSpec | None = None) -> GridSpec:
    """The reasoning grid: an override or ``net.grid`` if given, else the exact cube."""
    side = GridSpec.bound(len(net.objects))
    g = override or net.grid
    if g is None:
        return GridSpec(side, side, side, complete=True)
    return GridSpec(g.m, g.n, g.p, complete=min(g.dims) >= side)


def _plane_box(b: MBB) -> tuple[tuple[int, int], ...]:
    return tuple((lo - 1, hi) for lo, hi in b.intervals())


def allowed_cells(u: str, cfg: EndpointConfig, eff: EffectiveNetwork) -> frozenset[Cell]:
    refs = [(_plane_box(cfg.boxes[v]), rel.mask) for v, rel in eff.refs(u)]
    return frozenset(c for c, _ in classify(_plane_box(cfg.boxes[u]), refs))


def feasible_object(
    u: str, cfg: EndpointConfig, eff: EffectiveNetwork, connected_mode: bool = False, is_target: bool = False
) -> SpatialObject | None:
    box = cfg.boxes[u]
    if connected_mode and not is_target:
        return SpatialObject(frozenset(box.cells()))
    refs = [(_plane_box(cfg.boxes[v]), rel.mask) for v, rel in eff.refs(u)]
    cells = feasible_cells(_plane_box(box), refs, connected_mode and is_target)
    return SpatialObject(cells) if cells else None


# ---------------------------------------------------------------------------
# parts and effective networks


@dataclass
class _Part:
    objects: list[str]
    hard: list[Constraint]
    defaults: list[Constraint]
    infer: list[Pair] = field(default_factory=list)


def _parts(net: Network, with_infer: bool) -> list[_Part]:
    parent = {o: o for o in net.objects}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    links = [c.pair for c in net.constraints] + (list(net.infer_requests) if with_infer else [])
    for a, b in links:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb, key=net.index)] = min(ra, rb, key=net.index)
    parts: dict[str, _Part] = {}
    for o in net.objects:
        parts.setdefault(find(o), _Part([], [], [])).objects.append(o)
    for c in net.constraints:
        p = parts[find(c.target)]
        (p.defaults if c.is_default else p.hard).append(c)
    if with_infer:
        for pair in net.infer_requests:
            parts[find(pair[0])].infer.append(pair)
    return list(parts.values())


def _blame_order(net: Network, cs: Sequence[Constraint]) -> list[Constraint]:
    """Constraints in the order they are tried when choosing what to give up."""
    return sorted(cs, key=lambda c: (net.index(c.target), net.index(c.reference)), reverse=True)


def _cost_levels(max_v: int, max_d: int) -> Iterator[tuple[int, int]]:
    for c2 in range(max_v + 1):
        for c1 in range(max_d + 1):
            yield c2, c1


def effective_networks(
    net: Network, part: _Part, explain: bool, cost: tuple[int, int] | None = None
) -> Iterator[EffectiveNetwork]:
    """All effective networks of a part in increasing cost, optionally one cost level only."""
    violable = _blame_order(net, [c for c in part.hard if not c.mandatory]) if explain else []
    forced = frozenset(c.pair for c in part.defaults if c.target in net.ab_marks or c.reference in net.ab_marks)
    droppable = _blame_order(net, [c for c in part.defaults if c.pair not in forced])
    levels = [cost] if cost is not None else _cost_levels(len(violable), len(droppable))
    for c2, c1 in levels:
        for gone in itertools.combinations(violable, c2):
            gone_pairs = frozenset(c.pair for c in gone)
            kept = [c for c in part.hard if c.pair not in gone_pairs]
            disj = [c for c in kept if isinstance(c.relation, Disjunctive)]
            for dropped in itertools.combinations(droppable, c1):
                dropped_pairs = frozenset(c.pair for c in dropped)
                applied = [c for c in part.defaults if c.pair not in dropped_pairs and c.pair not in forced]
                for pick in itertools.product(*(range(len(c.relation.disjuncts)) for c in disj)):
                    chosen = {c.pair: i for c, i in zip(disj, pick)}
                    enforced = []
                    for c in kept:
                        rel = c.relation
                        enforced.append((c.pair, rel.disjuncts[chosen[c.pair]] if c.pair in chosen
                                         else rel.relation))
                    enforced += [(c.pair, c.relation.relation) for c in applied]
                    yield EffectiveNetwork(tuple(enforced), tuple(chosen.items()), gone_pairs,
                                           dropped_pairs, forced)


def _clashes(eff: EffectiveNetwork) -> bool:
    seen: dict[Pair, BasicRelation] = {}
    for pair, rel in eff.enforced:
        if seen.setdefault(pair, rel) != rel:
            return True
    return False


# ---------------------------------------------------------------------------
# solving one part


def _encode(part: _Part, eff: EffectiveNetwork) -> list[tuple[int, int, int]]:
    idx = {o: i for i, o in enumerate(part.objects)}
    out = []
    for (u, v), rel in eff.enforced:
        item = (idx[u], idx[v], rel.mask)
        if item not in out:
            out.append(item)
    return out


def _search_task(args) -> tuple[Ranks | None, int, str | None]:
    n, enforced, conn, limits, memo, max_nodes, deadline = args
    seconds = None if deadline is None else max(0.0, deadline - time.time())
    budget = Budget(max_nodes=max_nodes, max_seconds=seconds)
    try:
        budget.tick()
        search = ComponentSearch(n, enforced, conn, limits, budget, memo)
        ranks = search.solve()
    except BudgetExceeded as err:
        return None, budget.nodes, str(err)
    return ranks, budget.nodes, None


class _Runner:
    def __init__(self, net: Network, grid: GridSpec, opts: SolveOptions):
        self.net = net
        self.grid = grid
        self.opts = opts
        self.budget = Budget(max_nodes=opts.max_nodes, max_seconds=opts.time_limit)
        self.limits = grid.dims
        self.memo = grid.complete
        self.targets = net.targets if net.connected else frozenset()

    def _conn(self, part: _Part) -> frozenset[int]:
        return frozenset(i for i, o in enumerate(part.objects) if o in self.targets)

    def _search(self, part: _Part, eff: EffectiveNetwork, first: Sequence[int] = ()) -> ComponentSearch:
        self.budget.tick()
        return ComponentSearch(len(part.objects), _encode(part, eff), self._conn(part),
                               self.limits, self.budget, self.memo, first)

    def solve_part(self, part: _Part, explain: bool) -> tuple[EffectiveNetwork, Ranks] | None:
        effs = (e for e in effective_networks(self.net, part, explain) if not _clashes(e))
        if self.opts.workers > 1:
            return self._solve_parallel(part, effs)
        for eff in effs:
            self.budget.tick()
            ranks = self._search(part, eff).solve()
            if ranks is not None:
                return eff, ranks
        return None

    def _solve_parallel(self, part: _Part, effs: Iterator[EffectiveNetwork]):
        # Batches are scanned in enumeration order, so the first success is
        # the same one the sequential loop would return.
        workers = self.opts.workers
        deadline = None
        if self.opts.time_limit is not None:
            deadline = time.time() + self.opts.time_limit - (time.monotonic() - self.budget.started)
        conn = self._conn(part)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            while True:
                batch = list(itertools.islice(effs, 2 * workers))
                if not batch:
                    return None
                remaining = None
                if self.opts.max_nodes is not None:
                    remaining = max(0, self.opts.max_nodes - self.budget.nodes)
                jobs = [(len(part.objects), _encode(part, e), conn, self.limits, self.memo, remaining, deadline)
                        for e in batch]
                for eff, (ranks, nodes, error) in zip(batch, pool.map(_search_task, jobs)):
                    self.budget.nodes += nodes + 1
                    if error is not None:
                        raise BudgetExceeded(error)
                    if ranks is not None:
                        return eff, ranks
                self.budget.tick(0)

    # -- witnesses --------------------------------------------------------

    def witness(self, parts: list[_Part], found: list[tuple[EffectiveNetwork, Ranks]]) -> Solution:
        boxes: dict[str, tuple[tuple[int, int], ...]] = {}
        for part, (_, ranks) in zip(parts, found):
            for i, o in enumerate(part.objects):
                boxes[o] = tuple((axis[2 * i], axis[2 * i + 1]) for axis in ranks)
        assignment: dict[str, SpatialObject] = {}
        violated: set[Pair] = set()
        dropped: set[Pair] = set()
        cost = [0, 0]
        for part, (eff, _) in zip(parts, found):
            violated |= eff.violated
            dropped |= eff.dropped | eff.ab_dropped
            cost[0] += eff.cost[0]
            cost[1] += eff.cost[1]
            for o in part.objects:
                is_target = o in self.targets
                if self.net.connected and not is_target:
                    cells = frozenset(MBB.from_intervals((lo + 1, hi) for lo, hi in boxes[o]).cells())
                else:
                    refs = [(boxes[v], rel.mask) for v, rel in eff.refs(o)]
                    cells = feasible_cells(boxes[o], refs, is_target)
                if not cells:
                    raise SolverError(f"no witness cells for {o!r}")
                assignment[o] = SpatialObject(cells)
        ordered = {o: assignment[o] for o in self.net.objects}
        sol = Solution(self.grid, ordered, frozenset(dropped), frozenset(violated), (cost[0], cost[1]))
        problems = verify_solution(self.net, sol)
        if problems:
            raise SolverError("witness failed re-check: " + "; ".join(problems))
        return sol


def verify_solution(net: Network, sol: Solution) -> list[str]:
    """Independent re-check of a solution with the semantics module; returns problems found."""
    problems = []
    for o in net.objects:
        obj = sol.assignment.get(o)
        if obj is None:
            problems.append(f"{o} unassigned")
            continue
        if not all(sol.grid.contains(c) for c in obj.cells):
            problems.append(f"{o} leaves the grid")
        if net.connected and o in net.targets and not semantics.is_connected(obj):
            problems.append(f"{o} is not connected")
    if problems:
        return problems
    for c in net.constraints:
        if c.pair in (sol.dropped_defaults if c.is_default else sol.violated):
            continue
        if not semantics.satisfies(sol[c.target], sol[c.reference], c.relation):
            problems.append(f"{c.target} {c.reference} not satisfied")
    return problems


# ---------------------------------------------------------------------------
# public entry points


def _options(opts: SolveOptions | None, kw: dict) -> SolveOptions:
    opts = opts or SolveOptions()
    for key, value in kw.items():
        if not hasattr(opts, key):
            raise TypeError(f"unknown option {key!r}")
        setattr(opts, key, value)
    if opts.workers < 1:
        raise ValueError("workers must be positive")
    return opts


def _solve_all(net: Network, opts: SolveOptions, explain: bool, with_infer: bool):
    validate_network(net)
    grid = grid_for(net, opts.grid)
    runner = _Runner(net, grid, opts)
    parts = _parts(net, with_infer)
    found = []
    for part in parts:
        res = runner.solve_part(part, explain)
        if res is None:
            return runner, parts, None
        found.append(res)
    return runner, parts, found


def check(net: Network, opts: SolveOptions | None = None, **kw) -> Verdict:
    """Decide consistency with the fewest dropped defaults; never raises on budget exhaustion."""
    opts = _options(opts, kw)
    grid = grid_for(net, opts.grid)
    try:
        runner, parts, found = _solve_all(net, opts, explain=False, with_infer=False)
    except BudgetExceeded as err:
        return Verdict(Status.UNKNOWN, grid, message=str(err))
    nodes = runner.budget.nodes
    if found is None:
        if grid.complete:
            return Verdict(Status.INCONSISTENT, grid, nodes=nodes)
        return Verdict(Status.NOT_FOUND, grid, nodes=nodes,
                       message=f"not found at this grid ({grid.m}x{grid.n}x{grid.p}), "
                               f"which is below the exact bound")
    return Verdict(Status.CONSISTENT, grid, runner.witness(parts, found), nodes=nodes)


def explain(net: Network, opts: SolveOptions | None = None, **kw) -> Explanation:
    """Fewest non-mandatory constraints to give up, then fewest dropped defaults."""
    opts = _options(opts, kw)
    runner, parts, found = _solve_all(net, opts, explain=True, with_infer=False)
    if found is None:
        grid = runner.grid
        if grid.complete:
            raise NoExplanation("the mandatory constraints alone are inconsistent", grid)
        raise NoExplanation(f"not found at this grid ({grid.m}x{grid.n}x{grid.p}), "
                            f"which is below the exact bound", grid, incomplete=True)
    sol = runner.witness(parts, found)
    return Explanation(sol.violated, sol.cost, sol, runner.budget.nodes)


def _existing(net: Network, pair: Pair) -> Constraint | None:
    for c in net.constraints:
        if c.pair == pair and not c.is_default:
            return c
    return None


def _default_on(net: Network, pair: Pair) -> Constraint | None:
    for c in net.defaults:
        if c.pair == pair:
            return c
    return None


def infer(net: Network, enumerate: bool = False, opts: SolveOptions | None = None,
          **kw) -> dict[Pair, Inference]:
    """Relations for each requested pair: one witness relation, or every realizable one."""
    opts = _options(opts, kw)
    runner, parts, found = _solve_all(net, opts, explain=False, with_infer=True)
    if found is None:
        grid = runner.grid
        status = Status.INCONSISTENT if grid.complete else Status.NOT_FOUND
        raise InconsistentNetwork(Verdict(status, grid, nodes=runner.budget.nodes))
    sol = runner.witness(parts, found)
    out: dict[Pair, Inference] = {}
    for part, (eff, _) in zip(parts, found):
        for pair in part.infer:
            hard = _existing(net, pair)
            if hard is not None:
                rel = hard.relation
                rels = frozenset(rel.disjuncts) if isinstance(rel, Disjunctive) else frozenset([rel.relation])
                out[pair] = Inference(pair, rels, known=True)
                continue
            default = _default_on(net, pair)
            if default is not None and pair not in sol.dropped_defaults:
                out[pair] = Inference(pair, frozenset([default.relation.relation]), known=True)
                continue
            if enumerate:
                rels = _enumerate_pair(runner, part, eff.cost, pair)
            else:
                rels = {semantics.relation_of(sol[pair[0]], sol[pair[1]])}
            out[pair] = Inference(pair, frozenset(rels))
    return {pair: out[pair] for pair in net.infer_requests}


def _enumerate_pair(runner: _Runner, part: _Part, cost: tuple[int, int], pair: Pair) -> set[BasicRelation]:
    u, v = pair
    idx = {o: i for i, o in enumerate(part.objects)}
    masks: set[int] = set()
    for eff in effective_networks(runner.net, part, explain=False, cost=cost):
        if _clashes(eff):
            continue
        default = _default_on(runner.net, pair)
        if default is not None and pair not in eff.dropped | eff.ab_dropped:
            continue
        refs = eff.refs(u)
        proj = [idx[u]] + sorted({idx[r] for r, _ in refs} - {idx[u]})
        if idx[v] not in proj:
            proj.append(idx[v])
        runner.budget.tick()
        search = runner._search(part, eff, first=proj)
        pos = {o: k for k, o in enumerate(proj)}

        def on_key(key: tuple, refs=refs, pos=pos) -> None:
            def box(o: str) -> tuple[tuple[int, int], ...]:
                k = pos[idx[o]]
                return tuple((axis[2 * k], axis[2 * k + 1]) for axis in key)
            rs = [(box(r), rel.mask) for r, rel in refs]
            masks.update(realizable_masks(box(u), rs, box(v), u in runner.targets))

        search.project(proj, on_key)
    return {BasicRelation.from_mask(m) for m in masks}


__all__ = [
    "Budget", "BudgetExceeded", "EffectiveNetwork", "EndpointConfig", "Explanation", "Inference",
    "InconsistentNetwork", "NoExplanation", "SolveOptions", "SolverError", "Status", "Verdict",
    "allowed_cells", "check", "effective_networks", "explain", "feasible_object", "grid_for",
    "infer", "verify_solution",
]
