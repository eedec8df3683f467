"""Complete search over canonical endpoint orders for one fixed set of basic constraints.

Objects are placed one at a time. Each axis keeps the distinct plane values
used so far as contiguous ranks ``0..k-1``; placing an object inserts its two
planes either into a gap (a new value) or onto an existing value. Only the
relative order of planes matters for tiles, face contact and connectivity,
so this enumerates every configuration up to order-preserving relabelling.

Once an object and all its references are placed, its feasibility is decided
exactly on the zone grid induced by their planes. Failed sub-searches are
memoised on the order of the endpoints that still interact with unplaced
objects.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cells import is_feasible
from .order import LT, close_axes

Ranks = tuple[list[int], list[int], list[int]]


class BudgetExceeded(RuntimeError):
    """The node or time budget ran out before the search finished."""


@dataclass
class Budget:
    max_nodes: int | None = None
    max_seconds: float | None = None
    nodes: int = 0
    started: float = field(default_factory=time.monotonic)

    def tick(self, n: int = 1) -> None:
        self.nodes += n
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise BudgetExceeded(f"node budget of {self.max_nodes} exhausted")
        if self.max_seconds is not None and (self.nodes & 63) == 0 \
                and time.monotonic() - self.started > self.max_seconds:
            raise BudgetExceeded(f"time limit of {self.max_seconds}s exhausted")


def compress(values: Sequence[int]) -> tuple[int, ...]:
    index = {v: i for i, v in enumerate(sorted(set(values)))}
    return tuple(index[v] for v in values)


class ComponentSearch:
    """Search for one object set under basic constraints ``(target, reference, tile mask)``.

    ``limits`` caps the number of cells per axis (only binding on grids
    smaller than the exactness bound). ``first`` lists objects to place
    before all others, which projection enumeration relies on.
    """

    def __init__(
        self,
        n: int,
        enforced: Sequence[tuple[int, int, int]],
        connected: frozenset[int] = frozenset(),
        limits: tuple[int, int, int] | None = None,
        budget: Budget | None = None,
        memo: bool = True,
        first: Sequence[int] = (),
    ):
        self.n = n
        self.enforced = list(enforced)
        self.connected = connected
        self.limits = limits
        self.budget = budget or Budget()
        self.memo = memo
        self.refs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v, mask in self.enforced:
            self.refs[u].append((v, mask))
        self.groups = [sorted({w} | {v for v, _ in self.refs[w]}) for w in range(n)]
        self.closure = close_axes(n, self.enforced)
        self.order = self._placement_order(first)
        self._prepare()
        self._cache: dict[tuple, bool] = {}
        self._fail: set[tuple] = set()
        self._done: set[tuple] = set()
        self.result: Ranks | None = None
        self._proj_nodes: list[int] = []
        self._enum_depth: int | None = None
        self._completing = False
        self._seen: set[tuple] = set()
        self._on_key: Callable[[tuple], None] | None = None

    # -- set-up -------------------------------------------------------------

    def _placement_order(self, first: Sequence[int]) -> list[int]:
        degree = [0] * self.n
        link = [[0] * self.n for _ in range(self.n)]
        for u, v, _ in self.enforced:
            degree[u] += 1
            degree[v] += 1
            link[u][v] += 1
            link[v][u] += 1
        order: list[int] = []
        for pool in (list(first), [w for w in range(self.n) if w not in first]):
            while pool:
                best = max(pool, key=lambda w: (sum(link[w][p] for p in order), degree[w], -w))
                order.append(best)
                pool.remove(best)
        return order

    def _prepare(self) -> None:
        n = self.n
        pos = {w: d for d, w in enumerate(self.order)}
        self.checks_at: list[list[int]] = [[] for _ in range(n)]
        for w in range(n):
            if self.refs[w] or w in self.connected:
                self.checks_at[max(pos[g] for g in self.groups[w])].append(w)
        self.group_nodes = [[e for g in grp for e in (2 * g, 2 * g + 1)] for grp in self.groups]
        self.placed_nodes: list[list[int]] = []
        self.frontier_nodes: list[list[int]] = []
        self.bounds: list[list[tuple]] = []
        for d in range(n + 1):
            placed = self.order[:d]
            unplaced = set(self.order[d:])
            nodes = [e for p in placed for e in (2 * p, 2 * p + 1)]
            self.placed_nodes.append(nodes)
            frontier = [p for p in placed
                        if any(p in grp and unplaced.intersection(grp) for grp in self.groups)]
            self.frontier_nodes.append([e for p in frontier for e in (2 * p, 2 * p + 1)])
            if d == n or self.closure is None:
                self.bounds.append([])
                continue
            u = self.order[d]
            per_axis = []
            for rel in self.closure:
                entry = []
                for e in (2 * u, 2 * u + 1):
                    upper = [(f, 0 if rel[e][f] == LT else 1) for f in nodes if rel[e][f]]
                    lower = [(f, 2 if rel[f][e] == LT else 1) for f in nodes if rel[f][e]]
                    entry.append((upper, lower))
                per_axis.append(entry)
            self.bounds.append(per_axis)

    # -- per-axis insertion -------------------------------------------------

    def _axis_options(self, d: int, axis: int, rk: list[int], k: int) -> list[tuple[list[int], int]]:
        (up_lo, low_lo), (up_hi, low_hi) = self.bounds[d][axis]
        top = 2 * k
        lo_min = max([2 * rk[f] + b for f, b in low_lo], default=0)
        lo_max = min([2 * rk[f] + b for f, b in up_lo], default=top)
        hi_min = max([2 * rk[f] + b for f, b in low_hi], default=0)
        hi_max = min([2 * rk[f] + b for f, b in up_hi], default=top)
        limit = self.limits[axis] if self.limits else None
        u = self.order[d]
        placed = self.placed_nodes[d]
        out = []
        for s_lo in range(lo_min, lo_max + 1):
            lo_new = not s_lo & 1
            g_lo = s_lo >> 1
            for s_hi in range(max(s_lo, hi_min), hi_max + 1):
                hi_new = not s_hi & 1
                if s_hi == s_lo and not lo_new:
                    continue
                nk = k + lo_new + hi_new
                if limit is not None and nk - 1 > limit:
                    continue
                g_hi = s_hi >> 1
                new = list(rk)
                if lo_new or hi_new:
                    for f in placed:
                        r = rk[f]
                        new[f] = r + (lo_new and g_lo <= r) + (hi_new and g_hi <= r)
                new[2 * u] = g_lo
                new[2 * u + 1] = g_hi + lo_new
                out.append((new, nk))
        return out

    # -- feasibility ----------------------------------------------------------

    def _feasible(self, w: int, rk: Ranks) -> bool:
        nodes = self.group_nodes[w]
        comp = tuple(compress([axis[e] for e in nodes]) for axis in rk)
        key = (w, comp)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        grp = self.groups[w]
        boxes = {g: tuple((c[2 * i], c[2 * i + 1]) for c in comp) for i, g in enumerate(grp)}
        refs = [(boxes[v], mask) for v, mask in self.refs[w]]
        ok = is_feasible(boxes[w], refs, w in self.connected)
        self._cache[key] = ok
        return ok

    def _key(self, nodes: list[int], rk: Ranks) -> tuple:
        return tuple(compress([axis[e] for e in nodes]) for axis in rk)

    # -- search -------------------------------------------------------------

    def _dfs(self, d: int, rk: Ranks, ks: tuple[int, int, int]) -> bool:
        if d == self._enum_depth and not self._completing:
            key = self._key(self._proj_nodes, rk)
            if key in self._seen:
                return False
            self._seen.add(key)
            self._completing = True
            try:
                ok = self._dfs(d, rk, ks)
            finally:
                self._completing = False
            if ok and self._on_key is not None:
                self._on_key(key)
            return False
        if d == self.n:
            self.result = rk
            return True
        use_memo = self.memo and 0 < d and (self._enum_depth is None or self._completing)
        if use_memo:
            mk = (d, self._key(self.frontier_nodes[d], rk))
            if mk in self._fail:
                return False
            if self._completing and mk in self._done:
                return True
        xs = self._axis_options(d, 0, rk[0], ks[0])
        ys = self._axis_options(d, 1, rk[1], ks[1]) if xs else []
        zs = self._axis_options(d, 2, rk[2], ks[2]) if ys else []
        checks = self.checks_at[d]
        tick = self.budget.tick
        for rx, kx in xs:
            for ry, ky in ys:
                for rz, kz in zs:
                    tick()
                    nrk = (rx, ry, rz)
                    if all(self._feasible(w, nrk) for w in checks):
                        if self._dfs(d + 1, nrk, (kx, ky, kz)):
                            if use_memo and self._completing:
                                self._done.add(mk)
                            return True
        if use_memo:
            self._fail.add(mk)
        return False

    def _start(self) -> Ranks:
        return ([-1] * (2 * self.n), [-1] * (2 * self.n), [-1] * (2 * self.n))

    def solve(self) -> Ranks | None:
        """Ranks of the first configuration found in search order, or ``None``."""
        if self.closure is None:
            return None
        self.result = None
        if self._dfs(0, self._start(), (0, 0, 0)):
            return self.result
        return None

    def project(self, objects: Sequence[int], on_key: Callable[[tuple], None]) -> None:
        """Report every realizable endpoint order of ``objects``.

        ``objects`` must be the ``first`` objects given at construction. The
        callback receives, per axis, the compressed ranks of their endpoints
        (``lo, hi`` per object, in the given order).
        """
        if self.closure is None:
            return
        if sorted(self.order[:len(objects)]) != sorted(objects):
            raise ValueError("projected objects must be placed first")
        self._proj_nodes = [e for o in objects for e in (2 * o, 2 * o + 1)]
        self._enum_depth = len(objects)
        self._seen = set()
        self._on_key = on_key
        try:
            self._dfs(0, self._start(), (0, 0, 0))
        finally:
            self._enum_depth = None
            self._on_key = None
