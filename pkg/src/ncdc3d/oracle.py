"""Exhaustive ground truth on tiny grids.

Every object ranges over every non-empty cell set of the grid, so nothing
here depends on bounding-box reasoning. Subset ``k`` is the cell set whose
bitmask is ``k + 1`` over the grid cells in lexicographic order; witnesses
are the first optimal assignment in that order.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .model import (
    Basic,
    BasicRelation,
    Default,
    GridSpec,
    Network,
    Pair,
    Solution,
    SpatialObject,
    Tile,
    validate_network,
)
from .semantics import is_connected
from .solver import NoExplanation, Status, Verdict

MAX_CELLS = 8
MAX_OBJECTS = 3
MAX_OPTIONAL = 12


class CapExceeded(ValueError):
    """The instance is too large for exhaustive enumeration."""


@lru_cache(maxsize=8)
def _universe(dims: tuple[int, int, int]):
    m, n, p = dims
    cells = [(x, y, z) for x in range(1, m + 1) for y in range(1, n + 1) for z in range(1, p + 1)]
    count = len(cells)
    coords = np.array(cells, dtype=np.int64)
    masks = np.arange(1, 2 ** count, dtype=np.int64)
    member = ((masks[:, None] >> np.arange(count)) & 1).astype(bool)
    big = 1 << 20
    lo = np.where(member[:, :, None], coords[None], big).min(axis=1)
    hi = np.where(member[:, :, None], coords[None], -big).max(axis=1)
    cls = np.where(coords[None] < lo[:, None], -1, np.where(coords[None] > hi[:, None], 1, 0))
    lookup = np.zeros(27, dtype=np.int64)
    for t in Tile:
        cx, cy, cz = t.value
        lookup[(cx + 1) * 9 + (cy + 1) * 3 + cz + 1] = t.index
    tiles = lookup[(cls[..., 0] + 1) * 9 + (cls[..., 1] + 1) * 3 + cls[..., 2] + 1]
    bits = np.left_shift(np.int64(1), tiles)
    # rel[a, b]: tile mask of subset a relative to the bounding box of subset b
    rel = np.zeros((len(masks), len(masks)), dtype=np.int64)
    for i in range(count):
        rel |= np.where(member[:, i][:, None], bits[None, :, i], 0)
    connected = np.array([is_connected([cells[i] for i in range(count) if row[i]]) for row in member])
    return cells, member, rel, connected


def _guard(net: Network, grid: GridSpec) -> None:
    validate_network(net)
    if len(net.objects) > MAX_OBJECTS:
        raise CapExceeded(f"{len(net.objects)} objects exceed the oracle cap of {MAX_OBJECTS}")
    if grid.m * grid.n * grid.p > MAX_CELLS:
        raise CapExceeded(f"{grid.m * grid.n * grid.p} cells exceed the oracle cap of {MAX_CELLS}")


def _holds(rel: np.ndarray, relation) -> np.ndarray:
    if isinstance(relation, (Basic, Default)):
        return rel == relation.relation.mask
    return np.isin(rel, [d.mask for d in relation.disjuncts])


class _Tensor:
    """Boolean and cost tensors with one axis per object."""

    def __init__(self, net: Network, grid: GridSpec):
        self.net = net
        self.grid = grid
        self.cells, self.member, self.rel, self.conn = _universe(grid.dims)
        self.k = len(net.objects)
        self.size = len(self.member)

    def _spread(self, mat: np.ndarray, u: str, v: str) -> np.ndarray:
        iu, iv = self.net.index(u), self.net.index(v)
        arr = mat if iu < iv else mat.T
        shape = [1] * self.k
        shape[min(iu, iv)] = self.size
        shape[max(iu, iv)] = self.size
        return arr.reshape(shape)

    def feasible(self, skip: frozenset[Pair] = frozenset()) -> np.ndarray:
        ok = np.ones((self.size,) * self.k, dtype=bool)
        for c in self.net.hard_constraints:
            if c.pair not in skip:
                ok = ok & self._spread(_holds(self.rel, c.relation), c.target, c.reference)
        if self.net.connected:
            for name in self.net.targets:
                shape = [1] * self.k
                shape[self.net.index(name)] = self.size
                ok = ok & self.conn.reshape(shape)
        return ok

    def drops(self) -> np.ndarray:
        cost = np.zeros((self.size,) * self.k, dtype=np.int16)
        for c in self.net.defaults:
            if c.target in self.net.ab_marks or c.reference in self.net.ab_marks:
                continue
            cost = cost + (~self._spread(_holds(self.rel, c.relation), c.target, c.reference)).astype(np.int16)
        return cost

    def solution(self, flat: int, skip: frozenset[Pair], cost: tuple[int, int]) -> Solution:
        idx = np.unravel_index(flat, (self.size,) * self.k)
        assignment = {}
        for name, k in zip(self.net.objects, idx):
            assignment[name] = SpatialObject(frozenset(c for c, on in zip(self.cells, self.member[k]) if on))
        dropped = set()
        for c in self.net.defaults:
            ab = c.target in self.net.ab_marks or c.reference in self.net.ab_marks
            if ab or self.rel[idx[self.net.index(c.target)], idx[self.net.index(c.reference)]] \
                    != c.relation.relation.mask:
                dropped.add(c.pair)
        return Solution(self.grid, assignment, frozenset(dropped), skip, cost)


def _best(t: _Tensor, skip: frozenset[Pair] = frozenset()):
    ok = t.feasible(skip)
    if not ok.any():
        return None, None
    drops = np.where(ok, t.drops(), np.iinfo(np.int16).max)
    flat = int(np.argmin(drops))
    return flat, int(drops.flat[flat])


def oracle_check(net: Network, grid: GridSpec) -> Verdict:
    """Consistent iff some assignment of cell sets satisfies every hard constraint."""
    _guard(net, grid)
    t = _Tensor(net, grid)
    flat, drops = _best(t)
    if flat is None:
        return Verdict(Status.INCONSISTENT, grid)
    return Verdict(Status.CONSISTENT, grid, t.solution(flat, frozenset(), (0, drops)))


def oracle_optimal_explanation(net: Network, grid: GridSpec) -> tuple[int, set[frozenset[Pair]]]:
    """Minimum number of non-mandatory constraints to remove, and every removal set achieving it."""
    _guard(net, grid)
    optional = [c.pair for c in net.hard_constraints if not c.mandatory]
    if len(optional) > MAX_OPTIONAL:
        raise CapExceeded(f"{len(optional)} optional constraints exceed the cap of {MAX_OPTIONAL}")
    t = _Tensor(net, grid)
    for size in range(len(optional) + 1):
        found = {frozenset(s) for s in itertools.combinations(optional, size)
                 if t.feasible(frozenset(s)).any()}
        if found:
            return size, found
    raise NoExplanation("the mandatory constraints alone are inconsistent", grid)


def oracle_infer_all(net: Network, grid: GridSpec, pair: Pair) -> set[BasicRelation]:
    """Relations of ``pair`` across all solutions with the fewest dropped defaults."""
    _guard(net, grid)
    t = _Tensor(net, grid)
    ok = t.feasible()
    if not ok.any():
        return set()
    drops = t.drops()
    best = drops[ok].min()
    sel = ok & (drops == best)
    iu, iv = net.index(pair[0]), net.index(pair[1])
    idx = np.nonzero(sel)
    masks = set(np.unique(t.rel[idx[iu], idx[iv]]).tolist())
    return {BasicRelation.from_mask(int(m)) for m in masks}


__all__ = ["CapExceeded", "oracle_check", "oracle_infer_all", "oracle_optimal_explanation",
           "MAX_CELLS", "MAX_OBJECTS"]
