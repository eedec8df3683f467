"""Discretized semantics: bounding boxes, tiles, relations and connectedness.

Cells are 1-based integer triples. A cell's tile relative to a reference box
is decided per axis with closed "middle" intervals: on x, a cell is west when
``x < inf_x``, in the middle column when ``inf_x <= x <= sup_x`` and east when
``x > sup_x`` (likewise south/north on y and below/above on z).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import (
    MBB,
    Basic,
    BasicRelation,
    Default,
    Disjunctive,
    GridSpec,
    Relation,
    SpatialObject,
    Tile,
)

Cell = tuple[int, int, int]

NEIGHBOUR_OFFSETS: tuple[Cell, ...] = (
    (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1),
)


def mbb_of(obj: SpatialObject | Iterable[Cell]) -> MBB:
    cells = obj.cells if isinstance(obj, SpatialObject) else list(obj)
    xs, ys, zs = zip(*cells)
    return MBB(min(xs), max(xs), min(ys), max(ys), min(zs), max(zs))


def axis_class(coord: int, lo: int, hi: int) -> int:
    if coord < lo:
        return -1
    if coord > hi:
        return 1
    return 0


def tile_of(cell: Cell, ref: MBB) -> Tile:
    x, y, z = cell
    return Tile.from_classes(
        axis_class(x, ref.inf_x, ref.sup_x),
        axis_class(y, ref.inf_y, ref.sup_y),
        axis_class(z, ref.inf_z, ref.sup_z),
    )


@dataclass(frozen=True)
class TileRegion:
    """Per-axis inclusive cell ranges of one tile; a range with lo > hi is empty."""

    tile: Tile
    x: tuple[int, int]
    y: tuple[int, int]
    z: tuple[int, int]

    @property
    def empty(self) -> bool:
        return any(lo > hi for lo, hi in (self.x, self.y, self.z))

    def __len__(self) -> int:
        if self.empty:
            return 0
        return (self.x[1] - self.x[0] + 1) * (self.y[1] - self.y[0] + 1) * (self.z[1] - self.z[0] + 1)

    def cells(self) -> Iterable[Cell]:
        for x in range(self.x[0], self.x[1] + 1):
            for y in range(self.y[0], self.y[1] + 1):
                for z in range(self.z[0], self.z[1] + 1):
                    yield (x, y, z)


def _axis_range(cls: int, lo: int, hi: int, size: int) -> tuple[int, int]:
    if cls < 0:
        return (1, lo - 1)
    if cls > 0:
        return (hi + 1, size)
    return (lo, hi)


def tile_region(tile: Tile, ref: MBB, grid: GridSpec) -> TileRegion:
    cx, cy, cz = tile.value
    return TileRegion(
        tile,
        _axis_range(cx, ref.inf_x, ref.sup_x, grid.m),
        _axis_range(cy, ref.inf_y, ref.sup_y, grid.n),
        _axis_range(cz, ref.inf_z, ref.sup_z, grid.p),
    )


def relation_of(a: SpatialObject, b: SpatialObject) -> BasicRelation:
    """The unique basic relation that the pair ``(a, b)`` satisfies."""
    ref = mbb_of(b)
    return BasicRelation(frozenset(tile_of(c, ref) for c in a.cells))


def satisfies_basic(a: SpatialObject, b: SpatialObject, rel: BasicRelation) -> bool:
    ref = mbb_of(b)
    hit = set()
    for c in a.cells:
        t = tile_of(c, ref)
        if t not in rel.tiles:
            return False
        hit.add(t)
    return len(hit) == len(rel.tiles)


def satisfies_disjunctive(
    a: SpatialObject, b: SpatialObject, disjuncts: Sequence[BasicRelation]
) -> int | None:
    actual = relation_of(a, b)
    for i, d in enumerate(disjuncts):
        if d == actual:
            return i
    return None


def satisfies(a: SpatialObject, b: SpatialObject, relation: Relation) -> bool:
    if isinstance(relation, (Basic, Default)):
        return satisfies_basic(a, b, relation.relation)
    if isinstance(relation, Disjunctive):
        return satisfies_disjunctive(a, b, relation.disjuncts) is not None
    raise TypeError(f"not a relation: {relation!r}")


def components(cells: Iterable[Cell]) -> list[frozenset[Cell]]:
    """6-connected components, each found by breadth-first flood fill."""
    todo = set(cells)
    out = []
    while todo:
        start = min(todo)
        todo.discard(start)
        comp = {start}
        queue = deque([start])
        while queue:
            x, y, z = queue.popleft()
            for dx, dy, dz in NEIGHBOUR_OFFSETS:
                nb = (x + dx, y + dy, z + dz)
                if nb in todo:
                    todo.discard(nb)
                    comp.add(nb)
                    queue.append(nb)
        out.append(frozenset(comp))
    return out


def is_connected(obj: SpatialObject | Iterable[Cell]) -> bool:
    cells = obj.cells if isinstance(obj, SpatialObject) else frozenset(obj)
    return len(components(cells)) == 1
