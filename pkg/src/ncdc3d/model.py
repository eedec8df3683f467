"""Domain types for 3D nonmonotonic cardinal-direction networks.

Everything here is immutable. A :class:`Network` is built by the parser (or
by hand in tests) and checked with :func:`validate_network` before any
reasoning happens.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Union


class Tile(Enum):
    """One of the 27 direction tiles around a reference bounding box.

    The value is the per-axis class triple ``(x, y, z)``: ``-1`` means
    west/south/below the box, ``0`` within it, ``+1`` east/north/above.
    Member order is the canonical tile order used for output.
    """

    SWM = (-1, -1, 0)
    SM = (0, -1, 0)
    SEM = (1, -1, 0)
    WM = (-1, 0, 0)
    OM = (0, 0, 0)
    EM = (1, 0, 0)
    NWM = (-1, 1, 0)
    NM = (0, 1, 0)
    NEM = (1, 1, 0)
    SWB = (-1, -1, -1)
    SB = (0, -1, -1)
    SEB = (1, -1, -1)
    WB = (-1, 0, -1)
    OB = (0, 0, -1)
    EB = (1, 0, -1)
    NWB = (-1, 1, -1)
    NB = (0, 1, -1)
    NEB = (1, 1, -1)
    SWA = (-1, -1, 1)
    SA = (0, -1, 1)
    SEA = (1, -1, 1)
    WA = (-1, 0, 1)
    OA = (0, 0, 1)
    EA = (1, 0, 1)
    NWA = (-1, 1, 1)
    NA = (0, 1, 1)
    NEA = (1, 1, 1)

    @property
    def planar(self) -> str:
        return self.name[:-1]

    @property
    def level(self) -> str:
        return self.name[-1]

    @property
    def token(self) -> str:
        return self.name

    @property
    def emit_token(self) -> str:
        return self.name.lower()

    @property
    def index(self) -> int:
        return _TILE_INDEX[self]

    @property
    def bit(self) -> int:
        return 1 << _TILE_INDEX[self]

    @classmethod
    def parse(cls, token: str) -> "Tile":
        """Parse ``SWB``, ``swb`` or ``SW^B``; raise ``ValueError`` otherwise."""
        name = token.replace("^", "").upper()
        try:
            return cls[name]
        except KeyError:
            raise ValueError(f"unknown tile token {token!r}") from None

    @classmethod
    def from_classes(cls, cx: int, cy: int, cz: int) -> "Tile":
        return _TILE_BY_CLASSES[(cx, cy, cz)]


TILES: tuple[Tile, ...] = tuple(Tile)
_TILE_INDEX = {t: i for i, t in enumerate(TILES)}
_TILE_BY_CLASSES = {t.value: t for t in TILES}


@dataclass(frozen=True)
class BasicRelation:
    """Exact set of reference tiles the target occupies (``R1:...:Rk``)."""

    tiles: frozenset[Tile]

    def __post_init__(self) -> None:
        if not isinstance(self.tiles, frozenset):
            object.__setattr__(self, "tiles", frozenset(self.tiles))
        if not self.tiles:
            raise ValueError("a basic relation needs at least one tile")

    @classmethod
    def of(cls, *tiles: Tile | str) -> "BasicRelation":
        return cls(frozenset(t if isinstance(t, Tile) else Tile.parse(t) for t in tiles))

    @classmethod
    def parse(cls, token: str) -> "BasicRelation":
        return cls.of(*token.split(":"))

    @classmethod
    def from_mask(cls, mask: int) -> "BasicRelation":
        return cls(frozenset(t for t in TILES if mask & t.bit))

    @property
    def mask(self) -> int:
        m = 0
        for t in self.tiles:
            m |= t.bit
        return m

    def ordered(self) -> tuple[Tile, ...]:
        return tuple(t for t in TILES if t in self.tiles)

    @property
    def token(self) -> str:
        return ":".join(t.token for t in self.ordered())

    def sort_key(self) -> tuple[int, ...]:
        return tuple(t.index for t in self.ordered())

    def __len__(self) -> int:
        return len(self.tiles)

    def __str__(self) -> str:
        return self.token


@dataclass(frozen=True)
class Basic:
    relation: BasicRelation


@dataclass(frozen=True)
class Disjunctive:
    disjuncts: tuple[BasicRelation, ...]


@dataclass(frozen=True)
class Default:
    relation: BasicRelation


Relation = Union[Basic, Disjunctive, Default]
Pair = tuple[str, str]


@dataclass(frozen=True)
class Constraint:
    target: str
    reference: str
    relation: Relation
    mandatory: bool = False

    @property
    def pair(self) -> Pair:
        return (self.target, self.reference)

    @property
    def is_default(self) -> bool:
        return isinstance(self.relation, Default)


@dataclass(frozen=True)
class GridSpec:
    m: int
    n: int
    p: int
    complete: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        if min(self.m, self.n, self.p) < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.dims}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.p)

    def contains(self, cell: tuple[int, int, int]) -> bool:
        return all(1 <= c <= d for c, d in zip(cell, self.dims))

    @staticmethod
    def bound(num_objects: int) -> int:
        """Smallest side length for which the grid is exact."""
        return max(1, 2 * num_objects - 1)


@dataclass(frozen=True)
class Network:
    objects: tuple[str, ...]
    constraints: tuple[Constraint, ...] = ()
    ab_marks: frozenset[str] = frozenset()
    infer_requests: tuple[Pair, ...] = ()
    connected: bool = False
    grid: GridSpec | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "ab_marks", frozenset(self.ab_marks))
        object.__setattr__(self, "infer_requests", tuple(tuple(p) for p in self.infer_requests))

    def index(self, name: str) -> int:
        return self.objects.index(name)

    @property
    def hard_constraints(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if not c.is_default)

    @property
    def defaults(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.is_default)

    @property
    def targets(self) -> frozenset[str]:
        return frozenset(c.target for c in self.constraints)

    def without(self, pairs: Iterable[Pair]) -> "Network":
        """Copy of the network with the non-default constraints on ``pairs`` removed."""
        drop = set(pairs)
        kept = tuple(c for c in self.constraints if c.is_default or c.pair not in drop)
        return Network(self.objects, kept, self.ab_marks, self.infer_requests,
                       self.connected, self.grid)


@dataclass(frozen=True)
class SpatialObject:
    cells: frozenset[tuple[int, int, int]]

    def __post_init__(self) -> None:
        if not isinstance(self.cells, frozenset):
            object.__setattr__(self, "cells", frozenset(tuple(c) for c in self.cells))
        if not self.cells:
            raise ValueError("a spatial object needs at least one cell")

    def sorted_cells(self) -> list[tuple[int, int, int]]:
        return sorted(self.cells)

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class MBB:
    inf_x: int
    sup_x: int
    inf_y: int
    sup_y: int
    inf_z: int
    sup_z: int

    def __post_init__(self) -> None:
        for lo, hi in self.intervals():
            if lo > hi:
                raise ValueError(f"empty bounding box {self}")

    def intervals(self) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
        return ((self.inf_x, self.sup_x), (self.inf_y, self.sup_y), (self.inf_z, self.sup_z))

    @classmethod
    def from_intervals(cls, ivs: Iterable[tuple[int, int]]) -> "MBB":
        (a, b), (c, d), (e, f) = ivs
        return cls(a, b, c, d, e, f)

    def cells(self) -> Iterable[tuple[int, int, int]]:
        for x in range(self.inf_x, self.sup_x + 1):
            for y in range(self.inf_y, self.sup_y + 1):
                for z in range(self.inf_z, self.sup_z + 1):
                    yield (x, y, z)


Cost = tuple[int, int]


@dataclass(frozen=True)
class Solution:
    """A witness assignment. ``cost`` is (violations, dropped defaults)."""

    grid: GridSpec
    assignment: Mapping[str, SpatialObject]
    dropped_defaults: frozenset[Pair] = frozenset()
    violated: frozenset[Pair] = frozenset()
    cost: Cost = (0, 0)

    def __getitem__(self, name: str) -> SpatialObject:
        return self.assignment[name]


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    kind: str
    subject: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.kind}({', '.join(self.subject)})"


class NetworkError(ValueError):
    """A network breaks one or more structural rules."""

    def __init__(self, issues: list[Issue]):
        self.issues = issues
        super().__init__("; ".join(str(i) for i in issues))


def network_issues(net: Network) -> list[Issue]:
    issues: list[Issue] = []
    known = set()
    for name in net.objects:
        if name in known:
            issues.append(Issue("DuplicateObject", (name,)))
        known.add(name)

    def check_name(name: str) -> None:
        if name not in known:
            issue = Issue("UnknownName", (name,))
            if issue not in issues:
                issues.append(issue)

    hard: set[Pair] = set()
    soft: set[Pair] = set()
    for c in net.constraints:
        check_name(c.target)
        check_name(c.reference)
        if c.target == c.reference:
            issues.append(Issue("SelfConstraint", (c.target,)))
            continue
        seen = soft if c.is_default else hard
        if c.pair in seen:
            issues.append(Issue("DuplicateConstraint", c.pair))
        seen.add(c.pair)
        rel = c.relation
        if isinstance(rel, Disjunctive):
            if len(rel.disjuncts) < 2:
                issues.append(Issue("EmptyRelation", c.pair))
            elif len(set(rel.disjuncts)) != len(rel.disjuncts):
                issues.append(Issue("DuplicateDisjunct", c.pair))
        if c.is_default and c.mandatory:
            issues.append(Issue("MandatoryDefault", c.pair))
    for name in sorted(net.ab_marks):
        check_name(name)
    for u, v in net.infer_requests:
        check_name(u)
        check_name(v)
        if u == v:
            issues.append(Issue("SelfConstraint", (u,)))
    return issues


def validate_network(net: Network) -> Network:
    """Return ``net`` unchanged, or raise :class:`NetworkError` listing every problem."""
    issues = network_issues(net)
    if issues:
        raise NetworkError(issues)
    return net
