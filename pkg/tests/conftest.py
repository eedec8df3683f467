from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ncdc3d.model import (
    TILES,
    Basic,
    BasicRelation,
    Constraint,
    Default,
    Disjunctive,
    GridSpec,
    Network,
    SpatialObject,
)
from ncdc3d.semantics import relation_of

settings.register_profile(
    "repo", deadline=None, derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

GOLDEN = Path(__file__).parent / "golden"


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def golden():
    """Read a golden file by name."""
    return lambda name: (GOLDEN / name).read_text()


def random_relation(rng: random.Random, max_tiles: int = 4) -> BasicRelation:
    k = rng.randint(1, max_tiles)
    return BasicRelation(frozenset(rng.sample(TILES, k)))


def random_object(rng: random.Random, dims: tuple[int, int, int], density: float = 0.3) -> SpatialObject:
    m, n, p = dims
    cells = [(x, y, z) for x in range(1, m + 1) for y in range(1, n + 1) for z in range(1, p + 1)
             if rng.random() < density]
    if not cells:
        cells = [(rng.randint(1, m), rng.randint(1, n), rng.randint(1, p))]
    return SpatialObject(frozenset(cells))


def random_network(rng: random.Random, num_objects: int, num_constraints: int,
                   defaults: int = 0, disjunctions: bool = False, max_tiles: int = 3) -> Network:
    names = [f"o{i}" for i in range(num_objects)]
    pairs = [(a, b) for a in names for b in names if a != b]
    rng.shuffle(pairs)
    constraints = []
    for pair in pairs[:num_constraints]:
        if disjunctions and rng.random() < 0.3:
            alts = []
            while len(alts) < 2:
                r = random_relation(rng, max_tiles)
                if r not in alts:
                    alts.append(r)
            constraints.append(Constraint(*pair, Disjunctive(tuple(alts))))
        else:
            constraints.append(Constraint(*pair, Basic(random_relation(rng, max_tiles))))
    rng.shuffle(pairs)
    for pair in pairs[:defaults]:
        constraints.append(Constraint(*pair, Default(random_relation(rng, max_tiles))))
    return Network(tuple(names), tuple(constraints))


def sampled_relations(count: int = 200, seed: int = 11) -> list[BasicRelation]:
    """Half realizable on the 2x2x2 grid, half arbitrary tile sets."""
    rng = random.Random(seed)
    seen: list[BasicRelation] = []
    while len(seen) < count // 2:
        r = relation_of(random_object(rng, (2, 2, 2), 0.4), random_object(rng, (2, 2, 2), 0.3))
        if r not in seen:
            seen.append(r)
    while len(seen) < count:
        r = BasicRelation(frozenset(rng.sample(TILES, rng.randint(1, 5))))
        if r not in seen:
            seen.append(r)
    return seen


def planted(rng: random.Random, grid: GridSpec, objects: int, hard: int, defaults: int,
            perturb: float = 0.3) -> Network:
    """Constraints read off a random assignment, some replaced by arbitrary relations."""
    names = [f"o{i}" for i in range(objects)]
    sol = {n: random_object(rng, grid.dims, 0.35) for n in names}
    pairs = [(a, b) for a in names for b in names if a != b]
    rng.shuffle(pairs)

    def relation(pair):
        if rng.random() < perturb:
            return BasicRelation(frozenset(rng.sample(TILES, rng.randint(1, 3))))
        return relation_of(sol[pair[0]], sol[pair[1]])

    cons = [Constraint(*p, Basic(relation(p))) for p in pairs[:hard]]
    rng.shuffle(pairs)
    cons += [Constraint(*p, Default(relation(p))) for p in pairs[:defaults]]
    return Network(tuple(names), tuple(cons))
