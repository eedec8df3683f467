"""Bundled scenario networks and the replication used for scaling runs."""

from __future__ import annotations

import dataclasses
from importlib import resources

from .model import Network
from .parser import parse_network

FIXTURES = (
    "marine",
    "building_B1",
    "building_B1_mandatory",
    "building_B1_prime",
    "forensics_D1",
    "forensics_D2",
    "appendix_b",
)


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("ncdc3d").joinpath("data", f"{name}.ncdc").read_text(encoding="utf-8")


def fixture(name: str) -> Network:
    return parse_network(fixture_text(name))


def replicate(net: Network, copies: int) -> Network:
    """``copies`` disjoint copies of ``net``; copy ``k > 1`` suffixes every name with ``_k``."""
    if copies < 1:
        raise ValueError("copies must be positive")

    def rename(name: str, k: int) -> str:
        return name if k == 1 else f"{name}_{k}"

    objects, constraints, ab, infer = [], [], set(), []
    for k in range(1, copies + 1):
        objects += [rename(o, k) for o in net.objects]
        constraints += [dataclasses.replace(c, target=rename(c.target, k), reference=rename(c.reference, k))
                        for c in net.constraints]
        ab |= {rename(o, k) for o in net.ab_marks}
        infer += [(rename(u, k), rename(v, k)) for u, v in net.infer_requests]
    return Network(tuple(objects), tuple(constraints), frozenset(ab), tuple(infer), net.connected, None)


__all__ = ["FIXTURES", "fixture", "fixture_text", "replicate"]
