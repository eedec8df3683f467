"""Per-axis order constraints between bounding-box endpoints.

Boxes are handled in *plane* coordinates: an object spanning cells
``inf..sup`` on an axis occupies the planes ``lo = inf - 1`` and ``hi = sup``
with ``lo < hi``. A cell ``c`` (the slab between planes ``c - 1`` and ``c``)
is west of a box when ``c <= lo``, east when ``c > hi`` and in the middle
column otherwise.

For a constraint ``u delta v`` the leftmost and rightmost cells of ``u`` must
carry the smallest and largest x-class used by ``delta``; that pins the
order of ``u``'s endpoints against ``v``'s exactly. Node ``2*i`` is ``lo`` of
object ``i`` and node ``2*i + 1`` its ``hi``.
"""

from __future__ import annotations

from functools import lru_cache

from ..model import TILES

NONE, LE, LT = 0, 1, 2


@lru_cache(maxsize=None)
def class_span(mask: int) -> tuple[tuple[int, int], tuple[int, int], tuple[int, int]]:
    """(min, max) class per axis over the tiles in ``mask``."""
    spans = []
    for axis in range(3):
        classes = [t.value[axis] for t in TILES if mask & t.bit]
        spans.append((min(classes), max(classes)))
    return tuple(spans)


def endpoint_edges(u: int, v: int, mask: int) -> list[list[tuple[int, int, int]]]:
    """Edges ``(a, b, kind)`` per axis, meaning ``a < b`` (LT) or ``a <= b`` (LE)."""
    lo_u, hi_u, lo_v, hi_v = 2 * u, 2 * u + 1, 2 * v, 2 * v + 1
    out = []
    for lo_cls, hi_cls in class_span(mask):
        edges = []
        if lo_cls < 0:
            edges.append((lo_u, lo_v, LT))
        elif lo_cls == 0:
            edges += [(lo_v, lo_u, LE), (lo_u, hi_v, LT)]
        else:
            edges.append((hi_v, lo_u, LE))
        if hi_cls < 0:
            edges.append((hi_u, lo_v, LE))
        elif hi_cls == 0:
            edges += [(lo_v, hi_u, LT), (hi_u, hi_v, LE)]
        else:
            edges.append((hi_v, hi_u, LT))
        out.append(edges)
    return out


def close(num_objects: int, edges: list[tuple[int, int, int]]) -> list[list[int]] | None:
    """Transitive closure of an order network; ``None`` if it forces ``a < a``."""
    n = 2 * num_objects
    rel = [[NONE] * n for _ in range(n)]
    for i in range(num_objects):
        rel[2 * i][2 * i + 1] = LT
    for a, b, kind in edges:
        if kind > rel[a][b]:
            rel[a][b] = kind
    for k in range(n):
        row_k = rel[k]
        for i in range(n):
            r_ik = rel[i][k]
            if not r_ik:
                continue
            row_i = rel[i]
            for j in range(n):
                r_kj = row_k[j]
                if r_kj:
                    kind = LT if (r_ik == LT or r_kj == LT) else LE
                    if kind > row_i[j]:
                        row_i[j] = kind
        if rel[k][k] == LT:
            return None
    if any(rel[i][i] == LT for i in range(n)):
        return None
    return rel


def close_axes(num_objects: int, enforced: list[tuple[int, int, int]]) -> list[list[list[int]]] | None:
    per_axis: list[list[tuple[int, int, int]]] = [[], [], []]
    for u, v, mask in enforced:
        for axis, edges in enumerate(endpoint_edges(u, v, mask)):
            per_axis[axis].extend(edges)
    out = []
    for axis in range(3):
        rel = close(num_objects, per_axis[axis])
        if rel is None:
            return None
        out.append(rel)
    return out
