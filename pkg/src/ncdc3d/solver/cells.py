"""Cell-level feasibility of one object given every bounding box.

Boxes are in plane coordinates (see :mod:`.order`). The same routines run on
real grid boxes (to build witnesses) and on zone-compressed boxes (inside the
search); compressing the grid onto the distinct endpoint planes keeps every
cell's tile classification, face contact and 6-connectivity.
"""

from __future__ import annotations

from collections import deque

from ..model import TILES

Box = tuple[tuple[int, int], tuple[int, int], tuple[int, int]]
Ref = tuple[Box, int]  # reference box and tile mask
Cell = tuple[int, int, int]

_INDEX = [0] * 27
for _t in TILES:
    _cx, _cy, _cz = _t.value
    _INDEX[(_cx + 1) * 9 + (_cy + 1) * 3 + (_cz + 1)] = _t.index
TILE_AT = tuple(_INDEX)


def _classes(lo: int, hi: int, ref_lo: int, ref_hi: int) -> list[int]:
    return [-1 if c <= ref_lo else (1 if c > ref_hi else 0) for c in range(lo + 1, hi + 1)]


def classify(box: Box, refs: list[Ref]) -> list[tuple[Cell, tuple[int, ...]]]:
    """Cells of ``box`` that every reference admits, each with its tile index per reference."""
    (lx, hx), (ly, hy), (lz, hz) = box
    per_ref = []
    for rbox, mask in refs:
        (rlx, rhx), (rly, rhy), (rlz, rhz) = rbox
        per_ref.append((
            [(c + 1) * 9 for c in _classes(lx, hx, rlx, rhx)],
            [(c + 1) * 3 for c in _classes(ly, hy, rly, rhy)],
            [c + 1 for c in _classes(lz, hz, rlz, rhz)],
            mask,
        ))
    out = []
    for ix in range(hx - lx):
        for iy in range(hy - ly):
            for iz in range(hz - lz):
                tiles = []
                for xs, ys, zs, mask in per_ref:
                    t = TILE_AT[xs[ix] + ys[iy] + zs[iz]]
                    if not (mask >> t) & 1:
                        break
                    tiles.append(t)
                else:
                    out.append(((lx + 1 + ix, ly + 1 + iy, lz + 1 + iz), tuple(tiles)))
    return out


def meets_requirements(box: Box, refs: list[Ref], cells: list[tuple[Cell, tuple[int, ...]]]) -> bool:
    """True when ``cells`` touch all six faces of ``box`` and hit every required tile."""
    (lx, hx), (ly, hy), (lz, hz) = box
    faces = 0
    hits = [0] * len(refs)
    for (x, y, z), tiles in cells:
        if x == lx + 1:
            faces |= 1
        if x == hx:
            faces |= 2
        if y == ly + 1:
            faces |= 4
        if y == hy:
            faces |= 8
        if z == lz + 1:
            faces |= 16
        if z == hz:
            faces |= 32
        for i, t in enumerate(tiles):
            hits[i] |= 1 << t
    if faces != 63:
        return False
    return all(h == mask for h, (_, mask) in zip(hits, refs))


def cell_components(cells: list[tuple[Cell, tuple[int, ...]]]) -> list[list[tuple[Cell, tuple[int, ...]]]]:
    info = dict(cells)
    todo = set(info)
    comps = []
    for start in sorted(info):
        if start not in todo:
            continue
        todo.discard(start)
        comp = [start]
        queue = deque([start])
        while queue:
            x, y, z = queue.popleft()
            for nb in ((x + 1, y, z), (x - 1, y, z), (x, y + 1, z), (x, y - 1, z), (x, y, z + 1), (x, y, z - 1)):
                if nb in todo:
                    todo.discard(nb)
                    comp.append(nb)
                    queue.append(nb)
        comps.append([(c, info[c]) for c in sorted(comp)])
    return comps


def feasible_cells(box: Box, refs: list[Ref], connected: bool) -> frozenset[Cell] | None:
    """Canonical witness cell set for one object, or ``None`` when none exists.

    Without connectedness this is the whole admissible set. With it, the
    valid 6-connected component whose sorted cell list is smallest.
    """
    cells = classify(box, refs)
    if not connected:
        if meets_requirements(box, refs, cells):
            return frozenset(c for c, _ in cells)
        return None
    best = None
    for comp in cell_components(cells):
        if meets_requirements(box, refs, comp):
            key = [c for c, _ in comp]
            if best is None or key < best:
                best = key
    return frozenset(best) if best is not None else None


def is_feasible(box: Box, refs: list[Ref], connected: bool) -> bool:
    if not refs and not connected:
        return True
    return feasible_cells(box, refs, connected) is not None


MAX_PRESENT_TILES = 16


def realizable_masks(box: Box, refs: list[Ref], other: Box, connected: bool) -> set[int]:
    """Tile masks (relative to ``other``) that some valid cell set inside ``box`` realizes.

    A choice of tiles ``T`` is realizable when the admissible cells lying in
    ``T`` still meet every face and required-tile condition, and (when
    ``connected``) some 6-connected part of them does so while covering ``T``.
    """
    cells = classify(box, refs)
    if not cells:
        return set()
    (olx, ohx), (oly, ohy), (olz, ohz) = other
    tagged = []
    for cell, tiles in cells:
        x, y, z = cell
        cx = -1 if x <= olx else (1 if x > ohx else 0)
        cy = -1 if y <= oly else (1 if y > ohy else 0)
        cz = -1 if z <= olz else (1 if z > ohz else 0)
        tagged.append((cell, tiles, TILE_AT[(cx + 1) * 9 + (cy + 1) * 3 + cz + 1]))
    (lx, hx), (ly, hy), (lz, hz) = box
    needs: list[int] = [0] * 6
    ref_needs: list[dict[int, int]] = [{} for _ in refs]
    present = 0
    for (x, y, z), tiles, t in tagged:
        bit = 1 << t
        present |= bit
        for i, flag in enumerate((x == lx + 1, x == hx, y == ly + 1, y == hy, z == lz + 1, z == hz)):
            if flag:
                needs[i] |= bit
        for i, rt in enumerate(tiles):
            ref_needs[i][rt] = ref_needs[i].get(rt, 0) | bit
    for i, (_, mask) in enumerate(refs):
        if sum(1 << rt for rt in ref_needs[i]) != mask:
            return set()
        needs.extend(ref_needs[i].values())
    if not all(needs):
        return set()
    tiles_present = [t for t in range(27) if present >> t & 1]
    if len(tiles_present) > MAX_PRESENT_TILES:
        raise ValueError(f"{len(tiles_present)} candidate tiles exceed the enumeration cap")
    out = set()
    for sub in range(1, 1 << len(tiles_present)):
        mask = 0
        for i, t in enumerate(tiles_present):
            if sub >> i & 1:
                mask |= 1 << t
        if not all(mask & need for need in needs):
            continue
        if not connected:
            out.add(mask)
            continue
        chosen = [(c, tiles + (t,)) for c, tiles, t in tagged if mask >> t & 1]
        extended = refs + [(other, mask)]
        if any(meets_requirements(box, extended, comp) for comp in cell_components(chosen)):
            out.add(mask)
    return out
