"""Seeded synthetic inputs: random voxel sets, blobs, glued polygon maps.

Everything is driven by an explicit seed (or an already-constructed
random.Random), so batch experiments and property tests are reproducible;
no generator ever touches global random state.
"""
from __future__ import annotations

import random

from .core import GMap

_NEIGHBOURS = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def filled_block(size: int) -> list:
    """Every voxel of a size^3 cube."""
    return [
        (x, y, z)
        for x in range(size)
        for y in range(size)
        for z in range(size)
    ]


def random_voxels(grid: int, count: int, seed=0) -> list:
    """count distinct voxels drawn uniformly from a grid^3 box."""
    total = grid**3
    if not 0 <= count <= total:
        raise ValueError(f"cannot place {count} voxels in a {grid}^3 grid")
    picks = _rng(seed).sample(range(total), count)
    return sorted(
        (idx // (grid * grid), idx // grid % grid, idx % grid) for idx in picks
    )


_EDGE_DIAGONALS = (
    (1, 1, 0),
    (1, -1, 0),
    (1, 0, 1),
    (1, 0, -1),
    (0, 1, 1),
    (0, 1, -1),
)

_CORNER_DIAGONALS = (
    (1, 1, 1),
    (1, 1, -1),
    (1, -1, 1),
    (1, -1, -1),
)


def _repair_contacts(blob: set) -> None:
    """Fill bridge voxels until cubes meet face-to-face wherever they meet.

    Random accretion routinely folds back onto itself, leaving pairs of
    cubes that share only an edge or a corner.  Those pinches make the
    boundary surface non-manifold; at small grid sizes they dominate the
    shape instead of being the rare artifact they are on fine grids, so
    they are repaired by adding the (deterministically chosen) smallest
    bridging voxel of each bad pair until none is left.
    """
    while True:
        added = []
        for p in sorted(blob):
            x, y, z = p
            for dx, dy, dz in _EDGE_DIAGONALS:
                q = (x + dx, y + dy, z + dz)
                if q not in blob:
                    continue
                # the two cells that differ from p in exactly one of the
                # pair's two changing coordinates
                if dz == 0:
                    b1, b2 = (x + dx, y, z), (x, y + dy, z)
                elif dy == 0:
                    b1, b2 = (x + dx, y, z), (x, y, z + dz)
                else:
                    b1, b2 = (x, y + dy, z), (x, y, z + dz)
                if b1 not in blob and b2 not in blob:
                    added.append(min(b1, b2))
            for dx, dy, dz in _CORNER_DIAGONALS:
                q = (x + dx, y + dy, z + dz)
                if q not in blob:
                    continue
                block = (
                    (x + dx, y, z),
                    (x, y + dy, z),
                    (x, y, z + dz),
                    (x + dx, y + dy, z),
                    (x + dx, y, z + dz),
                    (x, y + dy, z + dz),
                )
                if not any(b in blob for b in block):
                    added.append(min(block[:3]))
        if not added:
            return
        blob.update(added)


def random_blob(grid: int, count: int, seed=0) -> list:
    """A connected rounded voxel blob of at least `count` cells.

    The blob is a union of random balls, each centred on a cell of the
    current blob so the union stays face-connected; bridge voxels are then
    added so cubes only ever meet along shared faces (_repair_contacts).
    Ball-shaped pieces keep the boundary smooth at the scale of single
    voxels — which is what any random solid looks like locally on a fine
    grid — while overlapping chains of balls still produce handles and
    cavities now and then.
    """
    total = grid**3
    if not 1 <= count <= total:
        raise ValueError(f"cannot grow a {count}-voxel blob in a {grid}^3 grid")
    rng = _rng(seed)
    blob: set = set()
    order: list = []

    def add_ball(centre, r):
        cx, cy, cz = centre
        rr = r * r
        for x in range(max(0, cx - r), min(grid, cx + r + 1)):
            for y in range(max(0, cy - r), min(grid, cy + r + 1)):
                for z in range(max(0, cz - r), min(grid, cz + r + 1)):
                    if (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2 <= rr:
                        cell = (x, y, z)
                        if cell not in blob:
                            blob.add(cell)
                            order.append(cell)

    rmax = max(2, grid // 8)
    add_ball((grid // 2,) * 3, rng.randint(2, rmax))
    stalls = 0
    while len(blob) < count:
        before = len(blob)
        add_ball(rng.choice(order), rng.randint(2, rmax))
        stalls = stalls + 1 if len(blob) == before else 0
        if stalls > 50:
            raise ValueError("blob growth ran out of room")
    _repair_contacts(blob)
    return sorted(blob)


def random_polygon_map(
    faces: int, seed=0, min_sides: int = 3, max_sides: int = 6, sew_fraction: float = 0.8
) -> GMap:
    """A random 2-gmap: polygon soup with a fraction of edge sides sewn.

    Each face is a (2k)-dart cycle; afterwards random pairs of still-free
    sides are alpha_2-sewn with random relative orientation.  The result is
    always a valid 2-gmap but need not be connected or orientable — exactly
    the variety the structural tests want.
    """
    rng = _rng(seed)
    sides = []
    a0: list = []
    a1: list = []
    base = 0
    for _ in range(faces):
        k = rng.randint(min_sides, max_sides)
        for j in range(k):
            d0, d1 = base + 2 * j, base + 2 * j + 1
            a0.extend((d1, d0))
            a1.extend((0, 0))
            sides.append((d0, d1))
        for j in range(k):
            c0, c1 = base + 2 * j, base + 2 * ((j - 1) % k) + 1
            a1[c0], a1[c1] = c1, c0
        base += 2 * k
    a2 = list(range(base))
    rng.shuffle(sides)
    to_sew = int(len(sides) // 2 * sew_fraction)
    for pair in range(to_sew):
        d0, d1 = sides[2 * pair]
        e0, e1 = sides[2 * pair + 1]
        if rng.random() < 0.5:
            e0, e1 = e1, e0
        a2[d0], a2[e0] = e0, d0
        a2[d1], a2[e1] = e1, d1
    g = GMap(2, [a0, a1, a2])
    g.validate().raise_if_invalid()
    return g
