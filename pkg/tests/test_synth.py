"""Seeded generators: voxel samples, blobs, random polygon maps."""
import random
from itertools import combinations

import pytest

from ngmap.synth import filled_block, random_blob, random_polygon_map, random_voxels

EDGE_DIAGONALS = [(1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1), (0, 1, 1), (0, 1, -1)]
CORNER_DIAGONALS = [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)]


def face_connected(cells) -> bool:
    todo, seen = [cells[0]], {cells[0]}
    cell_set = set(cells)
    while todo:
        x, y, z = todo.pop()
        for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            q = (x + dx, y + dy, z + dz)
            if q in cell_set and q not in seen:
                seen.add(q)
                todo.append(q)
    return len(seen) == len(cell_set)


def pinch_free(cells) -> bool:
    """No two cubes may touch along only an edge or only a corner."""
    cell_set = set(cells)
    for x, y, z in cells:
        for diagonals, keep in ((EDGE_DIAGONALS, 1), (CORNER_DIAGONALS, 2)):
            for dx, dy, dz in diagonals:
                if (x + dx, y + dy, z + dz) not in cell_set:
                    continue
                # every cube strictly between the pair: drop one or two of
                # the diagonal's steps, but not all of them
                steps = [s for s in ((dx, 0, 0), (0, dy, 0), (0, 0, dz)) if any(s)]
                between = [
                    (x + sum(a for a, _, _ in kept), y + sum(b for _, b, _ in kept), z + sum(c for _, _, c in kept))
                    for r in range(1, keep + 1)
                    for kept in combinations(steps, r)
                ]
                if not any(b in cell_set for b in between):
                    return False
    return True


def test_filled_block():
    assert filled_block(1) == [(0, 0, 0)]
    block = filled_block(2)
    assert len(block) == 8
    assert all(c in block for c in [(0, 0, 0), (1, 1, 1), (0, 1, 0)])


def test_random_voxels_reproducible_and_bounded():
    cells = random_voxels(5, 20, seed=7)
    assert cells == random_voxels(5, 20, seed=7)
    assert cells == random_voxels(5, 20, seed=random.Random(7))
    assert cells != random_voxels(5, 20, seed=8)
    assert len(set(cells)) == 20
    assert cells == sorted(cells)
    assert all(0 <= v < 5 for cell in cells for v in cell)


def test_random_voxels_extremes():
    assert random_voxels(3, 27, seed=0) == filled_block(3)
    assert random_voxels(3, 0, seed=0) == []
    with pytest.raises(ValueError):
        random_voxels(3, 28)
    with pytest.raises(ValueError):
        random_voxels(3, -1)


def test_random_blob_shape():
    for seed in range(5):
        blob = random_blob(12, 150, seed=seed)
        assert blob == random_blob(12, 150, seed=seed)
        assert len(blob) >= 150
        assert all(0 <= v < 12 for cell in blob for v in cell)
        assert face_connected(blob)
        assert pinch_free(blob)


def test_random_blob_extremes():
    assert len(random_blob(2, 8, seed=1)) == 8
    with pytest.raises(ValueError):
        random_blob(4, 0)
    with pytest.raises(ValueError):
        random_blob(4, 65)


def test_random_polygon_map_is_valid():
    for seed in range(8):
        g = random_polygon_map(12, seed=seed)
        assert g.validate().ok
        assert g.dimension == 2


def test_random_polygon_map_reproducible():
    assert random_polygon_map(15, seed=3) == random_polygon_map(15, seed=3)
    assert random_polygon_map(15, seed=3) != random_polygon_map(15, seed=4)


def test_random_polygon_map_face_count_and_sides():
    g = random_polygon_map(9, seed=2, min_sides=4, max_sides=5)
    faces = g.all_cells(2)
    assert len(faces) == 9
    assert all(len(f.darts) in (8, 10) for f in faces)


def test_sew_fraction_bounds():
    soup = random_polygon_map(6, seed=0, sew_fraction=0.0)
    assert all(soup.is_free(d, 2) for d in soup.darts())
    dense = random_polygon_map(6, seed=0, sew_fraction=1.0)
    free = sum(dense.is_free(d, 2) for d in dense.darts())
    assert free <= 2  # at most one unpaired side when the side count is odd
