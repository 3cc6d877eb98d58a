"""Dart/involution structure: construction, orbits, cells, validation."""
import pytest

from ngmap import (
    CellCatalog,
    GMap,
    InvalidGMap,
    gmap_from_pairs,
    gmap_from_voxels,
    incident,
)

from conftest import two_triangles, worked_disc


def single_edge() -> GMap:
    return GMap(1, [[1, 0], [0, 1]])


def test_constructor_rejects_bad_shapes():
    with pytest.raises(ValueError):
        GMap(-1, [])
    with pytest.raises(ValueError):
        GMap(1, [[1, 0]])  # needs dimension + 1 rows
    with pytest.raises(ValueError):
        GMap(0, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        GMap(0, [[2, 1]])  # entry out of range
    with pytest.raises(ValueError):
        GMap(0, [[0, "x"]])


def test_rows_must_have_equal_length():
    with pytest.raises(ValueError):
        GMap(1, [[1, 0], [0]])


def test_empty_map_is_fine():
    g = GMap(2, [[], [], []])
    assert g.num_darts == 0
    assert g.validate().ok
    assert g.all_cells().counts() == (0, 0, 0)


def test_basic_accessors():
    g = single_edge()
    assert g.num_darts == 2
    assert list(g.darts()) == [0, 1]
    assert g.a(0, 0) == 1
    assert g.is_free(0, 1)  # alpha_1 fixes dart 1
    assert not g.is_free(1, 0)


def test_is_free_matches_alpha_fixed_points():
    g = two_triangles()
    for d in g.darts():
        for i in range(3):
            assert g.is_free(d, i) == (g.a(i, d) == d)


def test_orbit_rejects_bad_generator_index():
    g = single_edge()
    with pytest.raises(ValueError):
        g.orbit(0, [2])


def test_orbit_of_face_is_the_polygon():
    disc = worked_disc()
    # first face is a hexagon: darts 1..6 one-based
    assert sorted(disc.orbit(0, [0, 1])) == [0, 1, 2, 3, 4, 5]
    # orbit under nothing is the dart itself
    assert disc.orbit(3, []) == (3,)


def test_cell_equals_orbit_of_all_but_one_involution():
    disc = worked_disc()
    for d in (0, 7, 14):
        for i in range(3):
            gens = [j for j in range(3) if j != i]
            assert disc.cell(d, i).dart_set == set(disc.orbit(d, gens))


def test_cell_counts_of_hand_built_maps():
    assert worked_disc().all_cells().counts() == (7, 9, 3)
    assert two_triangles().all_cells().counts() == (4, 5, 2)


def test_validate_flags_non_involution():
    g = GMap(0, [[1, 2, 0]])  # a 3-cycle is not an involution
    report = g.validate()
    assert not report.ok
    assert (0, 0) in report.involution_failures
    with pytest.raises(InvalidGMap):
        report.raise_if_invalid()


def test_validate_flags_broken_commutation():
    # alpha_0 = (0 1)(2 3), alpha_2 = (0 2): their product is a 4-cycle,
    # so the required commutation of distant involutions fails.
    g = GMap(2, [[1, 0, 3, 2], [0, 1, 2, 3], [2, 1, 0, 3]])
    report = g.validate()
    assert not report.ok
    assert not report.involution_failures
    assert any(i == 0 and j == 2 for i, j, _ in report.commutation_failures)


def test_validate_ok_on_fixtures():
    for g in (worked_disc(), two_triangles(), gmap_from_voxels([(0, 0, 0)])):
        report = g.validate()
        assert report.ok
        report.raise_if_invalid()  # must not raise


def test_degree_and_codegree_on_the_cube():
    cube = gmap_from_voxels([(0, 0, 0)])
    cat = cube.all_cells()
    for vertex in cat.cells(0):
        assert cube.degree(vertex) == 3  # three edges meet at a corner
    for edge in cat.cells(1):
        assert cube.degree(edge) == 2
        assert cube.codegree(edge) == 2
    for face in cat.cells(2):
        assert cube.degree(face) == 1  # one volume
        assert cube.codegree(face) == 4  # quads
    (volume,) = cat.cells(3)
    assert cube.codegree(volume) == 6


def test_degree_codegree_domain_errors():
    cube = gmap_from_voxels([(0, 0, 0)])
    cat = cube.all_cells()
    with pytest.raises(ValueError):
        cube.degree(cat.cells(3)[0])
    with pytest.raises(ValueError):
        cube.codegree(cat.cells(0)[0])


def test_shared_edge_degree_counts_distinct_faces():
    tri2 = two_triangles()
    cat = tri2.all_cells()
    shared = cat.cell_of(1, 4)  # the edge the two triangles share
    assert tri2.degree(shared) == 2
    boundary = cat.cell_of(1, 0)
    assert tri2.degree(boundary) == 1


def test_incident_and_adjacent():
    cube = gmap_from_voxels([(0, 0, 0)])
    cat = cube.all_cells()
    edge = cat.cell_of(1, 0)
    vertex = cat.cell_of(0, 0)
    assert incident(edge, vertex)
    assert incident(vertex, edge)
    face = cat.cell_of(2, 0)
    neighbours = sum(cube.adjacent(face, other) for other in cat.cells(2) if other is not face)
    assert neighbours == 4  # a cube face shares an edge with all but the opposite one
    with pytest.raises(ValueError):
        cube.adjacent(face, edge)


def test_catalog_lookups_round_trip():
    disc = worked_disc()
    cat = disc.all_cells()
    for i in range(3):
        for pos, cell in enumerate(cat.cells(i)):
            for d in cell.darts:
                assert cat.index_of(i, d) == pos
                assert cat.cell_of(i, d) is cell
    assert sum(1 for _ in cat) == sum(cat.counts())


def test_all_cells_single_dimension():
    disc = worked_disc()
    faces = disc.all_cells(2)
    assert len(faces) == 3
    assert {len(f) for f in faces} == {6, 8, 10}


def test_catalog_class_direct():
    disc = worked_disc()
    assert CellCatalog(disc).counts() == disc.all_cells().counts()


def test_cell_dunder_helpers():
    disc = worked_disc()
    face = disc.cell(0, 2)
    assert face.canonical_dart == min(face.darts)
    assert 0 in face
    assert len(face) == len(face.darts)
    assert repr(face).startswith("Cell(dim=2")


def test_gmap_from_pairs_zero_based():
    g = gmap_from_pairs(1, 2, {0: [(0, 1)]}, one_based=False)
    assert g.a(0, 0) == 1
    assert g.a(1, 0) == 0


def test_to_lists_copies():
    g = single_edge()
    rows = g.to_lists()
    rows[0][0] = 0
    assert g.a(0, 0) == 1  # the map itself is untouched


def test_equality_and_hash():
    assert single_edge() == single_edge()
    assert hash(single_edge()) == hash(single_edge())
    assert single_edge() != GMap(1, [[0, 1], [0, 1]])
