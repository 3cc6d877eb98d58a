"""Shared fixtures: small hand-built maps, mesh builders, property helpers.

The hand-built maps are transcribed 1-based, exactly as drawn on paper;
comments give the cell counts they were checked against when first frozen.
"""
from itertools import combinations
from math import gcd
from pathlib import Path

import pytest

from ngmap import GMap, MeshMap, gmap_from_pairs, load_off, read_gmap_table

DATA = Path(__file__).resolve().parent / "data"


# -- hand-built 2-gmaps ------------------------------------------------------


def worked_disc() -> GMap:
    """Disc of three faces (two quads, one hexagon): 7 vertices, 9 edges."""
    return gmap_from_pairs(
        2,
        24,
        {
            0: [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (11, 12),
                (13, 14), (15, 16), (17, 18), (19, 20), (21, 22), (23, 24)],
            1: [(2, 3), (4, 5), (6, 1), (8, 9), (10, 11), (12, 13),
                (14, 7), (16, 17), (18, 19), (20, 21), (22, 23), (24, 15)],
            2: [(1, 23), (2, 24), (3, 7), (4, 8), (13, 16), (14, 15)],
        },
    )


def two_triangles() -> GMap:
    """Two triangles sewn along one edge: 4 vertices, 5 edges, 2 faces."""
    return gmap_from_pairs(
        2,
        12,
        {
            0: [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (11, 12)],
            1: [(2, 3), (4, 5), (6, 1), (8, 9), (10, 11), (12, 7)],
            2: [(5, 8), (6, 7)],
        },
    )


def three_digon_sphere() -> GMap:
    """Sphere as three lune faces: 2 vertices, 3 edges, 3 faces."""
    return gmap_from_pairs(
        2,
        12,
        {
            0: [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10), (11, 12)],
            1: [(2, 3), (4, 1), (6, 7), (8, 5), (10, 11), (12, 9)],
            2: [(3, 6), (4, 5), (7, 10), (8, 9), (2, 11), (1, 12)],
        },
    )


def moebius_band_map() -> GMap:
    """One square with two opposite sides sewn with a flip: a Moebius band."""
    return gmap_from_pairs(
        2,
        8,
        {
            0: [(1, 2), (3, 4), (5, 6), (7, 8)],
            1: [(2, 3), (4, 5), (6, 7), (8, 1)],
            2: [(1, 5), (2, 6)],
        },
    )


def projective_digon() -> GMap:
    """Digon with its two edge sides glued antipodally: a projective plane."""
    return gmap_from_pairs(
        2,
        4,
        {0: [(1, 2), (3, 4)], 1: [(2, 3), (4, 1)], 2: [(1, 3), (2, 4)]},
    )


def sphere_digon() -> GMap:
    """Digon with its two edge sides glued straight: a sphere."""
    return gmap_from_pairs(
        2,
        4,
        {0: [(1, 2), (3, 4)], 1: [(2, 3), (4, 1)], 2: [(1, 4), (2, 3)]},
    )


# -- OFF mesh text builders --------------------------------------------------


def torus_off_text(m: int, k: int) -> str:
    """m x k quad grid with both directions wrapped."""
    lines = ["OFF", f"{m * k} {m * k} 0"]
    for i in range(m):
        for j in range(k):
            lines.append(f"{i} {j} 0")
    for i in range(m):
        for j in range(k):
            a = i * k + j
            b = ((i + 1) % m) * k + j
            c = ((i + 1) % m) * k + (j + 1) % k
            d = i * k + (j + 1) % k
            lines.append(f"4 {a} {b} {c} {d}")
    return "\n".join(lines) + "\n"


def disc_grid_off_text(m: int, k: int) -> str:
    """m x k quad grid, open boundary."""
    lines = ["OFF", f"{(m + 1) * (k + 1)} {m * k} 0"]
    for i in range(m + 1):
        for j in range(k + 1):
            lines.append(f"{i} {j} 0")
    for i in range(m):
        for j in range(k):
            a = i * (k + 1) + j
            b = (i + 1) * (k + 1) + j
            lines.append(f"4 {a} {b} {b + 1} {a + 1}")
    return "\n".join(lines) + "\n"


def cube_off_text() -> str:
    """The surface of a cube: 8 vertices, 6 quads."""
    verts = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    faces = [
        (0, 1, 3, 2), (4, 6, 7, 5),
        (0, 4, 5, 1), (2, 3, 7, 6),
        (0, 2, 6, 4), (1, 5, 7, 3),
    ]
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    lines += [f"{x} {y} {z}" for x, y, z in verts]
    lines += ["4 " + " ".join(map(str, f)) for f in faces]
    return "\n".join(lines) + "\n"


def moebius_off_text(m: int, k: int) -> str:
    """Quad strip of m columns and k rows, closed up with one flip."""
    lines = ["OFF", f"{m * (k + 1)} {m * k} 0"]

    def v(i, j):
        return i * (k + 1) + j

    for i in range(m):
        for j in range(k + 1):
            lines.append(f"{i} {j} 0")
    for i in range(m - 1):
        for j in range(k):
            lines.append(f"4 {v(i, j)} {v(i + 1, j)} {v(i + 1, j + 1)} {v(i, j + 1)}")
    for j in range(k):
        lines.append(f"4 {v(m - 1, j)} {v(0, k - j)} {v(0, k - j - 1)} {v(m - 1, j + 1)}")
    return "\n".join(lines) + "\n"


def two_tori_off_text(m: int, k: int) -> str:
    """Genus-two surface: two wrapped grids, glued along one deleted quad.

    Each grid drops its face (0, 0); the second grid reuses the first
    grid's four vertices around the hole, so the two boundary squares sew
    up when edges are matched.  The second grid's faces are listed with
    reversed vertex order, which makes the glued surface orientable.
    """
    nv = m * k

    def v(copy, i, j):
        return copy * nv + (i % m) * k + j % k

    corner = {v(1, 0, 0): v(0, 0, 0), v(1, 1, 0): v(0, 1, 0),
              v(1, 1, 1): v(0, 1, 1), v(1, 0, 1): v(0, 0, 1)}
    faces = []
    for copy in range(2):
        for i in range(m):
            for j in range(k):
                if (i, j) == (0, 0):
                    continue
                quad = [v(copy, i, j), v(copy, i + 1, j),
                        v(copy, i + 1, j + 1), v(copy, i, j + 1)]
                if copy:
                    quad = [corner.get(x, x) for x in reversed(quad)]
                faces.append(quad)
    used = sorted({x for f in faces for x in f})
    renum = {x: pos for pos, x in enumerate(used)}
    lines = ["OFF", f"{len(used)} {len(faces)} 0"]
    lines += [f"{x % nv // k} {x % nv % k} {x // nv}" for x in used]
    lines += ["4 " + " ".join(str(renum[x]) for x in f) for f in faces]
    return "\n".join(lines) + "\n"


def mesh_from_text(text: str, directory, name: str = "mesh.off") -> MeshMap:
    path = Path(directory) / name
    path.write_text(text, encoding="utf-8")
    return load_off(path)


# -- voxel sets --------------------------------------------------------------


def hollow_shell() -> list:
    """3^3 block minus its centre voxel: a thickened sphere."""
    return [
        (x, y, z)
        for x in range(3)
        for y in range(3)
        for z in range(3)
        if (x, y, z) != (1, 1, 1)
    ]


def voxel_ring() -> list:
    """Eight voxels forming a closed loop: a solid torus."""
    return [(0, 0, 0), (1, 0, 0), (2, 0, 0), (2, 1, 0),
            (2, 2, 0), (1, 2, 0), (0, 2, 0), (0, 1, 0)]


# -- property helpers --------------------------------------------------------


def assert_sign_rule(signed) -> None:
    """Signs flip across lower involutions and persist across higher ones."""
    g = signed.base
    for i in range(g.dimension + 1):
        for j in range(g.dimension + 1):
            if j == i:
                continue
            want = -1 if j < i else 1
            for d in range(g.num_darts):
                e = g.a(j, d)
                if e != d:
                    assert signed.sign(i, d) * signed.sign(i, e) == want, (i, j, d)


def boundary_of_chain(cc, p: int, chain: dict) -> dict:
    """Apply the p-th boundary matrix to a chain given by cell index."""
    acc: dict = {}
    for idx, coef in chain.items():
        for r, v in cc.columns[p][idx].items():
            acc[r] = acc.get(r, 0) + coef * v
    return {r: v for r, v in acc.items() if v}


def assert_projected_cycles(g: GMap, cc, catalog, chains_per_dim) -> None:
    """Every chain (keyed by canonical dart of g) must be a cycle of cc."""
    for p, chains in enumerate(chains_per_dim):
        for chain in chains:
            by_index = {
                catalog.index_of(p, can): coef
                for can, coef in chain.support.items()
            }
            assert boundary_of_chain(cc, p, by_index) == {}, (p, chain)


def incidence_value_choices(signed, c_hi, c_lo) -> set:
    """Every incidence total over all anchor and representative choices.

    Re-evaluates the incidence sum from scratch: the lower orbit is anchored
    at each dart of the upper cell in turn, and within each contributing
    class every dart is tried as the representative (totals branch over the
    cartesian product).  A well-defined incidence number yields a singleton.
    """
    g = signed.base
    i = c_hi.dim
    values = set()
    for anchor in c_hi.darts:
        rest = set(g.orbit(anchor, range(i)))
        term_sets = []
        while rest:
            p = min(rest)
            cls = [x for x in g.orbit(p, range(i - 1)) if x in rest]
            rest.difference_update(cls)
            terms = {
                signed.sign(i, x) * signed.sign(i - 1, x)
                for x in cls
                if x in c_lo.dart_set
            }
            if terms:
                term_sets.append(terms)
        totals = {0}
        for terms in term_sets:
            totals = {t + v for t in totals for v in terms}
        values |= totals
    return values


def has_global_orientation(g: GMap) -> bool:
    """Two-colourability of darts under all involutions (free darts exempt).

    Used as an independent yes/no orientability oracle for whole meshes;
    the fixtures with known answers calibrate it.
    """
    color = [0] * g.num_darts
    for start in range(g.num_darts):
        if color[start]:
            continue
        color[start] = 1
        stack = [start]
        while stack:
            d = stack.pop()
            for i in range(g.dimension + 1):
                e = g.a(i, d)
                if e == d:
                    continue
                if color[e] == 0:
                    color[e] = -color[d]
                    stack.append(e)
                elif color[e] != -color[d]:
                    return False
    return True


def euler_characteristic(g: GMap) -> int:
    counts = g.all_cells().counts()
    return sum((-1) ** dim * c for dim, c in enumerate(counts))


# -- independent integer-matrix oracles --------------------------------------


def det_int(mat) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1]


def naive_invariant_factors(mat) -> list:
    """Textbook diagonalisation, written independently of the library.

    Pulls the smallest entry to the pivot, clears its row and column by
    division steps, fixes non-divisible leftovers by row addition, then
    folds the diagonal into a divisibility chain with gcd/lcm swaps.
    """
    a = [list(r) for r in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    out = []
    top = 0
    while top < min(m, n):
        if all(a[i][j] == 0 for i in range(top, m) for j in range(top, n)):
            break
        while True:
            bi, bj = min(
                ((i, j) for i in range(top, m) for j in range(top, n) if a[i][j]),
                key=lambda ij: abs(a[ij[0]][ij[1]]),
            )
            a[top], a[bi] = a[bi], a[top]
            for row in a:
                row[top], row[bj] = row[bj], row[top]
            p = a[top][top]
            dirty = False
            for r in range(top + 1, m):
                q = a[r][top] // p
                if q:
                    for c in range(top, n):
                        a[r][c] -= q * a[top][c]
                dirty |= a[r][top] != 0
            for c in range(top + 1, n):
                q = a[top][c] // p
                if q:
                    for r in range(top, m):
                        a[r][c] -= q * a[r][top]
                dirty |= a[top][c] != 0
            if dirty:
                continue
            offender = next(
                (r for r in range(top + 1, m)
                 for c in range(top + 1, n) if a[r][c] % p),
                None,
            )
            if offender is None:
                break
            for c in range(top, n):
                a[top][c] += a[offender][c]
        out.append(abs(a[top][top]))
        top += 1
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            g = gcd(out[i], out[j])
            out[i], out[j] = g, out[i] * out[j] // g
    return out


def minors_invariant_factors(mat) -> list:
    """Invariant factors as quotients of k-minor gcds (small matrices only)."""
    m, n = len(mat), len(mat[0]) if mat else 0
    out = []
    prev = 1
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, abs(det_int([[mat[r][c] for c in cols] for r in rows])))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


# -- fixtures ----------------------------------------------------------------


@pytest.fixture(scope="session")
def torus_mesh(tmp_path_factory) -> MeshMap:
    return mesh_from_text(
        torus_off_text(4, 4), tmp_path_factory.mktemp("mesh"), "torus.off"
    )


@pytest.fixture(scope="session")
def torus(torus_mesh) -> GMap:
    return torus_mesh.gmap


@pytest.fixture(scope="session")
def projective_volume() -> GMap:
    return read_gmap_table(DATA / "projective_volume.gmap")
