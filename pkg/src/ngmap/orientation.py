"""Cell orientability, dart signs and signed incidence numbers.

Two related notions live here:

* orientability of a single cell: its darts can be 2-coloured so that every
  non-free involution link inside the cell joins opposite colours;
* a sign assignment for every dimension: sg_i(d) is +1 or -1, flips across
  alpha_j links with j < i and is equal across alpha_j links with j > i
  (free darts impose nothing).

The signed incidence number between an i-cell and an (i-1)-cell is the
coefficient used by the boundary operator of the chain complex built in
the homology module.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import Cell, CellCatalog, DartId, DomainError, GMap


class NonOrientableCell(DomainError):
    def __init__(self, dim: int, canonical_dart: DartId):
        self.dim = dim
        self.canonical_dart = canonical_dart
        super().__init__(
            f"{dim}-cell with canonical dart {canonical_dart} is not orientable"
        )


def is_orientable_cell(g: GMap, c: Cell) -> bool:
    """Bipartition test: every in-cell non-free link must flip the colour."""
    colour = {c.canonical_dart: 1}
    queue = deque((c.canonical_dart,))
    members = c.dart_set
    while queue:
        d = queue.popleft()
        for j in range(g.dimension + 1):
            if j == c.dim:
                continue
            e = g.alpha[j][d]
            if e == d:
                continue
            if e not in members:  # cannot happen for a true cell; stay safe
                continue
            want = -colour[d]
            if e in colour:
                if colour[e] != want:
                    return False
            else:
                colour[e] = want
                queue.append(e)
    return True


@dataclass(frozen=True)
class SignedGMap:
    """A gmap together with one sign table per dimension (entries +-1)."""

    base: GMap
    sg: tuple[tuple[int, ...], ...]

    def sign(self, i: int, d: DartId) -> int:
        return self.sg[i][d]

    def reseeded(self, seeds: dict) -> "SignedGMap":
        """Re-run the assignment with explicit per-cell seed signs."""
        return assign_signs(self.base, seeds=seeds)


def _assign_dim(g: GMap, i: int, cells, seeds) -> list[int]:
    sg = [0] * g.num_darts
    alpha = g.alpha
    n = g.dimension
    for cell in cells:
        seed_dart = cell.canonical_dart
        sg[seed_dart] = seeds.get((i, seed_dart), 1) if seeds else 1
        queue = deque((seed_dart,))
        while queue:
            d = queue.popleft()
            for j in range(n + 1):
                if j == i:
                    continue
                e = alpha[j][d]
                if e == d:
                    continue
                want = -sg[d] if j < i else sg[d]
                if sg[e] == 0:
                    sg[e] = want
                    queue.append(e)
                elif sg[e] != want:
                    raise NonOrientableCell(i, seed_dart)
    return sg


def assign_signs(g: GMap, catalog: CellCatalog | None = None, seeds: dict | None = None) -> SignedGMap:
    """Assign signs for every dimension, seeding each cell's canonical dart +1.

    seeds optionally overrides individual cell seeds; keys are
    (dim, canonical_dart), values +-1.  Raises NonOrientableCell on the first
    cell (by dimension, then canonical dart) whose constraints are
    inconsistent.
    """
    if seeds:
        for (i, d), v in seeds.items():
            if v not in (1, -1):
                raise ValueError(f"seed for ({i}, {d}) must be +-1, got {v!r}")
    catalog = catalog or g.all_cells()
    table = tuple(
        tuple(_assign_dim(g, i, catalog.cells(i), seeds))
        for i in range(g.dimension + 1)
    )
    return SignedGMap(g, table)


def boundary_partition(g: GMap, d: DartId, i: int):
    """The lower orbit of dart d at dimension i, split into rep classes.

    Returns the list of classes (each a sorted dart tuple) of the orbit of d
    under alpha_0..alpha_{i-1}, partitioned by orbits under
    alpha_0..alpha_{i-2}.  Sorted by class minimum; used by the signed
    incidence number and by representative-independence tests.
    """
    lower = g.orbit(d, range(i))
    lower_set = set(lower)
    classes = []
    while lower_set:
        p = min(lower_set)
        cls = [x for x in g.orbit(p, range(i - 1)) if x in lower_set]
        classes.append(tuple(sorted(cls)))
        lower_set.difference_update(cls)
    classes.sort()
    return classes


def signed_incidence(s: SignedGMap, c_hi: Cell, c_lo: Cell) -> int:
    """Incidence number (c_hi : c_lo) for dim(c_hi) = dim(c_lo) + 1.

    Partition the lower orbit of a dart of c_hi into classes; each class
    whose representative lies in c_lo contributes sg_i(rep) * sg_{i-1}(rep).
    The value does not depend on the anchor dart or on the representative
    choices (covered by tests).
    """
    i = c_hi.dim
    if c_lo.dim != i - 1:
        raise ValueError(
            f"signed incidence needs dimensions (i, i-1); got ({c_hi.dim}, {c_lo.dim})"
        )
    total = 0
    for cls in boundary_partition(s.base, c_hi.canonical_dart, i):
        p = cls[0]
        if p in c_lo.dart_set:
            total += s.sg[i][p] * s.sg[i - 1][p]
    return total


@dataclass
class SubclassReport:
    """Outcome of the structural conditions required by the homology pipeline.

    free_dart_violations: (d, i) pairs with i < n and alpha_i(d) = d.
    multi_link_violations: (d, i) pairs where alpha_i(d) lies in the orbit of
    d under alpha_0..alpha_{i-2}, alpha_{i+2}..alpha_n although d is not
    i-free.
    sphere_failures: (dim, canonical_dart) of cells whose boundary-of-closure
    homology is not that of a sphere of one dimension less (only populated
    when the optional check runs).
    """

    free_dart_violations: list = field(default_factory=list)
    multi_link_violations: list = field(default_factory=list)
    sphere_condition_checked: bool = False
    sphere_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (
            self.free_dart_violations
            or self.multi_link_violations
            or self.sphere_failures
        )


def check_subclass(g: GMap, sphere: bool = False) -> SubclassReport:
    report = SubclassReport()
    n = g.dimension
    for i in range(n):
        row = g.alpha[i]
        for d in range(g.num_darts):
            if row[d] == d:
                report.free_dart_violations.append((d, i))
    for i in range(n + 1):
        gens = [j for j in range(n + 1) if j <= i - 2 or j >= i + 2]
        row = g.alpha[i]
        for d in range(g.num_darts):
            if row[d] == d:
                continue
            if row[d] in g.orbit(d, gens):
                report.multi_link_violations.append((d, i))
    if sphere:
        report.sphere_condition_checked = True
        report.sphere_failures = _sphere_failures(g)
    return report


def _sphere_failures(g: GMap):
    """Cells (dim >= 1) whose boundary closure is not a sphere, homologically.

    Builds the full chain complex once and checks the subcomplex of cells
    strictly below each cell.  Needs every cell orientable.
    """
    from .homology import build_chain_complex, homology  # local: avoid cycle

    failures = []
    catalog = g.all_cells()
    signed = assign_signs(g, catalog)
    cc = build_chain_complex(signed, catalog=catalog)
    for i in range(1, g.dimension + 1):
        expect = [2] if i == 1 else [1] + [0] * (i - 2) + [1]
        for cell in catalog.cells(i):
            sub = _closure_subcomplex(cc, catalog, cell)
            if sub is None:  # closure is not a closed subcomplex
                failures.append((i, cell.canonical_dart))
                continue
            got = homology(sub, generators=False)
            if list(got.betti) != expect or any(got.torsion):
                failures.append((i, cell.canonical_dart))
    return failures


def _closure_subcomplex(cc, catalog: CellCatalog, cell: Cell):
    """Chain complex of the cells strictly below `cell` that touch it."""
    from .homology import ChainComplex  # local: avoid cycle

    keep = []
    for j in range(cell.dim):
        rows = sorted(
            {catalog.index_of(j, d) for d in cell.darts}
        )
        keep.append(rows)
    basis = [
        [cc.basis[j][k] for k in keep[j]]
        for j in range(cell.dim)
    ]
    columns: list[list[dict]] = [[{} for _ in basis[0]]] if basis else []
    for j in range(1, cell.dim):
        remap = {old: new for new, old in enumerate(keep[j - 1])}
        cols = []
        for k in keep[j]:
            col = cc.columns[j][k]
            if any(r not in remap for r in col):
                return None  # boundary leaves the closure: not a subcomplex
            cols.append({remap[r]: v for r, v in col.items()})
        columns.append(cols)
    return ChainComplex(
        dimension=cell.dim - 1,
        basis=basis,
        columns=columns,
        fingerprint=f"{cc.fingerprint}/closure-{cell.dim}-{cell.canonical_dart}",
    )
