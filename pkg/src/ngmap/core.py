"""Combinatorial core: darts, involutions, cells and validity.

An n-dimensional generalized map is a finite set of darts 0..D-1 together
with n+1 involutions alpha_0..alpha_n subject to the crossing axiom: for all
i and j with j >= i+2, alpha_i composed with alpha_j is an involution (which
makes the two involutions commute).  Cells are dart orbits: the i-cell
through a dart is its orbit under every involution except alpha_i.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

DartId = int


class DomainError(Exception):
    """A request that is mathematically impossible on the given object."""


class InputError(Exception):
    """Malformed external input (files, tables, command lines)."""


class InvalidGMap(DomainError):
    """Raised by ValidationReport.raise_if_invalid on a broken involution table."""


@dataclass(frozen=True)
class Cell:
    """An i-cell, stored as its sorted dart tuple.

    The canonical dart is the minimal dart of the orbit; catalogs and all
    deterministic iteration orders are based on it.
    """

    dim: int
    darts: tuple[DartId, ...]

    @property
    def canonical_dart(self) -> DartId:
        return self.darts[0]

    def __contains__(self, dart: DartId) -> bool:
        return dart in self.dart_set

    @property
    def dart_set(self) -> frozenset:
        # cached lazily; object.__setattr__ because the dataclass is frozen
        cached = self.__dict__.get("_dart_set")
        if cached is None:
            cached = frozenset(self.darts)
            object.__setattr__(self, "_dart_set", cached)
        return cached

    def __len__(self) -> int:
        return len(self.darts)

    def __repr__(self) -> str:
        inner = ",".join(map(str, self.darts[:8]))
        if len(self.darts) > 8:
            inner += ",..."
        return f"Cell(dim={self.dim}, darts=[{inner}] n={len(self.darts)})"


def incident(c1: Cell, c2: Cell) -> bool:
    """True when the two cells are distinct and share at least one dart.

    Two distinct cells of the same dimension never share darts, so cells of
    equal dimension are never incident (including a cell with itself).
    """
    if c1 == c2:
        return False
    small, big = (c1, c2) if len(c1) <= len(c2) else (c2, c1)
    return any(d in big.dart_set for d in small.darts)


@dataclass
class ValidationReport:
    """Axiom check outcome with explicit witnesses instead of exceptions.

    involution_failures lists (i, d) where alpha_i(alpha_i(d)) != d.
    commutation_failures lists (i, j, d) with j >= i+2 where
    alpha_i . alpha_j fails to be an involution at dart d.
    """

    dimension: int
    num_darts: int
    involution_failures: list = field(default_factory=list)
    commutation_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.involution_failures and not self.commutation_failures

    def raise_if_invalid(self) -> None:
        if not self.ok:
            raise InvalidGMap(
                f"invalid {self.dimension}-gmap: "
                f"{len(self.involution_failures)} involution failures "
                f"(first: {self.involution_failures[:1]}), "
                f"{len(self.commutation_failures)} commutation failures "
                f"(first: {self.commutation_failures[:1]})"
            )


class GMap:
    """Immutable n-gmap over dense darts 0..num_darts-1.

    alpha is stored as n+1 flat tuples.  The constructor checks shape and
    range only; the axioms of the definition are checked by validate(),
    which reports witnesses rather than raising.
    """

    __slots__ = ("dimension", "num_darts", "alpha")

    def __init__(self, dimension: int, alpha):
        if dimension < 0:
            raise ValueError("dimension must be >= 0")
        rows = tuple(tuple(row) for row in alpha)
        if len(rows) != dimension + 1:
            raise ValueError(
                f"expected {dimension + 1} involution rows, got {len(rows)}"
            )
        num = len(rows[0]) if rows else 0
        for i, row in enumerate(rows):
            if len(row) != num:
                raise ValueError(f"row {i} has {len(row)} entries, expected {num}")
            for d, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < num:
                    raise ValueError(f"alpha_{i}[{d}] = {v!r} out of range 0..{num - 1}")
        self.dimension = dimension
        self.num_darts = num
        self.alpha = rows

    # -- basic queries ---------------------------------------------------

    def a(self, i: int, d: DartId) -> DartId:
        return self.alpha[i][d]

    def is_free(self, d: DartId, i: int) -> bool:
        return self.alpha[i][d] == d

    def darts(self):
        return range(self.num_darts)

    def __eq__(self, other):
        return (
            isinstance(other, GMap)
            and self.dimension == other.dimension
            and self.alpha == other.alpha
        )

    def __hash__(self):
        return hash((self.dimension, self.alpha))

    def __repr__(self):
        return f"GMap(dimension={self.dimension}, num_darts={self.num_darts})"

    # -- orbits and cells ------------------------------------------------

    def orbit(self, d: DartId, indices) -> tuple[DartId, ...]:
        """Sorted orbit of dart d under the involutions named in indices."""
        gens = sorted(set(indices))
        for i in gens:
            if not 0 <= i <= self.dimension:
                raise ValueError(f"involution index {i} out of range")
        alpha = self.alpha
        seen = {d}
        queue = deque((d,))
        while queue:
            x = queue.popleft()
            for i in gens:
                y = alpha[i][x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))

    def cell_indices(self, i: int):
        """The involution indices whose orbit yields i-cells."""
        if not 0 <= i <= self.dimension:
            raise ValueError(f"cell dimension {i} out of range")
        return [j for j in range(self.dimension + 1) if j != i]

    def cell(self, d: DartId, i: int) -> Cell:
        return Cell(i, self.orbit(d, self.cell_indices(i)))

    def all_cells(self, i: int | None = None):
        """CellCatalog of every dimension, or the cell list of one dimension."""
        catalog = CellCatalog(self)
        return catalog if i is None else catalog.cells(i)

    # -- incidence-flavoured queries -------------------------------------

    def degree(self, c: Cell) -> int:
        """Number of distinct (i+1)-cells incident to the i-cell c."""
        if c.dim >= self.dimension:
            raise ValueError("degree is defined for cells below the top dimension")
        return self._count_touching(c, c.dim + 1)

    def codegree(self, c: Cell) -> int:
        """Number of distinct (i-1)-cells incident to the i-cell c."""
        if c.dim <= 0:
            raise ValueError("codegree is defined for cells above dimension 0")
        return self._count_touching(c, c.dim - 1)

    def _count_touching(self, c: Cell, j: int) -> int:
        seen: set[DartId] = set()
        count = 0
        gens = self.cell_indices(j)
        for d in c.darts:
            if d not in seen:
                seen.update(self.orbit(d, gens))
                count += 1
        return count

    def adjacent(self, c1: Cell, c2: Cell) -> bool:
        """True when some alpha_i links a dart of one i-cell to the other."""
        if c1.dim != c2.dim:
            raise ValueError("adjacency is defined between cells of equal dimension")
        row = self.alpha[c1.dim]
        return any(row[d] in c2.dart_set for d in c1.darts)

    # -- validation ------------------------------------------------------

    def validate(self) -> ValidationReport:
        report = ValidationReport(self.dimension, self.num_darts)
        alpha = self.alpha
        for i in range(self.dimension + 1):
            row = alpha[i]
            for d in range(self.num_darts):
                if row[row[d]] != d:
                    report.involution_failures.append((i, d))
        for i in range(self.dimension + 1):
            for j in range(i + 2, self.dimension + 1):
                ri, rj = alpha[i], alpha[j]
                for d in range(self.num_darts):
                    if ri[rj[ri[rj[d]]]] != d:
                        report.commutation_failures.append((i, j, d))
        return report

    # -- conversion helpers ----------------------------------------------

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.alpha]


class CellCatalog:
    """All cells of a gmap, per dimension, sorted by canonical dart.

    Also answers dart -> cell lookups in O(1).
    """

    def __init__(self, gmap: GMap):
        self.gmap = gmap
        n, num = gmap.dimension, gmap.num_darts
        self._cells: list[list[Cell]] = []
        self._index: list[list[int]] = []
        for i in range(n + 1):
            gens = gmap.cell_indices(i)
            index = [-1] * num
            cells = []
            for d in range(num):
                if index[d] < 0:
                    orb = gmap.orbit(d, gens)
                    pos = len(cells)
                    cells.append(Cell(i, orb))
                    for x in orb:
                        index[x] = pos
            self._cells.append(cells)
            self._index.append(index)

    def cells(self, i: int) -> list[Cell]:
        return self._cells[i]

    def cell_of(self, i: int, d: DartId) -> Cell:
        return self._cells[i][self._index[i][d]]

    def index_of(self, i: int, d: DartId) -> int:
        return self._index[i][d]

    def counts(self) -> tuple[int, ...]:
        return tuple(len(cells) for cells in self._cells)

    def __iter__(self):
        for cells in self._cells:
            yield from cells


def gmap_from_pairs(dimension: int, num_darts: int, pairs_by_dim, one_based: bool = True) -> GMap:
    """Build a gmap from involution transposition lists; unnamed darts are fixed.

    pairs_by_dim maps (or lists, per dimension) iterables of (x, y) swaps.
    Convenient for hand-written fixtures, which are usually published 1-based.
    """
    off = 1 if one_based else 0
    rows = []
    for i in range(dimension + 1):
        row = list(range(num_darts))
        pairs = pairs_by_dim[i] if i < len(pairs_by_dim) else ()
        for x, y in pairs:
            row[x - off] = y - off
            row[y - off] = x - off
        rows.append(row)
    return GMap(dimension, rows)
