"""Homology-preserving simplification of generalized maps.

The two surgeries — removing an i-cell (re-linking its outside neighbours
through the cell along alternating alpha_i / alpha_{i+1} walks) and the dual
contraction (walks via alpha_{i-1}) — are exposed both as one-shot
operations and as a pipeline that sweeps every dimension, performing only
operations that provably keep the homology of the map:

* a removable cell with exactly two distinct higher cells around it is
  merged away when every other incident cell survives the surgery intact;
* a removable cell hanging off the rest of the complex (degree one, with a
  collapsible shadow of lower cells) is collapsed away in elementary pairs;
* contractions mirror both cases downward.

The pipeline keeps running dart signs so incidence numbers stay consistent
across operations, and records every operation in a replayable log.  The
log carries exactly the data needed to transport homology generators of the
simplified map back onto the original one (see the homology module).

Checks are exact, not heuristic: an operation is applied only after the
affected region has been verified dart by dart, and several internal
cross-checks raise PipelineError rather than let a silently wrong complex
through.
"""
from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field

from .core import Cell, CellCatalog, DartId, DomainError, GMap
from .orientation import SignedGMap, assign_signs


class NotRemovable(DomainError):
    pass


class NotContractible(DomainError):
    pass


class NonTerminatingWalk(DomainError):
    """A re-linking walk never left the operated cell; preconditions broken."""


class PipelineError(DomainError):
    """An internal consistency check failed during simplification."""


class LogMismatch(DomainError):
    """An operation log does not fit the map it is being applied to."""


def fingerprint(g: GMap) -> str:
    """Stable content hash of a gmap (dimension, dart count, involutions)."""
    h = hashlib.sha256()
    h.update(f"{g.dimension}:{g.num_darts}".encode())
    for row in g.alpha:
        h.update(b"|")
        h.update(",".join(map(str, row)).encode())
    return h.hexdigest()


# -- operation predicates ----------------------------------------------------


def is_removable(g: GMap, dart: DartId, i: int) -> bool:
    """True when the i-cell through dart may be removed.

    Cells one below the top dimension always qualify; lower cells need
    alpha_{i+1} and alpha_{i+2} to commute on every dart of the cell.
    Top-dimension cells are never removable.
    """
    n = g.dimension
    if not 0 <= i <= n:
        raise ValueError(f"cell dimension {i} out of range")
    if i == n:
        return False
    if i == n - 1:
        return True
    r1, r2 = g.alpha[i + 1], g.alpha[i + 2]
    return all(r1[r2[d]] == r2[r1[d]] for d in g.orbit(dart, g.cell_indices(i)))


def is_contractible(g: GMap, dart: DartId, i: int) -> bool:
    """Dual of is_removable: edges always qualify, 0-cells never do."""
    n = g.dimension
    if not 0 <= i <= n:
        raise ValueError(f"cell dimension {i} out of range")
    if i == 0:
        return False
    if i == 1:
        return True
    r1, r2 = g.alpha[i - 1], g.alpha[i - 2]
    return all(r1[r2[d]] == r2[r1[d]] for d in g.orbit(dart, g.cell_indices(i)))


# -- surgery core ------------------------------------------------------------


def _rewire(alpha, i: int, via: int, cell: set) -> dict:
    """New alpha_i links for the darts currently linked into `cell`.

    Walks alpha_i, then alternates alpha_via / alpha_i until leaving the
    cell.  Returns {dart: new partner}; raises when a walk cannot leave the
    cell or the collected links are not an involution.
    """
    row_i, row_v = alpha[i], alpha[via]
    relink = sorted({row_i[d] for d in cell} - cell)
    cap = 2 * len(cell) + 2
    links = {}
    for d in relink:
        w = row_i[d]
        steps = 0
        while w in cell:
            w = row_i[row_v[w]]
            steps += 1
            if steps > cap:
                raise NonTerminatingWalk(
                    f"re-linking walk from dart {d} stayed inside the removed "
                    f"{len(cell)}-dart cell"
                )
        links[d] = w
    for d, w in links.items():
        if links.get(w) != d:
            raise PipelineError("rewired links do not form an involution")
    return links


# -- operation records -------------------------------------------------------


@dataclass(frozen=True)
class OperationRecord:
    """One applied operation, in terms of stable (pre-pipeline) dart ids.

    cell_key identifies a cell by the canonical dart it had when it was
    formed; merged cells keep the smaller of the two keys.  For a merge the
    record stores the signed incidences of the kept and dropped cells with
    the operated cell; contraction records additionally store the nonzero
    incidences of the dropped boundary cell with the surrounding cells of
    the operated dimension, which the generator projection needs.  Collapse
    records list the elementary pairs in the order they were collapsed.
    """

    kind: str  # "removal" | "contraction" | "collapse"
    dim: int
    cell_key: int
    removed_cell_darts: tuple
    merged_dim: int | None = None
    merged_kept_key: int | None = None
    merged_dropped_key: int | None = None
    inc_kept: int | None = None
    inc_dropped: int | None = None
    dropped_coboundary: tuple | None = None  # ((cell key, incidence), ...)
    collapsed_cells: tuple | None = None  # ((dim, lower key, upper key, inc), ...)
    closure_overlap: bool = False
    via: str | None = None  # collapse records: which surgery re-linked darts
    survivor_darts: tuple | None = None  # one-shot operations only

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "cell_key": self.cell_key,
            "removed_cell_darts": list(self.removed_cell_darts),
            "merged_dim": self.merged_dim,
            "merged_kept_key": self.merged_kept_key,
            "merged_dropped_key": self.merged_dropped_key,
            "inc_kept": self.inc_kept,
            "inc_dropped": self.inc_dropped,
            "dropped_coboundary": None
            if self.dropped_coboundary is None
            else [list(p) for p in self.dropped_coboundary],
            "collapsed_cells": None
            if self.collapsed_cells is None
            else [list(p) for p in self.collapsed_cells],
            "closure_overlap": self.closure_overlap,
            "via": self.via,
            "survivor_darts": None
            if self.survivor_darts is None
            else list(self.survivor_darts),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperationRecord":
        def tup(v):
            return None if v is None else tuple(tuple(p) if isinstance(p, list) else p for p in v)

        return cls(
            kind=data["kind"],
            dim=data["dim"],
            cell_key=data["cell_key"],
            removed_cell_darts=tuple(data["removed_cell_darts"]),
            merged_dim=data.get("merged_dim"),
            merged_kept_key=data.get("merged_kept_key"),
            merged_dropped_key=data.get("merged_dropped_key"),
            inc_kept=data.get("inc_kept"),
            inc_dropped=data.get("inc_dropped"),
            dropped_coboundary=tup(data.get("dropped_coboundary")),
            collapsed_cells=tup(data.get("collapsed_cells")),
            closure_overlap=data.get("closure_overlap", False),
            via=data.get("via"),
            survivor_darts=None
            if data.get("survivor_darts") is None
            else tuple(data["survivor_darts"]),
        )


@dataclass
class OperationLog:
    """Replayable trace of a simplification run.

    Stable dart ids are the dart numbers of the initial map; the single
    final compaction is described by final_survivors (new id = position).
    final_cell_keys maps, per dimension, the canonical dart of each final
    cell (in compacted ids) to the key of the pipeline cell it came from.
    """

    dimension: int
    initial_darts: int
    initial_fingerprint: str
    records: list = field(default_factory=list)
    final_survivors: tuple = ()
    final_cell_keys: list = field(default_factory=list)
    final_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "initial_darts": self.initial_darts,
            "initial_fingerprint": self.initial_fingerprint,
            "records": [r.to_dict() for r in self.records],
            "final_survivors": list(self.final_survivors),
            "final_cell_keys": [
                {str(k): v for k, v in sorted(d.items())} for d in self.final_cell_keys
            ],
            "final_fingerprint": self.final_fingerprint,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OperationLog":
        return cls(
            dimension=data["dimension"],
            initial_darts=data["initial_darts"],
            initial_fingerprint=data["initial_fingerprint"],
            records=[OperationRecord.from_dict(r) for r in data["records"]],
            final_survivors=tuple(data["final_survivors"]),
            final_cell_keys=[
                {int(k): v for k, v in d.items()} for d in data["final_cell_keys"]
            ],
            final_fingerprint=data["final_fingerprint"],
        )

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "OperationLog":
        return cls.from_dict(json.loads(text))


# -- one-shot operations -----------------------------------------------------


def _one_shot(g: GMap, dart: DartId, i: int, kind: str):
    n = g.dimension
    via = i + 1 if kind == "removal" else i - 1
    cell = set(g.orbit(dart, g.cell_indices(i)))
    alpha = g.to_lists()
    links = _rewire(alpha, i, via, cell)
    for d, w in links.items():
        alpha[i][d] = w
    survivors = [d for d in range(g.num_darts) if d not in cell]
    old2new = {d: k for k, d in enumerate(survivors)}
    rows = [[old2new[alpha[k][d]] for d in survivors] for k in range(n + 1)]
    result = GMap(n, rows)
    result.validate().raise_if_invalid()
    record = OperationRecord(
        kind=kind,
        dim=i,
        cell_key=min(cell),
        removed_cell_darts=tuple(sorted(cell)),
        survivor_darts=tuple(survivors),
    )
    return result, record


def remove_cell(g: GMap, dart: DartId, i: int):
    """Remove the i-cell through dart; returns (new map, record).

    Only the structural precondition is checked here; whether the removal
    keeps the homology is the pipeline's business.
    """
    if not is_removable(g, dart, i):
        raise NotRemovable(f"{i}-cell through dart {dart} is not removable")
    return _one_shot(g, dart, i, "removal")


def contract_cell(g: GMap, dart: DartId, i: int):
    """Contract the i-cell through dart; returns (new map, record)."""
    if not is_contractible(g, dart, i):
        raise NotContractible(f"{i}-cell through dart {dart} is not contractible")
    return _one_shot(g, dart, i, "contraction")


# -- closures, collapsibility, dangling --------------------------------------


def closure(g: GMap, cells, catalog: CellCatalog | None = None) -> list:
    """The given cells plus every lower-dimensional cell incident to them."""
    catalog = catalog or g.all_cells()
    out = {}
    for c in cells:
        out[(c.dim, c.canonical_dart)] = c
        for j in range(c.dim):
            for d in c.darts:
                low = catalog.cell_of(j, d)
                out[(j, low.canonical_dart)] = low
    return [out[k] for k in sorted(out)]


def coclosure(g: GMap, cells, catalog: CellCatalog | None = None) -> list:
    """The given cells plus every higher-dimensional cell incident to them."""
    catalog = catalog or g.all_cells()
    out = {}
    for c in cells:
        out[(c.dim, c.canonical_dart)] = c
        for j in range(c.dim + 1, g.dimension + 1):
            for d in c.darts:
                high = catalog.cell_of(j, d)
                out[(j, high.canonical_dart)] = high
    return [out[k] for k in sorted(out)]


def _orbit_by(neigh, d: DartId, gens) -> list:
    seen = {d}
    queue = deque((d,))
    while queue:
        x = queue.popleft()
        for k in gens:
            y = neigh(k, x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


def _def9_incidence(neigh, sign_of, cell_of, d_hi: DartId, hi_dim: int, lo_id) -> int:
    """Incidence number between the hi_dim-cell through d_hi and a lower cell.

    Partitions one lower orbit of d_hi into representative classes and sums
    the sign products of the representatives lying in the cell lo_id.
    """
    seen = set()
    total = 0
    for d in _orbit_by(neigh, d_hi, range(hi_dim)):
        if d in seen:
            continue
        seen.update(_orbit_by(neigh, d, range(hi_dim - 1)))
        if cell_of(hi_dim - 1, d) == lo_id:
            total += sign_of(hi_dim, d) * sign_of(hi_dim - 1, d)
    return total


def _collapse_pairing(order_key: dict, cofaces: dict):
    """Pair the cells of a set into elementary collapses, or give up.

    order_key maps member id -> (dim, key) used for deterministic choices;
    cofaces maps member id -> list of (coface id, incidence, in set) over
    every nonzero coface in the ambient complex.  A pair (a, b) is a valid
    next collapse when (b : a) is a unit and every other nonzero coface of
    a has already been collapsed.  Strategy: greedy smallest-first, retried
    once over each possible opening pair.
    """
    members = set(order_key)
    if not members:
        return []
    if len(members) % 2:
        return None

    def candidates(remaining):
        found = []
        for aid in remaining:
            for bid, val, inside in cofaces[aid]:
                if not inside or bid not in remaining or abs(val) != 1:
                    continue
                if any(
                    xid != bid and (not xin or xid in remaining)
                    for xid, _, xin in cofaces[aid]
                ):
                    continue
                found.append((order_key[aid], order_key[bid], aid, bid, val))
        found.sort()
        return found

    def run(first):
        remaining = set(members)
        seq = []
        if first is not None:
            _, _, aid, bid, val = first
            remaining.discard(aid)
            remaining.discard(bid)
            seq.append((order_key[aid][0], aid, bid, val))
        while remaining:
            cands = candidates(remaining)
            if not cands:
                return None
            _, _, aid, bid, val = cands[0]
            remaining.discard(aid)
            remaining.discard(bid)
            seq.append((order_key[aid][0], aid, bid, val))
        return seq

    seq = run(None)
    if seq is not None:
        return seq
    for first in candidates(members):
        seq = run(first)
        if seq is not None:
            return seq
    return None


def _catalog_pairing(g: GMap, cells, signed: SignedGMap, catalog: CellCatalog):
    """Collapse pairing of explicit cells against the whole-map complex."""
    ids = {}
    for c in cells:
        ids[(c.dim, catalog.index_of(c.dim, c.canonical_dart))] = c
    order_key = {cid: (cid[0], cell.canonical_dart) for cid, cell in ids.items()}

    def neigh(k, d):
        return g.alpha[k][d]

    def cell_of(dim, d):
        return catalog.index_of(dim, d)

    cofaces = {}
    for cid, cell in ids.items():
        j = cell.dim
        entries = []
        if j < g.dimension:
            seen = set()
            for d in cell.darts:
                x = catalog.index_of(j + 1, d)
                if x in seen:
                    continue
                seen.add(x)
                val = _def9_incidence(neigh, signed.sign, cell_of, d, j + 1, cid[1])
                if val:
                    entries.append(((j + 1, x), val, (j + 1, x) in ids))
        cofaces[cid] = entries
    return _collapse_pairing(order_key, cofaces)


def is_collapsible(
    g: GMap,
    cells,
    signed: SignedGMap | None = None,
    catalog: CellCatalog | None = None,
) -> bool:
    """Whether the given cells can all be removed in elementary pairs.

    Each pair must be a lower cell and one of its cofaces with unit
    incidence, with every other nonzero coface of the lower cell already
    collapsed; cofaces outside the given set always block.  The search is
    greedy with retried opening pairs, so a False is conservative on
    adversarial inputs; the configurations produced by the simplification
    pipeline are well within its reach.
    """
    catalog = catalog or g.all_cells()
    signed = signed or assign_signs(g, catalog)
    return _catalog_pairing(g, list(cells), signed, catalog) is not None


def _hanging_set(g: GMap, c: Cell, catalog: CellCatalog, down: bool):
    """Candidate collapse set of a degree-one cell, plus an overlap flag.

    down=True: the cell plus the closure of its loosely attached boundary
    cells (degree one), minus the closure of the boundary cells still
    attached elsewhere.  down=False is the mirrored, coclosure version.
    The flag reports whether the two closures overlapped.
    """
    i = c.dim
    bdim = i - 1 if down else i + 1
    boundary = []
    if 0 <= bdim <= g.dimension:
        seen = set()
        for d in c.darts:
            idx = catalog.index_of(bdim, d)
            if idx not in seen:
                seen.add(idx)
                boundary.append(catalog.cell_of(bdim, d))
    if down:
        anchored = [x for x in boundary if g.degree(x) > 1]
        loose = [x for x in boundary if g.degree(x) == 1]
        cl_loose = closure(g, loose, catalog)
        cl_anchored = closure(g, anchored, catalog)
    else:
        anchored = [x for x in boundary if g.codegree(x) > 1]
        loose = [x for x in boundary if g.codegree(x) == 1]
        cl_loose = coclosure(g, loose, catalog)
        cl_anchored = coclosure(g, anchored, catalog)
    drop = {(x.dim, x.canonical_dart) for x in cl_anchored}
    hanging = [c] + [x for x in cl_loose if (x.dim, x.canonical_dart) not in drop]
    overlap = bool(drop & {(x.dim, x.canonical_dart) for x in cl_loose})
    return hanging, overlap


def is_dangling(
    g: GMap,
    dart: DartId,
    i: int,
    signed: SignedGMap | None = None,
    catalog: CellCatalog | None = None,
) -> bool:
    """Degree-one cell whose unattached boundary shadow is collapsible."""
    if i >= g.dimension:
        return False
    catalog = catalog or g.all_cells()
    c = catalog.cell_of(i, dart)
    if g.degree(c) != 1:
        return False
    hanging, _ = _hanging_set(g, c, catalog, down=True)
    signed = signed or assign_signs(g, catalog)
    return _catalog_pairing(g, hanging, signed, catalog) is not None


def is_codangling(
    g: GMap,
    dart: DartId,
    i: int,
    signed: SignedGMap | None = None,
    catalog: CellCatalog | None = None,
) -> bool:
    """Codegree-one cell whose unattached star shadow is collapsible."""
    if i <= 0:
        return False
    catalog = catalog or g.all_cells()
    c = catalog.cell_of(i, dart)
    if g.codegree(c) != 1:
        return False
    hanging, _ = _hanging_set(g, c, catalog, down=False)
    signed = signed or assign_signs(g, catalog)
    return _catalog_pairing(g, hanging, signed, catalog) is not None


def cells_preserved(g: GMap, dart: DartId, i: int, kind: str = "removal") -> bool:
    """Reference check that an operation only merges its two side cells.

    Performs the operation on a copy and compares the full cell structure:
    the operated cell must vanish, its two side cells must merge into one,
    and every other cell must survive with exactly its darts outside the
    operated cell.  Exists as the slow, independent counterpart of the
    pipeline's local checks.
    """
    if kind not in ("removal", "contraction"):
        raise ValueError(f"unknown operation kind {kind!r}")
    catalog = g.all_cells()
    c = catalog.cell_of(i, dart)
    side_dim = i + 1 if kind == "removal" else i - 1
    if not 0 <= side_dim <= g.dimension:
        return False
    sides = {catalog.index_of(side_dim, d) for d in c.darts}
    if len(sides) != 2:
        return False
    op = remove_cell if kind == "removal" else contract_cell
    new_g, record = op(g, dart, i)
    old2new = {d: k for k, d in enumerate(record.survivor_darts)}
    cset = c.dart_set
    expected = [set() for _ in range(g.dimension + 1)]
    merged = set()
    for cell in catalog:
        if cell.dim == i and cell.canonical_dart == c.canonical_dart:
            continue
        rest = frozenset(old2new[d] for d in cell.darts if d not in cset)
        if cell.dim == side_dim and catalog.index_of(side_dim, cell.canonical_dart) in sides:
            merged.update(rest)
            continue
        if not rest:
            return False
        expected[cell.dim].add(rest)
    if not merged:
        return False
    expected[side_dim].add(frozenset(merged))
    actual = [set() for _ in range(g.dimension + 1)]
    for cell in new_g.all_cells():
        actual[cell.dim].add(cell.dart_set)
    return expected == actual


# -- weighted union-find for cells and running signs -------------------------


class _ParityUF:
    """Union-find over darts with +-1 path weights and a per-root sign.

    sign(d) is the path product times the root sign, so merging two cells
    while flipping one side's signs is a single link plus one root update.
    """

    __slots__ = ("parent", "weight", "base", "size")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.weight = [1] * n
        self.base = [1] * n
        self.size = [1] * n

    def find(self, d: int):
        parent, weight = self.parent, self.weight
        root, s = d, 1
        while parent[root] != root:
            s *= weight[root]
            root = parent[root]
        node, acc = d, s
        while node != root:
            nxt, w = parent[node], weight[node]
            parent[node] = root
            weight[node] = acc
            acc *= w
            node = nxt
        return root, s

    def root(self, d: int) -> int:
        return self.find(d)[0]

    def sign(self, d: int) -> int:
        root, s = self.find(d)
        return s * self.base[root]

    def attach(self, d: int, root: int, rel: int) -> None:
        """Link a singleton dart under a root with a given relative sign."""
        self.parent[d] = root
        self.weight[d] = rel
        self.size[root] += 1

    def merge(self, dropped: int, kept: int, flip: int) -> int:
        """Union two roots, multiplying the dropped side's signs by flip."""
        omega = flip * self.base[dropped] * self.base[kept]
        if self.size[dropped] >= self.size[kept]:
            winner, loser = dropped, kept
            self.base[dropped] *= flip
        else:
            winner, loser = kept, dropped
        self.parent[loser] = winner
        self.weight[loser] = omega
        self.size[winner] += self.size[loser]
        return winner


# -- the simplification pipeline ---------------------------------------------


class _Reducer:
    """Mutable working state of a simplification run.

    Darts keep their initial ids throughout ("stable ids"); dead darts are
    only dropped in the single compaction at the end.  One weighted
    union-find per dimension tracks both cell membership and the running
    sign of every dart, so merges and sign flips are constant-time.
    """

    def __init__(self, signed: SignedGMap):
        g = signed.base
        self.n = g.dimension
        self.n0 = g.num_darts
        self.alpha = g.to_lists()
        self.alive = bytearray(b"\x01" * self.n0)
        self.alive_count = self.n0
        self.initial_fingerprint = fingerprint(g)
        self.records: list[OperationRecord] = []
        self.uf = [_ParityUF(self.n0) for _ in range(self.n + 1)]
        self.keys: list[dict] = [{} for _ in range(self.n + 1)]
        self.counts = [0] * (self.n + 1)
        catalog = g.all_cells()
        for dim in range(self.n + 1):
            uf = self.uf[dim]
            for cell in catalog.cells(dim):
                can = cell.canonical_dart
                uf.base[can] = signed.sign(dim, can)
                for d in cell.darts:
                    if d != can:
                        uf.attach(d, can, signed.sign(dim, d) * signed.sign(dim, can))
                self.keys[dim][can] = can
                self.counts[dim] += 1

    # -- current-state queries --------------------------------------------

    def neigh(self, k: int, d: int) -> int:
        return self.alpha[k][d]

    def sign_of(self, dim: int, d: int) -> int:
        return self.uf[dim].sign(d)

    def cell_of(self, dim: int, d: int) -> int:
        return self.uf[dim].root(d)

    def cell_darts(self, d: int, dim: int) -> list:
        gens = [k for k in range(self.n + 1) if k != dim]
        return _orbit_by(self.neigh, d, gens)

    def _touched(self, darts, dim: int) -> dict:
        """Distinct dim-cells among the given darts: root -> first dart."""
        out = {}
        uf = self.uf[dim]
        for d in darts:
            r = uf.root(d)
            if r not in out:
                out[r] = d
        return out

    def _orbit_within(self, d0: int, dim: int, allowed: set):
        """Orbit of the dim-cell through d0 if contained in `allowed`, else None."""
        gens = [k for k in range(self.n + 1) if k != dim]
        seen = {d0}
        queue = deque((d0,))
        while queue:
            x = queue.popleft()
            for k in gens:
                y = self.alpha[k][x]
                if y not in seen:
                    if y not in allowed:
                        return None
                    seen.add(y)
                    queue.append(y)
        return seen

    def _incidence(self, d_hi: int, hi_dim: int, lo_root: int) -> int:
        return _def9_incidence(self.neigh, self.sign_of, self.cell_of, d_hi, hi_dim, lo_root)

    # -- exact survivor checks --------------------------------------------

    def _survives_as_one_cell(self, dim: int, roots, targets, links: dict, i: int) -> bool:
        """After re-linking, do the target darts still sit in one dim-cell?

        targets are the re-linked darts of the cell(s) `roots`; the check
        passes when none of their new partners leaves the cell set and one
        walk with the cell's generators (alpha_i read through the new
        links) reaches every target.  Together with the cut-structure of
        the surgery this pins the surviving dart set as exactly one cell.
        """
        uf = self.uf[dim]
        for u in targets:
            if uf.root(links[u]) not in roots:
                return False
        gens = [k for k in range(self.n + 1) if k != dim]
        remaining = set(targets)
        start = targets[0]
        seen = {start}
        queue = deque((start,))
        remaining.discard(start)
        while queue and remaining:
            x = queue.popleft()
            for k in gens:
                y = links.get(x, self.alpha[k][x]) if k == i else self.alpha[k][x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
                    remaining.discard(y)
        return not remaining

    # -- merge operations --------------------------------------------------

    def _merge_terms(self, cdarts, i: int, merged_dim: int) -> dict:
        """Class sign-terms of the operated cell, grouped by side cell.

        The operated cell's darts split into representative classes; every
        class lies inside one side cell and contributes the sign product of
        its smallest dart.  Returns {side root: set of terms}.
        """
        lo, hi = (i, merged_dim) if merged_dim > i else (merged_dim, i)
        sub = range(lo)
        seen = set()
        out: dict = {}
        side_uf = self.uf[merged_dim]
        for d in cdarts:
            if d in seen:
                continue
            seen.update(_orbit_by(self.neigh, d, sub))
            term = self.sign_of(hi, d) * self.sign_of(lo, d)
            out.setdefault(side_uf.root(d), set()).add(term)
        return out

    def _side_incidence(self, terms: set, member: int, cdarts, i: int, merged_dim: int, side_root: int) -> int:
        """Signed incidence between a side cell and the operated cell.

        When every class term agrees the value is that term (a unit, by the
        structure of degree-two removable cells); otherwise fall back to
        the full incidence-number definition.
        """
        if len(terms) == 1:
            return next(iter(terms))
        if merged_dim > i:
            return self._incidence(member, merged_dim, self.uf[i].root(cdarts[0]))
        return self._incidence(cdarts[0], i, side_root)

    def _try_merge(self, cdarts, i: int, kind: str) -> bool:
        """Degree/codegree-two operation; applied only if provably clean."""
        merged_dim = i + 1 if kind == "removal" else i - 1
        via = merged_dim
        cset = set(cdarts)
        sides = self._touched(cdarts, merged_dim)
        if len(sides) != 2:
            return False
        try:
            links = _rewire(self.alpha, i, via, cset)
        except NonTerminatingWalk:
            return False
        relink = sorted(links)

        # every incident cell must survive intact (or be one of the sides)
        for dim in range(self.n + 1):
            if dim == i:
                continue
            touched = self._touched(cdarts, dim)
            for root, member in touched.items():
                if self._orbit_within(member, dim, cset) is not None:
                    return False  # the cell would vanish outright
            by_root: dict = {}
            for u in relink:
                r = self.uf[dim].root(u)
                if r in touched:
                    by_root.setdefault(r, []).append(u)
            if set(by_root) != set(touched):
                raise PipelineError(
                    "an incident cell has no re-linked dart; the surgery "
                    "cannot reach it"
                )
            if dim == merged_dim:
                all_targets = [u for r in sorted(by_root) for u in by_root[r]]
                if not self._survives_as_one_cell(dim, set(sides), all_targets, links, i):
                    return False
            else:
                for root in by_root:
                    if not self._survives_as_one_cell(dim, {root}, by_root[root], links, i):
                        return False

        # incidences between the two side cells and the operated cell
        term_map = self._merge_terms(cdarts, i, merged_dim)
        if set(term_map) != set(sides):
            raise PipelineError("side cells and class terms disagree")
        inc = {}
        for root, member in sides.items():
            val = self._side_incidence(term_map[root], member, cdarts, i, merged_dim, root)
            if abs(val) != 1:
                raise PipelineError(
                    f"merge expected a unit incidence, found {val}; the map "
                    "violates the pipeline's structural preconditions"
                )
            inc[root] = val

        key_of = self.keys[merged_dim]
        ra, rb = sorted(sides, key=lambda r: key_of[r])
        kept_root, dropped_root = ra, rb  # kept cell carries the smaller key
        flip = -inc[kept_root] * inc[dropped_root]

        # the inherited signs, with the dropped side flipped, must satisfy
        # the sign rule across every new link of the merged cell
        want = -1 if via > i else 1
        uf_m = self.uf[merged_dim]
        for u in relink:
            v = links[u]
            if u > v or u == v:
                continue
            su = self.sign_of(merged_dim, u) * (flip if uf_m.root(u) == dropped_root else 1)
            sv = self.sign_of(merged_dim, v) * (flip if uf_m.root(v) == dropped_root else 1)
            if su * sv != want:
                raise PipelineError(
                    "inherited signs are inconsistent across a re-linked dart"
                )

        row = None
        if kind == "contraction":
            row = self._dropped_coboundary(i, dropped_root, sides[dropped_root])

        record = OperationRecord(
            kind=kind,
            dim=i,
            cell_key=self.keys[i][self.uf[i].root(cdarts[0])],
            removed_cell_darts=tuple(cdarts),
            merged_dim=merged_dim,
            merged_kept_key=key_of[kept_root],
            merged_dropped_key=key_of[dropped_root],
            inc_kept=inc[kept_root],
            inc_dropped=inc[dropped_root],
            dropped_coboundary=row,
        )
        self._commit_surgery(cset, links, i)
        new_root = uf_m.merge(dropped_root, kept_root, flip)
        kept_key = key_of.pop(kept_root)
        key_of.pop(dropped_root, None)
        key_of[new_root] = kept_key
        self.keys[i].pop(self.uf[i].root(cdarts[0]), None)
        self.counts[i] -= 1
        self.counts[merged_dim] -= 1
        self.records.append(record)
        return True

    def _dropped_coboundary(self, i: int, dropped_root: int, member: int):
        """Nonzero incidences of the dropped boundary cell with i-cells."""
        full = self.cell_darts(member, i - 1)
        root_c = self.uf[i].root(member)
        row = []
        for xroot, xdart in sorted(self._touched(full, i).items()):
            if xroot == root_c:
                continue
            val = self._incidence(xdart, i, dropped_root)
            if val:
                row.append((self.keys[i][xroot], val))
        row.sort()
        return tuple(row)

    # -- collapse operations ----------------------------------------------

    def _try_collapse(self, cdarts, i: int, kind: str):
        """Degree/codegree-one operation; returns (applied, adjacent darts)."""
        down = kind == "removal"
        via = i + 1 if down else i - 1
        cset = set(cdarts)
        root_c = self.uf[i].root(cdarts[0])

        # cells that vanish with the operated cell, grouped by dimension
        vanishing: dict = {}
        survivors: dict = {}
        for dim in range(self.n + 1):
            if dim == i:
                continue
            for root, member in self._touched(cdarts, dim).items():
                inside = self._orbit_within(member, dim, cset)
                if inside is None:
                    survivors.setdefault(dim, {})[root] = member
                else:
                    vanishing[(dim, root)] = sorted(inside)

        hanging, overlap = self._hanging_cells(cdarts, i, root_c, down)
        expected = {cid for cid in hanging if cid != (i, root_c)}
        if expected != set(vanishing):
            return False, ()  # the collapse set and the vanish set disagree

        # collapsibility of the operated cell plus its vanishing shadow
        members = {(i, root_c): list(cdarts), **{cid: vanishing[cid] for cid in vanishing}}
        pairing = self._reducer_pairing(members)
        if pairing is None:
            return False, ()

        try:
            links = _rewire(self.alpha, i, via, cset)
        except NonTerminatingWalk:
            return False, ()
        relink = sorted(links)

        for dim, roots in survivors.items():
            by_root: dict = {}
            for u in relink:
                r = self.uf[dim].root(u)
                if r in roots:
                    by_root.setdefault(r, []).append(u)
            if set(by_root) != set(roots):
                raise PipelineError(
                    "a surviving incident cell has no re-linked dart"
                )
            for root in by_root:
                if not self._survives_as_one_cell(dim, {root}, by_root[root], links, i):
                    return False, ()

        # re-linked darts all lie in the single side cell; inherited signs
        # must already satisfy the sign rule across the new links
        want = -1 if via > i else 1
        for u in relink:
            v = links[u]
            if u > v or u == v:
                continue
            if self.sign_of(via, u) * self.sign_of(via, v) != want:
                raise PipelineError(
                    "inherited signs are inconsistent across a re-linked dart"
                )

        adjacent = [
            member
            for root, member in sorted(self._touched(relink, i).items())
            if root != root_c
        ]

        collapsed = tuple(
            (aid[0], self.keys[aid[0]][aid[1]], self.keys[bid[0]][bid[1]], val)
            for _, aid, bid, val in pairing
        )
        record = OperationRecord(
            kind="collapse",
            dim=i,
            cell_key=self.keys[i][root_c],
            removed_cell_darts=tuple(cdarts),
            collapsed_cells=collapsed,
            closure_overlap=overlap,
            via=kind,
        )
        self._commit_surgery(cset, links, i)
        for dim, root in list(vanishing) + [(i, root_c)]:
            self.keys[dim].pop(root, None)
            self.counts[dim] -= 1
        self.records.append(record)
        return True, tuple(adjacent)

    def _hanging_cells(self, cdarts, i: int, root_c: int, down: bool):
        """Reducer-side candidate collapse set, as (dim, root) ids."""
        if down:
            if i == 0:
                boundary = {}
            else:
                boundary = self._touched(cdarts, i - 1)
            bdim = i - 1
        else:
            if i == self.n:
                boundary = {}
            else:
                boundary = self._touched(cdarts, i + 1)
            bdim = i + 1
        loose, anchored = [], []
        for root, member in boundary.items():
            full = self.cell_darts(member, bdim)
            other = self._touched(full, i)
            if len(other) > 1:
                anchored.append((root, member))
            else:
                loose.append((root, member))
        cl_loose = self._cl_ids(loose, bdim, down)
        cl_anchored = self._cl_ids(anchored, bdim, down)
        hanging = {(i, root_c)} | (cl_loose - cl_anchored)
        overlap = bool(cl_loose & cl_anchored)
        return hanging, overlap

    def _cl_ids(self, cells, dim: int, down: bool) -> set:
        """(Co)closure of reducer cells given as (root, member) pairs."""
        out = set()
        for root, member in cells:
            out.add((dim, root))
            full = self.cell_darts(member, dim)
            span = range(dim) if down else range(dim + 1, self.n + 1)
            for j in span:
                for r in self._touched(full, j):
                    out.add((j, r))
        return out

    def _coface_class_sums(self, darts, lo_dim: int) -> dict:
        """Class-term totals of a cell's darts, grouped by coface root.

        Every lower orbit of a coface carries the same class sum onto this
        cell (that is what makes the incidence number well defined), so the
        total over the cell's own classes is zero exactly when the incidence
        number is.  This gives an exact zero test that never has to walk the
        coface, whose orbit may be arbitrarily large mid-pipeline.
        """
        hi_dim = lo_dim + 1
        uf_hi = self.uf[hi_dim]
        seen = set()
        out: dict = {}
        for p in darts:
            if p in seen:
                continue
            seen.update(_orbit_by(self.neigh, p, range(lo_dim)))
            r = uf_hi.root(p)
            term = self.sign_of(hi_dim, p) * self.sign_of(lo_dim, p)
            out[r] = out.get(r, 0) + term
        return out

    def _reducer_pairing(self, members: dict):
        """Collapse pairing over reducer cells: {(dim, root): darts}.

        Exact incidence values are only computed against in-set cofaces
        (which are small); out-of-set cofaces only matter through their
        zero pattern, supplied by the class-sum shortcut above.
        """
        order_key = {cid: (cid[0], self.keys[cid[0]][cid[1]]) for cid in members}
        cofaces = {}
        for (dim, root), darts in members.items():
            entries = []
            if dim < self.n:
                sums = self._coface_class_sums(darts, dim)
                for xroot in sorted(sums):
                    xid = (dim + 1, xroot)
                    inside = xid in members
                    val = (
                        self._incidence(members[xid][0], dim + 1, root)
                        if inside
                        else sums[xroot]
                    )
                    if val:
                        entries.append((xid, val, inside))
            cofaces[(dim, root)] = entries
        return _collapse_pairing(order_key, cofaces)

    # -- surgery + phases ---------------------------------------------------

    def _commit_surgery(self, cset: set, links: dict, i: int) -> None:
        row = self.alpha[i]
        for d, w in links.items():
            row[d] = w
        for d in cset:
            self.alive[d] = 0
        self.alive_count -= len(cset)

    def _snapshot(self, i: int) -> list:
        gens = [k for k in range(self.n + 1) if k != i]
        seen = bytearray(self.n0)
        reps = []
        for d in range(self.n0):
            if self.alive[d] and not seen[d]:
                for x in _orbit_by(self.neigh, d, gens):
                    seen[x] = 1
                reps.append(d)
        return reps

    def _removable(self, cdarts, i: int) -> bool:
        if i >= self.n:
            return False
        if i == self.n - 1:
            return True
        r1, r2 = self.alpha[i + 1], self.alpha[i + 2]
        return all(r1[r2[d]] == r2[r1[d]] for d in cdarts)

    def _contractible(self, cdarts, i: int) -> bool:
        if i <= 0:
            return False
        if i == 1:
            return True
        r1, r2 = self.alpha[i - 1], self.alpha[i - 2]
        return all(r1[r2[d]] == r2[r1[d]] for d in cdarts)

    def run_phase(self, i: int, kind: str) -> int:
        """One sweep over the i-cells, removal or contraction flavoured."""
        ok = self._removable if kind == "removal" else self._contractible
        side_dim = i + 1 if kind == "removal" else i - 1
        applied = 0
        for rep in self._snapshot(i):
            if not self.alive[rep]:
                continue
            cdarts = self.cell_darts(rep, i)
            if not ok(cdarts, i):
                continue
            nsides = len(self._touched(cdarts, side_dim))
            if nsides == 2:
                if self._try_merge(cdarts, i, kind):
                    applied += 1
            elif nsides == 1:
                stack = [rep]
                while stack:
                    d0 = stack.pop()
                    if not self.alive[d0]:
                        continue
                    cd = self.cell_darts(d0, i)
                    if not ok(cd, i):
                        continue
                    if len(self._touched(cd, side_dim)) != 1:
                        continue
                    done, adjacent = self._try_collapse(cd, i, kind)
                    if done:
                        applied += 1
                        stack.extend(adjacent)
        return applied

    def finalize(self):
        survivors = [d for d in range(self.n0) if self.alive[d]]
        old2new = {d: k for k, d in enumerate(survivors)}
        rows = [[old2new[self.alpha[k][d]] for d in survivors] for k in range(self.n + 1)]
        final = GMap(self.n, rows)
        report = final.validate()
        if not report.ok:
            raise PipelineError(f"simplified map failed validation: {report}")
        sg = tuple(
            tuple(self.uf[dim].sign(d) for d in survivors)
            for dim in range(self.n + 1)
        )
        signed = SignedGMap(final, sg)
        _verify_sign_rule(signed)
        catalog = final.all_cells()
        if list(catalog.counts()) != self.counts:
            raise PipelineError(
                "cell bookkeeping diverged from the simplified map: "
                f"{self.counts} tracked vs {list(catalog.counts())} actual"
            )
        final_cell_keys = []
        for dim in range(self.n + 1):
            table = {}
            for cell in catalog.cells(dim):
                old = survivors[cell.canonical_dart]
                table[cell.canonical_dart] = self.keys[dim][self.uf[dim].root(old)]
            final_cell_keys.append(table)
        log = OperationLog(
            dimension=self.n,
            initial_darts=self.n0,
            initial_fingerprint=self.initial_fingerprint,
            records=list(self.records),
            final_survivors=tuple(survivors),
            final_cell_keys=final_cell_keys,
            final_fingerprint=fingerprint(final),
        )
        return signed, log


def _verify_sign_rule(signed: SignedGMap) -> None:
    """Check the flip/equal sign rule on every non-free link of the map."""
    g = signed.base
    n = g.dimension
    for i in range(n + 1):
        sg = signed.sg[i]
        for j in range(n + 1):
            if j == i:
                continue
            row = g.alpha[j]
            want = -1 if j < i else 1
            for d in range(g.num_darts):
                e = row[d]
                if e != d and sg[d] * sg[e] != want:
                    raise PipelineError(
                        f"final sign table violates the sign rule at "
                        f"dimension {i}, link alpha_{j}({d})"
                    )


def _coerce_signed(g) -> SignedGMap:
    if isinstance(g, SignedGMap):
        return g
    return assign_signs(g)


def remove_i_cells(g, i: int):
    """One removal sweep at dimension i; returns (signed map, log)."""
    signed = _coerce_signed(g)
    n = signed.base.dimension
    if not 0 <= i < n:
        raise ValueError(f"removal sweeps run at dimensions 0..{n - 1}, got {i}")
    reducer = _Reducer(signed)
    reducer.run_phase(i, "removal")
    return reducer.finalize()


def contract_i_cells(g, i: int):
    """One contraction sweep at dimension i; returns (signed map, log)."""
    signed = _coerce_signed(g)
    n = signed.base.dimension
    if not 1 <= i <= n:
        raise ValueError(f"contraction sweeps run at dimensions 1..{n}, got {i}")
    reducer = _Reducer(signed)
    reducer.run_phase(i, "contraction")
    return reducer.finalize()


def simplify(g, removal_only: bool = False, contraction_first: bool = False):
    """Full simplification: removal sweeps top-down, contractions bottom-up.

    Accepts a GMap (signs are assigned with default seeds) or a SignedGMap
    whose signs are taken as given.  Returns (signed map, log); the signs of
    the result are the inherited running signs, so incidence numbers of the
    simplified map line up with the operation records.
    """
    signed = _coerce_signed(g)
    n = signed.base.dimension
    reducer = _Reducer(signed)

    def removals():
        for i in range(n - 1, -1, -1):
            reducer.run_phase(i, "removal")

    def contractions():
        for i in range(1, n + 1):
            reducer.run_phase(i, "contraction")

    if removal_only:
        removals()
    elif contraction_first:
        contractions()
        removals()
    else:
        removals()
        contractions()
    return reducer.finalize()


# -- replay ------------------------------------------------------------------


def replay(original: GMap, log: OperationLog) -> GMap:
    """Re-apply a log to the map it was recorded on; returns the final map.

    Verifies fingerprints on both ends and the cell structure of every
    step, so a log paired with the wrong map fails loudly instead of
    producing a plausible-looking result.
    """
    return _replay_steps(original, log, len(log.records), check_final=True)


def replay_prefix(original: GMap, log: OperationLog, steps: int) -> GMap:
    """Re-apply only the first `steps` records; returns the intermediate map.

    Runs the same per-record checks as replay(); the final-state stamps are
    only compared when the whole log is replayed.  Useful for examining the
    state of a recorded run after any accepted operation.
    """
    if not 0 <= steps <= len(log.records):
        raise ValueError(
            f"steps must lie in 0..{len(log.records)}, got {steps}"
        )
    return _replay_steps(
        original, log, steps, check_final=steps == len(log.records)
    )


def _replay_steps(original: GMap, log: OperationLog, steps: int, check_final: bool) -> GMap:
    if fingerprint(original) != log.initial_fingerprint:
        raise LogMismatch("log was recorded on a different initial map")
    n = original.dimension
    alpha = original.to_lists()
    alive = bytearray(b"\x01" * original.num_darts)

    def neigh(k, d):
        return alpha[k][d]

    for pos, rec in enumerate(log.records[:steps]):
        cset = set(rec.removed_cell_darts)
        if any(not alive[d] for d in cset):
            raise LogMismatch(f"record {pos} removes darts that are already gone")
        gens = [k for k in range(n + 1) if k != rec.dim]
        if set(_orbit_by(neigh, min(cset), gens)) != cset:
            raise LogMismatch(
                f"record {pos} no longer matches a {rec.dim}-cell of the map"
            )
        flavour = rec.via if rec.kind == "collapse" else rec.kind
        via = rec.dim + 1 if flavour == "removal" else rec.dim - 1
        links = _rewire(alpha, rec.dim, via, cset)
        for d, w in links.items():
            alpha[rec.dim][d] = w
        for d in cset:
            alive[d] = 0
    survivors = [d for d in range(original.num_darts) if alive[d]]
    if check_final and tuple(survivors) != tuple(log.final_survivors):
        raise LogMismatch("surviving darts differ from the recorded run")
    old2new = {d: k for k, d in enumerate(survivors)}
    rows = [[old2new[alpha[k][d]] for d in survivors] for k in range(n + 1)]
    final = GMap(n, rows)
    if check_final and fingerprint(final) != log.final_fingerprint:
        raise LogMismatch("replayed map does not match the recorded result")
    return final
